#include "ccs/ml/metrics.hpp"

#include "ccs/error.hpp"

namespace ccs::ml {

Metrics metrics_from_confusion(const std::vector<std::vector<long long>>& confusion,
                               const std::vector<std::string>& labels) {
    const std::size_t n = labels.size();
    if (confusion.size() != n) throw Error(errc::kShapeError, "confusion matrix must be square over the label set");
    for (const auto& row : confusion) {
        if (row.size() != n) throw Error(errc::kShapeError, "confusion matrix must be square over the label set");
        for (long long v : row) {
            if (v < 0) throw Error(errc::kInvalidArgument, "confusion counts must be non-negative");
        }
    }
    Metrics m;
    m.labels = labels;
    m.confusion = confusion;
    m.tp.assign(n, 0);
    m.fp.assign(n, 0);
    m.fn.assign(n, 0);
    m.recall.assign(n, std::nullopt);
    m.precision.assign(n, std::nullopt);
    double sum_r = 0, sum_p = 0;
    for (std::size_t l = 0; l < n; ++l) {
        m.tp[l] = confusion[l][l];
        for (std::size_t k = 0; k < n; ++k) {
            if (k == l) continue;
            m.fn[l] += confusion[l][k];
            m.fp[l] += confusion[k][l];
        }
        if (m.tp[l] + m.fn[l] > 0) m.recall[l] = static_cast<double>(m.tp[l]) / static_cast<double>(m.tp[l] + m.fn[l]);
        if (m.tp[l] + m.fp[l] > 0) {
            m.precision[l] = static_cast<double>(m.tp[l]) / static_cast<double>(m.tp[l] + m.fp[l]);
        }
        if (m.recall[l]) {
            sum_r += *m.recall[l];
            sum_p += m.precision[l].value_or(0.0);
            ++m.averaged_labels;
        }
    }
    if (m.averaged_labels > 0) {
        m.macro_recall = sum_r / m.averaged_labels;
        m.macro_precision = sum_p / m.averaged_labels;
        const double s = m.macro_recall + m.macro_precision;
        m.macro_f1 = s > 0 ? 2 * m.macro_recall * m.macro_precision / s : 0.0;
    }
    return m;
}

Metrics evaluate(const std::vector<std::string>& truth, const std::vector<std::string>& predicted,
                 const doc::LabelSet& labels) {
    if (truth.size() != predicted.size()) {
        throw Error(errc::kShapeError, "truth has " + std::to_string(truth.size()) + " labels, prediction has " +
                                           std::to_string(predicted.size()));
    }
    const std::size_t n = labels.size();
    std::vector<std::vector<long long>> confusion(n, std::vector<long long>(n, 0));
    auto index = [&](const std::string& name) {
        auto i = labels.index_of(name);
        if (!i) throw Error(errc::kUnknownLabel, "label '" + name + "' is not in the label set");
        return *i;
    };
    for (std::size_t i = 0; i < truth.size(); ++i) ++confusion[index(truth[i])][index(predicted[i])];
    return metrics_from_confusion(confusion, labels.names());
}

Json Metrics::to_json() const {
    Json per = Json::array();
    for (std::size_t l = 0; l < labels.size(); ++l) {
        per.push_back({{"label", labels[l]},
                       {"tp", tp[l]},
                       {"fp", fp[l]},
                       {"fn", fn[l]},
                       {"recall", recall[l] ? Json(*recall[l]) : Json()},
                       {"precision", precision[l] ? Json(*precision[l]) : Json()}});
    }
    return {{"labels", labels},
            {"confusion", confusion},
            {"per_label", std::move(per)},
            {"macro_recall", macro_recall},
            {"macro_precision", macro_precision},
            {"macro_f1", macro_f1}};
}

}  // namespace ccs::ml
