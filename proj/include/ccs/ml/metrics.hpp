#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ccs/doc/labels.hpp"
#include "ccs/json_io.hpp"

namespace ccs::ml {

/// Confusion matrix M[true][predicted] with per-label counts.
/// recall = tp / (tp + fn), precision = tp / (tp + fp).
struct Metrics {
    std::vector<std::string> labels;
    std::vector<std::vector<long long>> confusion;
    std::vector<long long> tp, fp, fn;
    std::vector<std::optional<double>> recall;     // undefined without support
    std::vector<std::optional<double>> precision;  // undefined when never predicted
    double macro_recall = 0;
    double macro_precision = 0;
    double macro_f1 = 0;
    int averaged_labels = 0;

    Json to_json() const;
};

/// Labels with support enter the macro averages; a supported label that is
/// never predicted counts with precision 0. Macro F1 = 2PR / (P + R).
Metrics metrics_from_confusion(const std::vector<std::vector<long long>>& confusion,
                               const std::vector<std::string>& labels);

/// Throws shape-error on length mismatch and unknown-label for names outside
/// the label set.
Metrics evaluate(const std::vector<std::string>& truth, const std::vector<std::string>& predicted,
                 const doc::LabelSet& labels);

}  // namespace ccs::ml
