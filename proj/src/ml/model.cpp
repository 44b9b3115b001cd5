#include "ccs/ml/model.hpp"

#include <algorithm>

#include "ccs/doc/serialize.hpp"
#include "ccs/error.hpp"
#include "ccs/rng.hpp"

namespace ccs::ml {

std::vector<int> label_indices(const doc::ParsedPage& page, const doc::LabelSet& labels) {
    std::vector<int> out(page.cells.size(), -1);
    for (const auto& c : page.cells) {
        if (!c.label) {
            throw Error(errc::kMissingLabel, "page " + std::to_string(page.geometry.page_number) + " cell " +
                                                 std::to_string(c.id) + " has no label");
        }
        auto idx = labels.index_of(*c.label);
        if (!idx) {
            throw Error(errc::kUnknownLabel, "label '" + *c.label + "' on page " +
                                                 std::to_string(page.geometry.page_number) + " cell " +
                                                 std::to_string(c.id) + " is not in the label set");
        }
        out[static_cast<std::size_t>(c.id)] = static_cast<int>(*idx);
    }
    return out;
}

namespace {

struct PageData {
    FeatureMatrix base;
    std::vector<Neighbors> graph;
    std::vector<int> y;
};

FeatureMatrix stage_features(const PageData& p, const std::vector<int>* prev, std::size_t n_labels) {
    return prev ? with_neighbor_labels(p.base, p.graph, *prev, n_labels) : p.base;
}

// Stacks the stage matrices of the selected pages.
void gather(const std::vector<FeatureMatrix>& xs, const std::vector<PageData>& pages, const std::vector<std::size_t>& which,
            FeatureMatrix& x, std::vector<int>& y) {
    x.cols = xs.empty() ? 0 : xs.front().cols;
    x.data.clear();
    y.clear();
    for (std::size_t p : which) {
        x.data.insert(x.data.end(), xs[p].data.begin(), xs[p].data.end());
        y.insert(y.end(), pages[p].y.begin(), pages[p].y.end());
    }
}

std::vector<int> predict_rows(const RandomForest& f, const FeatureMatrix& x) {
    std::vector<int> out(x.rows());
    for (std::size_t r = 0; r < x.rows(); ++r) out[r] = f.predict(x.row(r)).first;
    return out;
}

}  // namespace

TemplateModel TemplateModel::train(const std::vector<doc::ParsedPage>& pages, const doc::LabelSet& labels,
                                   const ForestConfig& cfg) {
    cfg.check();
    if (labels.empty()) throw Error(errc::kInvalidArgument, "label set is empty");
    const std::size_t n_labels = labels.size();

    std::vector<PageData> data;
    std::size_t cells = 0;
    for (const auto& page : pages) {
        PageData d;
        d.y = label_indices(page, labels);
        if (d.y.empty()) continue;
        d.graph = neighbor_graph(page);
        d.base = extract_features(page, d.graph);
        cells += d.y.size();
        data.push_back(std::move(d));
    }
    if (cells == 0) throw Error(errc::kEmptyDataset, "training pages contain no cells");

    TemplateModel model;
    model.labels_ = labels;
    model.config_ = cfg;
    model.training_ = {cfg.seed, static_cast<int>(pages.size()), static_cast<int>(cells)};

    const std::size_t n_pages = data.size();
    const std::size_t folds = std::min<std::size_t>(static_cast<std::size_t>(cfg.folds), n_pages);
    std::vector<std::size_t> perm(n_pages);
    for (std::size_t i = 0; i < n_pages; ++i) perm[i] = i;
    Rng(derive_seed(cfg.seed, 0xF01D)).shuffle(perm);
    std::vector<std::size_t> fold_of(n_pages);
    for (std::size_t i = 0; i < n_pages; ++i) fold_of[perm[i]] = i % std::max<std::size_t>(folds, 1);

    std::vector<std::vector<int>> prev;  // previous stage's out-of-fold labels per page
    std::vector<std::size_t> all(n_pages);
    for (std::size_t i = 0; i < n_pages; ++i) all[i] = i;

    const int stages = cfg.n_refinement_stages + 1;
    for (int s = 0; s < stages; ++s) {
        std::vector<FeatureMatrix> xs(n_pages);
        for (std::size_t p = 0; p < n_pages; ++p) xs[p] = stage_features(data[p], s ? &prev[p] : nullptr, n_labels);

        FeatureMatrix x;
        std::vector<int> y;
        gather(xs, data, all, x, y);
        model.stages_.push_back(RandomForest::train(x, y, n_labels, cfg, derive_seed(cfg.seed, static_cast<std::uint64_t>(s))));
        if (s + 1 == stages) break;

        std::vector<std::vector<int>> next(n_pages);
        if (folds < 2) {
            for (std::size_t p = 0; p < n_pages; ++p) next[p] = predict_rows(model.stages_.back(), xs[p]);
        } else {
            for (std::size_t f = 0; f < folds; ++f) {
                std::vector<std::size_t> train_pages;
                for (std::size_t p = 0; p < n_pages; ++p) {
                    if (fold_of[p] != f) train_pages.push_back(p);
                }
                gather(xs, data, train_pages, x, y);
                const auto seed = derive_seed(cfg.seed, 1000 + static_cast<std::uint64_t>(s) * folds + f);
                RandomForest fold_forest = RandomForest::train(x, y, n_labels, cfg, seed);
                for (std::size_t p = 0; p < n_pages; ++p) {
                    if (fold_of[p] == f) next[p] = predict_rows(fold_forest, xs[p]);
                }
            }
        }
        prev = std::move(next);
    }
    return model;
}

PagePrediction TemplateModel::predict(const doc::ParsedPage& page, int last_stage) const {
    if (feature_schema_version_ != kFeatureSchemaVersion) {
        throw Error(errc::kSchemaMismatch, "model uses feature schema " + std::to_string(feature_schema_version_));
    }
    PagePrediction out;
    out.page_number = page.geometry.page_number;
    if (page.cells.empty()) return out;
    const int last = last_stage < 0 ? static_cast<int>(stages_.size()) - 1
                                    : std::min(last_stage, static_cast<int>(stages_.size()) - 1);
    const auto graph = neighbor_graph(page);
    const FeatureMatrix base = extract_features(page, graph);
    std::vector<int> labels;
    for (int s = 0; s <= last; ++s) {
        const RandomForest& forest = stages_[static_cast<std::size_t>(s)];
        const FeatureMatrix x = s == 0 ? base : with_neighbor_labels(base, graph, labels, labels_.size());
        if (x.cols != forest.n_features()) {
            throw Error(errc::kSchemaMismatch, "stage " + std::to_string(s) + " expects " +
                                                   std::to_string(forest.n_features()) + " features, got " +
                                                   std::to_string(x.cols));
        }
        std::vector<int> next(x.rows());
        out.confidence.assign(x.rows(), 0.0);
        for (std::size_t r = 0; r < x.rows(); ++r) {
            auto [label, conf] = forest.predict(x.row(r));
            next[r] = label;
            out.confidence[r] = conf;
        }
        labels = std::move(next);
    }
    out.label = std::move(labels);
    return out;
}

doc::DocumentLabels TemplateModel::predict(const doc::ParsedDocument& doc, int last_stage) const {
    doc::DocumentLabels out;
    out.doc_id = doc.doc_id;
    for (const auto& page : doc.pages) {
        PagePrediction p = predict(page, last_stage);
        doc::PageLabels pl;
        pl.page_number = p.page_number;
        for (int l : p.label) pl.labels.push_back(labels_[static_cast<std::size_t>(l)].name);
        pl.confidence = p.confidence;
        out.pages.push_back(std::move(pl));
    }
    return out;
}

Json TemplateModel::to_json() const {
    Json stages = Json::array();
    for (const auto& s : stages_) stages.push_back(s.to_json());
    return {{"schema", kModelSchema},
            {"schema_version", doc::kSchemaVersion},
            {"feature_schema_version", feature_schema_version_},
            {"base_features", base_feature_names()},
            {"labels", doc::to_json(labels_)},
            {"config", ml::to_json(config_)},
            {"training", {{"seed", training_.seed}, {"pages", training_.pages}, {"cells", training_.cells}}},
            {"stages", std::move(stages)}};
}

std::string TemplateModel::serialize() const { return to_json().dump() + "\n"; }

TemplateModel TemplateModel::from_json(const JsonCursor& c) {
    c.expect_object();
    auto tag = c.at("schema");
    if (tag.string() != kModelSchema) tag.fail("expected schema '" + std::string(kModelSchema) + "'");
    auto version = c.at("schema_version");
    if (version.integer() != doc::kSchemaVersion) version.fail("unsupported schema_version " + std::to_string(version.integer()));
    TemplateModel m;
    m.feature_schema_version_ = static_cast<int>(c.at("feature_schema_version").integer());
    m.labels_ = doc::label_set_from_json(c.at("labels"));
    m.config_ = forest_config_from_json(c.at("config"));
    auto t = c.at("training");
    m.training_ = {static_cast<std::uint64_t>(t.at("seed").integer()), static_cast<int>(t.at("pages").integer()),
                   static_cast<int>(t.at("cells").integer())};
    auto stages = c.at("stages");
    for (std::size_t i = 0, n = stages.array_size(); i < n; ++i) {
        auto js = stages.at(i);
        RandomForest f = RandomForest::from_json(js);
        const std::size_t expected = kBaseFeatureCount + (i ? 4 * m.labels_.size() : 0);
        if (f.n_labels() != m.labels_.size()) js.fail("stage label count differs from the label set");
        if (f.n_features() != expected) {
            throw Error(errc::kSchemaMismatch, js.path() + ": stage expects " + std::to_string(f.n_features()) +
                                                   " features, schema gives " + std::to_string(expected));
        }
        m.stages_.push_back(std::move(f));
    }
    if (m.stages_.empty()) stages.fail("model has no stages");
    return m;
}

TemplateModel TemplateModel::deserialize(std::string_view bytes) {
    Json j = parse_json(bytes);
    return from_json(JsonCursor(j));
}

}  // namespace ccs::ml
