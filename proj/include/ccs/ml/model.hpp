#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "ccs/doc/document.hpp"
#include "ccs/doc/labels.hpp"
#include "ccs/json_io.hpp"
#include "ccs/ml/forest.hpp"

namespace ccs::ml {

inline constexpr std::string_view kModelSchema = "rf-model.v1";

struct PagePrediction {
    int page_number = 1;
    std::vector<int> label;          // index into the model's label set, by cell id
    std::vector<double> confidence;  // vote fraction of the final stage
    bool operator==(const PagePrediction&) const = default;
};

struct TrainingInfo {
    std::uint64_t seed = 0;
    int pages = 0;
    int cells = 0;
    bool operator==(const TrainingInfo&) const = default;
};

/// Template-specific classifier: stage 0 sees base features, stage s > 0
/// additionally sees one-hot labels of the four neighbours as predicted by
/// stage s - 1.
class TemplateModel {
public:
    /// Every cell of every page must carry a label from `labels`.
    /// Neighbour labels for training refinement stages come from out-of-fold
    /// predictions of the previous stage, never from the ground truth.
    static TemplateModel train(const std::vector<doc::ParsedPage>& pages, const doc::LabelSet& labels,
                               const ForestConfig& cfg);

    const doc::LabelSet& labels() const { return labels_; }
    const std::vector<RandomForest>& stages() const { return stages_; }
    const ForestConfig& config() const { return config_; }
    const TrainingInfo& training() const { return training_; }
    int feature_schema_version() const { return feature_schema_version_; }

    /// Runs stages 0..last_stage (all stages when negative).
    PagePrediction predict(const doc::ParsedPage& page, int last_stage = -1) const;
    doc::DocumentLabels predict(const doc::ParsedDocument& doc, int last_stage = -1) const;

    Json to_json() const;
    std::string serialize() const;
    static TemplateModel from_json(const JsonCursor& c);
    static TemplateModel deserialize(std::string_view bytes);

    bool operator==(const TemplateModel&) const = default;

private:
    doc::LabelSet labels_;
    std::vector<RandomForest> stages_;
    ForestConfig config_;
    TrainingInfo training_;
    int feature_schema_version_ = kFeatureSchemaVersion;
};

/// Label indices of the cells of `page` (by id); throws unknown-label or
/// missing-label.
std::vector<int> label_indices(const doc::ParsedPage& page, const doc::LabelSet& labels);

}  // namespace ccs::ml
