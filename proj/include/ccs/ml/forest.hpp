#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "ccs/json_io.hpp"
#include "ccs/ml/features.hpp"

namespace ccs::ml {

struct ForestConfig {
    int n_trees = 100;
    int max_depth = 0;  // 0: unlimited
    int min_leaf = 2;
    std::uint64_t seed = 42;
    int n_refinement_stages = 2;
    int folds = 5;
    unsigned threads = 1;
    /// Optional per-label weights in the impurity; empty means uniform.
    std::vector<double> class_weights;

    void check() const;  // throws invalid-argument
    bool operator==(const ForestConfig&) const = default;
};

Json to_json(const ForestConfig& cfg);
ForestConfig forest_config_from_json(const JsonCursor& c);

/// CART tree in struct-of-arrays form. feature[i] < 0 marks a leaf whose
/// class is value[i]; otherwise rows with x[feature] <= threshold go left.
struct DecisionTree {
    std::vector<int> feature;
    std::vector<float> threshold;
    std::vector<int> left, right;
    std::vector<int> value;

    int predict(const float* row) const;
    std::size_t depth() const;
    bool operator==(const DecisionTree&) const = default;
};

class RandomForest {
public:
    /// Bagged Gini trees with ceil(sqrt(F)) candidate features per split.
    /// Tree t uses seed derive_seed(seed, t), so the result does not depend
    /// on cfg.threads.
    static RandomForest train(const FeatureMatrix& x, const std::vector<int>& y, std::size_t n_labels,
                              const ForestConfig& cfg, std::uint64_t seed);

    std::size_t n_features() const { return n_features_; }
    std::size_t n_labels() const { return n_labels_; }
    const std::vector<DecisionTree>& trees() const { return trees_; }

    /// Vote count per label.
    std::vector<int> votes(const float* row) const;
    /// Majority label (lowest index on ties) and its vote fraction.
    std::pair<int, double> predict(const float* row) const;

    Json to_json() const;
    static RandomForest from_json(const JsonCursor& c);

    bool operator==(const RandomForest&) const = default;

private:
    std::size_t n_features_ = 0;
    std::size_t n_labels_ = 0;
    std::vector<DecisionTree> trees_;
};

}  // namespace ccs::ml
