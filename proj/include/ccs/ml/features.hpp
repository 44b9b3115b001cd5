#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ccs/doc/document.hpp"

namespace ccs::ml {

inline constexpr int kFeatureSchemaVersion = 1;
inline constexpr std::size_t kBaseFeatureCount = 16;

enum Direction : int { kAbove = 0, kBelow = 1, kLeft = 2, kRight = 3 };

/// Nearest cell id in each direction, indexed by Direction.
using Neighbors = std::array<std::optional<int>, 4>;

/// Names of the base feature columns, in column order.
const std::vector<std::string>& base_feature_names();

/// Row-major feature matrix.
struct FeatureMatrix {
    std::size_t cols = 0;
    std::vector<float> data;

    std::size_t rows() const { return cols ? data.size() / cols : 0; }
    const float* row(std::size_t r) const { return data.data() + r * cols; }
    float at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
};

/// For each cell, the closest cell (by centre distance) whose centre lies in
/// the direction's cone and whose projection overlaps. Ties go to the lower id.
std::vector<Neighbors> neighbor_graph(const doc::ParsedPage& page);

/// Fraction of non-whitespace code points that are ASCII digits.
double numeric_fraction(std::string_view text);

/// Base features, one row per cell in id order.
FeatureMatrix extract_features(const doc::ParsedPage& page);
FeatureMatrix extract_features(const doc::ParsedPage& page, const std::vector<Neighbors>& graph);

/// Appends one one-hot block per direction holding the neighbour's label
/// index (all zeros when there is no neighbour).
FeatureMatrix with_neighbor_labels(const FeatureMatrix& base, const std::vector<Neighbors>& graph,
                                   const std::vector<int>& labels, std::size_t n_labels);

}  // namespace ccs::ml
