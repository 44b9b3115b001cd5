#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ccs::doc {

struct LabelDef {
    std::string name;
    std::string color;  // "#rrggbb"
    bool operator==(const LabelDef&) const = default;
};

/// Ordered label vocabulary of a collection. Order matters: it fixes one-hot
/// layouts in the feature space and tie-breaking in prediction.
class LabelSet {
public:
    LabelSet() = default;
    explicit LabelSet(std::vector<LabelDef> labels);

    /// title, author, subtitle, text, picture, table, caption, list.
    static LabelSet defaults();
    /// The six labels of the journal-template experiments.
    static LabelSet six_labels();
    static LabelSet from_names(const std::vector<std::string>& names);

    std::size_t size() const { return labels_.size(); }
    bool empty() const { return labels_.empty(); }
    const std::vector<LabelDef>& labels() const { return labels_; }
    const LabelDef& operator[](std::size_t i) const { return labels_[i]; }
    std::optional<std::size_t> index_of(std::string_view name) const;
    bool contains(std::string_view name) const { return index_of(name).has_value(); }
    std::vector<std::string> names() const;

    bool operator==(const LabelSet&) const = default;

private:
    std::vector<LabelDef> labels_;
};

/// Deterministic palette colour for a label that has no assigned colour.
std::string palette_color(std::string_view name, std::size_t index);

}  // namespace ccs::doc
