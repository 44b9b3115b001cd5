#include "ccs/doc/labels.hpp"

#include <cmath>
#include <cstdio>
#include <set>

#include "ccs/error.hpp"

namespace ccs::doc {

namespace {

struct KnownColor {
    std::string_view name;
    std::string_view color;
};

// Annotator palette: title red, author green, affiliation purple, subtitle
// dark red, text yellow, caption orange, picture ivory.
constexpr KnownColor kKnownColors[] = {
    {"title", "#ff0000"},    {"author", "#008000"},   {"affiliation", "#800080"},
    {"subtitle", "#8b0000"}, {"text", "#ffff00"},     {"caption", "#ffa500"},
    {"picture", "#fffff0"},  {"table", "#1e90ff"},    {"list", "#00ced1"},
    {"abstract", "#ffd700"},
};

}  // namespace

std::string palette_color(std::string_view name, std::size_t index) {
    for (const auto& k : kKnownColors) {
        if (k.name == name) return std::string(k.color);
    }
    // Golden-angle hue walk gives distinct, reproducible colours.
    double hue = std::fmod(static_cast<double>(index) * 137.508, 360.0);
    double s = 0.65, v = 0.85;
    double c = v * s;
    double hp = hue / 60.0;
    double x = c * (1 - std::abs(std::fmod(hp, 2.0) - 1));
    double r = 0, g = 0, b = 0;
    if (hp < 1) { r = c; g = x; }
    else if (hp < 2) { r = x; g = c; }
    else if (hp < 3) { g = c; b = x; }
    else if (hp < 4) { g = x; b = c; }
    else if (hp < 5) { r = x; b = c; }
    else { r = c; b = x; }
    double m = v - c;
    char buf[8];
    std::snprintf(buf, sizeof buf, "#%02x%02x%02x", static_cast<int>((r + m) * 255 + 0.5),
                  static_cast<int>((g + m) * 255 + 0.5), static_cast<int>((b + m) * 255 + 0.5));
    return buf;
}

LabelSet::LabelSet(std::vector<LabelDef> labels) : labels_(std::move(labels)) {
    std::set<std::string> seen;
    for (const auto& l : labels_) {
        if (l.name.empty()) throw Error(errc::kInvalidArgument, "label names must be non-empty");
        if (!seen.insert(l.name).second) throw Error(errc::kInvalidArgument, "duplicate label '" + l.name + "'");
    }
}

LabelSet LabelSet::from_names(const std::vector<std::string>& names) {
    std::vector<LabelDef> defs;
    defs.reserve(names.size());
    for (std::size_t i = 0; i < names.size(); ++i) defs.push_back({names[i], palette_color(names[i], i)});
    return LabelSet(std::move(defs));
}

LabelSet LabelSet::defaults() {
    return from_names({"title", "author", "subtitle", "text", "picture", "table", "caption", "list"});
}

LabelSet LabelSet::six_labels() {
    return from_names({"title", "author", "subtitle", "text", "picture", "table"});
}

std::optional<std::size_t> LabelSet::index_of(std::string_view name) const {
    for (std::size_t i = 0; i < labels_.size(); ++i) {
        if (labels_[i].name == name) return i;
    }
    return std::nullopt;
}

std::vector<std::string> LabelSet::names() const {
    std::vector<std::string> out;
    out.reserve(labels_.size());
    for (const auto& l : labels_) out.push_back(l.name);
    return out;
}

}  // namespace ccs::doc
