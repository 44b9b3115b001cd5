#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ccs/doc/document.hpp"
#include "ccs/doc/labels.hpp"

namespace ccs::doc {

struct Violation {
    int page_number = 0;             // 0 when the violation is document-level
    std::optional<int> cell_id;
    std::string rule;                // short stable identifier, e.g. "inverted-bbox"
    std::string message;

    bool operator==(const Violation&) const = default;
};

/// Page-rectangle overhang tolerated for cell boxes, in points.
inline constexpr double kPageOverhangTolerance = 2.0;

/// Checks every ParsedDocument invariant; never throws. When `labels` is given,
/// cell labels must belong to it.
std::vector<Violation> validate(const ParsedDocument& doc, const LabelSet* labels = nullptr);
std::vector<Violation> validate_page(const ParsedPage& page, const LabelSet* labels = nullptr);
std::vector<Violation> validate(const StructuredDocument& doc, const std::vector<int>* valid_pages = nullptr);

std::string to_string(const Violation& v);

}  // namespace ccs::doc
