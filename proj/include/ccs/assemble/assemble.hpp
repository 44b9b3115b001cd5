#pragma once

#include <map>
#include <string>
#include <vector>

#include "ccs/doc/document.hpp"
#include "ccs/json_io.hpp"

namespace ccs::assemble {

struct ReadingOrderConfig {
    /// A horizontal gap separates bands only when it exceeds this multiple of
    /// the smaller of the two cell heights bordering it, so ordinary line
    /// spacing inside aligned columns is not a cut.
    double min_row_gap_factor = 0.5;
    /// Vertical gaps must be wider than this many points.
    double min_column_gap = 0.0;
};

/// Cell ids of the page in reading order. Recursive XY-cut. Cells are
/// grouped into bands whose vertical extents chain together; the set is cut
/// at every band gap wider than the row-gap threshold unless the bands on
/// both sides share an inner column gutter. Without such a cut it splits at
/// the widest vertical gap (leftmost on ties), and a leaf is ordered by (top
/// descending, x0, id). Independent of the in-memory cell order.
std::vector<int> reading_order(const doc::ParsedPage& page, const ReadingOrderConfig& cfg = {});

/// A cell positioned in the document-wide reading order.
struct OrderedCell {
    int page = 1;
    const doc::TextCell* cell = nullptr;
    std::string label;
};

/// Temporary object: a maximal run of same-label cells.
struct LabeledRun {
    std::string label;
    std::string text;
    std::vector<doc::Provenance> prov;
    std::vector<OrderedCell> cells;
};

/// Joins text with single spaces; a trailing "-" followed by a lowercase
/// start is removed and the words are joined. Throws missing-label for an
/// empty label.
std::vector<LabeledRun> merge_by_label(const std::vector<OrderedCell>& cells);

/// Appends `next` to `text` following the dehyphenation rule above.
void join_text(std::string& text, const std::string& next);

struct AssemblyConfig {
    ReadingOrderConfig reading_order;
    /// Label name to main-text type; labels not listed keep their name.
    std::map<std::string, std::string> type_names{{"subtitle", "subtitle-level-1"}, {"text", "paragraph"}};
    /// Label name to description field (title, authors, affiliations,
    /// abstract). Only objects starting on page 1 fill the description; the
    /// first one wins, later ones stay in main-text.
    std::map<std::string, std::string> description_fields{
        {"title", "title"}, {"author", "authors"}, {"affiliation", "affiliations"}, {"abstract", "abstract"}};
    std::string table_label = "table";
    std::string picture_label = "picture";
};

Json to_json(const AssemblyConfig& cfg);
AssemblyConfig assembly_config_from_json(const JsonCursor& c);

/// Rows by baseline clustering, columns by merging overlapping x-intervals.
std::vector<std::vector<std::string>> table_grid(const std::vector<OrderedCell>& cells);

/// Builds the structured document. Labels come from `labels` when given,
/// otherwise from the cells themselves. Throws missing-label naming the page
/// and cell when a cell has none, shape-error when a page's label count
/// differs from its cell count.
doc::StructuredDocument assemble(const doc::ParsedDocument& doc, const doc::DocumentLabels* labels = nullptr,
                                 const AssemblyConfig& cfg = {});

}  // namespace ccs::assemble
