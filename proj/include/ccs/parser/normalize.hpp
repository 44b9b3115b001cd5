#pragma once

#include <string>
#include <vector>

#include "ccs/doc/document.hpp"
#include "ccs/json_io.hpp"
#include "ccs/parser/snippet.hpp"

namespace ccs::parser {

/// Thresholds for turning raw snippets into single-line cells. Gap thresholds
/// are multiples of the median glyph width of the line.
struct NormalizationConfig {
    double merge_gap_em = 1.0;
    double split_gap_em = 2.0;
    /// Gap (in median glyph widths) at which a space is inserted between
    /// merged fragments that carry no whitespace of their own.
    double word_space_em = 0.4;
    /// Snippets share a line while their baselines stay within this many
    /// times the smaller font size.
    double baseline_tolerance = 0.25;
    /// Hard cap on cell width as a fraction of page width; 0 disables it.
    double max_cell_width_fraction = 0.0;
    /// A vertical rule splits a cell when it covers at least this fraction of
    /// the cell height.
    double rule_overlap_fraction = 0.5;
    /// ECMAScript patterns matched against whole words.
    std::vector<std::string> list_marker_patterns = default_list_markers();

    static std::vector<std::string> default_list_markers();
    void check() const;  // throws invalid-argument
};

Json to_json(const NormalizationConfig& cfg);
NormalizationConfig normalization_config_from_json(const JsonCursor& c);

struct NormalizationReport {
    int dropped_degenerate = 0;
    int dropped_off_page = 0;
    int rule_splits = 0;
    int list_splits = 0;
    int gap_splits = 0;
    int width_splits = 0;

    NormalizationReport& operator+=(const NormalizationReport& o);
};

/// Builds the cells of one page. Pure; ids follow raster order.
doc::ParsedPage normalize_cells(const PageSnippets& page, const NormalizationConfig& cfg,
                                NormalizationReport* report = nullptr);

}  // namespace ccs::parser
