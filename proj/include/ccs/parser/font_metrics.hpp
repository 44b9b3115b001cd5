#pragma once

#include <array>
#include <string_view>

namespace ccs::parser {

/// Advance widths (1/1000 em) of the Helvetica family for codes 32..126.
/// Used when a simple font carries no /Widths array, and by the fixture PDF
/// writer so generated files round-trip exactly.
inline constexpr std::array<int, 95> kHelveticaWidths = {
    278, 278, 355, 556, 556, 889, 667, 191, 333, 333, 389, 584, 278, 333, 278, 278,  // ' '..'/'
    556, 556, 556, 556, 556, 556, 556, 556, 556, 556,                                // 0..9
    278, 278, 584, 584, 584, 556, 1015,                                              // ':'..'@'
    667, 667, 722, 722, 667, 611, 778, 722, 278, 500, 667, 556, 833,                 // A..M
    722, 778, 667, 778, 722, 667, 611, 722, 667, 944, 667, 667, 611,                 // N..Z
    278, 278, 278, 469, 556, 333,                                                    // '['..'`'
    556, 556, 500, 556, 556, 278, 556, 556, 222, 222, 500, 222, 833,                 // a..m
    556, 556, 556, 556, 333, 500, 278, 556, 500, 722, 500, 500, 500,                 // n..z
    334, 260, 334, 584,                                                              // '{'..'~'
};

inline constexpr int kFallbackWidth = 556;

/// Width in 1/1000 em of a code in the Helvetica table (fallback outside 32..126).
constexpr int helvetica_width(unsigned code) {
    return (code >= 32 && code <= 126) ? kHelveticaWidths[code - 32] : kFallbackWidth;
}

}  // namespace ccs::parser
