#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "ccs/doc/document.hpp"

namespace ccs::synth {

struct FontStyle {
    bool bold = false;
    bool italic = false;
};

/// Width in points of `text` (UTF-8) set in the built-in Helvetica faces.
double text_width(std::string_view text, double size);

/// Small PDF producer for test fixtures and synthetic corpora. Writes a
/// classic cross-reference table, the four Helvetica faces with explicit
/// /Widths, ruling lines, filled rectangles and grey image XObjects.
class PdfWriter {
public:
    struct Options {
        bool compress = false;
        /// Adds an /Encrypt entry to the trailer (content stays readable).
        bool encrypt = false;
    };

    PdfWriter() = default;
    explicit PdfWriter(Options opts) : opts_(opts) {}

    /// Returns the 0-based page index.
    std::size_t add_page(double width = 612, double height = 792);
    /// One text-showing operator at baseline (x, y).
    void text(std::size_t page, double x, double y, double size, std::string_view text, FontStyle style = {});
    /// Same, but one operator per glyph.
    void text_per_glyph(std::size_t page, double x, double y, double size, std::string_view text, FontStyle style = {});
    void line(std::size_t page, double x0, double y0, double x1, double y1, double width = 0.5);
    void fill_rect(std::size_t page, double x, double y, double w, double h);
    void image(std::size_t page, double x, double y, double w, double h);

    std::string bytes() const;

private:
    struct Page {
        double width, height;
        std::string content;
        int images = 0;
    };
    Options opts_;
    std::vector<Page> pages_;
};

}  // namespace ccs::synth
