#include "ccs/doc/validate.hpp"

#include <set>

namespace ccs::doc {

namespace {

bool has_line_break(const std::string& s) {
    for (std::size_t i = 0; i < s.size(); ++i) {
        unsigned char c = static_cast<unsigned char>(s[i]);
        if (c == '\n' || c == '\r' || c == '\v' || c == '\f') return true;
        // U+2028 / U+2029 (E2 80 A8 / E2 80 A9)
        if (c == 0xE2 && i + 2 < s.size() && static_cast<unsigned char>(s[i + 1]) == 0x80 &&
            (static_cast<unsigned char>(s[i + 2]) == 0xA8 || static_cast<unsigned char>(s[i + 2]) == 0xA9)) {
            return true;
        }
    }
    return false;
}

void add(std::vector<Violation>& out, int page, std::optional<int> cell, std::string rule, std::string msg) {
    out.push_back({page, cell, std::move(rule), std::move(msg)});
}

}  // namespace

std::vector<Violation> validate_page(const ParsedPage& page, const LabelSet* labels) {
    std::vector<Violation> out;
    const int pn = page.geometry.page_number;
    const auto& g = page.geometry;
    if (!(std::isfinite(g.width) && g.width > 0) || !(std::isfinite(g.height) && g.height > 0)) {
        add(out, pn, std::nullopt, "page-geometry", "page width and height must be positive");
    }
    if (pn < 1) add(out, pn, std::nullopt, "page-number", "page numbers are 1-based");

    for (std::size_t i = 0; i < page.cells.size(); ++i) {
        const TextCell& c = page.cells[i];
        if (c.id != static_cast<int>(i)) {
            add(out, pn, c.id, "cell-id", "cell ids must be dense 0..n-1 in order; expected " + std::to_string(i));
        }
        const BBox& b = c.bbox;
        if (!b.finite()) {
            add(out, pn, c.id, "non-finite-bbox", "cell bbox has non-finite coordinates");
            continue;
        }
        if (!(b.x0 < b.x1) || !(b.y0 < b.y1)) {
            add(out, pn, c.id, "inverted-bbox", "cell bbox must satisfy x0 < x1 and y0 < y1");
        }
        const double tol = kPageOverhangTolerance;
        bool intersects = std::max(b.x0, b.x1) > -tol && std::min(b.x0, b.x1) < g.width + tol &&
                          std::max(b.y0, b.y1) > -tol && std::min(b.y0, b.y1) < g.height + tol;
        if (!intersects) add(out, pn, c.id, "off-page", "cell bbox does not intersect the page rectangle");
        if (has_line_break(c.text)) add(out, pn, c.id, "multi-line", "cell text contains a line break");
        if (!(std::isfinite(c.style.font_size) && c.style.font_size >= 0)) {
            add(out, pn, c.id, "font-size", "font size must be finite and non-negative");
        }
        if (labels && c.label && !labels->contains(*c.label)) {
            add(out, pn, c.id, "unknown-label", "label '" + *c.label + "' is not in the label set");
        }
    }
    for (std::size_t i = 0; i < page.paths.size(); ++i) {
        const auto& p = page.paths[i];
        if (!std::isfinite(p.a.x) || !std::isfinite(p.a.y) || !std::isfinite(p.b.x) || !std::isfinite(p.b.y)) {
            add(out, pn, std::nullopt, "non-finite-path", "path " + std::to_string(i) + " has non-finite coordinates");
        }
    }
    return out;
}

std::vector<Violation> validate(const ParsedDocument& doc, const LabelSet* labels) {
    std::vector<Violation> out;
    if (doc.schema_version != kSchemaVersion) {
        add(out, 0, std::nullopt, "schema-version", "unsupported schema version " + std::to_string(doc.schema_version));
    }
    for (std::size_t i = 0; i < doc.pages.size(); ++i) {
        const int pn = doc.pages[i].geometry.page_number;
        const int prev = i == 0 ? 0 : doc.pages[i - 1].geometry.page_number;
        if (pn > prev + 1) {
            add(out, pn, std::nullopt, "page-gap",
                "page gap: page " + std::to_string(pn) + " follows " + (i == 0 ? "document start" : "page " + std::to_string(prev)));
        } else if (pn != prev + 1) {
            add(out, pn, std::nullopt, "page-order", "page " + std::to_string(pn) + " is out of order");
        }
        auto page_violations = validate_page(doc.pages[i], labels);
        out.insert(out.end(), page_violations.begin(), page_violations.end());
    }
    return out;
}

std::vector<Violation> validate(const StructuredDocument& doc, const std::vector<int>* valid_pages) {
    std::vector<Violation> out;
    std::set<int> pages;
    if (valid_pages) pages.insert(valid_pages->begin(), valid_pages->end());
    auto check_prov = [&](const std::vector<Provenance>& prov, const std::string& where) {
        if (prov.empty()) add(out, 0, std::nullopt, "missing-prov", where + " has no provenance");
        for (const auto& p : prov) {
            if (!p.bbox.well_formed()) add(out, p.page, std::nullopt, "inverted-bbox", where + " has an invalid prov bbox");
            if (valid_pages ? !pages.contains(p.page) : p.page < 1) {
                add(out, p.page, std::nullopt, "prov-page", where + " references an invalid page");
            }
        }
    };
    for (std::size_t i = 0; i < doc.main_text.size(); ++i) {
        const auto& o = doc.main_text[i];
        check_prov(o.prov, "main-text[" + std::to_string(i) + "]");
        if (o.type.empty()) add(out, 0, std::nullopt, "missing-type", "main-text[" + std::to_string(i) + "] has no type");
    }
    for (std::size_t i = 0; i < doc.tables.size(); ++i) check_prov(doc.tables[i].prov, "tables[" + std::to_string(i) + "]");
    for (std::size_t i = 0; i < doc.images.size(); ++i) check_prov(doc.images[i].prov, "images[" + std::to_string(i) + "]");
    return out;
}

std::string to_string(const Violation& v) {
    std::string s = "page " + std::to_string(v.page_number);
    if (v.cell_id) s += " cell " + std::to_string(*v.cell_id);
    return s + " [" + v.rule + "] " + v.message;
}

}  // namespace ccs::doc
