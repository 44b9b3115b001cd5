#include <algorithm>
#include <map>

#include "ccs/doc/serialize.hpp"
#include "ccs/doc/validate.hpp"
#include "ccs/error.hpp"
#include "ccs/parser/normalize.hpp"
#include "ccs/parser/parser.hpp"
#include "ccs/synth/corpus.hpp"
#include "ccs/synth/pdf_writer.hpp"
#include "doctest.h"
#include "fixtures.hpp"

using namespace ccs;
using testing::snippet;

namespace {

std::string hello_pdf() {
    synth::PdfWriter w;
    const auto p = w.add_page();
    w.text(p, 72, 700, 12, "Hello");
    return w.bytes();
}

// two cells separated by a vertical rule
std::string table_pdf() {
    synth::PdfWriter w;
    const auto p = w.add_page();
    w.text(p, 100, 700, 10, "Alpha");
    w.text(p, 210, 700, 10, "Beta");
    w.line(p, 200, 690, 200, 715);
    return w.bytes();
}

std::string parse_error(std::string_view bytes) {
    try {
        parser::parse_document(bytes);
    } catch (const Error& e) {
        return e.code() + std::string(": ") + e.detail();
    }
    return "";
}

std::map<char32_t, int> char_multiset(const std::vector<std::string>& texts) {
    std::map<char32_t, int> m;
    for (const auto& t : texts) {
        for (char32_t c : parser::utf8_decode(t)) {
            if (c != U' ') ++m[c];
        }
    }
    return m;
}

parser::PageSnippets snippets_page(std::vector<parser::RawSnippet> s, std::vector<doc::PathSegment> paths = {}) {
    parser::PageSnippets p;
    p.geometry = {612, 792, 1};
    p.snippets = std::move(s);
    p.paths = std::move(paths);
    return p;
}

}  // namespace

TEST_CASE("extracting a single text operator") {
    const auto doc = parser::PdfBackend().extract(hello_pdf());
    REQUIRE(doc.pages.size() == 1);
    REQUIRE(doc.pages[0].snippets.size() == 1);
    CHECK(doc.pages[0].snippets[0].text == "Hello");
    CHECK(doc.pages[0].geometry.width == 612);
}

TEST_CASE("an empty page has no snippets") {
    synth::PdfWriter w;
    w.add_page();
    const auto doc = parser::PdfBackend().extract(w.bytes());
    REQUIRE(doc.pages.size() == 1);
    CHECK(doc.pages[0].snippets.empty());
    CHECK(parser::parse_document(w.bytes()).pages[0].cells.empty());
}

TEST_CASE("a ruled two-cell table") {
    const std::string pdf = table_pdf();
    const auto raw = parser::PdfBackend().extract(pdf);
    CHECK(raw.pages[0].snippets.size() >= 2);
    CHECK(raw.pages[0].paths.size() == 1);
    const auto d = parser::parse_document(pdf);
    CHECK(d.pages[0].cells.size() >= 2);
    CHECK(doc::validate(d).empty());
}

TEST_CASE("compressed content streams") {
    synth::PdfWriter w({.compress = true});
    const auto p = w.add_page();
    w.text(p, 72, 700, 12, "Compressed");
    const auto d = parser::parse_document(w.bytes());
    REQUIRE(d.pages[0].cells.size() == 1);
    CHECK(d.pages[0].cells[0].text == "Compressed");
}

TEST_CASE("glyph-by-glyph output becomes one cell") {
    synth::PdfWriter w;
    const auto p = w.add_page();
    w.text_per_glyph(p, 72, 700, 12, "Glyphs arrive one at a time");
    const auto d = parser::parse_document(w.bytes());
    REQUIRE(d.pages[0].cells.size() == 1);
    CHECK(d.pages[0].cells[0].text == "Glyphs arrive one at a time");
}

TEST_CASE("parse errors") {
    SUBCASE("no pages") {
        synth::PdfWriter w;
        CHECK(parse_error(w.bytes()).rfind("parse-failure", 0) == 0);
    }
    SUBCASE("encrypted") {
        synth::PdfWriter w({.encrypt = true});
        w.text(w.add_page(), 72, 700, 12, "secret");
        CHECK(parse_error(w.bytes()).rfind("unsupported-encryption", 0) == 0);
    }
    SUBCASE("not a PDF") { CHECK(parse_error("hello world").rfind("parse-failure", 0) == 0); }
    SUBCASE("corrupt cross-reference table") {
        std::string pdf = hello_pdf();
        const auto xref = pdf.rfind("xref");
        REQUIRE(xref != std::string::npos);
        // clobber the entries and the trailer
        for (std::size_t i = xref; i < pdf.size(); ++i) {
            if (pdf[i] >= '0' && pdf[i] <= '9') pdf[i] = 'x';
        }
        const std::string err = parse_error(pdf);
        CHECK(err.rfind("parse-failure", 0) == 0);
        CHECK(err.find("offset") != std::string::npos);
    }
}

TEST_CASE("parsing is deterministic") {
    const auto sd = synth::make_document(synth::Template::TwoColumn, 3, 11, "det");
    const std::string pdf = synth::render_pdf(sd);
    const auto a = parser::parse_document(pdf);
    const auto b = parser::parse_document(pdf);
    CHECK(a.doc_id == b.doc_id);
    CHECK(doc::serialize(a) == doc::serialize(b));
    parser::ParseConfig threaded;
    threaded.threads = 4;
    CHECK(doc::serialize(parser::parse_document(pdf, threaded)) == doc::serialize(a));
}

TEST_CASE("fragments on one baseline merge") {
    // median glyph width of "Hel"/"lo" at this spacing is 5 pt; gap 0.3 em
    auto page = snippets_page({snippet(100, 700, 115, "Hel"), snippet(116.5, 700, 126.5, "lo")});
    const auto out = parser::normalize_cells(page, {});
    REQUIRE(out.cells.size() == 1);
    CHECK(out.cells[0].text == "Hello");
}

TEST_CASE("a vertical rule splits a cell") {
    auto page = snippets_page({snippet(100, 700, 500, "aaaaaaaaaaaaaaaaaaaaaaaaaaaaaaaaaaaaaaaa")},
                              {{{300, 690}, {300, 715}}});
    parser::NormalizationReport report;
    const auto out = parser::normalize_cells(page, {}, &report);
    REQUIRE(out.cells.size() == 2);
    CHECK(out.cells[0].bbox.x1 <= 300);
    CHECK(out.cells[1].bbox.x0 >= 300);
    CHECK(report.rule_splits == 1);
}

TEST_CASE("normalization rules") {
    SUBCASE("empty input") { CHECK(parser::normalize_cells(snippets_page({}), {}).cells.empty()); }
    SUBCASE("different baselines stay apart") {
        auto page = snippets_page({snippet(100, 700, 150, "upper"), snippet(100, 686, 150, "lower")});
        CHECK(parser::normalize_cells(page, {}).cells.size() == 2);
    }
    SUBCASE("wide gaps separate columns") {
        auto page = snippets_page({snippet(100, 700, 150, "left"), snippet(200, 700, 250, "right")});
        const auto out = parser::normalize_cells(page, {});
        REQUIRE(out.cells.size() == 2);
        CHECK(out.cells[0].text == "left");
        CHECK(out.cells[1].text == "right");
    }
    SUBCASE("list markers start a new cell") {
        auto page = snippets_page({snippet(100, 700, 300, "(a) first item (b) second item")});
        const auto out = parser::normalize_cells(page, {});
        REQUIRE(out.cells.size() == 2);
        CHECK(out.cells[0].text == "(a) first item");
        CHECK(out.cells[1].text == "(b) second item");
    }
    SUBCASE("degenerate snippets are dropped and counted") {
        auto bad = snippet(100, 700, 100, "x");
        parser::NormalizationReport report;
        CHECK(parser::normalize_cells(snippets_page({bad}), {}, &report).cells.empty());
        CHECK(report.dropped_degenerate == 1);
    }
    SUBCASE("ids follow raster order") {
        auto page = snippets_page({snippet(300, 600, 350, "third"), snippet(100, 700, 150, "first"),
                                   snippet(300, 700, 350, "second")});
        const auto out = parser::normalize_cells(page, {});
        REQUIRE(out.cells.size() == 3);
        CHECK(out.cells[0].text == "first");
        CHECK(out.cells[1].text == "second");
        CHECK(out.cells[2].text == "third");
        for (int i = 0; i < 3; ++i) CHECK(out.cells[static_cast<std::size_t>(i)].id == i);
    }
    SUBCASE("invalid thresholds are rejected") {
        parser::NormalizationConfig cfg;
        cfg.merge_gap_em = 3;
        CHECK_THROWS_AS(cfg.check(), Error);
    }
}

TEST_CASE("recorded snippets replay through the fixture backend") {
    parser::ExtractedDocument ex;
    ex.pages.push_back(snippets_page({snippet(100, 700, 115, "Hel"), snippet(116.5, 700, 126.5, "lo")}));
    const std::string json = parser::serialize(ex);
    CHECK(json.find("raw-snippets.v1") != std::string::npos);
    const parser::FixtureBackend fixture;
    const auto d = parser::parse_document(json, {}, &fixture);
    REQUIRE(d.pages.size() == 1);
    REQUIRE(d.pages[0].cells.size() == 1);
    CHECK(d.pages[0].cells[0].text == "Hello");
}

TEST_CASE("parser properties on synthetic journals") {
    for (auto layout : {synth::Template::SingleColumn, synth::Template::TwoColumn}) {
        const auto sd = synth::make_document(layout, 4, 3, "props");
        const std::string pdf = synth::render_pdf(sd);
        const auto raw = parser::PdfBackend().extract(pdf);
        parser::NormalizationReport report;
        const auto d = parser::parse_document(pdf, {}, nullptr, "", &report);
        CHECK(doc::validate(d).empty());

        std::vector<std::string> in, out;
        for (const auto& p : raw.pages) {
            for (const auto& s : p.snippets) in.push_back(s.text);
        }
        for (std::size_t i = 0; i < d.pages.size(); ++i) {
            const auto& page = d.pages[i];
            for (const auto& c : page.cells) {
                out.push_back(c.text);
                CHECK(c.text.find('\n') == std::string::npos);
                // no vertical rule runs through a cell
                for (const auto& path : page.paths) {
                    if (!path.vertical()) continue;
                    const double lo = std::min(path.a.y, path.b.y), hi = std::max(path.a.y, path.b.y);
                    const double covered = std::min(hi, c.bbox.y1) - std::max(lo, c.bbox.y0);
                    const bool inside = path.a.x > c.bbox.x0 + 0.5 && path.a.x < c.bbox.x1 - 0.5;
                    CHECK_FALSE((inside && covered >= 0.8 * c.bbox.height()));
                }
            }
        }
        CHECK(char_multiset(in) == char_multiset(out));
    }
}
