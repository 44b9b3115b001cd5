#include <algorithm>
#include <map>

#include "ccs/assemble/assemble.hpp"
#include "ccs/doc/serialize.hpp"
#include "ccs/doc/validate.hpp"
#include "ccs/error.hpp"
#include "ccs/parser/parser.hpp"
#include "ccs/rng.hpp"
#include "ccs/synth/corpus.hpp"
#include "doctest.h"
#include "fixtures.hpp"

using namespace ccs;
using testing::cell;
using testing::document_of;
using testing::page_of;

namespace {

std::string error_code(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    return "";
}

std::string no_spaces(std::string s) {
    std::erase_if(s, [](char c) { return c == ' ' || c == '-'; });
    std::sort(s.begin(), s.end());
    return s;
}

doc::ParsedDocument synth_labeled(synth::Template layout, int pages, std::uint64_t seed) {
    const auto sd = synth::make_document(layout, pages, seed, "sample");
    const auto parsed = parser::parse_document(synth::render_pdf(sd));
    return doc::with_labels(parsed, synth::oracle_labels(parsed, sd));
}

}  // namespace

TEST_CASE("reading order") {
    SUBCASE("single cell") { CHECK(assemble::reading_order(page_of({cell(0, 10, 10, 50, 20)})) == std::vector<int>{0}); }
    SUBCASE("empty page") { CHECK(assemble::reading_order(page_of({})).empty()); }
    SUBCASE("two columns read left column first") {
        // ids interleave the columns so id order is not the answer
        const auto page = page_of({cell(0, 72, 700, 290, 710), cell(1, 322, 700, 540, 710), cell(2, 72, 688, 290, 698),
                                   cell(3, 322, 688, 540, 698), cell(4, 72, 676, 290, 686), cell(5, 322, 676, 540, 686)});
        CHECK(assemble::reading_order(page) == std::vector<int>{0, 2, 4, 1, 3, 5});
    }
    SUBCASE("full-width title above two columns") {
        const auto page = page_of({cell(0, 72, 740, 540, 756), cell(1, 72, 700, 290, 710), cell(2, 322, 700, 540, 710),
                                   cell(3, 72, 688, 290, 698), cell(4, 322, 688, 540, 698)});
        CHECK(assemble::reading_order(page) == std::vector<int>{0, 1, 3, 2, 4});
    }
    SUBCASE("independent of the in-memory order") {
        const auto page = synth_labeled(synth::Template::TwoColumn, 1, 4).pages[0];
        const auto expected = assemble::reading_order(page);
        CHECK(expected.size() == page.cells.size());
        auto shuffled = page;
        Rng rng(8);
        rng.shuffle(shuffled.cells);
        CHECK(assemble::reading_order(shuffled) == expected);
    }
    SUBCASE("sub-point jitter keeps the order") {
        const auto page = synth_labeled(synth::Template::TwoColumn, 1, 6).pages[0];
        const auto expected = assemble::reading_order(page);
        auto jittered = page;
        Rng rng(2);
        for (auto& c : jittered.cells) {
            const double dx = rng.uniform(-0.05, 0.05), dy = rng.uniform(-0.05, 0.05);
            c.bbox = {c.bbox.x0 + dx, c.bbox.y0 + dy, c.bbox.x1 + dx, c.bbox.y1 + dy};
        }
        CHECK(assemble::reading_order(jittered) == expected);
    }
}

TEST_CASE("text joining") {
    std::string s;
    assemble::join_text(s, "first");
    CHECK(s == "first");
    assemble::join_text(s, "line");
    CHECK(s == "first line");
    s = "docu-";
    assemble::join_text(s, "ment");
    CHECK(s == "document");
    s = "COVID-";
    assemble::join_text(s, "19");
    CHECK(s == "COVID- 19");
    s = "pre-";
    assemble::join_text(s, "Trained");
    CHECK(s == "pre- Trained");
}

TEST_CASE("merge by label") {
    const auto a = cell(0, 0, 0, 1, 1, "The"), b = cell(1, 0, 0, 1, 1, "quick"), c = cell(2, 0, 0, 1, 1, "Fig"),
               d = cell(3, 0, 0, 1, 1, "fox");
    const auto runs = assemble::merge_by_label({{1, &a, "text"}, {1, &b, "text"}, {1, &c, "picture"}, {2, &d, "text"}});
    REQUIRE(runs.size() == 3);
    CHECK(runs[0].text == "The quick");
    CHECK(runs[0].prov.size() == 2);
    CHECK(runs[1].label == "picture");
    CHECK(runs[2].prov[0].page == 2);
    CHECK(error_code([&] { assemble::merge_by_label({{1, &a, ""}}); }) == "missing-label");
}

TEST_CASE("assembly") {
    SUBCASE("single cell") {
        const auto out = assemble::assemble(document_of({page_of({cell(0, 72, 700, 300, 710, "Hello world", "text")})}));
        REQUIRE(out.main_text.size() == 1);
        CHECK(out.main_text[0].type == "paragraph");
        CHECK(out.main_text[0].text == "Hello world");
        CHECK(out.main_text[0].prov[0].bbox == doc::BBox{72, 700, 300, 710});
        CHECK(out.doc_id == "doc");
    }
    SUBCASE("empty document") {
        const auto out = assemble::assemble(document_of({page_of({})}));
        CHECK(out.main_text.empty());
        CHECK(out.description == doc::Description{});
    }
    SUBCASE("front matter fills the description") {
        const auto page = page_of({cell(0, 100, 740, 500, 756, "A title", "title"),
                                   cell(1, 100, 720, 500, 730, "A. Author, B. Author", "author"),
                                   cell(2, 72, 690, 300, 700, "Introduction", "subtitle"),
                                   cell(3, 72, 670, 540, 680, "Some text to", "text"),
                                   cell(4, 72, 658, 540, 668, "read.", "text")});
        const auto out = assemble::assemble(document_of({page}));
        CHECK(out.description.title == "A title");
        CHECK(out.description.authors == "A. Author, B. Author");
        REQUIRE(out.main_text.size() == 2);
        CHECK(out.main_text[0].type == "subtitle-level-1");
        CHECK(out.main_text[0].text == "Introduction");
        CHECK(out.main_text[1].text == "Some text to read.");
        CHECK(doc::validate(out).empty());
    }
    SUBCASE("titles after page 1 stay in main text") {
        const auto out = assemble::assemble(document_of(
            {page_of({cell(0, 72, 700, 300, 710, "body", "text")}), page_of({cell(0, 72, 700, 300, 710, "Late", "title")}, 612, 792, 2)}));
        CHECK(out.description.title.empty());
        CHECK(out.main_text.back().type == "title");
    }
    SUBCASE("missing labels name the cell") {
        try {
            assemble::assemble(document_of({page_of({cell(0, 72, 700, 300, 710, "x", "text"), cell(1, 72, 680, 300, 690)})}));
            FAIL("expected missing-label");
        } catch (const Error& e) {
            CHECK(e.code() == "missing-label");
            CHECK(e.detail().find("cell 1") != std::string::npos);
        }
    }
    SUBCASE("label count must match") {
        const auto d = document_of({page_of({cell(0, 72, 700, 300, 710)})});
        const doc::DocumentLabels labels{"doc", {{1, {"text", "text"}, {}}}};
        CHECK(error_code([&] { assemble::assemble(d, &labels); }) == "shape-error");
    }
    SUBCASE("tables become grids") {
        std::vector<doc::TextCell> cells;
        const char* text[3][2] = {{"Name", "Value"}, {"alpha", "1.5"}, {"beta", "2.0"}};
        for (int r = 0; r < 3; ++r) {
            for (int c = 0; c < 2; ++c) {
                cells.push_back(cell(2 * r + c, 100 + 150.0 * c, 500 - 14.0 * r, 160 + 150.0 * c, 510 - 14.0 * r, text[r][c], "table"));
            }
        }
        const auto out = assemble::assemble(document_of({page_of(cells)}));
        REQUIRE(out.tables.size() == 1);
        CHECK(out.tables[0].rows == std::vector<std::vector<std::string>>{{"Name", "Value"}, {"alpha", "1.5"}, {"beta", "2.0"}});
        CHECK(out.tables[0].prov.size() == 6);
    }
    SUBCASE("pictures claim the bitmap under them") {
        auto page = page_of({cell(0, 100, 400, 300, 410, "Figure text", "picture")});
        page.image_refs.push_back({"Im1", doc::BBox{90, 380, 320, 600}});
        page.image_refs.push_back({"Im2", doc::BBox{90, 100, 320, 200}});
        const auto out = assemble::assemble(document_of({page}));
        REQUIRE(out.images.size() == 2);
        CHECK(out.images[0].ref == "Im1");
        CHECK(out.images[1].ref == "Im2");
    }
}

TEST_CASE("assembly of a synthetic paper") {
    const auto parsed = synth_labeled(synth::Template::TwoColumn, 3, 17);
    const auto out = assemble::assemble(parsed);

    SUBCASE("valid and round-trips") {
        std::vector<int> pages{1, 2, 3};
        CHECK(doc::validate(out, &pages).empty());
        CHECK(doc::deserialize_structured(doc::serialize(out)) == out);
        CHECK_FALSE(out.description.title.empty());
    }
    SUBCASE("every character ends up somewhere") {
        std::string cells, objects;
        for (const auto& p : parsed.pages) {
            for (const auto& c : p.cells) cells += c.text;
        }
        objects += out.description.title + out.description.authors + out.description.affiliations + out.description.abstract;
        for (const auto& o : out.main_text) objects += o.text;
        CHECK(no_spaces(cells) == no_spaces(objects));
    }
    SUBCASE("provenance points at real cells") {
        std::size_t prov = 0;
        for (const auto& o : out.main_text) {
            for (const auto& p : o.prov) {
                ++prov;
                const auto& cells = parsed.pages[static_cast<std::size_t>(p.page - 1)].cells;
                CHECK(std::any_of(cells.begin(), cells.end(), [&](const auto& c) { return c.bbox == p.bbox; }));
            }
        }
        std::size_t described = 0;
        for (const auto& c : parsed.pages[0].cells) {
            described += *c.label == "title" || *c.label == "author";
        }
        std::size_t total = 0;
        for (const auto& p : parsed.pages) total += p.cells.size();
        CHECK(prov + described == total);
    }
    SUBCASE("deterministic and independent of cell order") {
        auto shuffled = parsed;
        Rng rng(1);
        for (auto& p : shuffled.pages) rng.shuffle(p.cells);
        std::reverse(shuffled.pages.begin(), shuffled.pages.end());
        CHECK(doc::serialize(assemble::assemble(shuffled)) == doc::serialize(out));
    }
    SUBCASE("external labels win over cell labels") {
        auto labels = doc::labels_from_cells(parsed);
        for (auto& p : labels.pages) std::fill(p.labels.begin(), p.labels.end(), "text");
        const auto plain = assemble::assemble(parsed, &labels);
        REQUIRE(plain.main_text.size() == 1);
        CHECK(plain.tables.empty());
    }
}

TEST_CASE("assembly config") {
    const Json j = parse_json(R"({"type_names": {"text": "para"}, "reading_order": {"min_row_gap_factor": 1.0}})");
    const auto cfg = assemble::assembly_config_from_json(JsonCursor(j));
    CHECK(cfg.type_names.at("text") == "para");
    CHECK(cfg.reading_order.min_row_gap_factor == 1.0);
    const Json bad = parse_json(R"({"description_fields": {"title": "headline"}})");
    CHECK(error_code([&] { assemble::assembly_config_from_json(JsonCursor(bad)); }) == "schema-violation");
    const auto back = assemble::assembly_config_from_json(JsonCursor(assemble::to_json(cfg)));
    CHECK(back.type_names == cfg.type_names);
}
