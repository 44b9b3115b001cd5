#include <algorithm>

#include "ccs/doc/serialize.hpp"
#include "ccs/doc/validate.hpp"
#include "ccs/error.hpp"
#include "doctest.h"
#include "fixtures.hpp"

using namespace ccs;
using testing::cell;
using testing::document_of;
using testing::page_of;

namespace {

doc::ParsedDocument one_cell_doc() {
    return document_of({page_of({cell(0, 52.304, 509.75, 168.099, 523.98, "1 INTRODUCTION", "subtitle")})});
}

std::string error_code(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    return "";
}

}  // namespace

TEST_CASE("validate accepts a well-formed page") {
    CHECK(doc::validate(one_cell_doc()).empty());
}

TEST_CASE("validate names an inverted cell") {
    auto d = document_of({page_of({cell(0, 10, 10, 50, 20), cell(1, 80, 10, 60, 20)})});
    const auto v = doc::validate(d);
    REQUIRE(v.size() == 1);
    CHECK(v[0].rule == "inverted-bbox");
    CHECK(v[0].page_number == 1);
    CHECK(v[0].cell_id == 1);
}

TEST_CASE("validate reports a page gap") {
    auto d = document_of({page_of({}, 612, 792, 1), page_of({}, 612, 792, 3)});
    const auto v = doc::validate(d);
    REQUIRE(v.size() == 1);
    CHECK(v[0].rule == "page-gap");
}

TEST_CASE("validate checks cell invariants") {
    SUBCASE("line breaks") {
        auto d = document_of({page_of({cell(0, 10, 10, 50, 20, "two\nlines")})});
        REQUIRE(doc::validate(d).size() == 1);
        CHECK(doc::validate(d)[0].rule == "multi-line");
    }
    SUBCASE("ids must be dense") {
        auto d = document_of({page_of({cell(0, 10, 10, 50, 20), cell(2, 10, 30, 50, 40)})});
        REQUIRE_FALSE(doc::validate(d).empty());
        CHECK(doc::validate(d)[0].rule == "cell-id");
    }
    SUBCASE("cells off the page") {
        auto d = document_of({page_of({cell(0, 700, 10, 750, 20)})});
        REQUIRE(doc::validate(d).size() == 1);
        CHECK(doc::validate(d)[0].rule == "off-page");
    }
    SUBCASE("small overhang is tolerated") {
        auto d = document_of({page_of({cell(0, 600, 10, 613.5, 20)})});
        CHECK(doc::validate(d).empty());
    }
    SUBCASE("labels outside the label set") {
        auto d = document_of({page_of({cell(0, 10, 10, 50, 20, "x", "footnote")})});
        const auto labels = doc::LabelSet::defaults();
        REQUIRE(doc::validate(d, &labels).size() == 1);
        CHECK(doc::validate(d, &labels)[0].rule == "unknown-label");
        CHECK(doc::validate(d).empty());
    }
}

TEST_CASE("parsed documents round-trip") {
    const auto d = one_cell_doc();
    const std::string bytes = doc::serialize(d);
    CHECK(doc::deserialize_parsed(bytes) == d);
    CHECK(doc::serialize(d) == bytes);
}

TEST_CASE("serialization ignores in-memory construction order") {
    auto d = document_of({page_of({cell(0, 10, 700, 100, 710, "a"), cell(1, 10, 680, 100, 690, "b"),
                                   cell(2, 10, 660, 100, 670, "c")}, 612, 792, 1),
                          page_of({cell(0, 10, 700, 100, 710, "d")}, 612, 792, 2)});
    const std::string bytes = doc::serialize(d);
    auto shuffled = d;
    std::reverse(shuffled.pages.begin(), shuffled.pages.end());
    std::reverse(shuffled.pages.back().cells.begin(), shuffled.pages.back().cells.end());
    CHECK(doc::serialize(shuffled) == bytes);
}

TEST_CASE("floats are written with three decimals") {
    auto d = document_of({page_of({cell(0, 10.12345, 10, 50.5, 20.0004)})});
    const std::string bytes = doc::serialize(d);
    CHECK(bytes.find("10.123") != std::string::npos);
    CHECK(bytes.find("50.500") != std::string::npos);
    CHECK(bytes.find("20.000") != std::string::npos);
    CHECK(bytes.find("10.1234") == std::string::npos);
}

TEST_CASE("malformed bytes name the failing path") {
    SUBCASE("syntax") { CHECK(error_code([] { doc::deserialize_parsed("{not json"); }) == "schema-violation"); }
    SUBCASE("missing field") {
        Json j = doc::to_json(one_cell_doc());
        j["pages"][0]["cells"][0].erase("bbox");
        try {
            doc::deserialize_parsed(j.dump());
            FAIL("expected an error");
        } catch (const Error& e) {
            CHECK(e.code() == "schema-violation");
            CHECK(e.detail().find("/pages/0/cells/0") != std::string::npos);
        }
    }
    SUBCASE("bbox of the wrong length") {
        Json j = doc::to_json(one_cell_doc());
        j["pages"][0]["cells"][0]["bbox"] = {1, 2, 3};
        CHECK(error_code([&] { doc::deserialize_parsed(j.dump()); }) == "schema-violation");
    }
    SUBCASE("future schema versions are rejected") {
        Json j = doc::to_json(one_cell_doc());
        j["schema_version"] = 2;
        CHECK(error_code([&] { doc::deserialize_parsed(j.dump()); }) == "schema-violation");
    }
}

TEST_CASE("structured output matches the published excerpt") {
    doc::StructuredDocument s;
    s.doc_id = "paper";
    s.description.title = "Corpus Conversion Service: A machine learning platform to ingest documents at scale.";
    s.main_text.push_back({"subtitle-level-1", "1 INTRODUCTION", {{{52.304, 509.750, 168.099, 523.980}, 1}}});
    s.main_text.push_back({"paragraph", "It is estimated that [...] put these into context.",
                           {{{52.304, 337.678, 286.067, 380.475}, 1}}});
    const std::string bytes = doc::serialize(s);
    CHECK(doc::deserialize_structured(bytes) == s);

    const Json j = parse_json(bytes);
    REQUIRE(j.contains("main-text"));
    REQUIRE(j["main-text"].size() == 2);
    CHECK(j["main-text"][1]["type"] == "paragraph");
    for (const auto& obj : j["main-text"]) {
        for (const auto& p : obj["prov"]) CHECK(p["bbox"].size() == 4);
    }
    CHECK(bytes.find("509.750") != std::string::npos);
    CHECK(j["tables"].is_array());
    CHECK(j["images"].is_array());
    CHECK(doc::validate(s).empty());
}

TEST_CASE("structured validation") {
    doc::StructuredDocument s;
    s.main_text.push_back({"paragraph", "text", {}});
    s.main_text.push_back({"paragraph", "text", {{{1, 1, 2, 2}, 4}}});
    const std::vector<int> pages{1, 2};
    const auto v = doc::validate(s, &pages);
    REQUIRE(v.size() == 2);
    CHECK(v[0].rule == "missing-prov");
    CHECK(v[1].rule == "prov-page");
}

TEST_CASE("label sets") {
    const auto defaults = doc::LabelSet::defaults();
    CHECK(defaults.names() ==
          std::vector<std::string>{"title", "author", "subtitle", "text", "picture", "table", "caption", "list"});
    CHECK(doc::LabelSet::six_labels().size() == 6);
    CHECK(defaults.index_of("text") == 3u);
    CHECK_FALSE(defaults.index_of("footnote"));
    CHECK(error_code([] { doc::LabelSet::from_names({"a", "a"}); }) == "invalid-argument");

    const Json j = parse_json(R"([{"name":"title","color":"#ff0000"},"text"])");
    const auto parsed = doc::label_set_from_json(JsonCursor(j));
    CHECK(parsed.names() == std::vector<std::string>{"title", "text"});
    CHECK(parsed[0].color == "#ff0000");
    CHECK(parsed[1].color.size() == 7);
}

TEST_CASE("labels attach to and detach from cells") {
    auto d = document_of({page_of({cell(0, 10, 10, 50, 20), cell(1, 10, 30, 50, 40)})});
    doc::DocumentLabels labels{"doc", {{1, {"text", "title"}, {}}}};
    const auto labeled = doc::with_labels(d, labels);
    CHECK(labeled.pages[0].cells[1].label == "title");
    CHECK(doc::labels_from_cells(labeled) == labels);
    CHECK(doc::deserialize_labels(doc::serialize(labels)) == labels);
}
