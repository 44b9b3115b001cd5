#include "ccs/parser/snippet.hpp"

#include "ccs/doc/serialize.hpp"
#include "ccs/error.hpp"
#include "ccs/parser/content.hpp"
#include "ccs/parser/pdf_file.hpp"

namespace ccs::parser {

ExtractedDocument PdfBackend::extract(std::string_view bytes) const {
    pdf::File file{std::string(bytes)};
    ExtractedDocument out;
    int n = 0;
    for (const auto& page : file.pages()) out.pages.push_back(extract_page(file, page, ++n));
    return out;
}

ExtractedDocument FixtureBackend::extract(std::string_view bytes) const {
    Json j = parse_json(bytes);
    return extracted_from_json(JsonCursor(j));
}

Json to_json(const ExtractedDocument& doc) {
    Json pages = Json::array();
    for (const auto& p : doc.pages) {
        Json snippets = Json::array();
        for (const auto& s : p.snippets) {
            Json js = {{"bbox", doc::bbox_to_json(s.bbox)},
                       {"text", s.text},
                       {"baseline_y", s.baseline_y},
                       {"font", {{"name", s.font.name}, {"size", s.font.size}, {"italic", s.font.italic}, {"bold", s.font.bold}}}};
            if (!s.glyph_x.empty()) {
                Json gx = Json::array();
                for (auto [a, b] : s.glyph_x) gx.push_back(Json::array({a, b}));
                js["glyph_x"] = std::move(gx);
            }
            snippets.push_back(std::move(js));
        }
        Json paths = Json::array();
        for (const auto& seg : p.paths) paths.push_back(Json::array({seg.a.x, seg.a.y, seg.b.x, seg.b.y}));
        Json images = Json::array();
        for (const auto& r : p.image_refs) {
            Json img = {{"id", r.id}};
            if (r.bbox) img["bbox"] = doc::bbox_to_json(*r.bbox);
            images.push_back(std::move(img));
        }
        pages.push_back({{"page_number", p.geometry.page_number},
                         {"width", p.geometry.width},
                         {"height", p.geometry.height},
                         {"snippets", std::move(snippets)},
                         {"paths", std::move(paths)},
                         {"image_refs", std::move(images)}});
    }
    return {{"schema", kRawSnippetsSchema}, {"schema_version", doc::kSchemaVersion}, {"pages", std::move(pages)}};
}

ExtractedDocument extracted_from_json(const JsonCursor& c) {
    c.expect_object();
    auto tag = c.at("schema");
    if (tag.string() != kRawSnippetsSchema) tag.fail("expected schema '" + std::string(kRawSnippetsSchema) + "'");
    auto version = c.at("schema_version");
    if (version.integer() != doc::kSchemaVersion) {
        version.fail("unsupported schema_version " + std::to_string(version.integer()));
    }
    ExtractedDocument out;
    auto pages = c.at("pages");
    for (std::size_t i = 0, n = pages.array_size(); i < n; ++i) {
        auto jp = pages.at(i);
        PageSnippets page;
        page.geometry.page_number = static_cast<int>(jp.at("page_number").integer());
        page.geometry.width = jp.at("width").positive_number();
        page.geometry.height = jp.at("height").positive_number();
        auto snippets = jp.at("snippets");
        for (std::size_t k = 0, m = snippets.array_size(); k < m; ++k) {
            auto js = snippets.at(k);
            RawSnippet s;
            s.bbox = doc::bbox_from_json(js.at("bbox"));
            s.text = js.at("text").string();
            s.baseline_y = js.find("baseline_y") ? js.at("baseline_y").number() : s.bbox.y0;
            auto font = js.at("font");
            s.font.name = font.find("name") ? font.at("name").string() : "";
            s.font.size = font.at("size").number();
            s.font.italic = font.find("italic") ? font.at("italic").boolean() : false;
            s.font.bold = font.find("bold") ? font.at("bold").boolean() : false;
            if (auto gx = js.find("glyph_x")) {
                for (std::size_t g = 0, gn = gx->array_size(); g < gn; ++g) {
                    auto pair = gx->at(g);
                    if (pair.array_size() != 2) pair.fail("glyph extent must have 2 elements");
                    s.glyph_x.emplace_back(pair.at(0).number(), pair.at(1).number());
                }
                if (s.glyph_x.size() != utf8_decode(s.text).size()) gx->fail("one extent per code point expected");
            }
            page.snippets.push_back(std::move(s));
        }
        if (auto paths = jp.find("paths")) {
            for (std::size_t k = 0, m = paths->array_size(); k < m; ++k) {
                auto seg = paths->at(k);
                if (seg.array_size() != 4) seg.fail("path must have 4 coordinates");
                page.paths.push_back({{seg.at(0).number(), seg.at(1).number()}, {seg.at(2).number(), seg.at(3).number()}});
            }
        }
        if (auto images = jp.find("image_refs")) {
            for (std::size_t k = 0, m = images->array_size(); k < m; ++k) {
                auto ji = images->at(k);
                doc::ImageRef ref{ji.at("id").string(), std::nullopt};
                if (auto b = ji.find("bbox")) ref.bbox = doc::bbox_from_json(*b);
                page.image_refs.push_back(std::move(ref));
            }
        }
        out.pages.push_back(std::move(page));
    }
    return out;
}

std::string serialize(const ExtractedDocument& doc) { return canonical_dump(to_json(doc)); }

std::vector<char32_t> utf8_decode(std::string_view s) {
    std::vector<char32_t> out;
    out.reserve(s.size());
    std::size_t i = 0;
    while (i < s.size()) {
        unsigned char c = static_cast<unsigned char>(s[i]);
        int len = c < 0x80 ? 1 : (c >> 5) == 0x6 ? 2 : (c >> 4) == 0xE ? 3 : (c >> 3) == 0x1E ? 4 : 0;
        if (len == 0 || i + static_cast<std::size_t>(len) > s.size()) {
            out.push_back(0xFFFD);
            ++i;
            continue;
        }
        char32_t cp = len == 1 ? c : len == 2 ? (c & 0x1F) : len == 3 ? (c & 0x0F) : (c & 0x07);
        bool ok = true;
        for (int k = 1; k < len; ++k) {
            unsigned char cc = static_cast<unsigned char>(s[i + static_cast<std::size_t>(k)]);
            if ((cc & 0xC0) != 0x80) {
                ok = false;
                break;
            }
            cp = (cp << 6) | (cc & 0x3F);
        }
        if (!ok) {
            out.push_back(0xFFFD);
            ++i;
            continue;
        }
        out.push_back(cp);
        i += static_cast<std::size_t>(len);
    }
    return out;
}

std::string utf8_encode(char32_t cp) {
    std::string out;
    if (cp < 0x80) {
        out += static_cast<char>(cp);
    } else if (cp < 0x800) {
        out += static_cast<char>(0xC0 | (cp >> 6));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    } else if (cp < 0x10000) {
        out += static_cast<char>(0xE0 | (cp >> 12));
        out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    } else if (cp < 0x110000) {
        out += static_cast<char>(0xF0 | (cp >> 18));
        out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
        out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    } else {
        out += "\xEF\xBF\xBD";
    }
    return out;
}

std::string utf8_encode(const std::vector<char32_t>& cps) {
    std::string out;
    for (char32_t cp : cps) out += utf8_encode(cp);
    return out;
}

}  // namespace ccs::parser
