#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ccs/doc/document.hpp"
#include "ccs/json_io.hpp"

namespace ccs::parser {

inline constexpr std::string_view kRawSnippetsSchema = "raw-snippets.v1";

struct FontSpec {
    std::string name;
    double size = 0;
    bool italic = false;
    bool bold = false;
    bool operator==(const FontSpec&) const = default;
};

/// Text as drawn by one text-showing instruction. Depending on the producer
/// this may be a single glyph, a word or a whole line.
struct RawSnippet {
    doc::BBox bbox;
    std::string text;  // UTF-8
    FontSpec font;
    double baseline_y = 0;
    /// Horizontal extent of each code point of `text`. Empty means unknown;
    /// consumers then spread the code points evenly across the box.
    std::vector<std::pair<double, double>> glyph_x;
    bool operator==(const RawSnippet&) const = default;
};

struct PageSnippets {
    doc::PageGeometry geometry;
    std::vector<RawSnippet> snippets;
    std::vector<doc::PathSegment> paths;
    std::vector<doc::ImageRef> image_refs;
    bool operator==(const PageSnippets&) const = default;
};

struct ExtractedDocument {
    std::vector<PageSnippets> pages;
    bool operator==(const ExtractedDocument&) const = default;
};

/// Source of raw snippets. The PDF backend reads real files; the fixture
/// backend replays recorded raw-snippets.v1 JSON so normalization can be
/// tested without a PDF engine.
class ExtractionBackend {
public:
    virtual ~ExtractionBackend() = default;
    virtual ExtractedDocument extract(std::string_view bytes) const = 0;
};

class PdfBackend final : public ExtractionBackend {
public:
    ExtractedDocument extract(std::string_view bytes) const override;
};

class FixtureBackend final : public ExtractionBackend {
public:
    ExtractedDocument extract(std::string_view bytes) const override;
};

Json to_json(const ExtractedDocument& doc);
ExtractedDocument extracted_from_json(const JsonCursor& c);
std::string serialize(const ExtractedDocument& doc);

/// Decodes UTF-8 into code points; invalid bytes become U+FFFD.
std::vector<char32_t> utf8_decode(std::string_view s);
std::string utf8_encode(char32_t cp);
std::string utf8_encode(const std::vector<char32_t>& cps);

}  // namespace ccs::parser
