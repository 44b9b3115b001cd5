#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ccs/doc/document.hpp"
#include "ccs/synth/pdf_writer.hpp"

namespace ccs::synth {

/// One drawn text line with its ground-truth label. The box follows the
/// parser's glyph model: baseline - 0.25 size to baseline + 0.75 size.
struct Item {
    doc::BBox bbox;
    double baseline = 0;
    double size = 10;
    FontStyle style;
    std::string text;
    std::string label;
};

struct SynthPage {
    double width = 612, height = 792;
    std::vector<Item> items;
    std::vector<doc::PathSegment> rules;
    std::vector<doc::BBox> images;
};

struct SynthDocument {
    std::string name;
    std::vector<SynthPage> pages;
};

enum class Template { SingleColumn, TwoColumn };

struct CorpusConfig {
    Template layout = Template::SingleColumn;
    int documents = 20;
    int pages_per_document = 20;
    std::uint64_t seed = 1;
};

/// Journal-like documents in one of two fixed layouts with the labels
/// title, author, subtitle, text, picture and table. Titles occur once per
/// document, so text outnumbers titles by several hundred to one.
SynthDocument make_document(Template layout, int pages, std::uint64_t seed, std::string name);
std::vector<SynthDocument> make_corpus(const CorpusConfig& cfg);

/// Pages of plain paragraph text only.
SynthDocument make_plain_document(int pages, int lines_per_page, std::uint64_t seed, std::string name);

std::string render_pdf(const SynthDocument& doc, PdfWriter::Options opts = {});

/// Labels every parsed cell with the label of the generated line under the
/// cell centre (largest overlap as fallback).
doc::DocumentLabels oracle_labels(const doc::ParsedDocument& parsed, const SynthDocument& truth);

}  // namespace ccs::synth
