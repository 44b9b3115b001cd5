#include "ccs/synth/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>

#include "ccs/rng.hpp"

namespace ccs::synth {

namespace {

const std::vector<std::string> kWords = {
    "the",      "model",     "document",  "layout",   "page",     "cells",     "label",     "table",
    "figure",   "results",   "method",    "data",     "training", "accuracy",  "network",   "parser",
    "structure", "analysis", "corpus",    "text",     "image",    "section",   "approach",  "value",
    "we",       "show",      "that",      "this",     "with",     "from",      "for",       "and",
    "are",      "our",       "based",     "each",     "which",    "between",   "into",      "over",
    "sample",   "feature",   "random",    "forest",   "tree",     "classifier", "precision", "recall",
    "system",   "pipeline",  "process",   "scalable", "platform", "ingestion", "scientific", "articles",
    "format",   "content",   "semantic",  "order",    "reading",  "annotation", "human",     "users",
    "quality",  "large",     "small",     "number",   "several",  "given",     "used",      "can",
    "high",     "low",       "first",     "second",   "final",    "across",    "under",     "within",
};

const std::vector<std::string> kSurnames = {"Smith",  "Meier",  "Rossi", "Tanaka", "Novak", "Garcia",
                                            "Okafor", "Larsen", "Kim",   "Dubois", "Silva", "Weber"};
const std::vector<std::string> kGiven = {"Anna", "Peter", "Maria", "Jonas", "Li",    "Sara",
                                         "Omar", "Elena", "Tom",   "Ines",  "Kenji", "Lea"};
const std::vector<std::string> kSections = {"Introduction", "Related Work", "Methods", "Experiments",
                                            "Results",      "Discussion",   "Conclusion", "Data Sets",
                                            "Evaluation",   "Background"};
const std::vector<std::string> kHeaders = {"name", "value", "error", "count", "score", "mean", "size"};
const std::vector<std::string> kAxis = {"time", "rate", "pages", "speed", "workers", "loss"};

struct Params {
    double margin_left, margin_right, top, bottom, gutter;
    int columns;
    double title_size;
    FontStyle title_style;
    bool centered_head;
    double author_size;
    FontStyle author_style;
    double sub_size;
    FontStyle sub_style;
    bool sub_upper;
    double text_size, leading;
    double pic_size;
    FontStyle pic_style;
    double table_size;
};

Params params(Template t) {
    if (t == Template::SingleColumn) {
        return {72, 72, 740, 72, 0, 1, 18, {true, false}, true, 11, {false, true}, 12, {true, false}, false,
                10, 12, 7, {false, false}, 8};
    }
    return {54, 54, 750, 60, 18, 2, 16, {true, false}, false, 10, {false, false}, 9, {true, false}, true,
            9, 11, 6.5, {false, true}, 7.5};
}

std::string upper(std::string s) {
    for (char& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return s;
}

class Composer {
public:
    Composer(const Params& p, Rng& rng, SynthPage& page) : p_(p), rng_(rng), page_(page) {
        col_width_ = (page.width - p.margin_left - p.margin_right - p.gutter * (p.columns - 1)) / p.columns;
        y_ = p.top;
    }

    void add(double x, double baseline, double size, FontStyle style, std::string text, std::string label) {
        Item it;
        it.baseline = baseline;
        it.size = size;
        it.style = style;
        it.bbox = {x, baseline - 0.25 * size, x + text_width(text, size), baseline + 0.75 * size};
        it.text = std::move(text);
        it.label = std::move(label);
        page_.items.push_back(std::move(it));
    }

    // Full-width head block (first page only).
    void head() {
        const double full = page_.width - p_.margin_left - p_.margin_right;
        std::string title;
        const int words = rng_.range(3, 6);
        for (int i = 0; i < words; ++i) {
            std::string w = rng_.pick(kWords);
            w[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(w[0])));
            title += (i ? " " : "") + w;
        }
        double tx = p_.centered_head ? 0.5 * (page_.width - text_width(title, p_.title_size)) : p_.margin_left;
        y_ -= p_.title_size;
        add(tx, y_, p_.title_size, p_.title_style, title, "title");
        y_ -= 0.6 * p_.title_size;
        const int author_lines = rng_.range(1, 2);
        for (int l = 0; l < author_lines; ++l) {
            std::string line;
            const int n = rng_.range(2, 3);
            for (int i = 0; i < n; ++i) line += (i ? ", " : "") + rng_.pick(kGiven) + " " + rng_.pick(kSurnames);
            while (text_width(line, p_.author_size) > full) line.pop_back();
            double ax = p_.centered_head ? 0.5 * (page_.width - text_width(line, p_.author_size)) : p_.margin_left;
            y_ -= p_.author_size * 1.3;
            add(ax, y_, p_.author_size, p_.author_style, line, "author");
        }
        y_ -= 2.5 * p_.leading;
    }

    void fill(int& section) {
        col_top_ = y_;
        while (true) {
            const double r = rng_.uniform();
            bool placed;
            if (r < 0.10) placed = subtitle(++section);
            else if (r < 0.16) placed = figure();
            else if (r < 0.22) placed = table();
            else placed = paragraph(rng_.range(3, 8));
            if (!placed && !next_column()) return;
        }
    }

    void footer(int number) {
        const std::string text = std::to_string(number);
        const double size = p_.text_size - 1;
        add(0.5 * (page_.width - text_width(text, size)), p_.bottom - 2.5 * p_.leading, size, {}, text, "text");
    }

private:
    double col_x() const { return p_.margin_left + col_ * (col_width_ + p_.gutter); }

    bool next_column() {
        if (col_ + 1 >= p_.columns) return false;
        ++col_;
        y_ = col_top_;
        return true;
    }

    bool fits(double h) const { return y_ - h >= p_.bottom; }

    std::string sentence_word(bool& start) {
        std::string w = rng_.pick(kWords);
        if (start) w[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(w[0])));
        start = false;
        if (rng_.chance(0.08)) {
            w += ".";
            start = true;
        } else if (rng_.chance(0.05)) {
            w += ",";
        }
        return w;
    }

    bool paragraph(int lines) {
        if (!fits(p_.leading * 2)) return false;
        bool start = true;
        for (int l = 0; l < lines; ++l) {
            if (!fits(p_.leading)) {
                if (!next_column()) return true;
            }
            const double budget = (l + 1 == lines) ? col_width_ * rng_.uniform(0.05, 0.9) : col_width_;
            std::string line = sentence_word(start);
            while (true) {
                std::string w = sentence_word(start);
                if (text_width(line + " " + w, p_.text_size) > budget) break;
                line += " " + w;
            }
            y_ -= p_.leading;
            const FontStyle emphasis{false, rng_.chance(0.03)};
            add(col_x(), y_, p_.text_size, emphasis, line, "text");
        }
        y_ -= 0.5 * p_.leading;
        return true;
    }

    bool subtitle(int number) {
        if (!fits(p_.leading * 4)) return false;
        std::string name = rng_.pick(kSections);
        std::string text = p_.sub_upper ? std::to_string(number) + ". " + upper(name) : std::to_string(number) + " " + name;
        y_ -= 0.5 * p_.leading + p_.sub_size;
        add(col_x(), y_, p_.sub_size, p_.sub_style, text, "subtitle");
        y_ -= 0.4 * p_.leading;
        return true;
    }

    bool figure() {
        const double h = rng_.uniform(90, 140);
        if (!fits(h + 2 * p_.leading)) return false;
        const double w = col_width_ * rng_.uniform(0.7, 0.95);
        const double x0 = col_x() + 0.5 * (col_width_ - w);
        const double top = y_ - 0.5 * p_.leading;
        const double bottom = top - h;
        page_.images.push_back({x0, bottom, x0 + w, top});
        // tick labels along the bottom and left edge, a legend top right
        const int ticks = rng_.range(3, 5);
        for (int i = 0; i < ticks; ++i) {
            const double tx = x0 + 18 + i * (w - 36) / (ticks - 1);
            add(tx, bottom + 4, p_.pic_size, p_.pic_style, std::to_string(i * rng_.range(1, 5) * 10), "picture");
        }
        for (int i = 1; i <= 2; ++i) {
            add(x0 + 3, bottom + i * h / 3, p_.pic_size, p_.pic_style, std::to_string(i * 5), "picture");
        }
        // legends sometimes use the body font
        const std::string legend = rng_.pick(kAxis) + " " + rng_.pick(kWords);
        const double legend_size = rng_.chance(0.5) ? p_.text_size : p_.pic_size;
        const FontStyle legend_style = rng_.chance(0.5) ? FontStyle{} : p_.pic_style;
        add(x0 + w - text_width(legend, legend_size) - 6, top - legend_size - 4, legend_size, legend_style, legend,
            "picture");
        y_ = bottom - 0.5 * p_.leading;
        caption("Figure " + std::to_string(++figures_) + ":");
        return true;
    }

    bool table() {
        const int rows = rng_.range(4, 7), cols = rng_.range(3, 4);
        const double row_h = p_.table_size * 1.7;
        const double h = rows * row_h;
        if (!fits(h + 4 * p_.leading)) return false;
        caption("Table " + std::to_string(++tables_) + ":");
        const double x0 = col_x();
        const double cw = col_width_ / cols;
        const double top = y_ - 0.5 * p_.leading;
        const double bottom = top - h;
        page_.rules.push_back({{x0, top}, {x0 + col_width_, top}});
        page_.rules.push_back({{x0, top - row_h}, {x0 + col_width_, top - row_h}});
        page_.rules.push_back({{x0, bottom}, {x0 + col_width_, bottom}});
        for (int c = 1; c < cols; ++c) page_.rules.push_back({{x0 + c * cw, top}, {x0 + c * cw, bottom}});
        for (int r = 0; r < rows; ++r) {
            const double baseline = top - (r + 1) * row_h + 0.45 * row_h;
            for (int c = 0; c < cols; ++c) {
                std::string cell;
                if (r == 0) {
                    cell = kHeaders[static_cast<std::size_t>((c + rows) % static_cast<int>(kHeaders.size()))];
                } else if (c == 0 && rng_.chance(0.3)) {
                    cell = rng_.pick(kWords);
                } else {
                    char buf[32];
                    std::snprintf(buf, sizeof buf, "%d.%02d", rng_.range(0, 999), rng_.range(0, 99));
                    cell = buf;
                }
                add(x0 + c * cw + 4, baseline, p_.table_size, {r == 0, false}, cell, "table");
            }
        }
        y_ = bottom - p_.leading;
        return true;
    }

    void caption(std::string text) {
        bool start = false;
        const double size = p_.text_size - 1;
        while (true) {
            std::string w = sentence_word(start);
            if (text_width(text + " " + w, size) > col_width_ * 0.95) break;
            text += " " + w;
        }
        y_ -= p_.leading;
        add(col_x(), y_, size, {}, text, "text");
        y_ -= 0.5 * p_.leading;
    }

    const Params& p_;
    Rng& rng_;
    SynthPage& page_;
    double col_width_ = 0;
    double y_ = 0;
    double col_top_ = 0;
    int col_ = 0;
    int figures_ = 0;
    int tables_ = 0;
};

}  // namespace

SynthDocument make_document(Template layout, int pages, std::uint64_t seed, std::string name) {
    Rng rng(seed);
    Params p = params(layout);
    // per-document jitter within the template
    const double shift = rng.uniform(-6, 6);
    p.margin_left += shift;
    p.margin_right -= shift;
    p.top += rng.uniform(-8, 8);
    p.text_size += rng.uniform(-0.3, 0.3);
    SynthDocument doc;
    doc.name = std::move(name);
    int section = 0;
    for (int i = 0; i < pages; ++i) {
        SynthPage page;
        Composer c(p, rng, page);
        if (i == 0) c.head();
        c.fill(section);
        c.footer(i + 1);
        doc.pages.push_back(std::move(page));
    }
    return doc;
}

std::vector<SynthDocument> make_corpus(const CorpusConfig& cfg) {
    std::vector<SynthDocument> out;
    const char* tag = cfg.layout == Template::SingleColumn ? "single" : "double";
    for (int d = 0; d < cfg.documents; ++d) {
        out.push_back(make_document(cfg.layout, cfg.pages_per_document, derive_seed(cfg.seed, static_cast<std::uint64_t>(d)),
                                    std::string(tag) + "-" + std::to_string(d)));
    }
    return out;
}

SynthDocument make_plain_document(int pages, int lines_per_page, std::uint64_t seed, std::string name) {
    Rng rng(seed);
    SynthDocument doc;
    doc.name = std::move(name);
    for (int i = 0; i < pages; ++i) {
        SynthPage page;
        for (int l = 0; l < lines_per_page; ++l) {
            std::string line;
            while (true) {
                std::string w = rng.pick(kWords);
                if (text_width(line + " " + w, 10) > 460) break;
                line += (line.empty() ? "" : " ") + w;
            }
            const double baseline = 740 - 12.0 * l;
            page.items.push_back({{72, baseline - 2.5, 72 + text_width(line, 10), baseline + 7.5}, baseline, 10, {}, line, "text"});
        }
        doc.pages.push_back(std::move(page));
    }
    return doc;
}

std::string render_pdf(const SynthDocument& doc, PdfWriter::Options opts) {
    PdfWriter w(opts);
    for (const auto& page : doc.pages) {
        const std::size_t p = w.add_page(page.width, page.height);
        for (const auto& img : page.images) w.image(p, img.x0, img.y0, img.width(), img.height());
        for (const auto& r : page.rules) w.line(p, r.a.x, r.a.y, r.b.x, r.b.y);
        for (const auto& it : page.items) w.text(p, it.bbox.x0, it.baseline, it.size, it.text, it.style);
    }
    return w.bytes();
}

doc::DocumentLabels oracle_labels(const doc::ParsedDocument& parsed, const SynthDocument& truth) {
    doc::DocumentLabels out;
    out.doc_id = parsed.doc_id;
    for (const auto& page : parsed.pages) {
        doc::PageLabels pl;
        pl.page_number = page.geometry.page_number;
        pl.labels.assign(page.cells.size(), "");
        const auto idx = static_cast<std::size_t>(page.geometry.page_number - 1);
        if (idx < truth.pages.size()) {
            const auto& items = truth.pages[idx].items;
            for (const auto& cell : page.cells) {
                const double cx = cell.bbox.center_x(), cy = cell.bbox.center_y();
                const Item* best = nullptr;
                double best_overlap = 0;
                for (const auto& it : items) {
                    if (cx >= it.bbox.x0 && cx <= it.bbox.x1 && cy >= it.bbox.y0 && cy <= it.bbox.y1) {
                        best = &it;
                        break;
                    }
                    const double o = it.bbox.intersection_area(cell.bbox);
                    if (o > best_overlap) {
                        best_overlap = o;
                        best = &it;
                    }
                }
                if (best) pl.labels[static_cast<std::size_t>(cell.id)] = best->label;
            }
        }
        out.pages.push_back(std::move(pl));
    }
    return out;
}

}  // namespace ccs::synth
