#include "ccs/parser/normalize.hpp"

#include <algorithm>
#include <cmath>
#include <regex>

#include "ccs/doc/validate.hpp"
#include "ccs/error.hpp"

namespace ccs::parser {

std::vector<std::string> NormalizationConfig::default_list_markers() {
    return {"•|◦|▪|‣|∙", "-|–|—|\\*", "\\([A-Za-z0-9]{1,3}\\)", "[0-9]{1,3}[.)]", "(?:i|ii|iii|iv|v|vi|vii|viii|ix|x)[.)]"};
}

void NormalizationConfig::check() const {
    if (!(merge_gap_em > 0) || !(merge_gap_em < split_gap_em)) {
        throw Error(errc::kInvalidArgument, "merge_gap_em must be positive and below split_gap_em");
    }
    if (!(word_space_em >= 0) || !(baseline_tolerance > 0)) {
        throw Error(errc::kInvalidArgument, "word_space_em and baseline_tolerance must be non-negative");
    }
    if (!(max_cell_width_fraction >= 0) || !(rule_overlap_fraction > 0 && rule_overlap_fraction <= 1)) {
        throw Error(errc::kInvalidArgument, "max_cell_width_fraction or rule_overlap_fraction out of range");
    }
    for (const auto& p : list_marker_patterns) {
        try {
            std::regex re(p);
        } catch (const std::regex_error&) {
            throw Error(errc::kInvalidArgument, "bad list marker pattern '" + p + "'");
        }
    }
}

Json to_json(const NormalizationConfig& cfg) {
    return {{"merge_gap_em", cfg.merge_gap_em},
            {"split_gap_em", cfg.split_gap_em},
            {"word_space_em", cfg.word_space_em},
            {"baseline_tolerance", cfg.baseline_tolerance},
            {"max_cell_width_fraction", cfg.max_cell_width_fraction},
            {"rule_overlap_fraction", cfg.rule_overlap_fraction},
            {"list_marker_patterns", cfg.list_marker_patterns}};
}

NormalizationConfig normalization_config_from_json(const JsonCursor& c) {
    c.expect_object();
    NormalizationConfig cfg;
    if (auto v = c.find("merge_gap_em")) cfg.merge_gap_em = v->number();
    if (auto v = c.find("split_gap_em")) cfg.split_gap_em = v->number();
    if (auto v = c.find("word_space_em")) cfg.word_space_em = v->number();
    if (auto v = c.find("baseline_tolerance")) cfg.baseline_tolerance = v->number();
    if (auto v = c.find("max_cell_width_fraction")) cfg.max_cell_width_fraction = v->number();
    if (auto v = c.find("rule_overlap_fraction")) cfg.rule_overlap_fraction = v->number();
    if (auto v = c.find("list_marker_patterns")) {
        cfg.list_marker_patterns.clear();
        for (std::size_t i = 0, n = v->array_size(); i < n; ++i) cfg.list_marker_patterns.push_back(v->at(i).string());
    }
    try {
        cfg.check();
    } catch (const Error& e) {
        c.fail(e.detail());
    }
    return cfg;
}

NormalizationReport& NormalizationReport::operator+=(const NormalizationReport& o) {
    dropped_degenerate += o.dropped_degenerate;
    dropped_off_page += o.dropped_off_page;
    rule_splits += o.rule_splits;
    list_splits += o.list_splits;
    gap_splits += o.gap_splits;
    width_splits += o.width_splits;
    return *this;
}

namespace {

bool is_space(char32_t cp) {
    return cp == ' ' || cp == '\t' || cp == '\n' || cp == '\r' || cp == '\f' || cp == '\v' || cp == 0xA0 ||
           cp == 0x2028 || cp == 0x2029 || cp == 0x200B || (cp >= 0x2000 && cp <= 0x200A) || cp == 0x3000 ||
           cp < 0x20 || cp == 0x7F;
}

struct Glyph {
    char32_t cp = 0;
    double x0 = 0, x1 = 0, y0 = 0, y1 = 0;
    double baseline = 0;
    double font_size = 0;
    bool bold = false, italic = false;
    bool space_before = false;
    bool space_after = false;
    double center() const { return 0.5 * (x0 + x1); }
};

// One cell under construction: glyphs left to right, with a space flag
// between neighbours.
struct Run {
    std::vector<Glyph> glyphs;
    std::vector<bool> space;  // space[i]: space between glyphs[i-1] and glyphs[i]
    double clip_left = -1e300, clip_right = 1e300;

    doc::BBox box() const {
        doc::BBox b{1e300, 1e300, -1e300, -1e300};
        for (const auto& g : glyphs) {
            b.x0 = std::min(b.x0, g.x0);
            b.x1 = std::max(b.x1, g.x1);
            b.y0 = std::min(b.y0, g.y0);
            b.y1 = std::max(b.y1, g.y1);
        }
        b.x0 = std::max(b.x0, clip_left);
        b.x1 = std::min(b.x1, clip_right);
        return b;
    }

    Run slice(std::size_t from, std::size_t to) const {
        Run r;
        r.clip_left = clip_left;
        r.clip_right = clip_right;
        for (std::size_t i = from; i < to; ++i) {
            r.glyphs.push_back(glyphs[i]);
            r.space.push_back(i == from ? false : space[i]);
        }
        return r;
    }
};

struct Line {
    double min_baseline = 0, max_baseline = 0, min_font = 0;
    std::vector<Glyph> glyphs;
};

void explode(const RawSnippet& s, std::vector<Glyph>& out) {
    auto cps = utf8_decode(s.text);
    if (cps.empty()) return;
    std::vector<std::pair<double, double>> extents = s.glyph_x;
    if (extents.size() != cps.size()) {
        extents.clear();
        const double w = s.bbox.width() / static_cast<double>(cps.size());
        for (std::size_t i = 0; i < cps.size(); ++i) {
            extents.emplace_back(s.bbox.x0 + w * static_cast<double>(i), s.bbox.x0 + w * static_cast<double>(i + 1));
        }
    }
    bool pending_space = false;
    const std::size_t first = out.size();
    for (std::size_t i = 0; i < cps.size(); ++i) {
        if (is_space(cps[i])) {
            pending_space = true;
            continue;
        }
        Glyph g;
        g.cp = cps[i];
        g.x0 = std::min(extents[i].first, extents[i].second);
        g.x1 = std::max(extents[i].first, extents[i].second);
        g.y0 = s.bbox.y0;
        g.y1 = s.bbox.y1;
        g.baseline = s.baseline_y;
        g.font_size = s.font.size;
        g.bold = s.font.bold;
        g.italic = s.font.italic;
        g.space_before = pending_space;
        pending_space = false;
        out.push_back(g);
    }
    if (pending_space && out.size() > first) out.back().space_after = true;
}

double median(std::vector<double> v) {
    if (v.empty()) return 0;
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

bool same_style(const Glyph& a, const Glyph& b) {
    return a.bold == b.bold && a.italic == b.italic && std::abs(a.font_size - b.font_size) < 0.01;
}

class Normalizer {
public:
    Normalizer(const PageSnippets& page, const NormalizationConfig& cfg, NormalizationReport& report)
        : page_(page), cfg_(cfg), report_(report) {
        for (const auto& p : cfg.list_marker_patterns) markers_.emplace_back(p);
        for (const auto& seg : page.paths) {
            if (seg.vertical() && std::abs(seg.a.y - seg.b.y) > 0) rules_.push_back(seg);
        }
    }

    doc::ParsedPage run() {
        doc::ParsedPage out;
        out.geometry = page_.geometry;
        out.paths = page_.paths;
        out.image_refs = page_.image_refs;

        std::vector<Line> lines = group_lines();
        std::vector<Run> runs;
        for (auto& line : lines) {
            std::stable_sort(line.glyphs.begin(), line.glyphs.end(),
                             [](const Glyph& a, const Glyph& b) { return a.x0 < b.x0; });
            std::vector<double> widths;
            for (const auto& g : line.glyphs) {
                if (g.x1 > g.x0) widths.push_back(g.x1 - g.x0);
            }
            double em = median(widths);
            if (!(em > 0)) em = 0.5 * std::max(line.min_font, 1.0);
            for (Run& r : split_by_gaps(line, em)) {
                for (Run& r2 : split_by_rules(std::move(r))) {
                    for (Run& r3 : split_by_markers(std::move(r2))) {
                        for (Run& r4 : split_by_width(std::move(r3))) runs.push_back(std::move(r4));
                    }
                }
            }
        }

        for (const Run& r : runs) {
            doc::TextCell cell;
            doc::BBox b = r.box();
            cell.bbox = {quantize3(b.x0), quantize3(b.y0), quantize3(b.x1), quantize3(b.y1)};
            if (cell.bbox.x1 <= cell.bbox.x0) cell.bbox.x1 = quantize3(cell.bbox.x0 + 0.001);
            if (cell.bbox.y1 <= cell.bbox.y0) cell.bbox.y1 = quantize3(cell.bbox.y0 + 0.001);
            std::vector<char32_t> text;
            for (std::size_t i = 0; i < r.glyphs.size(); ++i) {
                if (r.space[i]) text.push_back(' ');
                text.push_back(r.glyphs[i].cp);
            }
            cell.text = utf8_encode(text);
            const Glyph& g = dominant(r);
            cell.style = {g.bold, g.italic, quantize3(g.font_size)};
            out.cells.push_back(std::move(cell));
        }
        std::stable_sort(out.cells.begin(), out.cells.end(), [](const doc::TextCell& a, const doc::TextCell& b) {
            if (a.bbox.y1 != b.bbox.y1) return a.bbox.y1 > b.bbox.y1;
            if (a.bbox.x0 != b.bbox.x0) return a.bbox.x0 < b.bbox.x0;
            if (a.bbox.y0 != b.bbox.y0) return a.bbox.y0 > b.bbox.y0;
            return a.text < b.text;
        });
        for (std::size_t i = 0; i < out.cells.size(); ++i) out.cells[i].id = static_cast<int>(i);
        return out;
    }

private:
    static const Glyph& dominant(const Run& r) {
        // style carried by most glyphs; first occurrence wins ties
        std::size_t best = 0, best_count = 0;
        for (std::size_t i = 0; i < r.glyphs.size(); ++i) {
            std::size_t count = 0;
            for (const auto& g : r.glyphs) count += same_style(g, r.glyphs[i]) ? 1 : 0;
            if (count > best_count) {
                best = i;
                best_count = count;
            }
        }
        return r.glyphs[best];
    }

    std::vector<Line> group_lines() {
        struct Item {
            const RawSnippet* s;
            std::size_t order;
        };
        std::vector<Item> items;
        const doc::BBox page_box{-doc::kPageOverhangTolerance, -doc::kPageOverhangTolerance,
                                 page_.geometry.width + doc::kPageOverhangTolerance,
                                 page_.geometry.height + doc::kPageOverhangTolerance};
        for (std::size_t i = 0; i < page_.snippets.size(); ++i) {
            const RawSnippet& s = page_.snippets[i];
            bool has_text = false;
            for (char32_t cp : utf8_decode(s.text)) has_text |= !is_space(cp);
            if (!has_text) continue;
            if (!s.bbox.well_formed() || !std::isfinite(s.baseline_y) || !(s.font.size > 0) ||
                !std::isfinite(s.font.size)) {
                ++report_.dropped_degenerate;
                continue;
            }
            if (page_box.intersection_area(s.bbox) <= 0) {
                ++report_.dropped_off_page;
                continue;
            }
            items.push_back({&s, i});
        }
        std::stable_sort(items.begin(), items.end(), [](const Item& a, const Item& b) {
            if (a.s->baseline_y != b.s->baseline_y) return a.s->baseline_y > b.s->baseline_y;
            return a.s->bbox.x0 < b.s->bbox.x0;
        });

        std::vector<Line> lines;
        for (const Item& it : items) {
            const RawSnippet& s = *it.s;
            Line* target = nullptr;
            for (auto l = lines.rbegin(); l != lines.rend(); ++l) {
                const double font = std::min(l->min_font, s.font.size);
                const double lo = std::min(l->min_baseline, s.baseline_y);
                const double hi = std::max(l->max_baseline, s.baseline_y);
                if (hi - lo < cfg_.baseline_tolerance * font) {
                    target = &*l;
                    break;
                }
            }
            if (!target) {
                lines.push_back({s.baseline_y, s.baseline_y, s.font.size, {}});
                target = &lines.back();
            }
            target->min_baseline = std::min(target->min_baseline, s.baseline_y);
            target->max_baseline = std::max(target->max_baseline, s.baseline_y);
            target->min_font = std::min(target->min_font, s.font.size);
            explode(s, target->glyphs);
        }
        return lines;
    }

    std::vector<Run> split_by_gaps(const Line& line, double em) {
        std::vector<Run> runs;
        Run cur;
        for (const Glyph& g : line.glyphs) {
            if (cur.glyphs.empty()) {
                cur.glyphs.push_back(g);
                cur.space.push_back(false);
                continue;
            }
            const Glyph& prev = cur.glyphs.back();
            const double gap = g.x0 - prev.x1;
            bool merge;
            if (gap > cfg_.split_gap_em * em) merge = false;
            else if (gap < cfg_.merge_gap_em * em) merge = true;
            else merge = same_style(prev, g);
            if (!merge) {
                ++report_.gap_splits;
                runs.push_back(std::move(cur));
                cur = Run{};
                cur.glyphs.push_back(g);
                cur.space.push_back(false);
                continue;
            }
            const bool space = g.space_before || prev.space_after || gap >= cfg_.word_space_em * em;
            cur.glyphs.push_back(g);
            cur.space.push_back(space);
        }
        if (!cur.glyphs.empty()) runs.push_back(std::move(cur));
        return runs;
    }

    std::vector<Run> split_by_rules(Run run) {
        std::vector<Run> done;
        std::vector<Run> todo{std::move(run)};
        while (!todo.empty()) {
            Run r = std::move(todo.back());
            todo.pop_back();
            const doc::BBox b = r.box();
            const doc::PathSegment* hit = nullptr;
            for (const auto& seg : rules_) {
                const double x = 0.5 * (seg.a.x + seg.b.x);
                if (!(x > b.x0 && x < b.x1)) continue;
                const double lo = std::max(b.y0, std::min(seg.a.y, seg.b.y));
                const double hi = std::min(b.y1, std::max(seg.a.y, seg.b.y));
                if (hi - lo >= cfg_.rule_overlap_fraction * b.height()) {
                    hit = &seg;
                    break;
                }
            }
            if (!hit) {
                done.push_back(std::move(r));
                continue;
            }
            ++report_.rule_splits;
            const double x = 0.5 * (hit->a.x + hit->b.x);
            std::size_t cut = 0;
            while (cut < r.glyphs.size() && r.glyphs[cut].center() < x) ++cut;
            Run left = r.slice(0, cut), right = r.slice(cut, r.glyphs.size());
            left.clip_right = std::min(left.clip_right, x);
            right.clip_left = std::max(right.clip_left, x);
            // processed in left-to-right order
            if (!right.glyphs.empty()) todo.push_back(std::move(right));
            if (!left.glyphs.empty()) todo.push_back(std::move(left));
        }
        return done;
    }

    bool is_marker(const std::string& word) const {
        for (const auto& re : markers_) {
            if (std::regex_match(word, re)) return true;
        }
        return false;
    }

    std::vector<Run> split_by_markers(Run run) {
        if (markers_.empty()) return {std::move(run)};
        // word boundaries: glyph indices where a space precedes
        std::vector<std::size_t> starts{0};
        for (std::size_t i = 1; i < run.glyphs.size(); ++i) {
            if (run.space[i]) starts.push_back(i);
        }
        std::vector<std::size_t> cuts;
        for (std::size_t w = 1; w + 1 < starts.size(); ++w) {
            std::vector<char32_t> cps;
            for (std::size_t i = starts[w]; i < starts[w + 1]; ++i) cps.push_back(run.glyphs[i].cp);
            if (is_marker(utf8_encode(cps))) cuts.push_back(starts[w]);
        }
        if (cuts.empty()) return {std::move(run)};
        std::vector<Run> out;
        std::size_t from = 0;
        for (std::size_t c : cuts) {
            out.push_back(run.slice(from, c));
            from = c;
            ++report_.list_splits;
        }
        out.push_back(run.slice(from, run.glyphs.size()));
        return out;
    }

    std::vector<Run> split_by_width(Run run) {
        if (!(cfg_.max_cell_width_fraction > 0)) return {std::move(run)};
        const double cap = cfg_.max_cell_width_fraction * page_.geometry.width;
        std::vector<Run> done;
        std::vector<Run> todo{std::move(run)};
        while (!todo.empty()) {
            Run r = std::move(todo.back());
            todo.pop_back();
            if (r.box().width() <= cap || r.glyphs.size() < 2) {
                done.push_back(std::move(r));
                continue;
            }
            std::size_t cut = 1;
            double widest = -1e300;
            for (std::size_t i = 1; i < r.glyphs.size(); ++i) {
                const double gap = r.glyphs[i].x0 - r.glyphs[i - 1].x1 + (r.space[i] ? 1e6 : 0);
                if (gap > widest) {
                    widest = gap;
                    cut = i;
                }
            }
            ++report_.width_splits;
            todo.push_back(r.slice(cut, r.glyphs.size()));
            todo.push_back(r.slice(0, cut));
        }
        return done;
    }

    const PageSnippets& page_;
    const NormalizationConfig& cfg_;
    NormalizationReport& report_;
    std::vector<std::regex> markers_;
    std::vector<doc::PathSegment> rules_;
};

}  // namespace

doc::ParsedPage normalize_cells(const PageSnippets& page, const NormalizationConfig& cfg, NormalizationReport* report) {
    NormalizationReport local;
    doc::ParsedPage out = Normalizer(page, cfg, local).run();
    if (report) *report += local;
    return out;
}

}  // namespace ccs::parser
