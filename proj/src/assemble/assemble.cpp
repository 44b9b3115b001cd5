#include "ccs/assemble/assemble.hpp"

#include <algorithm>
#include <iterator>
#include <set>

#include "ccs/error.hpp"

namespace ccs::assemble {

namespace {

using CellPtr = const doc::TextCell*;

bool leaf_before(CellPtr a, CellPtr b) {
    if (a->bbox.y1 != b->bbox.y1) return a->bbox.y1 > b->bbox.y1;
    if (a->bbox.x0 != b->bbox.x0) return a->bbox.x0 < b->bbox.x0;
    return a->id < b->id;
}

void xy_cut(std::vector<CellPtr> cells, const ReadingOrderConfig& cfg, std::vector<int>& out) {
    if (cells.size() <= 1) {
        for (CellPtr c : cells) out.push_back(c->id);
        return;
    }

    // bands: maximal runs of cells whose vertical extents chain together
    std::sort(cells.begin(), cells.end(), [](CellPtr a, CellPtr b) {
        if (a->bbox.y1 != b->bbox.y1) return a->bbox.y1 > b->bbox.y1;
        if (a->bbox.y0 != b->bbox.y0) return a->bbox.y0 > b->bbox.y0;
        return a->id < b->id;
    });
    struct Band {
        std::size_t begin, end;
        double bottom, bottom_height;
    };
    std::vector<Band> bands;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        const doc::BBox& b = cells[i]->bbox;
        if (bands.empty() || b.y1 < bands.back().bottom) {
            bands.push_back({i, i + 1, b.y0, b.height()});
            continue;
        }
        Band& band = bands.back();
        band.end = i + 1;
        if (b.y0 < band.bottom) {
            band.bottom = b.y0;
            band.bottom_height = b.height();
        }
    }
    // a gap is a cut unless the bands on both sides share an inner gutter
    auto gutters = [&](const Band& band) {
        std::vector<std::pair<double, double>> spans;
        for (std::size_t i = band.begin; i < band.end; ++i) spans.emplace_back(cells[i]->bbox.x0, cells[i]->bbox.x1);
        std::sort(spans.begin(), spans.end());
        std::vector<std::pair<double, double>> out;
        double right = spans.front().second;
        for (const auto& [x0, x1] : spans) {
            if (x0 > right) out.emplace_back(right, x0);
            right = std::max(right, x1);
        }
        return out;
    };
    std::vector<std::size_t> cuts;
    for (std::size_t k = 0; k + 1 < bands.size(); ++k) {
        const Band& above = bands[k];
        const Band& below = bands[k + 1];
        const double gap = above.bottom - cells[below.begin]->bbox.y1;
        const double below_height = cells[below.begin]->bbox.height();
        if (!(gap > cfg.min_row_gap_factor * std::min(above.bottom_height, below_height))) continue;
        bool shared = false;
        for (const auto& ga : gutters(above)) {
            for (const auto& gb : gutters(below)) shared = shared || (std::min(ga.second, gb.second) > std::max(ga.first, gb.first));
        }
        if (!shared) cuts.push_back(below.begin);
    }
    if (!cuts.empty()) {
        std::size_t from = 0;
        cuts.push_back(cells.size());
        for (std::size_t to : cuts) {
            xy_cut({cells.begin() + static_cast<std::ptrdiff_t>(from), cells.begin() + static_cast<std::ptrdiff_t>(to)}, cfg, out);
            from = to;
        }
        return;
    }

    // widest vertical gap, leftmost on ties
    std::sort(cells.begin(), cells.end(), [](CellPtr a, CellPtr b) {
        if (a->bbox.x0 != b->bbox.x0) return a->bbox.x0 < b->bbox.x0;
        if (a->bbox.x1 != b->bbox.x1) return a->bbox.x1 < b->bbox.x1;
        return a->id < b->id;
    });
    std::size_t cut = 0;
    double widest = 0, right = cells[0]->bbox.x1;
    for (std::size_t i = 1; i < cells.size(); ++i) {
        const doc::BBox& b = cells[i]->bbox;
        const double gap = b.x0 - right;
        if (gap > cfg.min_column_gap && gap > widest) {
            widest = gap;
            cut = i;
        }
        right = std::max(right, b.x1);
    }
    if (cut > 0) {
        xy_cut({cells.begin(), cells.begin() + static_cast<std::ptrdiff_t>(cut)}, cfg, out);
        xy_cut({cells.begin() + static_cast<std::ptrdiff_t>(cut), cells.end()}, cfg, out);
        return;
    }

    std::sort(cells.begin(), cells.end(), leaf_before);
    for (CellPtr c : cells) out.push_back(c->id);
}

bool starts_lowercase(const std::string& s) { return !s.empty() && s[0] >= 'a' && s[0] <= 'z'; }

std::string cell_name(const OrderedCell& c) {
    return "page " + std::to_string(c.page) + " cell " + std::to_string(c.cell->id);
}

}  // namespace

std::vector<int> reading_order(const doc::ParsedPage& page, const ReadingOrderConfig& cfg) {
    std::vector<CellPtr> cells;
    cells.reserve(page.cells.size());
    for (const auto& c : page.cells) cells.push_back(&c);
    std::vector<int> out;
    out.reserve(cells.size());
    xy_cut(std::move(cells), cfg, out);
    return out;
}

void join_text(std::string& text, const std::string& next) {
    if (text.empty()) {
        text = next;
    } else if (text.size() >= 2 && text.back() == '-' && text[text.size() - 2] != ' ' && starts_lowercase(next)) {
        text.pop_back();
        text += next;
    } else {
        text += ' ';
        text += next;
    }
}

std::vector<LabeledRun> merge_by_label(const std::vector<OrderedCell>& cells) {
    std::vector<LabeledRun> out;
    for (const auto& c : cells) {
        if (c.label.empty()) throw Error(errc::kMissingLabel, cell_name(c) + " has no label");
        if (out.empty() || out.back().label != c.label) out.push_back({c.label, {}, {}, {}});
        LabeledRun& run = out.back();
        join_text(run.text, c.cell->text);
        run.prov.push_back({c.cell->bbox, c.page});
        run.cells.push_back(c);
    }
    return out;
}

std::vector<std::vector<std::string>> table_grid(const std::vector<OrderedCell>& cells) {
    if (cells.empty()) return {};

    // columns: union of overlapping x-intervals
    std::vector<std::pair<double, double>> spans;
    for (const auto& c : cells) spans.emplace_back(c.cell->bbox.x0, c.cell->bbox.x1);
    std::sort(spans.begin(), spans.end());
    std::vector<std::pair<double, double>> columns;
    for (const auto& s : spans) {
        if (!columns.empty() && s.first < columns.back().second) {
            columns.back().second = std::max(columns.back().second, s.second);
        } else {
            columns.push_back(s);
        }
    }
    auto column_of = [&](const doc::BBox& b) {
        for (std::size_t k = 0; k < columns.size(); ++k) {
            if (b.x0 >= columns[k].first && b.x0 < columns[k].second) return k;
        }
        return columns.size() - 1;
    };

    // rows: pages in order, then cells clustered by bottom edge
    std::vector<const OrderedCell*> sorted;
    for (const auto& c : cells) sorted.push_back(&c);
    std::sort(sorted.begin(), sorted.end(), [](const OrderedCell* a, const OrderedCell* b) {
        if (a->page != b->page) return a->page < b->page;
        if (a->cell->bbox.y0 != b->cell->bbox.y0) return a->cell->bbox.y0 > b->cell->bbox.y0;
        if (a->cell->bbox.x0 != b->cell->bbox.x0) return a->cell->bbox.x0 < b->cell->bbox.x0;
        return a->cell->id < b->cell->id;
    });
    std::vector<std::vector<std::string>> rows;
    int row_page = 0;
    double row_y = 0, row_h = 0;
    for (const OrderedCell* c : sorted) {
        const doc::BBox& b = c->cell->bbox;
        if (rows.empty() || c->page != row_page || row_y - b.y0 > 0.5 * std::min(row_h, b.height())) {
            rows.emplace_back(columns.size());
            row_page = c->page;
            row_y = b.y0;
            row_h = b.height();
        }
        join_text(rows.back()[column_of(b)], c->cell->text);
    }
    return rows;
}

Json to_json(const AssemblyConfig& cfg) {
    return {{"reading_order",
             {{"min_row_gap_factor", cfg.reading_order.min_row_gap_factor},
              {"min_column_gap", cfg.reading_order.min_column_gap}}},
            {"type_names", cfg.type_names},
            {"description_fields", cfg.description_fields},
            {"table_label", cfg.table_label},
            {"picture_label", cfg.picture_label}};
}

AssemblyConfig assembly_config_from_json(const JsonCursor& c) {
    c.expect_object();
    AssemblyConfig cfg;
    if (auto ro = c.find("reading_order")) {
        ro->expect_object();
        if (auto v = ro->find("min_row_gap_factor")) cfg.reading_order.min_row_gap_factor = v->number();
        if (auto v = ro->find("min_column_gap")) cfg.reading_order.min_column_gap = v->number();
    }
    auto string_map = [](const JsonCursor& m) {
        m.expect_object();
        std::map<std::string, std::string> out;
        for (const auto& [k, v] : m.raw().items()) out[k] = JsonCursor(v, m.path() + "/" + k).string();
        return out;
    };
    if (auto v = c.find("type_names")) cfg.type_names = string_map(*v);
    if (auto v = c.find("description_fields")) {
        cfg.description_fields = string_map(*v);
        static const std::set<std::string> fields{"title", "authors", "affiliations", "abstract"};
        for (const auto& [label, field] : cfg.description_fields) {
            if (!fields.contains(field)) v->at(label).fail("unknown description field '" + field + "'");
        }
    }
    if (auto v = c.find("table_label")) cfg.table_label = v->string();
    if (auto v = c.find("picture_label")) cfg.picture_label = v->string();
    return cfg;
}

doc::StructuredDocument assemble(const doc::ParsedDocument& doc, const doc::DocumentLabels* labels,
                                 const AssemblyConfig& cfg) {
    std::vector<const doc::ParsedPage*> pages;
    for (const auto& p : doc.pages) pages.push_back(&p);
    std::sort(pages.begin(), pages.end(), [](const doc::ParsedPage* a, const doc::ParsedPage* b) {
        return a->geometry.page_number < b->geometry.page_number;
    });

    std::map<int, const doc::PageLabels*> page_labels;
    if (labels) {
        for (const auto& pl : labels->pages) page_labels[pl.page_number] = &pl;
    }

    std::vector<OrderedCell> ordered;
    for (const doc::ParsedPage* page : pages) {
        const int number = page->geometry.page_number;
        std::map<int, const doc::TextCell*> by_id;
        for (const auto& c : page->cells) by_id[c.id] = &c;
        const doc::PageLabels* pl = nullptr;
        if (labels) {
            auto it = page_labels.find(number);
            if (it != page_labels.end()) pl = it->second;
            if (pl && pl->labels.size() != page->cells.size()) {
                throw Error(errc::kShapeError, "page " + std::to_string(number) + " has " +
                                                   std::to_string(page->cells.size()) + " cells but " +
                                                   std::to_string(pl->labels.size()) + " labels");
            }
        }
        for (int id : reading_order(*page, cfg.reading_order)) {
            OrderedCell oc{number, by_id.at(id), {}};
            if (labels) {
                if (pl && id >= 0 && static_cast<std::size_t>(id) < pl->labels.size()) {
                    oc.label = pl->labels[static_cast<std::size_t>(id)];
                }
            } else if (oc.cell->label) {
                oc.label = *oc.cell->label;
            }
            ordered.push_back(std::move(oc));
        }
    }

    doc::StructuredDocument out;
    out.doc_id = doc.doc_id;
    std::set<std::string> filled;
    std::vector<bool> image_used;
    std::vector<std::pair<int, const doc::ImageRef*>> images;
    for (const doc::ParsedPage* page : pages) {
        for (const auto& im : page->image_refs) images.emplace_back(page->geometry.page_number, &im);
    }
    image_used.assign(images.size(), false);

    for (auto& run : merge_by_label(ordered)) {
        auto field = cfg.description_fields.find(run.label);
        if (field != cfg.description_fields.end() && run.prov.front().page == 1 && !filled.contains(field->second)) {
            filled.insert(field->second);
            if (field->second == "title") out.description.title = run.text;
            else if (field->second == "authors") out.description.authors = run.text;
            else if (field->second == "affiliations") out.description.affiliations = run.text;
            else out.description.abstract = run.text;
            continue;
        }
        auto type = cfg.type_names.find(run.label);
        out.main_text.push_back({type != cfg.type_names.end() ? type->second : run.label, run.text, run.prov});
        if (run.label == cfg.table_label) {
            out.tables.push_back({run.prov, table_grid(run.cells)});
        } else if (run.label == cfg.picture_label) {
            // first unclaimed bitmap touching the run's extent on one of its pages
            std::map<int, doc::BBox> extent;
            for (const auto& p : run.prov) {
                auto [it, fresh] = extent.emplace(p.page, p.bbox);
                if (!fresh) it->second = it->second.united(p.bbox);
            }
            doc::ImageObject image{run.prov, std::nullopt};
            for (std::size_t k = 0; k < images.size() && !image.ref; ++k) {
                if (image_used[k] || !images[k].second->bbox) continue;
                auto it = extent.find(images[k].first);
                if (it != extent.end() && images[k].second->bbox->intersection_area(it->second) > 0) {
                    image.ref = images[k].second->id;
                    image_used[k] = true;
                }
            }
            out.images.push_back(std::move(image));
        }
    }
    // bitmaps no picture cell claimed still get an entry when their box is known
    for (std::size_t k = 0; k < images.size(); ++k) {
        if (image_used[k] || !images[k].second->bbox || !images[k].second->bbox->well_formed()) continue;
        out.images.push_back({{{*images[k].second->bbox, images[k].first}}, images[k].second->id});
    }
    return out;
}

}  // namespace ccs::assemble
