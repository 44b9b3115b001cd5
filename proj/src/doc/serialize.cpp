#include "ccs/doc/serialize.hpp"

#include <algorithm>

#include "ccs/error.hpp"

namespace ccs::doc {

namespace {

void expect_schema(const JsonCursor& c, std::string_view schema) {
    c.expect_object();
    auto tag = c.at("schema");
    if (tag.string() != schema) tag.fail("expected schema '" + std::string(schema) + "'");
    auto version = c.at("schema_version");
    if (version.integer() != kSchemaVersion) {
        version.fail("unsupported schema_version " + std::to_string(version.integer()));
    }
}

Json prov_to_json(const std::vector<Provenance>& prov) {
    Json arr = Json::array();
    for (const auto& p : prov) arr.push_back({{"bbox", bbox_to_json(p.bbox)}, {"page", p.page}});
    return arr;
}

std::vector<Provenance> prov_from_json(const JsonCursor& c) {
    std::vector<Provenance> out;
    for (std::size_t i = 0, n = c.array_size(); i < n; ++i) {
        auto e = c.at(i);
        out.push_back({bbox_from_json(e.at("bbox")), static_cast<int>(e.at("page").integer())});
    }
    return out;
}

Json point_pair(const PathSegment& s) { return Json::array({s.a.x, s.a.y, s.b.x, s.b.y}); }

}  // namespace

Json bbox_to_json(const BBox& b) { return Json::array({b.x0, b.y0, b.x1, b.y1}); }

BBox bbox_from_json(const JsonCursor& c) {
    if (c.array_size() != 4) c.fail("bbox must have 4 elements");
    return {c.at(0).number(), c.at(1).number(), c.at(2).number(), c.at(3).number()};
}

Json to_json(const ParsedPage& page) {
    std::vector<const TextCell*> cells;
    cells.reserve(page.cells.size());
    for (const auto& c : page.cells) cells.push_back(&c);
    std::stable_sort(cells.begin(), cells.end(), [](const TextCell* a, const TextCell* b) { return a->id < b->id; });

    Json jc = Json::array();
    for (const TextCell* c : cells) {
        Json cell = {{"id", c->id},
                     {"bbox", bbox_to_json(c->bbox)},
                     {"text", c->text},
                     {"style", {{"bold", c->style.bold}, {"italic", c->style.italic}, {"font_size", c->style.font_size}}}};
        if (c->label) cell["label"] = *c->label;
        jc.push_back(std::move(cell));
    }
    Json jp = Json::array();
    for (const auto& p : page.paths) jp.push_back(point_pair(p));
    Json ji = Json::array();
    for (const auto& r : page.image_refs) {
        Json img = {{"id", r.id}};
        if (r.bbox) img["bbox"] = bbox_to_json(*r.bbox);
        ji.push_back(std::move(img));
    }
    return {{"page_number", page.geometry.page_number},
            {"width", page.geometry.width},
            {"height", page.geometry.height},
            {"cells", std::move(jc)},
            {"paths", std::move(jp)},
            {"image_refs", std::move(ji)}};
}

ParsedPage page_from_json(const JsonCursor& c) {
    ParsedPage page;
    page.geometry.page_number = static_cast<int>(c.at("page_number").integer());
    page.geometry.width = c.at("width").positive_number();
    page.geometry.height = c.at("height").positive_number();
    auto cells = c.at("cells");
    for (std::size_t i = 0, n = cells.array_size(); i < n; ++i) {
        auto jc = cells.at(i);
        TextCell cell;
        cell.id = static_cast<int>(jc.at("id").integer());
        cell.bbox = bbox_from_json(jc.at("bbox"));
        cell.text = jc.at("text").string();
        auto style = jc.at("style");
        cell.style.bold = style.at("bold").boolean();
        cell.style.italic = style.at("italic").boolean();
        cell.style.font_size = style.at("font_size").number();
        if (auto label = jc.find("label")) cell.label = label->string();
        page.cells.push_back(std::move(cell));
    }
    std::stable_sort(page.cells.begin(), page.cells.end(), [](const TextCell& a, const TextCell& b) { return a.id < b.id; });
    auto paths = c.at("paths");
    for (std::size_t i = 0, n = paths.array_size(); i < n; ++i) {
        auto jp = paths.at(i);
        if (jp.array_size() != 4) jp.fail("path must have 4 coordinates");
        page.paths.push_back({{jp.at(0).number(), jp.at(1).number()}, {jp.at(2).number(), jp.at(3).number()}});
    }
    auto images = c.at("image_refs");
    for (std::size_t i = 0, n = images.array_size(); i < n; ++i) {
        auto ji = images.at(i);
        ImageRef ref{ji.at("id").string(), std::nullopt};
        if (auto b = ji.find("bbox")) ref.bbox = bbox_from_json(*b);
        page.image_refs.push_back(std::move(ref));
    }
    return page;
}

Json to_json(const ParsedDocument& doc) {
    std::vector<const ParsedPage*> pages;
    for (const auto& p : doc.pages) pages.push_back(&p);
    std::stable_sort(pages.begin(), pages.end(), [](const ParsedPage* a, const ParsedPage* b) {
        return a->geometry.page_number < b->geometry.page_number;
    });
    Json jp = Json::array();
    for (const ParsedPage* p : pages) jp.push_back(to_json(*p));
    return {{"schema", kParsedSchema},
            {"schema_version", doc.schema_version},
            {"doc_id", doc.doc_id},
            {"source_name", doc.source_name},
            {"pages", std::move(jp)}};
}

ParsedDocument parsed_from_json(const JsonCursor& c) {
    expect_schema(c, kParsedSchema);
    ParsedDocument doc;
    doc.schema_version = static_cast<int>(c.at("schema_version").integer());
    doc.doc_id = c.at("doc_id").string();
    doc.source_name = c.at("source_name").string();
    auto pages = c.at("pages");
    for (std::size_t i = 0, n = pages.array_size(); i < n; ++i) doc.pages.push_back(page_from_json(pages.at(i)));
    return doc;
}

Json to_json(const StructuredDocument& doc) {
    Json main = Json::array();
    for (const auto& o : doc.main_text) {
        main.push_back({{"prov", prov_to_json(o.prov)}, {"type", o.type}, {"text", o.text}});
    }
    Json tables = Json::array();
    for (const auto& t : doc.tables) {
        Json rows = Json::array();
        for (const auto& r : t.rows) rows.push_back(r);
        tables.push_back({{"prov", prov_to_json(t.prov)}, {"rows", std::move(rows)}});
    }
    Json images = Json::array();
    for (const auto& im : doc.images) {
        Json j = {{"prov", prov_to_json(im.prov)}};
        if (im.ref) j["ref"] = *im.ref;
        images.push_back(std::move(j));
    }
    return {{"schema", kStructuredSchema},
            {"schema_version", doc.schema_version},
            {"doc_id", doc.doc_id},
            {"description",
             {{"title", doc.description.title},
              {"abstract", doc.description.abstract},
              {"affiliations", doc.description.affiliations},
              {"authors", doc.description.authors}}},
            {"main-text", std::move(main)},
            {"tables", std::move(tables)},
            {"images", std::move(images)}};
}

StructuredDocument structured_from_json(const JsonCursor& c) {
    expect_schema(c, kStructuredSchema);
    StructuredDocument doc;
    doc.schema_version = static_cast<int>(c.at("schema_version").integer());
    doc.doc_id = c.at("doc_id").string();
    auto d = c.at("description");
    doc.description.title = d.at("title").string();
    doc.description.abstract = d.at("abstract").string();
    doc.description.affiliations = d.at("affiliations").string();
    doc.description.authors = d.at("authors").string();
    auto main = c.at("main-text");
    for (std::size_t i = 0, n = main.array_size(); i < n; ++i) {
        auto o = main.at(i);
        doc.main_text.push_back({o.at("type").string(), o.at("text").string(), prov_from_json(o.at("prov"))});
    }
    auto tables = c.at("tables");
    for (std::size_t i = 0, n = tables.array_size(); i < n; ++i) {
        auto t = tables.at(i);
        TableObject table{prov_from_json(t.at("prov")), {}};
        auto rows = t.at("rows");
        for (std::size_t r = 0, nr = rows.array_size(); r < nr; ++r) {
            auto row = rows.at(r);
            std::vector<std::string> cells;
            for (std::size_t k = 0, nk = row.array_size(); k < nk; ++k) cells.push_back(row.at(k).string());
            table.rows.push_back(std::move(cells));
        }
        doc.tables.push_back(std::move(table));
    }
    auto images = c.at("images");
    for (std::size_t i = 0, n = images.array_size(); i < n; ++i) {
        auto im = images.at(i);
        ImageObject obj{prov_from_json(im.at("prov")), std::nullopt};
        if (auto ref = im.find("ref")) obj.ref = ref->string();
        doc.images.push_back(std::move(obj));
    }
    return doc;
}

Json to_json(const DocumentLabels& labels) {
    std::vector<const PageLabels*> pages;
    for (const auto& p : labels.pages) pages.push_back(&p);
    std::stable_sort(pages.begin(), pages.end(),
                     [](const PageLabels* a, const PageLabels* b) { return a->page_number < b->page_number; });
    Json jp = Json::array();
    for (const PageLabels* p : pages) {
        Json page = {{"page_number", p->page_number}, {"labels", p->labels}};
        if (!p->confidence.empty()) page["confidence"] = p->confidence;
        jp.push_back(std::move(page));
    }
    return {{"schema", kLabelsSchema}, {"schema_version", kSchemaVersion}, {"doc_id", labels.doc_id}, {"pages", std::move(jp)}};
}

DocumentLabels labels_from_json(const JsonCursor& c) {
    expect_schema(c, kLabelsSchema);
    DocumentLabels out;
    out.doc_id = c.at("doc_id").string();
    auto pages = c.at("pages");
    for (std::size_t i = 0, n = pages.array_size(); i < n; ++i) {
        auto jp = pages.at(i);
        PageLabels p;
        p.page_number = static_cast<int>(jp.at("page_number").integer());
        auto labels = jp.at("labels");
        for (std::size_t k = 0, nk = labels.array_size(); k < nk; ++k) p.labels.push_back(labels.at(k).string());
        if (auto conf = jp.find("confidence")) {
            if (conf->array_size() != p.labels.size()) conf->fail("confidence length must match labels");
            for (std::size_t k = 0, nk = conf->array_size(); k < nk; ++k) p.confidence.push_back(conf->at(k).number());
        }
        out.pages.push_back(std::move(p));
    }
    return out;
}

Json to_json(const LabelSet& labels) {
    Json arr = Json::array();
    for (const auto& l : labels.labels()) arr.push_back({{"name", l.name}, {"color", l.color}});
    return arr;
}

LabelSet label_set_from_json(const JsonCursor& c) {
    std::vector<LabelDef> defs;
    for (std::size_t i = 0, n = c.array_size(); i < n; ++i) {
        auto e = c.at(i);
        if (e.raw().is_string()) {
            std::string name = e.string();
            defs.push_back({name, palette_color(name, i)});
        } else {
            std::string name = e.at("name").string();
            auto color = e.find("color");
            defs.push_back({name, color ? color->string() : palette_color(name, i)});
        }
    }
    try {
        return LabelSet(std::move(defs));
    } catch (const Error& e) {
        c.fail(e.detail());
    }
}

std::string serialize(const ParsedDocument& doc) { return canonical_dump(to_json(doc)); }
std::string serialize(const StructuredDocument& doc) { return canonical_dump(to_json(doc)); }
std::string serialize(const DocumentLabels& labels) { return canonical_dump(to_json(labels)); }

ParsedDocument deserialize_parsed(std::string_view bytes) {
    Json j = parse_json(bytes);
    return parsed_from_json(JsonCursor(j));
}

StructuredDocument deserialize_structured(std::string_view bytes) {
    Json j = parse_json(bytes);
    return structured_from_json(JsonCursor(j));
}

DocumentLabels deserialize_labels(std::string_view bytes) {
    Json j = parse_json(bytes);
    return labels_from_json(JsonCursor(j));
}

DocumentLabels labels_from_cells(const ParsedDocument& doc) {
    DocumentLabels out{doc.doc_id, {}};
    for (const auto& page : doc.pages) {
        PageLabels p{page.geometry.page_number, {}, {}};
        for (const auto& c : page.cells) p.labels.push_back(c.label.value_or(""));
        out.pages.push_back(std::move(p));
    }
    return out;
}

ParsedDocument with_labels(ParsedDocument doc, const DocumentLabels& labels) {
    for (auto& page : doc.pages) {
        auto it = std::find_if(labels.pages.begin(), labels.pages.end(),
                               [&](const PageLabels& p) { return p.page_number == page.geometry.page_number; });
        if (it == labels.pages.end()) continue;
        if (it->labels.size() != page.cells.size()) {
            throw Error(errc::kShapeError, "page " + std::to_string(page.geometry.page_number) + " has " +
                                               std::to_string(page.cells.size()) + " cells but " +
                                               std::to_string(it->labels.size()) + " labels");
        }
        for (std::size_t i = 0; i < page.cells.size(); ++i) {
            const auto id = static_cast<std::size_t>(page.cells[i].id);
            if (id >= it->labels.size()) throw Error(errc::kShapeError, "cell id out of range for labels");
            const auto& l = it->labels[id];
            if (l.empty()) page.cells[i].label.reset();
            else page.cells[i].label = l;
        }
    }
    return doc;
}

}  // namespace ccs::doc
