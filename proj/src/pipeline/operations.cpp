#include "ccs/pipeline/operations.hpp"

#include "ccs/assemble/assemble.hpp"
#include "ccs/detect/detect.hpp"
#include "ccs/doc/serialize.hpp"
#include "ccs/error.hpp"
#include "ccs/ml/model.hpp"
#include "ccs/parser/parser.hpp"

namespace ccs::pipeline {

std::string OpContext::input(std::size_t i) const {
    if (i >= inputs.size()) throw Error(errc::kMissingInput, "operation needs input #" + std::to_string(i));
    auto bytes = store.get(inputs[i]);
    if (!bytes) throw Error(errc::kMissingInput, "no stored object " + inputs[i]);
    return *bytes;
}

void Registry::add(Operation op) {
    std::string name = op.name;
    ops_[name] = std::move(op);
}

const Operation* Registry::find(const std::string& name) const {
    auto it = ops_.find(name);
    return it == ops_.end() ? nullptr : &it->second;
}

std::vector<std::string> Registry::names() const {
    std::vector<std::string> out;
    for (const auto& [name, op] : ops_) out.push_back(name);
    return out;
}

namespace {

JsonCursor params_of(const OpContext& ctx) { return JsonCursor(ctx.params, "/params"); }

// keeps only the page numbered params.page, when given
void select_page(doc::ParsedDocument& d, const OpContext& ctx) {
    auto page = params_of(ctx).find("page");
    if (!page) return;
    const auto n = page->integer();
    std::erase_if(d.pages, [&](const doc::ParsedPage& p) { return p.geometry.page_number != n; });
    if (d.pages.empty()) page->fail("document has no page " + std::to_string(n));
}

std::string parse_op(const OpContext& ctx) {
    parser::ParseConfig cfg;
    auto p = params_of(ctx);
    if (auto n = p.find("normalization")) cfg.normalization = parser::normalization_config_from_json(*n);
    std::string source = p.find("source_name") ? p.at("source_name").string() : "";
    doc::ParsedDocument d = parser::parse_document(ctx.input(0), cfg, nullptr, source);
    select_page(d, ctx);
    return ctx.store.put(doc::serialize(d));
}

std::string predict_op(const OpContext& ctx) {
    doc::ParsedDocument d = doc::deserialize_parsed(ctx.input(0));
    select_page(d, ctx);
    const ml::TemplateModel model = ml::TemplateModel::deserialize(ctx.input(1));
    return ctx.store.put(doc::serialize(model.predict(d)));
}

std::string assemble_op(const OpContext& ctx) {
    const doc::ParsedDocument d = doc::deserialize_parsed(ctx.input(0));
    assemble::AssemblyConfig cfg;
    if (auto c = params_of(ctx).find("config")) cfg = assemble::assembly_config_from_json(*c);
    if (ctx.input_count() > 1) {
        const doc::DocumentLabels labels = doc::deserialize_labels(ctx.input(1));
        return ctx.store.put(doc::serialize(assemble::assemble(d, &labels, cfg)));
    }
    return ctx.store.put(doc::serialize(assemble::assemble(d, nullptr, cfg)));
}

// inputs: parsed documents whose cells carry labels; unlabeled pages are skipped
std::string train_op(const OpContext& ctx) {
    auto p = params_of(ctx);
    ml::ForestConfig cfg;
    if (auto c = p.find("config")) cfg = ml::forest_config_from_json(*c);
    doc::LabelSet labels = doc::LabelSet::six_labels();
    if (auto l = p.find("labels")) labels = doc::label_set_from_json(*l);
    std::vector<doc::ParsedPage> pages;
    for (std::size_t i = 0; i < ctx.input_count(); ++i) {
        doc::ParsedDocument d = doc::deserialize_parsed(ctx.input(i));
        for (auto& page : d.pages) {
            const bool labeled = std::all_of(page.cells.begin(), page.cells.end(),
                                             [](const doc::TextCell& c) { return c.label.has_value(); });
            if (labeled && !page.cells.empty()) pages.push_back(std::move(page));
        }
    }
    if (pages.empty()) throw Error(errc::kEmptyDataset, "no fully labeled pages among the inputs");
    return ctx.store.put(ml::TemplateModel::train(pages, labels, cfg).serialize());
}

std::string detect_op(const OpContext& ctx) {
    const doc::ParsedDocument d = doc::deserialize_parsed(ctx.input(0));
    return ctx.store.put(detect::serialize(detect::HeuristicTableDetector().detect(d)));
}

// inputs: parsed document, detections, truth labels
std::string detect_eval_op(const OpContext& ctx) {
    const doc::ParsedDocument d = doc::deserialize_parsed(ctx.input(0));
    const detect::DocumentDetections dets = detect::deserialize_detections(ctx.input(1));
    const doc::DocumentLabels truth = doc::deserialize_labels(ctx.input(2));
    auto p = params_of(ctx);
    const std::string table = p.find("table_label") ? p.at("table_label").string() : "table";
    const double min_overlap = p.find("min_overlap") ? p.at("min_overlap").number() : 0.5;

    std::vector<detect::SweepCase> cases;
    for (const auto& page : d.pages) {
        detect::SweepCase c;
        c.cells = page.cells;
        for (const auto& pd : dets.pages) {
            if (pd.page_number == page.geometry.page_number) c.detections = pd.detections;
        }
        const doc::PageLabels* pl = nullptr;
        for (const auto& l : truth.pages) {
            if (l.page_number == page.geometry.page_number) pl = &l;
        }
        if (!pl || pl->labels.size() != page.cells.size()) {
            throw Error(errc::kShapeError, "truth labels do not cover page " + std::to_string(page.geometry.page_number));
        }
        for (const auto& cell : page.cells) c.truth.push_back(pl->labels[static_cast<std::size_t>(cell.id)] == table);
        cases.push_back(std::move(c));
    }
    const detect::SweepResult r = detect::sweep_confidence(cases, min_overlap);
    Json points = Json::array();
    for (const auto& pt : r.points) {
        points.push_back({{"threshold", pt.threshold}, {"tp", pt.tp}, {"fp", pt.fp}, {"fn", pt.fn},
                          {"precision", pt.precision}, {"recall", pt.recall}, {"f1", pt.f1}});
    }
    Json out = {{"schema", "sweep.v1"}, {"points", std::move(points)}, {"best_threshold", r.best_threshold},
                {"best_f1", r.best_f1}};
    return ctx.store.put(canonical_dump(out));
}

}  // namespace

Registry Registry::defaults() {
    Registry r;
    r.add({"parse", "parse", parse_op});
    r.add({"predict", "ml", predict_op});
    r.add({"train", "ml", train_op});
    r.add({"detect", "ml", detect_op});
    r.add({"detect-eval", "ml", detect_eval_op});
    r.add({"assemble", "assemble", assemble_op});
    return r;
}

}  // namespace ccs::pipeline
