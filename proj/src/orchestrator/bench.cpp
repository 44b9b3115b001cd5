#include "ccs/orchestrator/bench.hpp"

#include <algorithm>
#include <cstdio>
#include <limits>
#include <map>

#include "ccs/doc/serialize.hpp"
#include "ccs/error.hpp"
#include "ccs/ml/model.hpp"
#include "ccs/orchestrator/orchestrator.hpp"
#include "ccs/parser/parser.hpp"
#include "ccs/synth/corpus.hpp"

namespace ccs::orchestrator {

namespace {

std::string default_model() {
    std::vector<doc::ParsedPage> pages;
    for (const auto& sd : synth::make_corpus({synth::Template::SingleColumn, 2, 2, 11})) {
        const doc::ParsedDocument parsed = parser::parse_document(synth::render_pdf(sd));
        const doc::ParsedDocument labeled = doc::with_labels(parsed, synth::oracle_labels(parsed, sd));
        pages.insert(pages.end(), labeled.pages.begin(), labeled.pages.end());
    }
    ml::ForestConfig cfg;
    cfg.n_trees = 10;
    cfg.n_refinement_stages = 1;
    return ml::TemplateModel::train(pages, doc::LabelSet::six_labels(), cfg).serialize();
}

struct StageRun {
    double seconds = 0;
    std::vector<std::string> outputs;
    bool ok = true;
};

StageRun run_stage(store::ObjectStore& store, const pipeline::Registry& registry, const std::vector<TaskSpec>& tasks,
                   const std::string& queue, int workers) {
    InProcessBroker broker;
    MemoryResultBackend results;
    Orchestrator orch(broker, results, store, registry);
    std::vector<std::string> ids;
    for (const auto& t : tasks) ids.push_back(orch.submit(t));
    QueueConfig cfg;
    cfg.workers[queue] = workers;
    cfg.lease = std::chrono::hours(1);
    StageRun run;
    run.seconds = orch.run_until_drained(cfg).seconds;
    for (const auto& id : ids) {
        auto st = orch.status(id);
        if (!st || st->state != TaskState::kSucceeded || !st->result) {
            run.ok = false;
            continue;
        }
        run.outputs.push_back(*st->result);
    }
    std::sort(run.outputs.begin(), run.outputs.end());
    return run;
}

}  // namespace

std::vector<BenchRow> bench_scaling(const std::vector<std::string>& pdfs, const std::vector<int>& workers,
                                    const BenchOptions& opts) {
    for (int w : workers) {
        if (w < 1) throw Error(errc::kInvalidArgument, "worker counts must be positive");
    }
    store::MemoryObjectStore store;
    const pipeline::Registry registry = pipeline::Registry::defaults();
    const std::string model_bytes = opts.model ? *opts.model : default_model();
    const ml::TemplateModel model = ml::TemplateModel::deserialize(model_bytes);
    const std::string model_key = store.put(model_bytes);

    std::vector<TaskSpec> parse_tasks, ml_tasks, assemble_tasks;
    for (const auto& pdf : pdfs) {
        const std::string pdf_key = store.put(pdf);
        const doc::ParsedDocument parsed = parser::parse_document(pdf);
        const std::string parsed_key = store.put(doc::serialize(parsed));
        const std::string labels_key = store.put(doc::serialize(model.predict(parsed)));
        for (const auto& page : parsed.pages) {
            const Json params = {{"page", page.geometry.page_number}};
            parse_tasks.push_back({"parse", {pdf_key}, params, "", {}});
            ml_tasks.push_back({"predict", {parsed_key, model_key}, params, "", {}});
        }
        assemble_tasks.push_back({"assemble", {parsed_key, labels_key}, Json::object(), "", {}});
    }

    std::vector<int> counts = workers;
    if (std::find(counts.begin(), counts.end(), 1) == counts.end()) counts.insert(counts.begin(), 1);
    std::sort(counts.begin(), counts.end());
    counts.erase(std::unique(counts.begin(), counts.end()), counts.end());

    const std::vector<std::tuple<std::string, const std::vector<TaskSpec>*, std::string>> stages{
        {"parse", &parse_tasks, "parse"}, {"ml-apply", &ml_tasks, "ml"}, {"assemble", &assemble_tasks, "assemble"}};
    std::vector<BenchRow> rows;
    for (const auto& [stage, tasks, queue] : stages) {
        std::map<int, StageRun> runs;
        for (int w : counts) {
            StageRun best;
            best.seconds = std::numeric_limits<double>::infinity();
            for (int r = 0; r < std::max(1, opts.repeats); ++r) {
                StageRun run = run_stage(store, registry, *tasks, queue, w);
                if (run.seconds < best.seconds) best = std::move(run);
            }
            runs[w] = std::move(best);
        }
        const StageRun& base = runs.at(1);
        for (int w : workers) {
            const StageRun& run = runs.at(w);
            BenchRow row;
            row.stage = stage;
            row.workers = w;
            row.seconds = run.seconds;
            row.tasks = tasks->size();
            row.speedup = (tasks->empty() || run.seconds <= 0) ? 1.0 : base.seconds / run.seconds;
            row.equivalent = run.ok && base.ok && run.outputs == base.outputs;
            rows.push_back(row);
        }
    }
    return rows;
}

std::string bench_csv(const std::vector<BenchRow>& rows) {
    std::string out = "stage,workers,seconds,speedup\n";
    char buf[128];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "%s,%d,%.6f,%.3f\n", r.stage.c_str(), r.workers, r.seconds, r.speedup);
        out += buf;
    }
    return out;
}

}  // namespace ccs::orchestrator
