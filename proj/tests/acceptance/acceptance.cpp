// Acceptance checks. Each criterion prints one line:
//   PASS|FAIL  <name>  <measurements>  (<seconds>)
// Exit status: 0 when all selected criteria pass, 77 when the only failures
// come from a host too small to measure them, 1 otherwise.

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "ccs/assemble/assemble.hpp"
#include "ccs/detect/detect.hpp"
#include "ccs/doc/serialize.hpp"
#include "ccs/doc/validate.hpp"
#include "ccs/ml/metrics.hpp"
#include "ccs/ml/model.hpp"
#include "ccs/orchestrator/bench.hpp"
#include "ccs/orchestrator/orchestrator.hpp"
#include "ccs/parser/parser.hpp"
#include "ccs/rng.hpp"
#include "ccs/service/annotation.hpp"
#include "ccs/service/service.hpp"
#include "ccs/synth/corpus.hpp"
#include "fixtures.hpp"

using namespace ccs;
using namespace std::chrono_literals;

namespace {

// Tolerances and budgets.
constexpr double kJournalTolerance = 0.01;  // percentage points
constexpr double kJournalBudget = 1.0;      // seconds
constexpr double kTemplateMinMacro = 0.97;
constexpr double kTemplateBudget = 300.0;
constexpr double kRefinementSlack = 0.01;
constexpr int kTemplatePages = 400;
constexpr double kTrainFraction = 0.8;
constexpr int kAssemblyRepetitions = 100;
constexpr double kAssemblyBudget = 30.0;
constexpr int kSweepSets = 20;
constexpr double kSweepBudget = 10.0;
constexpr int kScalingParseDocs = 200;
constexpr double kMinParseSpeedup = 3.0;
constexpr double kMaxAssembleSpeedup = 4.0;
constexpr double kScalingBudget = 600.0;
constexpr double kCrashRate = 0.10;
constexpr double kPerPageSeconds = 10.0;
constexpr double kPerCorrectionSeconds = 3.0;

struct Outcome {
    bool pass = false;
    std::string detail;
    bool host_limited = false;  // failed only because the host cannot measure it
};

struct Criterion {
    std::string name;
    std::function<std::vector<std::pair<std::string, Outcome>>()> run;
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Pages of a labeled synthetic corpus, `pages` in total.
std::vector<doc::ParsedPage> template_corpus(synth::Template layout, int pages_per_doc, std::uint64_t seed) {
    std::vector<doc::ParsedPage> pages;
    for (int d = 0; static_cast<int>(pages.size()) < kTemplatePages; ++d) {
        const auto sd = synth::make_document(layout, pages_per_doc, derive_seed(seed, static_cast<std::uint64_t>(d)),
                                             "doc" + std::to_string(d));
        const auto parsed = parser::parse_document(synth::render_pdf(sd));
        const auto labeled = doc::with_labels(parsed, synth::oracle_labels(parsed, sd));
        for (const auto& p : labeled.pages) {
            if (static_cast<int>(pages.size()) < kTemplatePages) pages.push_back(p);
        }
    }
    return pages;
}

// ---------------------------------------------------------------------------

std::vector<std::pair<std::string, Outcome>> journal_metrics() {
    const auto t0 = std::chrono::steady_clock::now();
    const auto m = ml::metrics_from_confusion(testing::journal_confusion(), testing::journal_labels());
    struct Expect {
        const char* label;
        double p, r;
    };
    // Picture recall: the matrix gives 4223/4253; the printed table says 99.24.
    const Expect expect[] = {{"title", 97.40, 100.00}, {"author", 97.52, 99.85}, {"subtitle", 100, 100},
                             {"text", 99.99, 99.94},   {"picture", 99.64, 99.29}, {"table", 99.24, 99.97}};
    bool ok = true;
    std::string worst;
    double max_dev = 0;
    for (std::size_t i = 0; i < 6; ++i) {
        const double dp = std::abs(*m.precision[i] * 100 - expect[i].p);
        const double dr = std::abs(*m.recall[i] * 100 - expect[i].r);
        if (dp > kJournalTolerance || dr > kJournalTolerance) ok = false;
        if (std::max(dp, dr) > max_dev) {
            max_dev = std::max(dp, dr);
            worst = expect[i].label;
        }
    }
    const double s = seconds_since(t0);
    ok = ok && s < kJournalBudget;
    return {{"journal-metrics",
             {ok, fmt("max deviation %.4f pp (%s), picture P=%.3f R=%.3f", max_dev, worst.c_str(), *m.precision[4] * 100,
                      *m.recall[4] * 100)}}};
}

std::vector<std::pair<std::string, Outcome>> templates() {
    const auto t0 = std::chrono::steady_clock::now();
    struct Corpus {
        const char* name;
        synth::Template layout;
        int pages_per_doc;
        std::uint64_t seed;
    };
    const Corpus corpora[] = {{"single-column", synth::Template::SingleColumn, 13, 101},
                              {"two-column", synth::Template::TwoColumn, 6, 202}};
    const auto labels = doc::LabelSet::six_labels();
    const ml::ForestConfig cfg;  // the same configuration for both templates

    bool template_ok = true, refine_ok = true;
    std::string template_detail, refine_detail;
    for (const auto& c : corpora) {
        const auto pages = template_corpus(c.layout, c.pages_per_doc, c.seed);
        long long text = 0, title = 0;
        for (const auto& p : pages) {
            for (const auto& cell : p.cells) {
                text += *cell.label == "text";
                title += *cell.label == "title";
            }
        }
        const auto split = static_cast<std::size_t>(kTrainFraction * static_cast<double>(pages.size()));
        const std::vector<doc::ParsedPage> train(pages.begin(), pages.begin() + static_cast<std::ptrdiff_t>(split));
        const std::vector<doc::ParsedPage> test(pages.begin() + static_cast<std::ptrdiff_t>(split), pages.end());
        const auto model = ml::TemplateModel::train(train, labels, cfg);

        std::vector<std::string> truth, final_pred, stage0, stage1;
        for (const auto& p : test) {
            const auto all = model.predict(p);
            const auto s0 = model.predict(p, 0);
            const auto s1 = model.predict(p, 1);
            for (std::size_t i = 0; i < p.cells.size(); ++i) {
                truth.push_back(*p.cells[i].label);
                final_pred.push_back(labels[static_cast<std::size_t>(all.label[i])].name);
                stage0.push_back(labels[static_cast<std::size_t>(s0.label[i])].name);
                stage1.push_back(labels[static_cast<std::size_t>(s1.label[i])].name);
            }
        }
        const auto m = ml::evaluate(truth, final_pred, labels);
        const auto m0 = ml::evaluate(truth, stage0, labels);
        const auto m1 = ml::evaluate(truth, stage1, labels);
        template_ok &= m.macro_precision >= kTemplateMinMacro && m.macro_recall >= kTemplateMinMacro;
        refine_ok &= m1.macro_f1 >= m0.macro_f1 - kRefinementSlack;
        template_detail += fmt("%s: %zu/%zu pages, text:title %.0f:1, macro P=%.4f R=%.4f; ", c.name, train.size(),
                               test.size(), title ? static_cast<double>(text) / static_cast<double>(title) : 0.0,
                               m.macro_precision, m.macro_recall);
        refine_detail += fmt("%s: stage0 F1=%.4f stage1 F1=%.4f; ", c.name, m0.macro_f1, m1.macro_f1);
    }
    const double s = seconds_since(t0);
    template_ok &= s < kTemplateBudget;
    return {{"template-models", {template_ok, template_detail + fmt("total %.1f s", s)}},
            {"refinement", {refine_ok, refine_detail.substr(0, refine_detail.size() - 2)}}};
}

// Structured documents built from labeled synthetic papers and small hand-made pages.
std::vector<doc::ParsedDocument> assembly_fixtures() {
    std::vector<doc::ParsedDocument> out;
    for (int i = 0; i < 4; ++i) {
        const auto layout = i % 2 ? synth::Template::TwoColumn : synth::Template::SingleColumn;
        const auto sd = synth::make_document(layout, 3, 300 + static_cast<std::uint64_t>(i), "fixture" + std::to_string(i));
        const auto parsed = parser::parse_document(synth::render_pdf(sd));
        out.push_back(doc::with_labels(parsed, synth::oracle_labels(parsed, sd)));
    }
    using testing::cell;
    out.push_back(testing::document_of({testing::page_of({cell(0, 72, 700, 300, 710, "Hyphen-", "text"),
                                                          cell(1, 72, 688, 300, 698, "ated words", "text"),
                                                          cell(2, 72, 676, 300, 686, "and a docu-", "text"),
                                                          cell(3, 72, 664, 300, 674, "ment", "text")})},
                                       "hand"));
    out.push_back(testing::document_of({testing::page_of({})}, "empty"));
    return out;
}

std::string letters(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (!std::isspace(static_cast<unsigned char>(c)) && c != '-') out += c;
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<std::pair<std::string, Outcome>> assembly() {
    const auto t0 = std::chrono::steady_clock::now();
    const auto fixtures = assembly_fixtures();
    bool deterministic = true, conserved = true;
    Rng rng(77);
    for (const auto& d : fixtures) {
        const std::string reference = doc::serialize(assemble::assemble(d));
        for (int rep = 0; rep < kAssemblyRepetitions; ++rep) {
            auto shuffled = d;
            for (auto& p : shuffled.pages) rng.shuffle(p.cells);
            rng.shuffle(shuffled.pages);
            deterministic &= doc::serialize(assemble::assemble(shuffled)) == reference;
        }
        const auto s = assemble::assemble(d);
        std::string in, out = s.description.title + s.description.authors + s.description.affiliations + s.description.abstract;
        for (const auto& p : d.pages) {
            for (const auto& c : p.cells) in += c.text;
        }
        for (const auto& o : s.main_text) out += o.text;
        conserved &= letters(in) == letters(out);
    }
    const double sec = seconds_since(t0);
    return {{"assembly-determinism",
             {deterministic && conserved && sec < kAssemblyBudget,
              fmt("%zu fixtures x %d shuffles, byte-identical=%s, text conserved=%s, %.1f s", fixtures.size(),
                  kAssemblyRepetitions, deterministic ? "yes" : "no", conserved ? "yes" : "no", sec)}}};
}

std::vector<std::pair<std::string, Outcome>> sweep() {
    const auto t0 = std::chrono::steady_clock::now();
    Rng rng(2024);
    int exact = 0;
    for (int set = 0; set < kSweepSets; ++set) {
        std::vector<detect::SweepCase> cases;
        const int pages = rng.range(1, 5);
        for (int p = 0; p < pages; ++p) {
            detect::SweepCase c;
            const int n_tables = rng.range(0, 3);
            std::vector<doc::BBox> tables;
            for (int t = 0; t < n_tables; ++t) {
                const double x = rng.uniform(50, 300), y = rng.uniform(50, 500);
                tables.push_back({x, y, x + rng.uniform(100, 250), y + rng.uniform(60, 200)});
            }
            const int n_cells = rng.range(20, 60);
            for (int i = 0; i < n_cells; ++i) {
                const double x = rng.uniform(40, 540), y = rng.uniform(40, 740);
                const doc::BBox b{x, y, x + rng.uniform(10, 60), y + 10};
                c.cells.push_back({i, b, "x", {}, std::nullopt});
                bool inside = false;
                for (const auto& t : tables) inside |= t.intersection_area(b) >= 0.5 * b.area();
                c.truth.push_back(inside);
            }
            // detections: jittered true tables plus spurious boxes, confidences on a coarse grid
            for (const auto& t : tables) {
                const double j = rng.uniform(-15, 15);
                c.detections.push_back({{t.x0 + j, t.y0 - j, t.x1 + j, t.y1 + j}, std::round(rng.uniform(0.3, 1.0) * 20) / 20, "table"});
            }
            for (int k = rng.range(0, 3); k > 0; --k) {
                const double x = rng.uniform(40, 400), y = rng.uniform(40, 600);
                c.detections.push_back({{x, y, x + rng.uniform(50, 200), y + rng.uniform(30, 150)},
                                        std::round(rng.uniform(0.0, 0.8) * 20) / 20, "table"});
            }
            cases.push_back(std::move(c));
        }
        const auto result = detect::sweep_confidence(cases);

        // oracle: every threshold on a fine grid plus each confidence, labeled from scratch
        std::vector<double> thresholds;
        for (int k = 0; k <= 1000; ++k) thresholds.push_back(k / 1000.0);
        for (const auto& c : cases) {
            for (const auto& d : c.detections) thresholds.push_back(d.confidence);
        }
        double best = -1;
        for (double t : thresholds) {
            long long tp = 0, fp = 0, fn = 0;
            for (const auto& c : cases) {
                for (std::size_t i = 0; i < c.cells.size(); ++i) {
                    bool hit = false;
                    for (const auto& d : c.detections) {
                        hit |= d.confidence >= t && d.bbox.intersection_area(c.cells[i].bbox) >= 0.5 * c.cells[i].bbox.area();
                    }
                    tp += hit && c.truth[i];
                    fp += hit && !c.truth[i];
                    fn += !hit && c.truth[i];
                }
            }
            const double f1 = tp + fp + fn == 0 ? 1.0 : 2.0 * static_cast<double>(tp) / static_cast<double>(2 * tp + fp + fn);
            best = std::max(best, f1);
        }
        exact += result.best_f1 == best;
    }
    const double s = seconds_since(t0);
    return {{"confidence-sweep", {exact == kSweepSets && s < kSweepBudget, fmt("%d/%d sets exact, %.2f s", exact, kSweepSets, s)}}};
}

std::vector<std::string> single_page_pdfs(int n, std::uint64_t seed) {
    std::vector<std::string> out;
    for (int i = 0; i < n; ++i) {
        out.push_back(synth::render_pdf(synth::make_document(synth::Template::SingleColumn, 1,
                                                             derive_seed(seed, static_cast<std::uint64_t>(i)), "p" + std::to_string(i))));
    }
    return out;
}

std::vector<std::pair<std::string, Outcome>> scaling() {
    const auto t0 = std::chrono::steady_clock::now();
    const unsigned cores = std::thread::hardware_concurrency();
    const auto big = orchestrator::bench_scaling(single_page_pdfs(kScalingParseDocs, 5), {1, 4});
    std::vector<std::string> small;
    for (int i = 0; i < 4; ++i) {
        small.push_back(synth::render_pdf(synth::make_document(synth::Template::TwoColumn, 3, 900 + static_cast<std::uint64_t>(i), "s")));
    }
    const auto few = orchestrator::bench_scaling(small, {1, 8});
    double parse4 = 0, assemble8 = 0;
    bool equivalent = true;
    for (const auto& r : big) {
        equivalent &= r.equivalent;
        if (r.stage == "parse" && r.workers == 4) parse4 = r.speedup;
    }
    for (const auto& r : few) {
        equivalent &= r.equivalent;
        if (r.stage == "assemble" && r.workers == 8) assemble8 = r.speedup;
    }
    const double s = seconds_since(t0);
    const bool parse_ok = parse4 >= kMinParseSpeedup;
    Outcome o{parse_ok && assemble8 <= kMaxAssembleSpeedup && equivalent && s < kScalingBudget,
              fmt("parse speedup@4=%.2f, assemble speedup@8 (4 docs)=%.2f, equivalent=%s, %u hardware threads, %.1f s",
                  parse4, assemble8, equivalent ? "yes" : "no", cores, s)};
    if (!o.pass && !parse_ok && cores < 4 && assemble8 <= kMaxAssembleSpeedup && equivalent) {
        o.host_limited = true;
        o.detail += " (UNATTAINABLE on this host: fewer than 4 hardware threads)";
    }
    return {{"orchestrator-scaling", o}};
}

std::vector<std::pair<std::string, Outcome>> faults() {
    const auto t0 = std::chrono::steady_clock::now();
    ml::ForestConfig cfg;
    cfg.n_trees = 10;
    cfg.n_refinement_stages = 1;
    std::vector<doc::ParsedPage> pages;
    const auto train_doc = synth::make_document(synth::Template::SingleColumn, 4, 41, "train");
    const auto parsed_train = parser::parse_document(synth::render_pdf(train_doc));
    const auto labeled = doc::with_labels(parsed_train, synth::oracle_labels(parsed_train, train_doc));
    const std::string model = ml::TemplateModel::train(labeled.pages, doc::LabelSet::six_labels(), cfg).serialize();

    std::vector<std::string> pdfs;
    for (int i = 0; i < 24; ++i) pdfs.push_back(synth::render_pdf(synth::make_document(synth::Template::TwoColumn, 2, 500 + static_cast<std::uint64_t>(i), "f")));

    // parse -> predict -> assemble per document; returns the final outputs in submission order
    auto run = [&](const orchestrator::FaultInjector& inj, orchestrator::ExecutionReport& report) {
        orchestrator::InProcessBroker broker;
        orchestrator::MemoryResultBackend results;
        store::MemoryObjectStore store;
        const auto registry = pipeline::Registry::defaults();
        orchestrator::Orchestrator orch(broker, results, store, registry, {20, 5ms});
        const std::string model_key = store.put(model);
        std::vector<std::string> ids;
        for (const auto& pdf : pdfs) {
            const std::string parsed_key = store.put(doc::serialize(parser::parse_document(pdf)));
            orchestrator::TaskSpec parse{"parse", {store.put(pdf)}, Json::object(), "", {}};
            parse.then.push_back({"predict", {std::string(orchestrator::kPrevious), model_key}, Json::object(), "", {}});
            ids.push_back(orch.chain(parse, {"assemble", {parsed_key, std::string(orchestrator::kPrevious)}, Json::object(), "", {}}));
        }
        report = orch.run_until_drained(orchestrator::QueueConfig{{{"parse", 2}, {"ml", 2}, {"assemble", 2}}, 50ms}, inj);
        std::vector<std::string> outputs;
        for (const auto& id : ids) {
            const auto st = orch.wait_chain(id, 1s);
            outputs.push_back(st && st->state == orchestrator::TaskState::kSucceeded ? *store.get(*st->result) : "");
        }
        return outputs;
    };
    orchestrator::ExecutionReport clean_report, faulty_report;
    const auto clean = run({}, clean_report);
    const auto faulty = run({kCrashRate, 99}, faulty_report);
    const bool all_ok = std::none_of(faulty.begin(), faulty.end(), [](const auto& s) { return s.empty(); });
    const bool identical = clean == faulty;
    return {{"fault-tolerance",
             {all_ok && identical && faulty_report.crashes > 0,
              fmt("%zu chains, %zu crashes injected, all succeeded=%s, byte-identical=%s, %.1f s", faulty.size(),
                  faulty_report.crashes, all_ok ? "yes" : "no", identical ? "yes" : "no", seconds_since(t0))}}};
}

std::vector<std::pair<std::string, Outcome>> annotation() {
    // Sessions of 20 pages with 40 cells each; each retrain halves the model error.
    constexpr int kCellsPerPage = 40, kPagesPerSession = 20, kSessions = 5;
    Rng rng(31);
    std::vector<service::AnnotationRecord> records;
    std::vector<std::int64_t> retrains;
    std::int64_t t = 0;
    double error = 0.4;
    for (int s = 0; s < kSessions; ++s) {
        if (s > 0) {
            retrains.push_back(t);
            error /= 2;
        }
        for (int p = 0; p < kPagesPerSession; ++p) {
            std::vector<std::string> pre(kCellsPerPage, "text"), post = pre;
            for (auto& l : pre) {
                if (rng.chance(error)) l = "table";
            }
            service::AnnotationRecord r;
            r.doc_id = "doc";
            r.page_number = p + 1;
            r.labels = post;
            r.source = service::AnnotationSource::kCorrected;
            r.corrections_count = service::diff_corrections(pre, post);
            r.pre_annotation = pre;
            r.started_ms = t;
            t += static_cast<std::int64_t>(1000 * (kPerPageSeconds + kPerCorrectionSeconds * *r.corrections_count));
            r.submitted_ms = t;
            records.push_back(std::move(r));
        }
    }
    const auto stats = service::compute_session_stats(records, retrains);
    bool increasing = stats.segments.size() == static_cast<std::size_t>(kSessions);
    std::string rates;
    for (std::size_t i = 0; i < stats.segments.size(); ++i) {
        rates += fmt("%s%.2f", i ? " < " : "", stats.segments[i].rate);
        if (i) increasing &= stats.segments[i].rate > stats.segments[i - 1].rate;
    }

    std::vector<service::AnnotationRecord> steady;
    for (int i = 0; i < 10; ++i) {
        service::AnnotationRecord r;
        r.started_ms = i * 30000;
        r.submitted_ms = (i + 1) * 30000;
        steady.push_back(r);
    }
    const double rate = service::compute_session_stats(steady, {}).windows.at(0).rate;
    return {{"annotation-rate",
             {increasing && rate == 2.0,
              fmt("rates after each retrain %s pages/min; 30 s/page gives %.6f pages/min", rates.c_str(), rate)}}};
}

std::vector<std::pair<std::string, Outcome>> end_to_end() {
    const auto t0 = std::chrono::steady_clock::now();
    testing::TempDir dir("e2e");
    service::Service svc({.data_dir = dir.path()});
    auto wait_result = [&](const std::string& task) {
        service::Response r;
        for (int i = 0; i < 6000; ++i) {
            r = svc.handle("GET", "/tasks/" + task + "/result");
            if (r.status != 409) break;
            std::this_thread::sleep_for(10ms);
        }
        return r;
    };
    auto fail = [&](const std::string& why) {
        return std::vector<std::pair<std::string, Outcome>>{{"end-to-end", {false, why}}};
    };

    const std::string coll = svc.handle("POST", "/collections", R"({"name": "e2e"})").json()["collection_id"];
    const auto sd = synth::make_document(synth::Template::TwoColumn, 3, 4242, "paper");
    auto r = svc.handle("POST", "/collections/" + coll + "/documents?name=paper.pdf", synth::render_pdf(sd));
    if (r.status != 202) return fail("upload returned " + std::to_string(r.status));
    const std::string doc_id = r.json()["doc_id"];
    if (wait_result(r.json()["task_id"]).status != 200) return fail("parse did not finish");
    const auto parsed = doc::deserialize_parsed(*svc.store().get(svc.handle("GET", "/documents/" + doc_id).json()["parsed_key"]));

    // oracle labels submitted as annotations
    const auto truth = synth::oracle_labels(parsed, sd);
    for (const auto& p : truth.pages) {
        service::AnnotationRecord a;
        a.doc_id = doc_id;
        a.page_number = p.page_number;
        a.labels = p.labels;
        a.annotator = "oracle";
        a.submitted_ms = 1;
        r = svc.handle("POST", "/documents/" + doc_id + "/pages/" + std::to_string(p.page_number) + "/annotation", a.to_json().dump());
        if (r.status != 201) return fail("annotation returned " + std::to_string(r.status) + " " + r.body);
    }
    r = svc.handle("POST", "/documents/" + doc_id + "/convert", R"({"config": {"description_fields": {}}})");
    if (r.status != 202) return fail("convert returned " + std::to_string(r.status));
    r = wait_result(r.json()["task_id"]);
    if (r.status != 200) return fail("convert result " + std::to_string(r.status));
    const auto structured = doc::deserialize_structured(r.body);

    // reading-ordered cell text with the dehyphenation rule applied at line ends
    std::vector<std::string> ordered;
    for (const auto& p : parsed.pages) {
        for (int id : assemble::reading_order(p)) ordered.push_back(p.cells[static_cast<std::size_t>(id)].text);
    }
    std::string expected;
    for (std::size_t i = 0; i < ordered.size(); ++i) {
        std::string s = ordered[i];
        if (i + 1 < ordered.size() && s.size() > 1 && s.back() == '-' && std::islower(static_cast<unsigned char>(ordered[i + 1][0]))) s.pop_back();
        expected += s;
    }
    std::string got;
    for (const auto& o : structured.main_text) got += o.text;
    std::erase_if(expected, [](char c) { return c == ' '; });
    std::erase_if(got, [](char c) { return c == ' '; });
    const bool valid = doc::validate(structured).empty();
    return {{"end-to-end",
             {got == expected && valid,
              fmt("%zu cells, %zu main-text objects, text round trip=%s, valid=%s, %.1f s", ordered.size(),
                  structured.main_text.size(), got == expected ? "yes" : "no", valid ? "yes" : "no", seconds_since(t0))}}};
}

}  // namespace

int main(int argc, char** argv) {
    const std::vector<Criterion> criteria{{"metrics", journal_metrics},   {"templates", templates},   {"assembly", assembly},
                                          {"sweep", sweep},     {"scaling", scaling},       {"faults", faults},
                                          {"annotation", annotation}, {"e2e", end_to_end}};
    std::vector<std::string> selected(argv + 1, argv + argc);
    for (const auto& s : selected) {
        if (std::none_of(criteria.begin(), criteria.end(), [&](const Criterion& c) { return c.name == s; })) {
            std::fprintf(stderr, "unknown criterion '%s'\n", s.c_str());
            return 2;
        }
    }
    bool failed = false, hard_failure = false;
    for (const auto& c : criteria) {
        if (!selected.empty() && std::find(selected.begin(), selected.end(), c.name) == selected.end()) continue;
        const auto t0 = std::chrono::steady_clock::now();
        std::vector<std::pair<std::string, Outcome>> results;
        try {
            results = c.run();
        } catch (const std::exception& e) {
            results = {{c.name, {false, std::string("exception: ") + e.what()}}};
        }
        const double s = seconds_since(t0);
        for (const auto& [name, o] : results) {
            std::printf("%s  %-22s %s  (%.2f s)\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str(), s);
            failed |= !o.pass;
            hard_failure |= !o.pass && !o.host_limited;
        }
        std::fflush(stdout);
    }
    if (!failed) return 0;
    return hard_failure ? 1 : 77;
}
