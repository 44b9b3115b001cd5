// ccs: command line front end for parsing, training, prediction, assembly,
// detection evaluation, queue workers, benchmarks and the HTTP service.

#include <algorithm>
#include <atomic>
#include <csignal>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "ccs/assemble/assemble.hpp"
#include "ccs/detect/detect.hpp"
#include "ccs/doc/serialize.hpp"
#include "ccs/error.hpp"
#include "ccs/ml/model.hpp"
#include "ccs/orchestrator/bench.hpp"
#include "ccs/orchestrator/broker.hpp"
#include "ccs/orchestrator/orchestrator.hpp"
#include "ccs/orchestrator/results.hpp"
#include "ccs/parser/parser.hpp"
#include "ccs/service/service.hpp"
#include "ccs/synth/corpus.hpp"

namespace fs = std::filesystem;
using namespace ccs;

namespace {

std::atomic<bool> g_stop{false};

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(errc::kIo, "cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_output(const std::string& path, const std::string& bytes) {
    if (path.empty() || path == "-") {
        std::cout << bytes;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out || !out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()))) {
        throw Error(errc::kIo, "cannot write " + path);
    }
}

Json read_json(const fs::path& path) { return parse_json(read_file(path)); }

std::string env_or(const char* name, std::string fallback) {
    const char* v = std::getenv(name);
    return v && *v ? std::string(v) : fallback;
}

// Parsed documents carrying cell labels, optionally with a sibling
// NAME.labels.json that supplies or overrides them.
std::vector<doc::ParsedPage> load_annotations(const fs::path& dir) {
    if (!fs::is_directory(dir)) throw Error(errc::kIo, dir.string() + " is not a directory");
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(dir)) {
        const auto name = e.path().filename().string();
        if (e.is_regular_file() && e.path().extension() == ".json" && !name.ends_with(".labels.json")) {
            files.push_back(e.path());
        }
    }
    std::sort(files.begin(), files.end());
    std::vector<doc::ParsedPage> pages;
    for (const auto& f : files) {
        doc::ParsedDocument d = doc::deserialize_parsed(read_file(f));
        fs::path sidecar = f;
        sidecar.replace_extension(".labels.json");
        if (fs::exists(sidecar)) d = doc::with_labels(std::move(d), doc::deserialize_labels(read_file(sidecar)));
        for (auto& p : d.pages) {
            const bool labeled = !p.cells.empty() && std::all_of(p.cells.begin(), p.cells.end(),
                                                                  [](const doc::TextCell& c) { return c.label.has_value(); });
            if (labeled) pages.push_back(std::move(p));
        }
    }
    return pages;
}

std::vector<int> parse_int_list(const std::string& s) {
    std::vector<int> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        const int v = std::stoi(item);
        if (v <= 0) throw Error(errc::kInvalidArgument, "worker counts must be positive");
        out.push_back(v);
    }
    if (out.empty()) throw Error(errc::kInvalidArgument, "no worker counts given");
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Corpus conversion: PDF parsing, cell classification and structured assembly"};
    app.require_subcommand(1);

    // parse
    std::string parse_in, parse_cfg, parse_out;
    bool parse_fixture = false;
    unsigned parse_threads = 1;
    auto* parse = app.add_subcommand("parse", "Extract text cells from a PDF");
    parse->add_option("file", parse_in, "PDF file (or raw-snippets.v1 JSON with --fixture)")->required();
    parse->add_option("--config", parse_cfg, "JSON with optional 'normalization' and 'threads'");
    parse->add_option("-o,--output", parse_out, "Output parsed-document.v1 JSON (default stdout)");
    parse->add_flag("--fixture", parse_fixture, "Input is recorded raw-snippets.v1 JSON");
    parse->add_option("--threads", parse_threads, "Pages normalized concurrently (0: all cores)");

    // train
    std::string train_dir, train_cfg, train_labels, train_out;
    auto* train = app.add_subcommand("train", "Train a template model on labeled pages");
    train->add_option("--annotations", train_dir, "Directory of labeled parsed documents")->required();
    train->add_option("--config", train_cfg, "Forest config JSON");
    train->add_option("--labels", train_labels, "Label set JSON (default: the six journal labels)");
    train->add_option("-o,--output", train_out, "Output rf-model.v1 JSON")->required();

    // predict
    std::string predict_model, predict_doc, predict_out;
    int predict_stage = -1;
    auto* predict = app.add_subcommand("predict", "Label the cells of a parsed document");
    predict->add_option("--model", predict_model, "rf-model.v1 JSON")->required();
    predict->add_option("--doc", predict_doc, "parsed-document.v1 JSON")->required();
    predict->add_option("-o,--output", predict_out, "Output labels JSON (default stdout)");
    predict->add_option("--stage", predict_stage, "Last refinement stage to run (default: all)");

    // assemble
    std::string assemble_doc, assemble_labels, assemble_cfg, assemble_out;
    auto* assemble = app.add_subcommand("assemble", "Build the structured document from labeled cells");
    assemble->add_option("--doc", assemble_doc, "parsed-document.v1 JSON")->required();
    assemble->add_option("--labels", assemble_labels, "Labels JSON (default: labels stored on the cells)");
    assemble->add_option("--config", assemble_cfg, "Assembly config JSON");
    assemble->add_option("-o,--output", assemble_out, "Output structured-document.v1 JSON (default stdout)");

    // detect-eval
    std::string de_doc, de_detections, de_truth, de_detector, de_table = "table", de_out;
    double de_overlap = 0.5;
    auto* de = app.add_subcommand("detect-eval", "Sweep table-detection confidence thresholds");
    de->add_option("--doc", de_doc, "parsed-document.v1 JSON")->required();
    de->add_option("--detections", de_detections, "detections.v1 JSON (default: run a detector)");
    de->add_option("--detector", de_detector, "External detector command, called as CMD in.json out.json");
    de->add_option("--truth", de_truth, "Labels JSON with the true table cells")->required();
    de->add_option("--table-label", de_table, "Label counted as table");
    de->add_option("--min-overlap", de_overlap, "Fraction of a cell a detection must cover");
    de->add_option("-o,--output", de_out, "Also write the sweep as JSON");

    // work
    std::string work_data = env_or("CCS_DATA_DIR", "ccs-data"), work_queues = "parse=4,ml=2,assemble=1";
    bool work_drain = false;
    auto* work = app.add_subcommand("work", "Run queue workers against a data directory");
    work->add_option("--data", work_data, "Data directory (env CCS_DATA_DIR)");
    work->add_option("--queues", work_queues, "Workers per queue, e.g. parse=4,ml=2,assemble=1");
    work->add_flag("--drain", work_drain, "Exit once no task is left");

    // bench
    std::string bench_corpus, bench_workers = "1,2,4,8", bench_out, bench_model;
    int bench_repeats = 1;
    auto* bench = app.add_subcommand("bench", "Measure stage speedup against worker count");
    bench->add_option("--corpus", bench_corpus, "Directory of PDF files")->required();
    bench->add_option("--workers", bench_workers, "Comma separated worker counts");
    bench->add_option("--model", bench_model, "rf-model.v1 JSON (default: train a small one)");
    bench->add_option("--repeats", bench_repeats, "Keep the fastest of this many runs");
    bench->add_option("-o,--output", bench_out, "CSV output (default stdout)");

    // serve
    std::string serve_data = env_or("CCS_DATA_DIR", "ccs-data"), serve_host = "127.0.0.1";
    std::string serve_queues = "parse=1,ml=1,assemble=1";
    int serve_port = std::stoi(env_or("CCS_PORT", "8080"));
    bool serve_file_broker = false;
    auto* serve = app.add_subcommand("serve", "Serve the REST API");
    serve->add_option("--port", serve_port, "Port (env CCS_PORT)");
    serve->add_option("--host", serve_host, "Address to bind");
    serve->add_option("--data", serve_data, "Data directory (env CCS_DATA_DIR)");
    serve->add_option("--queues", serve_queues, "In-service workers per queue; 0 workers with --file-broker "
                                                "leaves the work to `ccs work`");
    serve->add_flag("--file-broker", serve_file_broker, "Queue tasks under the data directory");

    // synth
    std::string synth_layout = "single", synth_out;
    int synth_docs = 2, synth_pages = 3;
    std::uint64_t synth_seed = 1;
    auto* synth = app.add_subcommand("synth", "Write synthetic journal PDFs with parsed and oracle-labeled JSON");
    synth->add_option("--layout", synth_layout, "single or two (columns)")->check(CLI::IsMember({"single", "two"}));
    synth->add_option("--documents", synth_docs, "Number of documents");
    synth->add_option("--pages", synth_pages, "Pages per document");
    synth->add_option("--seed", synth_seed, "Generator seed");
    synth->add_option("-o,--output", synth_out, "Output directory")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*parse) {
            parser::ParseConfig cfg;
            cfg.threads = parse_threads;
            if (!parse_cfg.empty()) {
                const Json j = read_json(parse_cfg);
                JsonCursor c(j);
                c.expect_object();
                if (auto n = c.find("normalization")) cfg.normalization = parser::normalization_config_from_json(*n);
                if (auto t = c.find("threads")) cfg.threads = static_cast<unsigned>(t->integer());
            }
            const std::string bytes = read_file(parse_in);
            parser::FixtureBackend fixture;
            parser::NormalizationReport report;
            const auto d = parser::parse_document(bytes, cfg, parse_fixture ? &fixture : nullptr,
                                                  fs::path(parse_in).filename().string(), &report);
            write_output(parse_out, doc::serialize(d));
            std::size_t cells = 0;
            for (const auto& p : d.pages) cells += p.cells.size();
            std::cerr << d.pages.size() << " pages, " << cells << " cells\n";
        } else if (*train) {
            ml::ForestConfig cfg;
            if (!train_cfg.empty()) {
                const Json j = read_json(train_cfg);
                cfg = ml::forest_config_from_json(JsonCursor(j));
            }
            doc::LabelSet labels = doc::LabelSet::six_labels();
            if (!train_labels.empty()) {
                const Json j = read_json(train_labels);
                labels = doc::label_set_from_json(JsonCursor(j));
            }
            const auto pages = load_annotations(train_dir);
            if (pages.empty()) throw Error(errc::kEmptyDataset, "no fully labeled pages in " + train_dir);
            const auto model = ml::TemplateModel::train(pages, labels, cfg);
            write_output(train_out, model.serialize());
            std::cerr << "trained on " << model.training().pages << " pages, " << model.training().cells
                      << " cells, " << model.stages().size() << " stages\n";
        } else if (*predict) {
            const auto model = ml::TemplateModel::deserialize(read_file(predict_model));
            const auto d = doc::deserialize_parsed(read_file(predict_doc));
            write_output(predict_out, doc::serialize(model.predict(d, predict_stage)));
        } else if (*assemble) {
            const auto d = doc::deserialize_parsed(read_file(assemble_doc));
            assemble::AssemblyConfig cfg;
            if (!assemble_cfg.empty()) {
                const Json j = read_json(assemble_cfg);
                cfg = assemble::assembly_config_from_json(JsonCursor(j));
            }
            if (assemble_labels.empty()) {
                write_output(assemble_out, doc::serialize(assemble::assemble(d, nullptr, cfg)));
            } else {
                const auto labels = doc::deserialize_labels(read_file(assemble_labels));
                write_output(assemble_out, doc::serialize(assemble::assemble(d, &labels, cfg)));
            }
        } else if (*de) {
            const auto d = doc::deserialize_parsed(read_file(de_doc));
            const auto truth = doc::deserialize_labels(read_file(de_truth));
            detect::DocumentDetections dets;
            if (!de_detections.empty()) dets = detect::deserialize_detections(read_file(de_detections));
            else if (!de_detector.empty()) dets = detect::ProcessDetector(de_detector).detect_document(d);
            else dets = detect::HeuristicTableDetector().detect(d);

            std::vector<detect::SweepCase> cases;
            for (const auto& page : d.pages) {
                const int n = page.geometry.page_number;
                auto t = std::find_if(truth.pages.begin(), truth.pages.end(),
                                      [&](const doc::PageLabels& p) { return p.page_number == n; });
                if (t == truth.pages.end() || t->labels.size() != page.cells.size()) {
                    throw Error(errc::kShapeError, "truth labels do not cover page " + std::to_string(n));
                }
                detect::SweepCase c{page.cells, {}, {}};
                for (const auto& l : t->labels) c.truth.push_back(l == de_table);
                for (const auto& p : dets.pages) {
                    if (p.page_number == n) c.detections = p.detections;
                }
                cases.push_back(std::move(c));
            }
            const auto sweep = detect::sweep_confidence(cases, de_overlap);
            std::printf("%-10s %8s %8s %8s %10s %10s %10s\n", "threshold", "tp", "fp", "fn", "precision", "recall",
                        "f1");
            for (const auto& p : sweep.points) {
                std::printf("%-10.3f %8lld %8lld %8lld %10.4f %10.4f %10.4f\n", p.threshold, p.tp, p.fp, p.fn,
                            p.precision, p.recall, p.f1);
            }
            std::printf("best threshold %.3f f1 %.4f\n", sweep.best_threshold, sweep.best_f1);
            if (!de_out.empty()) {
                Json points = Json::array();
                for (const auto& p : sweep.points) {
                    points.push_back({{"threshold", p.threshold}, {"tp", p.tp}, {"fp", p.fp}, {"fn", p.fn},
                                      {"precision", p.precision}, {"recall", p.recall}, {"f1", p.f1}});
                }
                write_output(de_out, canonical_dump({{"schema", "sweep.v1"}, {"points", points},
                                                     {"best_threshold", sweep.best_threshold},
                                                     {"best_f1", sweep.best_f1}}));
            }
        } else if (*work) {
            const service::DataLayout layout{work_data};
            fs::create_directories(layout.root);
            store::FsObjectStore store(layout.objects());
            orchestrator::FileBroker broker(layout.queue());
            orchestrator::SqliteResultBackend results(layout.results());
            const auto registry = pipeline::Registry::defaults();
            orchestrator::Orchestrator orch(broker, results, store, registry);
            const auto queues = orchestrator::QueueConfig::parse(work_queues);
            if (work_drain) {
                const auto r = orch.run_until_drained(queues);
                std::cerr << "executed " << r.executed << ", succeeded " << r.succeeded << ", failed " << r.failed
                          << ", retried " << r.retried << "\n";
            } else {
                std::signal(SIGINT, [](int) { g_stop = true; });
                std::signal(SIGTERM, [](int) { g_stop = true; });
                orch.start(queues);
                while (!g_stop) std::this_thread::sleep_for(std::chrono::milliseconds(100));
                orch.stop();
            }
        } else if (*bench) {
            std::vector<std::string> pdfs;
            std::vector<fs::path> files;
            for (const auto& e : fs::directory_iterator(bench_corpus)) {
                if (e.is_regular_file() && e.path().extension() == ".pdf") files.push_back(e.path());
            }
            std::sort(files.begin(), files.end());
            for (const auto& f : files) pdfs.push_back(read_file(f));
            if (pdfs.empty()) throw Error(errc::kEmptyInput, "no PDF files in " + bench_corpus);
            orchestrator::BenchOptions opts;
            opts.repeats = bench_repeats;
            if (!bench_model.empty()) opts.model = read_file(bench_model);
            const auto rows = orchestrator::bench_scaling(pdfs, parse_int_list(bench_workers), opts);
            write_output(bench_out, orchestrator::bench_csv(rows));
            for (const auto& r : rows) {
                if (!r.equivalent) std::cerr << r.stage << " at " << r.workers << " workers: outputs differ\n";
            }
            std::cerr << "hardware threads: " << std::thread::hardware_concurrency() << "\n";
        } else if (*synth) {
            fs::create_directories(synth_out);
            const auto docs = synth::make_corpus({synth_layout == "two" ? synth::Template::TwoColumn
                                                                         : synth::Template::SingleColumn,
                                                  synth_docs, synth_pages, synth_seed});
            for (const auto& sd : docs) {
                const fs::path base = fs::path(synth_out) / sd.name;
                const std::string pdf = synth::render_pdf(sd);
                const auto parsed = parser::parse_document(pdf, {}, nullptr, sd.name + ".pdf");
                write_output(base.string() + ".pdf", pdf);
                write_output(base.string() + ".json", doc::serialize(parsed));
                write_output(base.string() + ".labels.json", doc::serialize(synth::oracle_labels(parsed, sd)));
            }
            std::cerr << docs.size() << " documents written to " << synth_out << "\n";
        } else if (*serve) {
            service::ServiceOptions opts;
            opts.data_dir = serve_data;
            opts.file_broker = serve_file_broker;
            opts.workers = orchestrator::QueueConfig::parse(serve_queues);
            service::Service svc(std::move(opts));
            service::serve_http(svc, serve_host, serve_port);
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.code() << ": " << e.detail() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
