#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "ccs/assemble/assemble.hpp"
#include "ccs/detect/detect.hpp"
#include "ccs/doc/serialize.hpp"
#include "ccs/doc/validate.hpp"
#include "ccs/error.hpp"
#include "ccs/ml/metrics.hpp"
#include "ccs/ml/model.hpp"
#include "ccs/parser/parser.hpp"
#include "ccs/service/annotation.hpp"
#include "ccs/synth/corpus.hpp"

namespace py = pybind11;
using namespace ccs;

namespace {

std::string parse(py::bytes pdf, const std::string& normalization, unsigned threads, const std::string& source_name) {
    parser::ParseConfig cfg;
    cfg.threads = threads;
    if (!normalization.empty()) {
        const Json j = parse_json(normalization);
        cfg.normalization = parser::normalization_config_from_json(JsonCursor(j));
    }
    const std::string bytes = pdf;
    py::gil_scoped_release release;
    return doc::serialize(parser::parse_document(bytes, cfg, nullptr, source_name));
}

std::string train(const std::vector<std::string>& parsed_docs, const std::string& config,
                  const std::vector<std::string>& labels) {
    ml::ForestConfig cfg;
    if (!config.empty()) {
        const Json j = parse_json(config);
        cfg = ml::forest_config_from_json(JsonCursor(j));
    }
    const doc::LabelSet set = labels.empty() ? doc::LabelSet::six_labels() : doc::LabelSet::from_names(labels);
    std::vector<doc::ParsedPage> pages;
    for (const auto& bytes : parsed_docs) {
        auto d = doc::deserialize_parsed(bytes);
        for (auto& p : d.pages) pages.push_back(std::move(p));
    }
    py::gil_scoped_release release;
    return ml::TemplateModel::train(pages, set, cfg).serialize();
}

std::string predict(const std::string& model, const std::string& parsed, int stage) {
    const auto m = ml::TemplateModel::deserialize(model);
    const auto d = doc::deserialize_parsed(parsed);
    py::gil_scoped_release release;
    return doc::serialize(m.predict(d, stage));
}

std::string assemble_doc(const std::string& parsed, const std::optional<std::string>& labels, const std::string& config) {
    assemble::AssemblyConfig cfg;
    if (!config.empty()) {
        const Json j = parse_json(config);
        cfg = assemble::assembly_config_from_json(JsonCursor(j));
    }
    const auto d = doc::deserialize_parsed(parsed);
    if (labels) {
        const auto l = doc::deserialize_labels(*labels);
        return doc::serialize(assemble::assemble(d, &l, cfg));
    }
    return doc::serialize(assemble::assemble(d, nullptr, cfg));
}

std::string evaluate(const std::vector<std::string>& truth, const std::vector<std::string>& predicted,
                     const std::vector<std::string>& labels) {
    return ml::evaluate(truth, predicted, doc::LabelSet::from_names(labels)).to_json().dump();
}

std::vector<std::string> validate_parsed(const std::string& parsed) {
    std::vector<std::string> out;
    for (const auto& v : doc::validate(doc::deserialize_parsed(parsed))) out.push_back(doc::to_string(v));
    return out;
}

std::string detect_tables(const std::string& parsed) {
    return detect::serialize(detect::HeuristicTableDetector().detect(doc::deserialize_parsed(parsed)));
}

// (pdf bytes, oracle labels for the parsed pages)
py::tuple synth_document(const std::string& layout, int pages, std::uint64_t seed, const std::string& name) {
    if (layout != "single" && layout != "two") throw Error(errc::kInvalidArgument, "layout must be 'single' or 'two'");
    const auto sd = synth::make_document(layout == "single" ? synth::Template::SingleColumn : synth::Template::TwoColumn,
                                         pages, seed, name);
    const std::string pdf = synth::render_pdf(sd);
    const auto parsed = parser::parse_document(pdf);
    return py::make_tuple(py::bytes(pdf), doc::serialize(synth::oracle_labels(parsed, sd)));
}

std::string session_stats(const std::string& records_json, const std::vector<std::int64_t>& retrains, std::size_t window) {
    const Json j = parse_json(records_json);
    const JsonCursor c(j);
    std::vector<service::AnnotationRecord> records;
    for (std::size_t i = 0, n = c.array_size(); i < n; ++i) records.push_back(service::AnnotationRecord::from_json(c.at(i)));
    return service::compute_session_stats(records, retrains, window).to_json().dump();
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Document conversion: parse, train, predict, assemble";

    static py::exception<Error> error(m, "CcsError", PyExc_RuntimeError);
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const Error& e) {
            PyErr_SetObject(error.ptr(), py::make_tuple(e.code(), e.detail()).ptr());
        }
    });

    m.def("parse", &parse, py::arg("pdf"), py::arg("normalization") = "", py::arg("threads") = 1,
          py::arg("source_name") = "", "PDF bytes to parsed-document JSON.");
    m.def("train", &train, py::arg("parsed_docs"), py::arg("config") = "", py::arg("labels") = std::vector<std::string>{},
          "Labeled parsed documents to model JSON.");
    m.def("predict", &predict, py::arg("model"), py::arg("parsed"), py::arg("stage") = -1);
    m.def("assemble", &assemble_doc, py::arg("parsed"), py::arg("labels") = std::nullopt, py::arg("config") = "");
    m.def("evaluate", &evaluate, py::arg("truth"), py::arg("predicted"), py::arg("labels"));
    m.def("validate", &validate_parsed, py::arg("parsed"));
    m.def("detect", &detect_tables, py::arg("parsed"));
    m.def("synth_document", &synth_document, py::arg("layout") = "single", py::arg("pages") = 2, py::arg("seed") = 1,
          py::arg("name") = "synthetic");
    m.def("session_stats", &session_stats, py::arg("records"), py::arg("retrains") = std::vector<std::int64_t>{},
          py::arg("window") = 10);
}
