#include "ccs/service/annotation.hpp"

#include <algorithm>

#include "ccs/error.hpp"

namespace ccs::service {

Json AnnotationRecord::to_json() const {
    Json j = {{"schema", kAnnotationSchema},
              {"schema_version", 1},
              {"doc_id", doc_id},
              {"page_number", page_number},
              {"labels", labels},
              {"annotator", annotator},
              {"started_ms", started_ms},
              {"submitted_ms", submitted_ms},
              {"source", source == AnnotationSource::kFresh ? "fresh" : "corrected-from-prediction"}};
    j["corrections_count"] = corrections_count ? Json(*corrections_count) : Json(nullptr);
    if (pre_annotation) j["pre_annotation"] = *pre_annotation;
    return j;
}

AnnotationRecord AnnotationRecord::from_json(const JsonCursor& c) {
    c.expect_object();
    if (auto s = c.find("schema"); s && s->string() != kAnnotationSchema) {
        s->fail("expected schema '" + std::string(kAnnotationSchema) + "'");
    }
    if (auto v = c.find("schema_version"); v && v->integer() != 1) v->fail("unsupported schema_version");
    AnnotationRecord r;
    r.doc_id = c.at("doc_id").string();
    r.page_number = static_cast<int>(c.at("page_number").integer());
    auto labels = c.at("labels");
    for (std::size_t i = 0, n = labels.array_size(); i < n; ++i) r.labels.push_back(labels.at(i).string());
    r.annotator = c.at("annotator").string();
    r.started_ms = c.at("started_ms").integer();
    r.submitted_ms = c.at("submitted_ms").integer();
    auto source = c.at("source");
    const std::string s = source.string();
    if (s == "fresh") r.source = AnnotationSource::kFresh;
    else if (s == "corrected-from-prediction") r.source = AnnotationSource::kCorrected;
    else source.fail("source must be 'fresh' or 'corrected-from-prediction'");
    if (auto cc = c.find("corrections_count"); cc && !cc->raw().is_null()) {
        r.corrections_count = static_cast<int>(cc->integer());
    }
    if (auto pre = c.find("pre_annotation"); pre && !pre->raw().is_null()) {
        std::vector<std::string> p;
        for (std::size_t i = 0, n = pre->array_size(); i < n; ++i) p.push_back(pre->at(i).string());
        r.pre_annotation = std::move(p);
    }
    return r;
}

std::vector<AnnotationIssue> check_annotation(const AnnotationRecord& r, const doc::ParsedPage& page,
                                              const doc::LabelSet& labels) {
    std::vector<AnnotationIssue> out;
    if (r.page_number != page.geometry.page_number) {
        out.push_back({std::nullopt, "record is for page " + std::to_string(r.page_number)});
    }
    const std::size_t n = page.cells.size();
    for (std::size_t id = 0; id < std::max(n, r.labels.size()); ++id) {
        const int cell = static_cast<int>(id);
        if (id >= r.labels.size()) {
            out.push_back({cell, "cell " + std::to_string(id) + " has no label"});
        } else if (id >= n) {
            out.push_back({cell, "label for nonexistent cell " + std::to_string(id)});
        } else if (r.labels[id].empty()) {
            out.push_back({cell, "cell " + std::to_string(id) + " has no label"});
        } else if (!labels.contains(r.labels[id])) {
            out.push_back({cell, "cell " + std::to_string(id) + " has unknown label '" + r.labels[id] + "'"});
        }
    }
    if (r.submitted_ms < r.started_ms) out.push_back({std::nullopt, "submitted before started"});
    if (r.source == AnnotationSource::kFresh) {
        if (r.corrections_count) out.push_back({std::nullopt, "fresh annotations have no corrections_count"});
    } else {
        if (!r.corrections_count) {
            out.push_back({std::nullopt, "corrected annotations need corrections_count"});
        } else if (*r.corrections_count < 0) {
            out.push_back({std::nullopt, "corrections_count must be non-negative"});
        } else if (r.pre_annotation) {
            if (r.pre_annotation->size() != r.labels.size()) {
                out.push_back({std::nullopt, "pre_annotation covers a different number of cells"});
            } else if (diff_corrections(*r.pre_annotation, r.labels) != *r.corrections_count) {
                out.push_back({std::nullopt, "corrections_count does not match the pre-annotation"});
            }
        }
    }
    return out;
}

int diff_corrections(const std::vector<std::string>& pre, const std::vector<std::string>& submitted) {
    if (pre.size() != submitted.size()) {
        throw Error(errc::kShapeError, "pre-annotation has " + std::to_string(pre.size()) + " cells, submission " +
                                           std::to_string(submitted.size()));
    }
    int n = 0;
    for (std::size_t i = 0; i < pre.size(); ++i) n += pre[i] != submitted[i];
    return n;
}

namespace {

RateWindow window_of(const std::vector<AnnotationRecord>& records, std::size_t first, std::size_t last) {
    RateWindow w;
    w.first = first;
    w.pages = last - first + 1;
    w.minutes = static_cast<double>(records[last].submitted_ms - records[first].started_ms) / 60000.0;
    w.rate = w.minutes > 0 ? static_cast<double>(w.pages) / w.minutes : 0.0;
    return w;
}

Json window_json(const RateWindow& w) {
    return {{"first", w.first}, {"pages", w.pages}, {"minutes", w.minutes}, {"rate", w.rate}};
}

}  // namespace

Json SessionStats::to_json() const {
    Json ws = Json::array(), ss = Json::array();
    for (const auto& w : windows) ws.push_back(window_json(w));
    for (const auto& s : segments) ss.push_back(window_json(s));
    return {{"windows", std::move(ws)}, {"retrains", retrains}, {"segments", std::move(ss)}};
}

SessionStats compute_session_stats(const std::vector<AnnotationRecord>& records,
                                   const std::vector<std::int64_t>& retrains, std::size_t window) {
    if (window == 0) throw Error(errc::kInvalidArgument, "window must be positive");
    for (std::size_t i = 0; i < records.size(); ++i) {
        if (records[i].submitted_ms < records[i].started_ms) {
            throw Error(errc::kBadOrdering, "record " + std::to_string(i) + " is submitted before it was started");
        }
        if (i > 0 && records[i].submitted_ms < records[i - 1].submitted_ms) {
            throw Error(errc::kBadOrdering, "record " + std::to_string(i) + " is submitted before its predecessor");
        }
    }
    SessionStats s;
    s.retrains = retrains;
    std::sort(s.retrains.begin(), s.retrains.end());
    if (records.empty()) return s;

    const std::size_t w = std::min(window, records.size());
    for (std::size_t first = 0; first + w <= records.size(); ++first) s.windows.push_back(window_of(records, first, first + w - 1));

    // segments between retrain markers, by submission time
    std::size_t first = 0;
    auto close = [&](std::size_t end) {
        if (end > first) s.segments.push_back(window_of(records, first, end - 1));
        first = end;
    };
    for (std::int64_t marker : s.retrains) {
        std::size_t end = first;
        while (end < records.size() && records[end].submitted_ms <= marker) ++end;
        close(end);
    }
    close(records.size());
    return s;
}

}  // namespace ccs::service
