#include "ccs/service/service.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include "ccs/assemble/assemble.hpp"
#include "ccs/doc/serialize.hpp"
#include "ccs/error.hpp"
#include "ccs/hash.hpp"
#include "ccs/ml/metrics.hpp"
#include "ccs/ml/model.hpp"

namespace ccs::service {

namespace orch = ccs::orchestrator;

namespace {

std::string percent_decode(std::string_view s) {
    std::string out;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '+') {
            out += ' ';
        } else if (s[i] == '%' && i + 2 < s.size() && std::isxdigit(static_cast<unsigned char>(s[i + 1])) &&
                   std::isxdigit(static_cast<unsigned char>(s[i + 2]))) {
            out += static_cast<char>(std::stoi(std::string(s.substr(i + 1, 2)), nullptr, 16));
            i += 2;
        } else {
            out += s[i];
        }
    }
    return out;
}

std::vector<std::string> split_path(const std::string& path) {
    std::vector<std::string> out;
    std::size_t i = 0;
    while (i < path.size()) {
        std::size_t j = path.find('/', i);
        if (j == std::string::npos) j = path.size();
        if (j > i) out.push_back(percent_decode(std::string_view(path).substr(i, j - i)));
        i = j + 1;
    }
    return out;
}

Response json_response(int status, const Json& body) { return {status, body.dump(), "application/json"}; }

Response error_response(int status, std::string_view code, const std::string& message, Json extra = Json::object()) {
    extra["error"] = code;
    extra["message"] = message;
    return json_response(status, extra);
}

int status_for(std::string_view code) {
    static const std::set<std::string_view> unprocessable{
        errc::kSchemaViolation, errc::kParseFailure,  errc::kUnsupportedEncryption, errc::kUnknownLabel,
        errc::kEmptyDataset,    errc::kSchemaMismatch, errc::kShapeError,           errc::kBadScale,
        errc::kEmptyInput,      errc::kMissingLabel,   errc::kBadOrdering,          errc::kInvalidArgument};
    return unprocessable.count(code) ? 422 : 500;
}

Response not_found(const std::string& what) { return error_response(404, "not-found", what); }

Response not_ready(const std::string& what, const std::string& task_id) {
    return error_response(409, "not-ready", what, {{"task_id", task_id}});
}

Json body_json(const Request& r) {
    if (r.body.find_first_not_of(" \t\r\n") == std::string::npos) return Json::object();
    return parse_json(r.body);
}

std::optional<int> to_int(const std::string& s) {
    if (s.empty() || s.size() > 9 || !std::all_of(s.begin(), s.end(), ::isdigit)) return std::nullopt;
    return std::stoi(s);
}

const doc::ParsedPage* find_page(const doc::ParsedDocument& d, int n) {
    for (const auto& p : d.pages) {
        if (p.geometry.page_number == n) return &p;
    }
    return nullptr;
}

Job new_job(std::string collection, std::string kind, std::string subject, Json attrs = Json::object()) {
    Job j;
    j.collection = std::move(collection);
    j.kind = std::move(kind);
    j.subject = std::move(subject);
    j.attrs = std::move(attrs);
    return j;
}

RecordQuery records_of(std::optional<std::string> collection, std::optional<std::string> kind,
                       std::optional<std::string> status = std::nullopt,
                       std::optional<std::string> subject = std::nullopt) {
    return {std::move(collection), std::move(kind), std::move(status), std::move(subject)};
}

}  // namespace

Request Request::make(std::string method, const std::string& target, std::string body) {
    Request r;
    r.method = std::move(method);
    r.body = std::move(body);
    const auto q = target.find('?');
    r.path = target.substr(0, q);
    if (q == std::string::npos) return r;
    std::string_view rest = std::string_view(target).substr(q + 1);
    while (!rest.empty()) {
        auto amp = rest.find('&');
        std::string_view pair = rest.substr(0, amp);
        auto eq = pair.find('=');
        if (!pair.empty()) {
            r.query[percent_decode(pair.substr(0, eq))] =
                eq == std::string_view::npos ? "" : percent_decode(pair.substr(eq + 1));
        }
        if (amp == std::string_view::npos) break;
        rest.remove_prefix(amp + 1);
    }
    return r;
}

Service::Service(ServiceOptions options)
    : options_(std::move(options)), layout_{options_.data_dir}, registry_(pipeline::Registry::defaults()) {
    std::filesystem::create_directories(layout_.root);
    store_ = std::make_unique<store::FsObjectStore>(layout_.objects());
    index_ = std::make_unique<MetadataIndex>(layout_.metadata());
    if (options_.file_broker) {
        broker_ = std::make_unique<orch::FileBroker>(layout_.queue());
        results_ = std::make_unique<orch::SqliteResultBackend>(layout_.results());
    } else {
        // queued messages live in memory, so their statuses must too
        broker_ = std::make_unique<orch::InProcessBroker>();
        results_ = std::make_unique<orch::MemoryResultBackend>();
    }
    orchestrator_ = std::make_unique<orch::Orchestrator>(*broker_, *results_, *store_, registry_);
    if (options_.start_workers) orchestrator_->start(options_.workers);
}

Service::~Service() { orchestrator_->stop(); }

Response Service::handle(const Request& r) {
    try {
        return dispatch(r);
    } catch (const Error& e) {
        return error_response(status_for(e.code()), e.code(), e.detail());
    } catch (const std::exception& e) {
        return error_response(500, "internal", e.what());
    }
}

Response Service::dispatch(const Request& r) {
    const auto seg = split_path(r.path);
    const std::string& m = r.method;
    const std::size_t n = seg.size();
    auto method_not_allowed = [&] { return error_response(405, "method-not-allowed", m + " " + r.path); };

    if (n >= 1 && seg[0] == "collections") {
        if (n == 1) {
            if (m == "POST") return create_collection(r);
            if (m == "GET") return list_collections();
            return method_not_allowed();
        }
        if (n == 2) return m == "GET" ? get_collection(seg[1]) : method_not_allowed();
        if (n == 3 && seg[2] == "documents") {
            if (m == "POST") return upload(seg[1], r);
            if (m == "GET") return get_collection(seg[1]);
            return method_not_allowed();
        }
        if (n == 3 && seg[2] == "models") return m == "POST" ? train(seg[1], r) : method_not_allowed();
        if (n == 3 && seg[2] == "stats") return m == "GET" ? session_stats(seg[1]) : method_not_allowed();
    } else if (n >= 2 && seg[0] == "documents") {
        if (n == 2) return m == "GET" ? get_document(seg[1]) : method_not_allowed();
        if (n == 3 && seg[2] == "convert") return m == "POST" ? convert(seg[1], r) : method_not_allowed();
        if (n == 3 && seg[2] == "detect") return m == "POST" ? detect(seg[1]) : method_not_allowed();
        if ((n == 4 || n == 5) && seg[2] == "pages") {
            auto page = to_int(seg[3]);
            if (!page) return not_found("no page '" + seg[3] + "'");
            if (n == 4) return m == "GET" ? get_page(seg[1], *page) : method_not_allowed();
            if (seg[4] == "annotation") {
                if (m == "POST" || m == "PUT") return post_annotation(seg[1], *page, r);
                if (m == "GET") return get_annotation(seg[1], *page);
                return method_not_allowed();
            }
        }
    } else if (n >= 2 && seg[0] == "models") {
        if (n == 2) return m == "GET" ? get_model(seg[1]) : method_not_allowed();
        if (n == 3 && seg[2] == "download") return m == "GET" ? download_model(seg[1]) : method_not_allowed();
    } else if (n >= 2 && seg[0] == "tasks") {
        if (n == 2) return m == "GET" ? get_task(seg[1]) : method_not_allowed();
        if (n == 3 && seg[2] == "result") return m == "GET" ? task_result(seg[1]) : method_not_allowed();
    }
    return not_found("no route for " + r.path);
}

// collections ---------------------------------------------------------------

namespace {

Json collection_json(const Collection& c) {
    return {{"collection_id", c.id}, {"name", c.name}, {"labels", c.labels}, {"created_ms", c.created_ms}};
}

doc::LabelSet labels_of(const Collection& c) { return doc::label_set_from_json(JsonCursor(c.labels, "/labels")); }

}  // namespace

Response Service::create_collection(const Request& r) {
    const Json body = body_json(r);
    JsonCursor c(body);
    c.expect_object();
    const std::string name = c.at("name").string();
    if (name.empty()) c.at("name").fail("must not be empty");
    doc::LabelSet labels = doc::LabelSet::defaults();
    if (auto l = c.find("labels")) labels = doc::label_set_from_json(*l);
    if (labels.empty()) c.at("labels").fail("must not be empty");

    Collection coll{sha256_hex(name).substr(0, 16), name, doc::to_json(labels), orch::now_ms()};
    if (!index_->add_collection(coll)) {
        return error_response(409, "duplicate", "collection '" + name + "' exists", {{"collection_id", coll.id}});
    }
    return json_response(201, collection_json(coll));
}

Response Service::list_collections() {
    Json out = Json::array();
    for (const auto& c : index_->collections()) out.push_back(collection_json(c));
    return json_response(200, {{"collections", std::move(out)}});
}

Response Service::get_collection(const std::string& id) {
    auto coll = index_->collection(id);
    if (!coll) return not_found("no collection " + id);
    reconcile(id);
    Json out = collection_json(*coll);
    Json docs = Json::array();
    for (const auto& rec : index_->query(records_of(id, "pdf"))) {
        docs.push_back({{"doc_id", rec.key},
                        {"status", rec.status},
                        {"source_name", rec.attrs.value("source_name", "")},
                        {"task_id", rec.attrs.value("parse_task", "")}});
    }
    Json models = Json::array();
    for (const auto& job : index_->jobs(id, "train")) {
        models.push_back({{"model_id", job.task_id}, {"status", job.status}});
    }
    out["documents"] = std::move(docs);
    out["models"] = std::move(models);
    return json_response(200, out);
}

// jobs ----------------------------------------------------------------------

std::string Service::submit_job(const orch::TaskSpec& spec, Job job) {
    job.task_id = orchestrator_->submit(spec);
    job.created_ms = orch::now_ms();
    std::size_t steps = 1;
    for (const orch::TaskSpec* s = &spec; !s->then.empty(); s = &s->then.front()) ++steps;
    job.attrs["steps"] = steps;
    index_->add_job(job);
    return job.task_id;
}

std::optional<orch::TaskStatus> Service::chain_tail(const std::string& task_id) {
    auto st = orchestrator_->status(task_id);
    while (st && st->state == orch::TaskState::kSucceeded && st->next) {
        auto next = orchestrator_->status(*st->next);
        if (!next) break;
        st = std::move(next);
    }
    return st;
}

Job Service::settle(Job job) {
    if (job.status != "pending") return job;
    const auto head = orchestrator_->status(job.task_id);
    if (!head) return job;

    std::optional<orch::TaskStatus> done;
    if (job.kind == "parse") {
        // a chained pre-annotation does not hold up the parsed document
        if (head->terminal()) done = head;
    } else {
        std::size_t hops = 1;
        auto st = head;
        while (st->state == orch::TaskState::kSucceeded && st->next) {
            auto next = orchestrator_->status(*st->next);
            if (!next) break;
            st = std::move(next);
            ++hops;
        }
        const auto steps = job.attrs.value("steps", std::size_t{1});
        if (st->state == orch::TaskState::kFailed || (st->state == orch::TaskState::kSucceeded && hops >= steps)) {
            done = st;
        }
    }
    if (!done) return job;

    job.attrs["finished_ms"] = done->finished_ms;
    if (done->state == orch::TaskState::kFailed) {
        job.status = "failed";
        job.attrs["error_code"] = done->error_code.value_or("");
        job.attrs["error"] = done->error.value_or("");
        if (job.kind == "parse") {
            if (auto pdf = index_->find("pdf", job.subject)) {
                pdf->status = "failed";
                index_->upsert(*pdf);
            }
        }
        index_->update_job(job);
        return job;
    }

    job.status = "succeeded";
    job.result = done->result;
    const std::string key = done->result.value_or("");
    MetadataRecord rec{key, job.collection, "", "ready", job.subject, {{"task_id", job.task_id}}, orch::now_ms()};
    if (job.kind == "parse") {
        rec.kind = "parsed";
        if (auto pdf = index_->find("pdf", job.subject)) {
            pdf->status = "parsed";
            pdf->attrs["parsed_key"] = key;
            index_->upsert(*pdf);
        }
    } else if (job.kind == "train") {
        rec.kind = "model";
        rec.attrs["model_id"] = job.task_id;
        // fit on the annotated pages it was trained from
        if (auto bytes = store_->get(key)) {
            const auto model = ml::TemplateModel::deserialize(*bytes);
            std::vector<std::string> truth, predicted;
            for (const auto& in : job.attrs.value("inputs", std::vector<std::string>{})) {
                auto data = store_->get(in);
                if (!data) continue;
                for (const auto& page : doc::deserialize_parsed(*data).pages) {
                    const auto pred = model.predict(page);
                    for (std::size_t i = 0; i < page.cells.size(); ++i) {
                        truth.push_back(page.cells[i].label.value_or(""));
                        predicted.push_back(model.labels()[static_cast<std::size_t>(pred.label[i])].name);
                    }
                }
            }
            if (!truth.empty()) {
                Json metrics = ml::evaluate(truth, predicted, model.labels()).to_json();
                metrics["scope"] = "training-pages";
                job.attrs["metrics"] = metrics;
                rec.attrs["metrics"] = metrics;
            }
        }
    } else if (job.kind == "convert") {
        rec.kind = "structured";
    } else if (job.kind == "detect") {
        rec.kind = "detections";
    }
    if (!rec.kind.empty() && store_->contains(key)) index_->insert(rec);
    index_->update_job(job);
    return job;
}

void Service::reconcile(const std::string& collection) {
    for (const char* kind : {"parse", "train", "convert", "detect"}) {
        for (auto& job : index_->jobs(collection, kind)) settle(std::move(job));
    }
}

std::optional<std::string> Service::parsed_key(const MetadataRecord& pdf) {
    auto job = index_->job(pdf.attrs.value("parse_task", ""));
    if (!job) return std::nullopt;
    Job settled = settle(*job);
    if (settled.status == "failed") {
        throw Error(settled.attrs.value("error_code", std::string(errc::kParseFailure)),
                    settled.attrs.value("error", std::string("parse failed")));
    }
    return settled.result;
}

std::optional<Job> Service::latest_model(const std::string& collection) {
    std::optional<Job> best;
    for (auto& job : index_->jobs(collection, "train")) {
        Job j = settle(std::move(job));
        if (j.status != "succeeded") continue;
        if (!best || j.attrs.value("finished_ms", std::int64_t{0}) >= best->attrs.value("finished_ms", std::int64_t{0})) {
            best = std::move(j);
        }
    }
    return best;
}

std::vector<StoredAnnotation> Service::current_annotations(const std::string& doc_id) {
    std::vector<StoredAnnotation> out;
    for (auto& rec : index_->query(records_of(std::nullopt, "annotation", "current", doc_id))) {
        auto bytes = store_->get(rec.key);
        if (!bytes) continue;
        const Json j = parse_json(*bytes);
        out.push_back({std::move(rec), AnnotationRecord::from_json(JsonCursor(j))});
    }
    std::sort(out.begin(), out.end(), [](const StoredAnnotation& a, const StoredAnnotation& b) {
        return a.annotation.page_number < b.annotation.page_number;
    });
    return out;
}

// documents -----------------------------------------------------------------

Response Service::upload(const std::string& collection, const Request& r) {
    auto coll = index_->collection(collection);
    if (!coll) return not_found("no collection " + collection);
    if (r.body.rfind("%PDF-", 0) != 0) {
        return error_response(422, errc::kSchemaViolation, "request body is not a PDF file");
    }
    const std::string doc_id = store_->put(r.body);
    if (auto existing = index_->find("pdf", doc_id)) {
        return error_response(409, "duplicate", "document already uploaded",
                              {{"doc_id", doc_id}, {"task_id", existing->attrs.value("parse_task", "")}});
    }

    const std::string source = r.query.count("name") ? r.query.at("name") : "";
    orch::TaskSpec spec{"parse", {doc_id}, {{"source_name", source}}, "", {}};
    if (auto model = latest_model(collection)) {
        spec.then.push_back({"predict", {std::string(orch::kPrevious), *model->result}, Json::object(), "", {}});
    }
    const std::string task = orch::task_id(spec);
    MetadataRecord rec{doc_id, collection, "pdf", "uploaded", doc_id,
                       {{"source_name", source}, {"parse_task", task}, {"bytes", r.body.size()}}, orch::now_ms()};
    if (!index_->insert(rec)) {
        return error_response(409, "duplicate", "document already uploaded", {{"doc_id", doc_id}, {"task_id", task}});
    }
    submit_job(spec, new_job(collection, "parse", doc_id));
    return json_response(202, {{"doc_id", doc_id}, {"task_id", task}});
}

Response Service::get_document(const std::string& doc_id) {
    auto pdf = index_->find("pdf", doc_id);
    if (!pdf) return not_found("no document " + doc_id);
    Json out = {{"doc_id", doc_id},
                {"collection", pdf->collection},
                {"source_name", pdf->attrs.value("source_name", "")},
                {"task_id", pdf->attrs.value("parse_task", "")}};
    std::optional<std::string> key;
    try {
        key = parsed_key(*pdf);
    } catch (const Error& e) {
        out["error"] = {{"code", e.code()}, {"message", e.detail()}};
    }
    pdf = index_->find("pdf", doc_id);
    out["status"] = pdf->status;
    if (key) {
        out["parsed_key"] = *key;
        const auto parsed = doc::deserialize_parsed(*store_->get(*key));
        out["pages"] = parsed.pages.size();
        Json annotated = Json::array();
        for (const auto& a : current_annotations(doc_id)) annotated.push_back(a.annotation.page_number);
        out["annotated_pages"] = std::move(annotated);
    }
    return json_response(200, out);
}

Response Service::get_page(const std::string& doc_id, int n) {
    auto pdf = index_->find("pdf", doc_id);
    if (!pdf) return not_found("no document " + doc_id);
    auto key = parsed_key(*pdf);
    if (!key) return not_ready("document is not parsed yet", pdf->attrs.value("parse_task", ""));
    const auto parsed = doc::deserialize_parsed(*store_->get(*key));
    const doc::ParsedPage* page = find_page(parsed, n);
    if (!page) return not_found("document has no page " + std::to_string(n));
    const auto coll = index_->collection(pdf->collection);

    Json out = {{"doc_id", doc_id},
                {"collection", pdf->collection},
                {"page_number", n},
                {"page", doc::to_json(*page)},
                {"labels", coll->labels},
                {"source", "fresh"},
                {"model_id", nullptr},
                {"predictions", nullptr},
                {"confidence", nullptr},
                {"annotation", nullptr}};
    if (auto model = latest_model(pdf->collection)) {
        out["model_id"] = model->task_id;
        const orch::TaskSpec spec{"predict", {*key, *model->result}, Json::object(), "", {}};
        const auto st = orchestrator_->wait(orchestrator_->submit(spec), options_.prediction_timeout);
        if (st && st->state == orch::TaskState::kSucceeded) {
            const auto labels = doc::deserialize_labels(*store_->get(*st->result));
            for (const auto& p : labels.pages) {
                if (p.page_number != n) continue;
                out["predictions"] = p.labels;
                out["confidence"] = p.confidence;
                out["source"] = "corrected-from-prediction";
            }
        } else if (st && st->state == orch::TaskState::kFailed) {
            out["prediction_error"] = {{"code", st->error_code.value_or("")}, {"message", st->error.value_or("")}};
        }
    }
    for (const auto& a : current_annotations(doc_id)) {
        if (a.annotation.page_number == n) out["annotation"] = a.annotation.to_json();
    }
    return json_response(200, out);
}

Response Service::post_annotation(const std::string& doc_id, int n, const Request& r) {
    auto pdf = index_->find("pdf", doc_id);
    if (!pdf) return not_found("no document " + doc_id);
    auto key = parsed_key(*pdf);
    if (!key) return not_ready("document is not parsed yet", pdf->attrs.value("parse_task", ""));
    const auto parsed = doc::deserialize_parsed(*store_->get(*key));
    const doc::ParsedPage* page = find_page(parsed, n);
    if (!page) return not_found("document has no page " + std::to_string(n));

    const Json body = body_json(r);
    const AnnotationRecord record = AnnotationRecord::from_json(JsonCursor(body));
    if (record.doc_id != doc_id || record.page_number != n) {
        return error_response(422, errc::kSchemaViolation, "record is for another document or page");
    }
    const auto coll = index_->collection(pdf->collection);
    const auto issues = check_annotation(record, *page, labels_of(*coll));
    if (!issues.empty()) {
        Json list = Json::array();
        for (const auto& i : issues) {
            list.push_back({{"cell_id", i.cell_id ? Json(*i.cell_id) : Json(nullptr)}, {"message", i.message}});
        }
        return error_response(422, errc::kSchemaViolation, issues.front().message, {{"issues", std::move(list)}});
    }

    const std::string record_key = store_->put(canonical_dump(record.to_json()));
    index_->replace_annotation({record_key, pdf->collection, "annotation", "current", doc_id,
                                {{"page_number", n}, {"annotator", record.annotator},
                                 {"submitted_ms", record.submitted_ms}},
                                orch::now_ms()},
                               n);
    return json_response(201, {{"key", record_key}, {"doc_id", doc_id}, {"page_number", n}});
}

Response Service::get_annotation(const std::string& doc_id, int n) {
    if (!index_->find("pdf", doc_id)) return not_found("no document " + doc_id);
    for (const auto& a : current_annotations(doc_id)) {
        if (a.annotation.page_number == n) return json_response(200, a.annotation.to_json());
    }
    return not_found("page " + std::to_string(n) + " is not annotated");
}

// models --------------------------------------------------------------------

Response Service::train(const std::string& collection, const Request& r) {
    auto coll = index_->collection(collection);
    if (!coll) return not_found("no collection " + collection);
    const Json body = body_json(r);
    JsonCursor c(body);
    c.expect_object();
    Json params = {{"labels", coll->labels}};
    if (auto cfg = c.find("config")) {
        ml::forest_config_from_json(*cfg);
        params["config"] = cfg->raw();
    }

    std::vector<std::string> inputs;
    std::size_t pages = 0;
    for (const auto& pdf : index_->query(records_of(collection, "pdf"))) {
        auto annotations = current_annotations(pdf.key);
        if (annotations.empty()) continue;
        auto key = parsed_key(pdf);
        if (!key) continue;
        auto parsed = doc::deserialize_parsed(*store_->get(*key));
        std::vector<doc::ParsedPage> labeled;
        for (const auto& a : annotations) {
            const doc::ParsedPage* page = find_page(parsed, a.annotation.page_number);
            if (!page || page->cells.size() != a.annotation.labels.size()) continue;
            doc::ParsedPage copy = *page;
            for (std::size_t i = 0; i < copy.cells.size(); ++i) copy.cells[i].label = a.annotation.labels[i];
            labeled.push_back(std::move(copy));
        }
        if (labeled.empty()) continue;
        pages += labeled.size();
        parsed.pages = std::move(labeled);
        const std::string training_key = store_->put(doc::serialize(parsed));
        index_->insert({training_key, collection, "parsed", "training-set", pdf.key, Json::object(), orch::now_ms()});
        inputs.push_back(training_key);
    }
    if (inputs.empty()) return error_response(422, errc::kEmptyDataset, "no annotated pages in the collection");

    const orch::TaskSpec spec{"train", inputs, params, "", {}};
    const std::string task =
        submit_job(spec, new_job(collection, "train", "", {{"inputs", inputs}, {"pages", pages}}));
    return json_response(202, {{"model_id", task}, {"task_id", task}, {"pages", pages}});
}

Response Service::get_model(const std::string& model_id) {
    auto job = index_->job(model_id);
    if (!job || job->kind != "train") return not_found("no model " + model_id);
    const Job j = settle(*job);
    Json out = {{"model_id", j.task_id},
                {"collection", j.collection},
                {"status", j.status},
                {"pages", j.attrs.value("pages", 0)},
                {"model_key", j.result ? Json(*j.result) : Json(nullptr)},
                {"metrics", j.attrs.value("metrics", Json(nullptr))}};
    if (j.status == "succeeded") out["download"] = "/models/" + j.task_id + "/download";
    if (j.status == "failed") out["error"] = {{"code", j.attrs.value("error_code", "")}, {"message", j.attrs.value("error", "")}};
    return json_response(200, out);
}

Response Service::download_model(const std::string& model_id) {
    auto job = index_->job(model_id);
    if (!job || job->kind != "train") return not_found("no model " + model_id);
    const Job j = settle(*job);
    if (j.status != "succeeded") return not_ready("model is not trained", j.task_id);
    return {200, *store_->get(*j.result), "application/json"};
}

// conversions ---------------------------------------------------------------

Response Service::convert(const std::string& doc_id, const Request& r) {
    auto pdf = index_->find("pdf", doc_id);
    if (!pdf) return not_found("no document " + doc_id);
    const Json body = body_json(r);
    JsonCursor c(body);
    c.expect_object();
    Json params = Json::object();
    if (auto cfg = c.find("config")) {
        assemble::assembly_config_from_json(*cfg);
        params["config"] = cfg->raw();
    }
    std::optional<Job> model;
    if (auto it = r.query.find("model"); it != r.query.end() && !it->second.empty()) {
        model = index_->job(it->second);
        if (!model || model->kind != "train") return not_found("no model " + it->second);
        model = settle(*model);
        if (model->status != "succeeded") return not_found("model " + it->second + " is not trained");
    }
    auto key = parsed_key(*pdf);
    if (!key) return not_ready("document is not parsed yet", pdf->attrs.value("parse_task", ""));

    orch::TaskSpec spec;
    if (model) {
        spec = {"predict", {*key, *model->result}, Json::object(), "", {}};
        spec.then.push_back({"assemble", {*key, std::string(orch::kPrevious)}, params, "", {}});
    } else {
        // ground truth stands in for predictions
        const auto parsed = doc::deserialize_parsed(*store_->get(*key));
        const auto annotations = current_annotations(doc_id);
        doc::DocumentLabels labels{doc_id, {}};
        std::vector<int> missing;
        for (const auto& page : parsed.pages) {
            auto it = std::find_if(annotations.begin(), annotations.end(), [&](const StoredAnnotation& a) {
                return a.annotation.page_number == page.geometry.page_number;
            });
            if (it == annotations.end()) {
                missing.push_back(page.geometry.page_number);
                continue;
            }
            labels.pages.push_back({page.geometry.page_number, it->annotation.labels, {}});
        }
        if (!missing.empty()) {
            return error_response(422, errc::kMissingLabel, "no model given and pages lack annotations",
                                  {{"pages", missing}});
        }
        spec = {"assemble", {*key, store_->put(doc::serialize(labels))}, params, "", {}};
    }
    Job job = new_job(pdf->collection, "convert", doc_id);
    if (model) job.attrs["model_id"] = model->task_id;
    const std::string task = submit_job(spec, std::move(job));
    return json_response(202, {{"doc_id", doc_id}, {"task_id", task}, {"result", "/tasks/" + task + "/result"}});
}

Response Service::detect(const std::string& doc_id) {
    auto pdf = index_->find("pdf", doc_id);
    if (!pdf) return not_found("no document " + doc_id);
    auto key = parsed_key(*pdf);
    if (!key) return not_ready("document is not parsed yet", pdf->attrs.value("parse_task", ""));
    const std::string task = submit_job({"detect", {*key}, Json::object(), "", {}},
                                        new_job(pdf->collection, "detect", doc_id));
    return json_response(202, {{"doc_id", doc_id}, {"task_id", task}, {"result", "/tasks/" + task + "/result"}});
}

Response Service::session_stats(const std::string& collection) {
    if (!index_->collection(collection)) return not_found("no collection " + collection);
    std::vector<AnnotationRecord> records;
    for (const auto& rec : index_->query(records_of(collection, "annotation", "current"))) {
        if (auto bytes = store_->get(rec.key)) {
            const Json j = parse_json(*bytes);
            records.push_back(AnnotationRecord::from_json(JsonCursor(j)));
        }
    }
    std::stable_sort(records.begin(), records.end(),
                     [](const AnnotationRecord& a, const AnnotationRecord& b) { return a.submitted_ms < b.submitted_ms; });
    std::vector<std::int64_t> retrains;
    for (auto& job : index_->jobs(collection, "train")) {
        const Job j = settle(std::move(job));
        if (j.status == "succeeded") retrains.push_back(j.attrs.value("finished_ms", std::int64_t{0}));
    }
    std::size_t window = 10;
    Json out = compute_session_stats(records, retrains, window).to_json();
    out["pages"] = records.size();
    return json_response(200, out);
}

// tasks ---------------------------------------------------------------------

Response Service::get_task(const std::string& task_id) {
    auto st = orchestrator_->status(task_id);
    if (!st) return not_found("no task " + task_id);
    Json out = st->to_json();
    if (auto job = index_->job(task_id)) out["job"] = settle(*job).to_json();
    if (auto tail = chain_tail(task_id); tail && tail->task_id != task_id) out["chain_tail"] = tail->to_json();
    return json_response(200, out);
}

Response Service::task_result(const std::string& task_id) {
    auto tail = chain_tail(task_id);
    if (!tail) return not_found("no task " + task_id);
    if (auto job = index_->job(task_id)) settle(*job);
    if (tail->state == orch::TaskState::kFailed) {
        return error_response(status_for(tail->error_code.value_or("")), tail->error_code.value_or("failed"),
                              tail->error.value_or(""), {{"task_id", tail->task_id}});
    }
    if (tail->state != orch::TaskState::kSucceeded || !tail->result) return not_ready("task has not finished", task_id);
    auto bytes = store_->get(*tail->result);
    if (!bytes) return not_found("result object is missing");
    return {200, std::move(*bytes), "application/json"};
}

}  // namespace ccs::service
