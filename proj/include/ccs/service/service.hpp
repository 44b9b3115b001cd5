#pragma once

#include <chrono>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>

#include "ccs/orchestrator/broker.hpp"
#include "ccs/orchestrator/orchestrator.hpp"
#include "ccs/orchestrator/results.hpp"
#include "ccs/pipeline/operations.hpp"
#include "ccs/service/annotation.hpp"
#include "ccs/service/metadata.hpp"
#include "ccs/store/object_store.hpp"

namespace ccs::service {

struct Request {
    std::string method;
    std::string path;
    std::map<std::string, std::string> query;
    std::string body;

    /// Splits "path?a=1&b=2" and percent-decodes the query.
    static Request make(std::string method, const std::string& target, std::string body = {});
};

struct Response {
    int status = 200;
    std::string body;
    std::string content_type = "application/json";

    Json json() const { return parse_json(body); }
};

struct ServiceOptions {
    std::filesystem::path data_dir;
    /// Tasks go through an in-process broker served by the service's own
    /// workers, or through a directory queue under data_dir that separate
    /// `ccs work` processes drain.
    bool file_broker = false;
    orchestrator::QueueConfig workers{{{"parse", 1}, {"ml", 1}, {"assemble", 1}}};
    bool start_workers = true;
    /// How long a page request waits for its pre-annotation.
    std::chrono::milliseconds prediction_timeout{120000};
};

/// Storage and queue locations under a data directory, shared by the
/// service and standalone workers.
struct DataLayout {
    std::filesystem::path root;
    std::filesystem::path objects() const { return root / "objects"; }
    std::filesystem::path metadata() const { return root / "metadata.db"; }
    std::filesystem::path results() const { return root / "results.db"; }
    std::filesystem::path queue() const { return root / "queue"; }
};

struct StoredAnnotation {
    MetadataRecord record;
    AnnotationRecord annotation;
};

/// REST API over collections, documents, annotations, models and conversions.
/// Handlers keep no per-client state: everything lives in the object store,
/// the metadata index and the task results.
class Service {
public:
    explicit Service(ServiceOptions options);
    ~Service();
    Service(const Service&) = delete;
    Service& operator=(const Service&) = delete;

    Response handle(const Request& request);
    Response handle(const std::string& method, const std::string& target, const std::string& body = {}) {
        return handle(Request::make(method, target, body));
    }

    store::ObjectStore& store() { return *store_; }
    MetadataIndex& index() { return *index_; }
    orchestrator::Orchestrator& orchestrator() { return *orchestrator_; }

    /// Settles finished jobs of a collection into metadata records.
    void reconcile(const std::string& collection);

private:
    Response dispatch(const Request& r);

    Response create_collection(const Request& r);
    Response list_collections();
    Response get_collection(const std::string& id);
    Response upload(const std::string& collection, const Request& r);
    Response get_document(const std::string& doc_id);
    Response get_page(const std::string& doc_id, int page);
    Response post_annotation(const std::string& doc_id, int page, const Request& r);
    Response get_annotation(const std::string& doc_id, int page);
    Response train(const std::string& collection, const Request& r);
    Response get_model(const std::string& model_id);
    Response download_model(const std::string& model_id);
    Response convert(const std::string& doc_id, const Request& r);
    Response detect(const std::string& doc_id);
    Response session_stats(const std::string& collection);
    Response get_task(const std::string& task_id);
    Response task_result(const std::string& task_id);

    /// Follows chained successors to the last task known so far.
    std::optional<orchestrator::TaskStatus> chain_tail(const std::string& task_id);
    Job settle(Job job);
    std::optional<std::string> parsed_key(const MetadataRecord& pdf);
    std::optional<Job> latest_model(const std::string& collection);
    std::vector<StoredAnnotation> current_annotations(const std::string& doc_id);
    std::string submit_job(const orchestrator::TaskSpec& spec, Job job);

    ServiceOptions options_;
    DataLayout layout_;
    std::unique_ptr<store::ObjectStore> store_;
    std::unique_ptr<MetadataIndex> index_;
    std::unique_ptr<orchestrator::ResultBackend> results_;
    std::unique_ptr<orchestrator::Broker> broker_;
    pipeline::Registry registry_;
    std::unique_ptr<orchestrator::Orchestrator> orchestrator_;
};

/// Serves `service` over HTTP until the process is stopped.
void serve_http(Service& service, const std::string& host, int port);

}  // namespace ccs::service
