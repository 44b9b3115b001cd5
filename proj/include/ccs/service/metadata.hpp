#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ccs/json_io.hpp"
#include "ccs/store/object_store.hpp"
#include "ccs/store/sqlite.hpp"

namespace ccs::service {

/// Kinds of stored objects tracked by the index.
inline constexpr std::string_view kKinds[] = {"pdf", "parsed", "annotation", "model", "structured", "detections"};
bool is_kind(std::string_view kind);

/// Index entry for one stored object within a collection.
struct MetadataRecord {
    std::string key;  // object store key
    std::string collection;
    std::string kind;
    std::string status;
    std::string subject;  // doc id the object belongs to, or empty
    Json attrs = Json::object();
    std::int64_t created_ms = 0;

    Json to_json() const;
};

struct RecordQuery {
    std::optional<std::string> collection, kind, status, subject;
};

struct Collection {
    std::string id;
    std::string name;
    Json labels;  // label-set JSON
    std::int64_t created_ms = 0;
};

/// Asynchronous work started through the API. The id is the task id of the
/// first task in the chain.
struct Job {
    std::string task_id;
    std::string collection;
    std::string kind;  // parse, train, convert, detect
    std::string subject;
    std::string status = "pending";  // pending, succeeded, failed
    std::optional<std::string> result;
    Json attrs = Json::object();
    std::int64_t created_ms = 0;

    Json to_json() const;
};

/// Metadata index in a single SQLite file, with a secondary index on
/// (collection, kind, status). Safe to share between threads.
class MetadataIndex {
public:
    explicit MetadataIndex(const std::filesystem::path& path);

    /// False when the id already exists.
    bool add_collection(const Collection& c);
    std::optional<Collection> collection(const std::string& id);
    std::vector<Collection> collections();

    /// False when a record with the same (kind, key, collection) exists.
    bool insert(const MetadataRecord& r);
    void upsert(const MetadataRecord& r);
    std::optional<MetadataRecord> find(const std::string& kind, const std::string& key);
    /// Matches in creation order.
    std::vector<MetadataRecord> query(const RecordQuery& q);
    /// Marks the current annotation of (doc, page) superseded and inserts
    /// `r` as current, in one transaction.
    void replace_annotation(const MetadataRecord& r, int page_number);

    bool add_job(const Job& j);
    std::optional<Job> job(const std::string& task_id);
    std::vector<Job> jobs(const std::string& collection, const std::string& kind);
    void update_job(const Job& j);

    /// Records whose key does not resolve in `store`.
    std::vector<MetadataRecord> orphans(const store::ObjectStore& store);

private:
    std::vector<MetadataRecord> select(const std::string& where, const std::vector<std::string>& args);
    std::vector<Job> select_jobs(const std::string& where, const std::vector<std::string>& args);
    store::Db db_;
};

}  // namespace ccs::service
