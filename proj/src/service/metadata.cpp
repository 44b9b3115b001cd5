#include "ccs/service/metadata.hpp"

#include <algorithm>

#include "ccs/error.hpp"

namespace ccs::service {

bool is_kind(std::string_view kind) {
    return std::find(std::begin(kKinds), std::end(kKinds), kind) != std::end(kKinds);
}

Json MetadataRecord::to_json() const {
    return {{"key", key},         {"collection", collection}, {"kind", kind},        {"status", status},
            {"subject", subject}, {"attrs", attrs},           {"created_ms", created_ms}};
}

Json Job::to_json() const {
    Json j = {{"task_id", task_id}, {"collection", collection}, {"kind", kind},           {"subject", subject},
              {"status", status},   {"attrs", attrs},           {"created_ms", created_ms}};
    j["result"] = result ? Json(*result) : Json(nullptr);
    return j;
}

MetadataIndex::MetadataIndex(const std::filesystem::path& path) : db_(path) {
    db_.exec(R"(
CREATE TABLE IF NOT EXISTS collections(
  id TEXT PRIMARY KEY, name TEXT NOT NULL, labels TEXT NOT NULL, created_ms INTEGER NOT NULL);
CREATE TABLE IF NOT EXISTS records(
  key TEXT NOT NULL, collection TEXT NOT NULL, kind TEXT NOT NULL, status TEXT NOT NULL,
  subject TEXT NOT NULL, attrs TEXT NOT NULL, created_ms INTEGER NOT NULL,
  PRIMARY KEY(kind, key, collection));
CREATE INDEX IF NOT EXISTS records_by_status ON records(collection, kind, status);
CREATE INDEX IF NOT EXISTS records_by_subject ON records(subject, kind);
CREATE TABLE IF NOT EXISTS jobs(
  task_id TEXT PRIMARY KEY, collection TEXT NOT NULL, kind TEXT NOT NULL, subject TEXT NOT NULL,
  status TEXT NOT NULL, result TEXT, attrs TEXT NOT NULL, created_ms INTEGER NOT NULL);
CREATE INDEX IF NOT EXISTS jobs_by_collection ON jobs(collection, kind);
)");
}

bool MetadataIndex::add_collection(const Collection& c) {
    std::lock_guard lock(db_.mutex());
    store::Stmt(db_, "INSERT OR IGNORE INTO collections VALUES(?,?,?,?)")
        .bind(1, c.id)
        .bind(2, c.name)
        .bind(3, canonical_dump(c.labels))
        .bind(4, c.created_ms)
        .run();
    return db_.changes() > 0;
}

namespace {

Collection collection_row(const store::Stmt& s) {
    return {s.text(0), s.text(1), parse_json(s.text(2)), s.integer(3)};
}

}  // namespace

std::optional<Collection> MetadataIndex::collection(const std::string& id) {
    std::lock_guard lock(db_.mutex());
    store::Stmt s(db_, "SELECT id, name, labels, created_ms FROM collections WHERE id = ?");
    s.bind(1, id);
    if (!s.step()) return std::nullopt;
    return collection_row(s);
}

std::vector<Collection> MetadataIndex::collections() {
    std::lock_guard lock(db_.mutex());
    store::Stmt s(db_, "SELECT id, name, labels, created_ms FROM collections ORDER BY created_ms, id");
    std::vector<Collection> out;
    while (s.step()) out.push_back(collection_row(s));
    return out;
}

namespace {

constexpr const char* kRecordColumns = "SELECT key, collection, kind, status, subject, attrs, created_ms FROM records ";

void bind_record(store::Stmt& s, const MetadataRecord& r) {
    if (!is_kind(r.kind)) throw Error(errc::kInvalidArgument, "unknown record kind '" + r.kind + "'");
    s.bind(1, r.key)
        .bind(2, r.collection)
        .bind(3, r.kind)
        .bind(4, r.status)
        .bind(5, r.subject)
        .bind(6, canonical_dump(r.attrs))
        .bind(7, r.created_ms);
}

}  // namespace

bool MetadataIndex::insert(const MetadataRecord& r) {
    std::lock_guard lock(db_.mutex());
    store::Stmt s(db_, "INSERT OR IGNORE INTO records VALUES(?,?,?,?,?,?,?)");
    bind_record(s, r);
    s.run();
    return db_.changes() > 0;
}

void MetadataIndex::upsert(const MetadataRecord& r) {
    std::lock_guard lock(db_.mutex());
    store::Stmt s(db_, "INSERT OR REPLACE INTO records VALUES(?,?,?,?,?,?,?)");
    bind_record(s, r);
    s.run();
}

std::vector<MetadataRecord> MetadataIndex::select(const std::string& where, const std::vector<std::string>& args) {
    std::lock_guard lock(db_.mutex());
    store::Stmt s(db_, kRecordColumns + where + " ORDER BY created_ms, rowid");
    for (std::size_t i = 0; i < args.size(); ++i) s.bind(static_cast<int>(i + 1), args[i]);
    std::vector<MetadataRecord> out;
    while (s.step()) {
        out.push_back({s.text(0), s.text(1), s.text(2), s.text(3), s.text(4), parse_json(s.text(5)), s.integer(6)});
    }
    return out;
}

std::optional<MetadataRecord> MetadataIndex::find(const std::string& kind, const std::string& key) {
    auto rows = select("WHERE kind = ? AND key = ?", {kind, key});
    if (rows.empty()) return std::nullopt;
    return rows.front();
}

std::vector<MetadataRecord> MetadataIndex::query(const RecordQuery& q) {
    std::string where = "WHERE 1";
    std::vector<std::string> args;
    auto add = [&](const char* column, const std::optional<std::string>& v) {
        if (!v) return;
        where += std::string(" AND ") + column + " = ?";
        args.push_back(*v);
    };
    add("collection", q.collection);
    add("kind", q.kind);
    add("status", q.status);
    add("subject", q.subject);
    return select(where, args);
}

void MetadataIndex::replace_annotation(const MetadataRecord& r, int page_number) {
    std::lock_guard lock(db_.mutex());
    db_.exec("BEGIN IMMEDIATE");
    try {
        std::vector<std::string> stale;
        {
            store::Stmt q(db_,
                          "SELECT key, attrs FROM records WHERE kind = 'annotation' AND subject = ? AND "
                          "status = 'current'");
            q.bind(1, r.subject);
            while (q.step()) {
                const Json attrs = parse_json(q.text(1));
                if (attrs.value("page_number", -1) == page_number) stale.push_back(q.text(0));
            }
        }
        for (const auto& key : stale) {
            store::Stmt(db_, "UPDATE records SET status = 'superseded' WHERE kind = 'annotation' AND key = ?")
                .bind(1, key)
                .run();
        }
        store::Stmt s(db_, "INSERT OR REPLACE INTO records VALUES(?,?,?,?,?,?,?)");
        bind_record(s, r);
        s.run();
        db_.exec("COMMIT");
    } catch (...) {
        db_.exec("ROLLBACK");
        throw;
    }
}

bool MetadataIndex::add_job(const Job& j) {
    std::lock_guard lock(db_.mutex());
    store::Stmt(db_, "INSERT OR IGNORE INTO jobs VALUES(?,?,?,?,?,?,?,?)")
        .bind(1, j.task_id)
        .bind(2, j.collection)
        .bind(3, j.kind)
        .bind(4, j.subject)
        .bind(5, j.status)
        .bind(6, j.result)
        .bind(7, canonical_dump(j.attrs))
        .bind(8, j.created_ms)
        .run();
    return db_.changes() > 0;
}

std::vector<Job> MetadataIndex::select_jobs(const std::string& where, const std::vector<std::string>& args) {
    std::lock_guard lock(db_.mutex());
    store::Stmt s(db_,
                  "SELECT task_id, collection, kind, subject, status, result, attrs, created_ms FROM jobs " + where +
                      " ORDER BY created_ms, rowid");
    for (std::size_t i = 0; i < args.size(); ++i) s.bind(static_cast<int>(i + 1), args[i]);
    std::vector<Job> out;
    while (s.step()) {
        out.push_back({s.text(0), s.text(1), s.text(2), s.text(3), s.text(4), s.optional_text(5),
                       parse_json(s.text(6)), s.integer(7)});
    }
    return out;
}

std::optional<Job> MetadataIndex::job(const std::string& task_id) {
    auto rows = select_jobs("WHERE task_id = ?", {task_id});
    if (rows.empty()) return std::nullopt;
    return rows.front();
}

std::vector<Job> MetadataIndex::jobs(const std::string& collection, const std::string& kind) {
    return select_jobs("WHERE collection = ? AND kind = ?", {collection, kind});
}

void MetadataIndex::update_job(const Job& j) {
    std::lock_guard lock(db_.mutex());
    store::Stmt(db_, "UPDATE jobs SET status = ?, result = ?, attrs = ? WHERE task_id = ?")
        .bind(1, j.status)
        .bind(2, j.result)
        .bind(3, canonical_dump(j.attrs))
        .bind(4, j.task_id)
        .run();
}

std::vector<MetadataRecord> MetadataIndex::orphans(const store::ObjectStore& store) {
    std::vector<MetadataRecord> out;
    for (auto& r : query({})) {
        if (!store.contains(r.key)) out.push_back(std::move(r));
    }
    return out;
}

}  // namespace ccs::service
