#include "ccs/orchestrator/results.hpp"

#include "ccs/store/sqlite.hpp"

namespace ccs::orchestrator {

bool MemoryResultBackend::create(const TaskStatus& status) {
    std::lock_guard lock(mu_);
    return statuses_.try_emplace(status.task_id, status).second;
}

void MemoryResultBackend::update(const TaskStatus& status) {
    std::lock_guard lock(mu_);
    statuses_[status.task_id] = status;
}

std::optional<TaskStatus> MemoryResultBackend::get(const std::string& task_id) {
    std::lock_guard lock(mu_);
    auto it = statuses_.find(task_id);
    if (it == statuses_.end()) return std::nullopt;
    return it->second;
}

std::size_t MemoryResultBackend::purge_expired(std::int64_t now, std::chrono::milliseconds ttl) {
    std::lock_guard lock(mu_);
    return std::erase_if(statuses_, [&](const auto& kv) {
        return kv.second.terminal() && kv.second.finished_ms + ttl.count() < now;
    });
}

struct SqliteResultBackend::Impl {
    store::Db db;
    explicit Impl(const std::filesystem::path& path) : db(path) {
        db.exec(
            "CREATE TABLE IF NOT EXISTS task_status ("
            " task_id TEXT PRIMARY KEY, state TEXT NOT NULL, finished_ms INTEGER NOT NULL, body TEXT NOT NULL)");
        db.exec("CREATE INDEX IF NOT EXISTS task_status_state ON task_status(state, finished_ms)");
    }
};

SqliteResultBackend::SqliteResultBackend(const std::filesystem::path& db_path)
    : impl_(std::make_unique<Impl>(db_path)) {}

SqliteResultBackend::~SqliteResultBackend() = default;

bool SqliteResultBackend::create(const TaskStatus& status) {
    std::lock_guard lock(impl_->db.mutex());
    store::Stmt st(impl_->db, "INSERT OR IGNORE INTO task_status VALUES (?1, ?2, ?3, ?4)");
    st.bind(1, status.task_id).bind(2, to_string(status.state)).bind(3, status.finished_ms).bind(4, status.to_json().dump());
    st.run();
    return impl_->db.changes() > 0;
}

void SqliteResultBackend::update(const TaskStatus& status) {
    std::lock_guard lock(impl_->db.mutex());
    store::Stmt st(impl_->db, "INSERT OR REPLACE INTO task_status VALUES (?1, ?2, ?3, ?4)");
    st.bind(1, status.task_id).bind(2, to_string(status.state)).bind(3, status.finished_ms).bind(4, status.to_json().dump());
    st.run();
}

std::optional<TaskStatus> SqliteResultBackend::get(const std::string& task_id) {
    std::lock_guard lock(impl_->db.mutex());
    store::Stmt st(impl_->db, "SELECT body FROM task_status WHERE task_id = ?1");
    st.bind(1, task_id);
    if (!st.step()) return std::nullopt;
    Json j = parse_json(st.text(0));
    return TaskStatus::from_json(JsonCursor(j));
}

std::size_t SqliteResultBackend::purge_expired(std::int64_t now, std::chrono::milliseconds ttl) {
    std::lock_guard lock(impl_->db.mutex());
    store::Stmt st(impl_->db,
                   "DELETE FROM task_status WHERE state IN ('succeeded', 'failed') AND finished_ms + ?1 < ?2");
    st.bind(1, static_cast<std::int64_t>(ttl.count())).bind(2, now);
    st.run();
    return static_cast<std::size_t>(impl_->db.changes());
}

}  // namespace ccs::orchestrator
