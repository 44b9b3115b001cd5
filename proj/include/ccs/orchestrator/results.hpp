#pragma once

#include <chrono>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>

#include "ccs/orchestrator/task.hpp"

namespace ccs::orchestrator {

/// Task statuses keyed by task id.
class ResultBackend {
public:
    virtual ~ResultBackend() = default;
    /// Inserts `status` unless the id is already known; returns whether it
    /// was inserted.
    virtual bool create(const TaskStatus& status) = 0;
    virtual void update(const TaskStatus& status) = 0;
    virtual std::optional<TaskStatus> get(const std::string& task_id) = 0;
    /// Drops terminal statuses that finished more than `ttl` before `now_ms`.
    virtual std::size_t purge_expired(std::int64_t now_ms, std::chrono::milliseconds ttl) = 0;
};

class MemoryResultBackend final : public ResultBackend {
public:
    bool create(const TaskStatus& status) override;
    void update(const TaskStatus& status) override;
    std::optional<TaskStatus> get(const std::string& task_id) override;
    std::size_t purge_expired(std::int64_t now_ms, std::chrono::milliseconds ttl) override;

private:
    std::mutex mu_;
    std::map<std::string, TaskStatus> statuses_;
};

/// Statuses in an SQLite table; usable from several processes.
class SqliteResultBackend final : public ResultBackend {
public:
    explicit SqliteResultBackend(const std::filesystem::path& db_path);
    ~SqliteResultBackend() override;
    SqliteResultBackend(const SqliteResultBackend&) = delete;
    SqliteResultBackend& operator=(const SqliteResultBackend&) = delete;

    bool create(const TaskStatus& status) override;
    void update(const TaskStatus& status) override;
    std::optional<TaskStatus> get(const std::string& task_id) override;
    std::size_t purge_expired(std::int64_t now_ms, std::chrono::milliseconds ttl) override;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace ccs::orchestrator
