#pragma once

#include <cstdint>
#include <filesystem>
#include <mutex>
#include <optional>
#include <string>

struct sqlite3;
struct sqlite3_stmt;

namespace ccs::store {

/// Minimal RAII wrapper over an SQLite connection. Errors throw io-error.
class Db {
public:
    explicit Db(const std::filesystem::path& path);
    ~Db();
    Db(const Db&) = delete;
    Db& operator=(const Db&) = delete;

    void exec(const std::string& sql);
    int changes() const;
    sqlite3* handle() const { return db_; }
    /// Serialises use of the connection between threads.
    std::mutex& mutex() { return mu_; }

private:
    sqlite3* db_ = nullptr;
    std::mutex mu_;
};

class Stmt {
public:
    Stmt(Db& db, const std::string& sql);
    ~Stmt();
    Stmt(const Stmt&) = delete;
    Stmt& operator=(const Stmt&) = delete;

    Stmt& bind(int index, const std::string& value);
    Stmt& bind(int index, std::int64_t value);
    Stmt& bind_null(int index);
    Stmt& bind(int index, const std::optional<std::string>& value);
    /// True while a row is available.
    bool step();
    void run();  // step to completion
    std::string text(int column) const;
    std::optional<std::string> optional_text(int column) const;
    std::int64_t integer(int column) const;

private:
    Db& db_;
    sqlite3_stmt* stmt_ = nullptr;
};

}  // namespace ccs::store
