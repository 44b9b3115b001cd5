#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ccs/json_io.hpp"

namespace ccs::orchestrator {

/// Placeholder in a chained step's inputs for the predecessor's output key.
inline constexpr std::string_view kPrevious = "$prev";

/// What to run: an operation over stored inputs. Chained steps run only after
/// this one succeeds; their inputs may use kPrevious, and when they don't
/// the predecessor's output is prepended.
struct TaskSpec {
    std::string operation;
    std::vector<std::string> inputs;
    Json params = Json::object();
    std::string queue;  // empty: the operation's default queue
    std::vector<TaskSpec> then;

    Json to_json() const;
    static TaskSpec from_json(const JsonCursor& c);
};

/// Content hash of operation, inputs, params and the chain, so resubmitting
/// the same work yields the same id.
std::string task_id(const TaskSpec& spec);

struct TaskMessage {
    std::string task_id;
    std::string queue;
    TaskSpec spec;
    int attempt = 1;

    Json to_json() const;
    static TaskMessage from_json(const JsonCursor& c);
};

enum class TaskState { kQueued, kRunning, kSucceeded, kFailed };
std::string to_string(TaskState s);
TaskState task_state_from_string(const std::string& s);

struct TaskStatus {
    std::string task_id;
    std::string operation;
    TaskState state = TaskState::kQueued;
    int attempt = 1;
    std::optional<std::string> result;      // output object key
    std::optional<std::string> error_code;
    std::optional<std::string> error;
    std::optional<std::string> next;        // id of the chained successor once enqueued
    std::int64_t created_ms = 0;
    std::int64_t started_ms = 0;
    std::int64_t finished_ms = 0;

    bool terminal() const { return state == TaskState::kSucceeded || state == TaskState::kFailed; }
    Json to_json() const;
    static TaskStatus from_json(const JsonCursor& c);
};

/// Wall-clock milliseconds since the epoch.
std::int64_t now_ms();

}  // namespace ccs::orchestrator
