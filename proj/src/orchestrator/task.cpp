#include "ccs/orchestrator/task.hpp"

#include <chrono>

#include "ccs/error.hpp"
#include "ccs/hash.hpp"

namespace ccs::orchestrator {

Json TaskSpec::to_json() const {
    Json chain = Json::array();
    for (const auto& t : then) chain.push_back(t.to_json());
    return {{"operation", operation}, {"inputs", inputs}, {"params", params}, {"queue", queue}, {"then", std::move(chain)}};
}

TaskSpec TaskSpec::from_json(const JsonCursor& c) {
    c.expect_object();
    TaskSpec s;
    s.operation = c.at("operation").string();
    if (auto in = c.find("inputs")) {
        for (std::size_t i = 0, n = in->array_size(); i < n; ++i) s.inputs.push_back(in->at(i).string());
    }
    if (auto p = c.find("params")) {
        p->expect_object();
        s.params = p->raw();
    }
    if (auto q = c.find("queue")) s.queue = q->string();
    if (auto t = c.find("then")) {
        for (std::size_t i = 0, n = t->array_size(); i < n; ++i) s.then.push_back(from_json(t->at(i)));
    }
    return s;
}

std::string task_id(const TaskSpec& spec) {
    Json j = spec.to_json();
    j.erase("queue");
    return sha256_hex(canonical_dump(j));
}

Json TaskMessage::to_json() const {
    return {{"task_id", task_id}, {"queue", queue}, {"spec", spec.to_json()}, {"attempt", attempt}};
}

TaskMessage TaskMessage::from_json(const JsonCursor& c) {
    c.expect_object();
    TaskMessage m;
    m.task_id = c.at("task_id").string();
    m.queue = c.at("queue").string();
    m.spec = TaskSpec::from_json(c.at("spec"));
    m.attempt = static_cast<int>(c.at("attempt").integer());
    if (m.attempt < 1) c.at("attempt").fail("attempt must be at least 1");
    return m;
}

std::string to_string(TaskState s) {
    switch (s) {
        case TaskState::kQueued: return "queued";
        case TaskState::kRunning: return "running";
        case TaskState::kSucceeded: return "succeeded";
        case TaskState::kFailed: return "failed";
    }
    return "unknown";
}

TaskState task_state_from_string(const std::string& s) {
    if (s == "queued") return TaskState::kQueued;
    if (s == "running") return TaskState::kRunning;
    if (s == "succeeded") return TaskState::kSucceeded;
    if (s == "failed") return TaskState::kFailed;
    throw Error(errc::kSchemaViolation, "unknown task state '" + s + "'");
}

Json TaskStatus::to_json() const {
    Json j = {{"task_id", task_id},         {"operation", operation}, {"state", to_string(state)},
              {"attempt", attempt},         {"created_ms", created_ms}, {"started_ms", started_ms},
              {"finished_ms", finished_ms}};
    j["result"] = result ? Json(*result) : Json(nullptr);
    j["error_code"] = error_code ? Json(*error_code) : Json(nullptr);
    j["error"] = error ? Json(*error) : Json(nullptr);
    j["next"] = next ? Json(*next) : Json(nullptr);
    return j;
}

TaskStatus TaskStatus::from_json(const JsonCursor& c) {
    c.expect_object();
    TaskStatus s;
    s.task_id = c.at("task_id").string();
    s.operation = c.at("operation").string();
    try {
        s.state = task_state_from_string(c.at("state").string());
    } catch (const Error& e) {
        c.at("state").fail(e.detail());
    }
    s.attempt = static_cast<int>(c.at("attempt").integer());
    s.created_ms = c.at("created_ms").integer();
    s.started_ms = c.at("started_ms").integer();
    s.finished_ms = c.at("finished_ms").integer();
    auto opt = [&](const char* key, std::optional<std::string>& out) {
        if (auto v = c.find(key); v && !v->raw().is_null()) out = v->string();
    };
    opt("result", s.result);
    opt("error_code", s.error_code);
    opt("error", s.error);
    opt("next", s.next);
    return s;
}

std::int64_t now_ms() {
    return std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::system_clock::now().time_since_epoch())
        .count();
}

}  // namespace ccs::orchestrator
