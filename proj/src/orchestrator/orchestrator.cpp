#include "ccs/orchestrator/orchestrator.hpp"

#include <sstream>

#include "ccs/error.hpp"
#include "ccs/hash.hpp"

namespace ccs::orchestrator {

std::chrono::milliseconds RetryPolicy::delay(int attempt) const {
    return base_delay * (1LL << std::clamp(attempt - 1, 0, 20));
}

QueueConfig QueueConfig::parse(const std::string& spec) {
    QueueConfig cfg;
    std::stringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        const auto eq = item.find('=');
        if (eq == std::string::npos || eq == 0) throw Error(errc::kInvalidArgument, "expected queue=count, got '" + item + "'");
        int n = 0;
        try {
            n = std::stoi(item.substr(eq + 1));
        } catch (const std::exception&) {
            throw Error(errc::kInvalidArgument, "bad worker count in '" + item + "'");
        }
        if (n < 0) throw Error(errc::kInvalidArgument, "worker count must be non-negative in '" + item + "'");
        cfg.workers[item.substr(0, eq)] = n;
    }
    return cfg;
}

bool FaultInjector::crashes(const std::string& task_id, int attempt) const {
    if (crash_rate <= 0) return false;
    const std::string h = sha256_hex(std::to_string(seed) + ":" + task_id + ":" + std::to_string(attempt));
    const double u = static_cast<double>(std::stoull(h.substr(0, 13), nullptr, 16)) / static_cast<double>(1ULL << 52);
    return u < crash_rate;
}

Orchestrator::Orchestrator(Broker& broker, ResultBackend& results, store::ObjectStore& store,
                           const pipeline::Registry& registry, RetryPolicy retry)
    : broker_(broker), results_(results), store_(store), registry_(registry), retry_(retry) {}

Orchestrator::~Orchestrator() { stop(); }

void Orchestrator::validate(const TaskSpec& spec) const {
    if (!registry_.find(spec.operation)) throw Error(errc::kNoSuchOperation, "unknown operation '" + spec.operation + "'");
    if (spec.then.size() > 1) throw Error(errc::kInvalidArgument, "a task has at most one successor");
    for (const auto& t : spec.then) validate(t);
}

std::string Orchestrator::submit(const TaskSpec& spec) {
    validate(spec);
    TaskMessage m;
    m.task_id = task_id(spec);
    m.spec = spec;
    m.queue = spec.queue.empty() ? registry_.find(spec.operation)->queue : spec.queue;
    TaskStatus st;
    st.task_id = m.task_id;
    st.operation = spec.operation;
    st.created_ms = now_ms();
    if (results_.create(st)) broker_.publish(m);
    return m.task_id;
}

std::string Orchestrator::chain(TaskSpec first, TaskSpec then) {
    // append to the end of an existing chain
    TaskSpec* last = &first;
    while (!last->then.empty()) last = &last->then.front();
    last->then.push_back(std::move(then));
    return submit(first);
}

std::optional<TaskStatus> Orchestrator::status(const std::string& id) { return results_.get(id); }

std::optional<TaskStatus> Orchestrator::wait(const std::string& id, std::chrono::milliseconds timeout) {
    const auto until = std::chrono::steady_clock::now() + timeout;
    while (true) {
        auto st = results_.get(id);
        if ((st && st->terminal()) || std::chrono::steady_clock::now() >= until) return st;
        std::this_thread::sleep_for(std::chrono::milliseconds(5));
    }
}

std::optional<TaskStatus> Orchestrator::wait_chain(const std::string& id, std::chrono::milliseconds timeout) {
    const auto until = std::chrono::steady_clock::now() + timeout;
    std::string current = id;
    while (true) {
        const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(until - std::chrono::steady_clock::now());
        auto st = wait(current, std::max(left, std::chrono::milliseconds(0)));
        if (!st || !st->terminal()) return st;
        if (st->state == TaskState::kFailed || !st->next) return st;
        current = *st->next;
    }
}

void Orchestrator::work(const std::string& queue, std::chrono::milliseconds lease, const FaultInjector& faults,
                        bool drain, std::atomic<bool>& stop, Counters& counters) {
    while (!stop) {
        auto claim = broker_.claim(queue, lease, std::chrono::milliseconds(20));
        if (!claim) {
            if (drain && broker_.outstanding() == 0) return;
            continue;
        }
        const TaskMessage& m = claim->message;
        TaskStatus st = results_.get(m.task_id).value_or(TaskStatus{});
        st.task_id = m.task_id;
        st.operation = m.spec.operation;
        if (st.terminal()) {
            // a redelivered duplicate of finished work
            broker_.ack(claim->receipt);
            continue;
        }
        if (m.attempt > retry_.max_attempts) {
            st.state = TaskState::kFailed;
            st.attempt = m.attempt - 1;
            st.error_code = "worker-crash";
            st.error = "worker died on each of " + std::to_string(retry_.max_attempts) + " attempts";
            st.finished_ms = now_ms();
            results_.update(st);
            broker_.ack(claim->receipt);
            ++counters.failed;
            continue;
        }
        st.state = TaskState::kRunning;
        st.attempt = m.attempt;
        st.started_ms = now_ms();
        results_.update(st);
        if (faults.crashes(m.task_id, m.attempt)) {
            ++counters.crashes;
            continue;  // no ack: the lease expires and the broker redelivers
        }

        const pipeline::Operation* op = registry_.find(m.spec.operation);
        ++counters.executed;
        try {
            if (!op) throw Error(errc::kNoSuchOperation, "unknown operation '" + m.spec.operation + "'");
            pipeline::OpContext ctx{m.spec.inputs, m.spec.params, store_};
            const std::string out = op->handler(ctx);
            st.state = TaskState::kSucceeded;
            st.result = out;
            st.error_code.reset();
            st.error.reset();
            if (!m.spec.then.empty()) {
                TaskSpec next = m.spec.then.front();
                bool placed = false;
                for (auto& in : next.inputs) {
                    if (in == kPrevious) {
                        in = out;
                        placed = true;
                    }
                }
                if (!placed) next.inputs.insert(next.inputs.begin(), out);
                st.next = submit(next);
            }
            st.finished_ms = now_ms();
            results_.update(st);
            broker_.ack(claim->receipt);
            ++counters.succeeded;
        } catch (const Error& e) {
            // domain errors are deterministic: another attempt would fail the same way
            st.state = TaskState::kFailed;
            st.error_code = e.code();
            st.error = e.detail();
            st.finished_ms = now_ms();
            results_.update(st);
            broker_.ack(claim->receipt);
            ++counters.failed;
        } catch (const std::exception& e) {
            st.error_code = "internal";
            st.error = e.what();
            if (m.attempt < retry_.max_attempts) {
                results_.update(st);
                broker_.retry(claim->receipt, retry_.delay(m.attempt));
                ++counters.retried;
            } else {
                st.state = TaskState::kFailed;
                st.finished_ms = now_ms();
                results_.update(st);
                broker_.ack(claim->receipt);
                ++counters.failed;
            }
        }
    }
}

ExecutionReport Orchestrator::run_until_drained(const QueueConfig& cfg, const FaultInjector& faults) {
    Counters counters;
    std::atomic<bool> stop{false};
    const auto t0 = std::chrono::steady_clock::now();
    {
        std::vector<std::jthread> pool;
        for (const auto& [queue, n] : cfg.workers) {
            for (int i = 0; i < n; ++i) {
                pool.emplace_back([&, queue = queue] { work(queue, cfg.lease, faults, true, stop, counters); });
            }
        }
    }
    ExecutionReport r;
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    r.executed = counters.executed;
    r.succeeded = counters.succeeded;
    r.failed = counters.failed;
    r.retried = counters.retried;
    r.crashes = counters.crashes;
    return r;
}

void Orchestrator::start(const QueueConfig& cfg, const FaultInjector& faults) {
    stop();
    stop_ = false;
    background_faults_ = faults;
    for (const auto& [queue, n] : cfg.workers) {
        for (int i = 0; i < n; ++i) {
            background_.emplace_back([this, queue = queue, lease = cfg.lease] {
                work(queue, lease, background_faults_, false, stop_, background_counters_);
            });
        }
    }
}

void Orchestrator::stop() {
    stop_ = true;
    background_.clear();  // joins
}

}  // namespace ccs::orchestrator
