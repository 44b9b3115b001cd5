#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "ccs/orchestrator/broker.hpp"
#include "ccs/orchestrator/results.hpp"
#include "ccs/orchestrator/task.hpp"
#include "ccs/pipeline/operations.hpp"
#include "ccs/store/object_store.hpp"

namespace ccs::orchestrator {

struct RetryPolicy {
    int max_attempts = 3;
    std::chrono::milliseconds base_delay{1000};

    /// Delay before attempt `attempt + 1`: base, 2 base, 4 base, ...
    std::chrono::milliseconds delay(int attempt) const;
};

/// Workers per queue, e.g. parse=4,ml=2,assemble=1.
struct QueueConfig {
    std::map<std::string, int> workers;
    std::chrono::milliseconds lease{30000};

    static QueueConfig parse(const std::string& spec);
};

/// Simulated worker deaths: a worker abandons the claimed task without
/// acking it, as if its process died, and the broker redelivers it once the
/// lease runs out. The decision is a hash of (seed, task id, attempt).
struct FaultInjector {
    double crash_rate = 0;
    std::uint64_t seed = 0;
    bool crashes(const std::string& task_id, int attempt) const;
};

struct ExecutionReport {
    std::size_t executed = 0;   // handler invocations
    std::size_t succeeded = 0;
    std::size_t failed = 0;
    std::size_t retried = 0;
    std::size_t crashes = 0;
    double seconds = 0;
};

class Orchestrator {
public:
    Orchestrator(Broker& broker, ResultBackend& results, store::ObjectStore& store, const pipeline::Registry& registry,
                 RetryPolicy retry = {});
    ~Orchestrator();
    Orchestrator(const Orchestrator&) = delete;
    Orchestrator& operator=(const Orchestrator&) = delete;

    /// Enqueues the task unless its id is already known. Throws
    /// no-such-operation for unregistered operations anywhere in the chain.
    std::string submit(const TaskSpec& spec);
    /// Runs `then` on the output of `first` once `first` succeeds.
    std::string chain(TaskSpec first, TaskSpec then);

    std::optional<TaskStatus> status(const std::string& task_id);
    /// Polls until the task is terminal or the timeout passes.
    std::optional<TaskStatus> wait(const std::string& task_id, std::chrono::milliseconds timeout);
    /// Follows `next` links to the last task of the chain and waits for it.
    std::optional<TaskStatus> wait_chain(const std::string& task_id, std::chrono::milliseconds timeout);

    /// Runs workers until no message is ready, delayed or in flight.
    ExecutionReport run_until_drained(const QueueConfig& cfg, const FaultInjector& faults = {});
    /// Background workers for long-running services.
    void start(const QueueConfig& cfg, const FaultInjector& faults = {});
    void stop();

    const pipeline::Registry& registry() const { return registry_; }
    store::ObjectStore& store() { return store_; }

private:
    struct Counters {
        std::atomic<std::size_t> executed{0}, succeeded{0}, failed{0}, retried{0}, crashes{0};
    };
    void work(const std::string& queue, std::chrono::milliseconds lease, const FaultInjector& faults, bool drain,
              std::atomic<bool>& stop, Counters& counters);
    void validate(const TaskSpec& spec) const;

    Broker& broker_;
    ResultBackend& results_;
    store::ObjectStore& store_;
    const pipeline::Registry& registry_;
    RetryPolicy retry_;
    std::vector<std::jthread> background_;
    std::atomic<bool> stop_{false};
    FaultInjector background_faults_;
    Counters background_counters_;
};

}  // namespace ccs::orchestrator
