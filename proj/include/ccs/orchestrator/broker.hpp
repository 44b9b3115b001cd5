#pragma once

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <string>

#include "ccs/orchestrator/task.hpp"

namespace ccs::orchestrator {

struct Claim {
    TaskMessage message;
    std::string receipt;
};

/// Named queues with publish / claim / ack semantics. A claimed message is
/// leased; if it is neither acked nor released before the lease runs out it
/// is redelivered with attempt + 1 (at-least-once delivery).
class Broker {
public:
    virtual ~Broker() = default;
    virtual void publish(const TaskMessage& message) = 0;
    /// Waits up to `wait` for a ready message.
    virtual std::optional<Claim> claim(const std::string& queue, std::chrono::milliseconds lease,
                                       std::chrono::milliseconds wait) = 0;
    virtual void ack(const std::string& receipt) = 0;
    /// Returns the message for another attempt after `delay`.
    virtual void retry(const std::string& receipt, std::chrono::milliseconds delay) = 0;
    /// Ready, delayed and in-flight messages over all queues.
    virtual std::size_t outstanding() = 0;
};

class InProcessBroker final : public Broker {
public:
    void publish(const TaskMessage& message) override;
    std::optional<Claim> claim(const std::string& queue, std::chrono::milliseconds lease,
                               std::chrono::milliseconds wait) override;
    void ack(const std::string& receipt) override;
    void retry(const std::string& receipt, std::chrono::milliseconds delay) override;
    std::size_t outstanding() override;

private:
    using Clock = std::chrono::steady_clock;
    struct Pending {
        TaskMessage message;
        Clock::time_point available;
    };
    struct InFlight {
        TaskMessage message;
        Clock::time_point deadline;
    };
    void expire_leases(Clock::time_point now);

    std::mutex mu_;
    std::condition_variable cv_;
    std::map<std::string, std::deque<Pending>> queues_;
    std::map<std::string, InFlight> in_flight_;
    std::uint64_t next_receipt_ = 0;
};

/// Queue state as files under a directory, shared between processes. Every
/// operation holds an exclusive flock on root/lock; a claim moves the message
/// file into claimed/ next to a lease record.
class FileBroker final : public Broker {
public:
    explicit FileBroker(std::filesystem::path root);
    void publish(const TaskMessage& message) override;
    std::optional<Claim> claim(const std::string& queue, std::chrono::milliseconds lease,
                               std::chrono::milliseconds wait) override;
    void ack(const std::string& receipt) override;
    void retry(const std::string& receipt, std::chrono::milliseconds delay) override;
    std::size_t outstanding() override;

private:
    std::optional<Claim> try_claim(const std::string& queue, std::chrono::milliseconds lease);
    void expire_leases();
    void write_ready(const TaskMessage& message, std::int64_t available_ms);

    std::filesystem::path root_;
};

}  // namespace ccs::orchestrator
