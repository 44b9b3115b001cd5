#include "ccs/orchestrator/broker.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <thread>
#include <vector>

#include "ccs/error.hpp"

namespace ccs::orchestrator {

namespace fs = std::filesystem;

// --- in-process ---------------------------------------------------------

void InProcessBroker::publish(const TaskMessage& message) {
    {
        std::lock_guard lock(mu_);
        queues_[message.queue].push_back({message, Clock::now()});
    }
    cv_.notify_all();
}

void InProcessBroker::expire_leases(Clock::time_point now) {
    for (auto it = in_flight_.begin(); it != in_flight_.end();) {
        if (it->second.deadline <= now) {
            TaskMessage m = std::move(it->second.message);
            ++m.attempt;
            queues_[m.queue].push_back({std::move(m), now});
            it = in_flight_.erase(it);
        } else {
            ++it;
        }
    }
}

std::optional<Claim> InProcessBroker::claim(const std::string& queue, std::chrono::milliseconds lease,
                                            std::chrono::milliseconds wait) {
    const auto until = Clock::now() + wait;
    std::unique_lock lock(mu_);
    while (true) {
        const auto now = Clock::now();
        expire_leases(now);
        auto& q = queues_[queue];
        auto ready = std::find_if(q.begin(), q.end(), [&](const Pending& p) { return p.available <= now; });
        if (ready != q.end()) {
            Claim c{std::move(ready->message), queue + "#" + std::to_string(next_receipt_++)};
            q.erase(ready);
            in_flight_.emplace(c.receipt, InFlight{c.message, now + lease});
            return c;
        }
        if (now >= until) return std::nullopt;
        cv_.wait_until(lock, std::min(until, now + std::chrono::milliseconds(10)));
    }
}

void InProcessBroker::ack(const std::string& receipt) {
    std::lock_guard lock(mu_);
    in_flight_.erase(receipt);
}

void InProcessBroker::retry(const std::string& receipt, std::chrono::milliseconds delay) {
    {
        std::lock_guard lock(mu_);
        auto it = in_flight_.find(receipt);
        if (it == in_flight_.end()) return;  // lease already expired and redelivered
        TaskMessage m = std::move(it->second.message);
        in_flight_.erase(it);
        ++m.attempt;
        queues_[m.queue].push_back({std::move(m), Clock::now() + delay});
    }
    cv_.notify_all();
}

std::size_t InProcessBroker::outstanding() {
    std::lock_guard lock(mu_);
    std::size_t n = in_flight_.size();
    for (const auto& [name, q] : queues_) n += q.size();
    return n;
}

// --- file-backed --------------------------------------------------------

namespace {

class FileLock {
public:
    explicit FileLock(const fs::path& path) : fd_(::open(path.c_str(), O_RDWR | O_CREAT, 0644)) {
        if (fd_ < 0 || ::flock(fd_, LOCK_EX) != 0) {
            if (fd_ >= 0) ::close(fd_);
            throw Error(errc::kIo, "cannot lock " + path.string());
        }
    }
    ~FileLock() {
        ::flock(fd_, LOCK_UN);
        ::close(fd_);
    }
    FileLock(const FileLock&) = delete;
    FileLock& operator=(const FileLock&) = delete;

private:
    int fd_;
};

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_atomic(const fs::path& p, const std::string& bytes) {
    const fs::path tmp = p.parent_path() / (".tmp-" + p.filename().string());
    {
        std::ofstream out(tmp, std::ios::binary);
        out << bytes;
        if (!out) throw Error(errc::kIo, "cannot write " + tmp.string());
    }
    fs::rename(tmp, p);
}

TaskMessage read_message(const fs::path& p) {
    Json j = parse_json(read_file(p));
    return TaskMessage::from_json(JsonCursor(j));
}

// ready file names sort by availability time
std::string ready_name(std::int64_t available_ms, const TaskMessage& m) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%015lld", static_cast<long long>(available_ms));
    return std::string(buf) + "-" + std::to_string(m.attempt) + "-" + m.task_id + ".json";
}

std::int64_t available_of(const std::string& name) { return std::stoll(name.substr(0, 15)); }

std::vector<fs::path> sorted_files(const fs::path& dir, const std::string& ext) {
    std::vector<fs::path> out;
    if (!fs::exists(dir)) return out;
    for (const auto& e : fs::directory_iterator(dir)) {
        const auto name = e.path().filename().string();
        if (e.is_regular_file() && name[0] != '.' && e.path().extension() == ext) out.push_back(e.path());
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace

FileBroker::FileBroker(fs::path root) : root_(std::move(root)) { fs::create_directories(root_); }

void FileBroker::write_ready(const TaskMessage& message, std::int64_t available_ms) {
    const fs::path dir = root_ / message.queue / "ready";
    fs::create_directories(dir);
    write_atomic(dir / ready_name(available_ms, message), message.to_json().dump());
}

void FileBroker::publish(const TaskMessage& message) {
    if (message.queue.empty() || message.queue.find('/') != std::string::npos || message.queue[0] == '.') {
        throw Error(errc::kInvalidArgument, "bad queue name '" + message.queue + "'");
    }
    FileLock lock(root_ / "lock");
    write_ready(message, now_ms());
}

void FileBroker::expire_leases() {
    const std::int64_t now = now_ms();
    for (const auto& q : fs::directory_iterator(root_)) {
        if (!q.is_directory()) continue;
        for (const fs::path& lease : sorted_files(q.path() / "claimed", ".lease")) {
            if (std::stoll(read_file(lease)) > now) continue;
            fs::path msg = lease;
            msg.replace_extension(".json");
            if (fs::exists(msg)) {
                TaskMessage m = read_message(msg);
                ++m.attempt;
                write_ready(m, now);
                fs::remove(msg);
            }
            fs::remove(lease);
        }
    }
}

std::optional<Claim> FileBroker::try_claim(const std::string& queue, std::chrono::milliseconds lease) {
    FileLock lock(root_ / "lock");
    expire_leases();
    const std::int64_t now = now_ms();
    for (const fs::path& p : sorted_files(root_ / queue / "ready", ".json")) {
        if (available_of(p.filename().string()) > now) break;
        const fs::path claimed_dir = root_ / queue / "claimed";
        fs::create_directories(claimed_dir);
        const fs::path target = claimed_dir / p.filename();
        fs::rename(p, target);
        fs::path lease_path = target;
        lease_path.replace_extension(".lease");
        write_atomic(lease_path, std::to_string(now + lease.count()));
        return Claim{read_message(target), queue + "/" + target.stem().string()};
    }
    return std::nullopt;
}

std::optional<Claim> FileBroker::claim(const std::string& queue, std::chrono::milliseconds lease,
                                       std::chrono::milliseconds wait) {
    const auto until = std::chrono::steady_clock::now() + wait;
    while (true) {
        if (auto c = try_claim(queue, lease)) return c;
        if (std::chrono::steady_clock::now() >= until) return std::nullopt;
        std::this_thread::sleep_for(std::chrono::milliseconds(10));
    }
}

void FileBroker::ack(const std::string& receipt) {
    FileLock lock(root_ / "lock");
    const auto slash = receipt.find('/');
    const fs::path base = root_ / receipt.substr(0, slash) / "claimed" / receipt.substr(slash + 1);
    fs::remove(fs::path(base).concat(".json"));
    fs::remove(fs::path(base).concat(".lease"));
}

void FileBroker::retry(const std::string& receipt, std::chrono::milliseconds delay) {
    FileLock lock(root_ / "lock");
    const auto slash = receipt.find('/');
    const fs::path base = root_ / receipt.substr(0, slash) / "claimed" / receipt.substr(slash + 1);
    const fs::path msg = fs::path(base).concat(".json");
    if (!fs::exists(msg)) return;
    TaskMessage m = read_message(msg);
    ++m.attempt;
    write_ready(m, now_ms() + delay.count());
    fs::remove(msg);
    fs::remove(fs::path(base).concat(".lease"));
}

std::size_t FileBroker::outstanding() {
    FileLock lock(root_ / "lock");
    expire_leases();
    std::size_t n = 0;
    for (const auto& q : fs::directory_iterator(root_)) {
        if (!q.is_directory()) continue;
        n += sorted_files(q.path() / "ready", ".json").size();
        n += sorted_files(q.path() / "claimed", ".json").size();
    }
    return n;
}

}  // namespace ccs::orchestrator
