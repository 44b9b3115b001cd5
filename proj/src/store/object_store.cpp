#include "ccs/store/object_store.hpp"

#include <atomic>
#include <fstream>
#include <sstream>
#include <thread>

#include "ccs/error.hpp"
#include "ccs/hash.hpp"

namespace ccs::store {

namespace fs = std::filesystem;

bool is_object_key(std::string_view key) {
    if (key.size() != 64) return false;
    for (char c : key) {
        if (!((c >= '0' && c <= '9') || (c >= 'a' && c <= 'f'))) return false;
    }
    return true;
}

std::string MemoryObjectStore::put(std::string_view bytes) {
    std::string key = sha256_hex(bytes);
    std::lock_guard lock(mu_);
    blobs_.try_emplace(key, bytes);
    return key;
}

std::optional<std::string> MemoryObjectStore::get(const std::string& key) const {
    std::lock_guard lock(mu_);
    auto it = blobs_.find(key);
    if (it == blobs_.end()) return std::nullopt;
    return it->second;
}

bool MemoryObjectStore::contains(const std::string& key) const {
    std::lock_guard lock(mu_);
    return blobs_.contains(key);
}

bool MemoryObjectStore::remove(const std::string& key) {
    std::lock_guard lock(mu_);
    return blobs_.erase(key) > 0;
}

std::size_t MemoryObjectStore::size() const {
    std::lock_guard lock(mu_);
    return blobs_.size();
}

FsObjectStore::FsObjectStore(fs::path root) : root_(std::move(root)) {
    std::error_code ec;
    fs::create_directories(root_, ec);
    if (ec) throw Error(errc::kIo, "cannot create object store at " + root_.string() + ": " + ec.message());
}

fs::path FsObjectStore::path_of(const std::string& key) const {
    if (!is_object_key(key)) throw Error(errc::kInvalidArgument, "malformed object key '" + key + "'");
    return root_ / key.substr(0, 2) / key.substr(2);
}

std::string FsObjectStore::put(std::string_view bytes) {
    std::string key = sha256_hex(bytes);
    const fs::path target = path_of(key);
    if (fs::exists(target)) return key;
    fs::create_directories(target.parent_path());
    static std::atomic<unsigned long> counter{0};
    std::ostringstream tmp_name;
    tmp_name << ".tmp-" << std::hash<std::thread::id>{}(std::this_thread::get_id()) << "-" << counter++;
    const fs::path tmp = target.parent_path() / tmp_name.str();
    {
        std::ofstream out(tmp, std::ios::binary);
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        if (!out) throw Error(errc::kIo, "cannot write " + tmp.string());
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) {
        fs::remove(tmp);
        throw Error(errc::kIo, "cannot store object " + key + ": " + ec.message());
    }
    return key;
}

std::optional<std::string> FsObjectStore::get(const std::string& key) const {
    if (!is_object_key(key)) return std::nullopt;
    std::ifstream in(path_of(key), std::ios::binary);
    if (!in) return std::nullopt;
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

bool FsObjectStore::contains(const std::string& key) const { return is_object_key(key) && fs::exists(path_of(key)); }

bool FsObjectStore::remove(const std::string& key) {
    if (!is_object_key(key)) return false;
    return fs::remove(path_of(key));
}

std::size_t FsObjectStore::size() const {
    std::size_t n = 0;
    for (const auto& e : fs::recursive_directory_iterator(root_)) {
        if (e.is_regular_file() && e.path().filename().string().rfind(".tmp-", 0) != 0) ++n;
    }
    return n;
}

}  // namespace ccs::store
