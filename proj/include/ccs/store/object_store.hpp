#pragma once

#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>

namespace ccs::store {

/// Content-addressed blob storage: the key of a blob is the SHA-256 of its
/// bytes, so writes are idempotent and blobs are immutable.
class ObjectStore {
public:
    virtual ~ObjectStore() = default;
    virtual std::string put(std::string_view bytes) = 0;
    virtual std::optional<std::string> get(const std::string& key) const = 0;
    virtual bool contains(const std::string& key) const = 0;
    virtual bool remove(const std::string& key) = 0;
    virtual std::size_t size() const = 0;
};

class MemoryObjectStore final : public ObjectStore {
public:
    std::string put(std::string_view bytes) override;
    std::optional<std::string> get(const std::string& key) const override;
    bool contains(const std::string& key) const override;
    bool remove(const std::string& key) override;
    std::size_t size() const override;

private:
    mutable std::mutex mu_;
    std::map<std::string, std::string> blobs_;
};

/// Blobs live at root/ab/cdef...; writes go to a temporary file that is
/// renamed into place, so readers never see partial content.
class FsObjectStore final : public ObjectStore {
public:
    explicit FsObjectStore(std::filesystem::path root);
    std::string put(std::string_view bytes) override;
    std::optional<std::string> get(const std::string& key) const override;
    bool contains(const std::string& key) const override;
    bool remove(const std::string& key) override;
    std::size_t size() const override;
    const std::filesystem::path& root() const { return root_; }

private:
    std::filesystem::path path_of(const std::string& key) const;
    std::filesystem::path root_;
};

/// Hex SHA-256 with 64 lower-case digits.
bool is_object_key(std::string_view key);

}  // namespace ccs::store
