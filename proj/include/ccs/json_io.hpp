#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "json.hpp"

namespace ccs {

using Json = nlohmann::json;

/// Rounds to the 0.001 grid used by every canonical document format.
double quantize3(double v);

/// Canonical text form: sorted keys, two-space indentation, scalar arrays on
/// one line, floating point values printed with exactly three decimals,
/// trailing newline. Equal Json values always produce equal bytes.
std::string canonical_dump(const Json& value);

/// Parses JSON text, mapping syntax errors to schema-violation.
Json parse_json(std::string_view text);

/// Read-only view over a Json value that remembers its JSON-pointer path so
/// schema errors can name the first offending location.
class JsonCursor {
public:
    explicit JsonCursor(const Json& value, std::string path = "") : value_(&value), path_(std::move(path)) {}

    const Json& raw() const { return *value_; }
    const std::string& path() const { return path_; }

    bool has(std::string_view key) const;
    JsonCursor at(std::string_view key) const;
    std::optional<JsonCursor> find(std::string_view key) const;
    JsonCursor at(std::size_t index) const;

    std::size_t array_size() const;
    void expect_object() const;

    double number() const;
    double positive_number() const;
    std::int64_t integer() const;
    std::string string() const;
    bool boolean() const;

    [[noreturn]] void fail(const std::string& what) const;

private:
    const Json* value_;
    std::string path_;
};

}  // namespace ccs
