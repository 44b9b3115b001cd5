#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ccs {

// Error codes are stable strings; they appear in task statuses, HTTP bodies
// and CLI output, so callers match on code() rather than on the message.
namespace errc {
inline constexpr std::string_view kSchemaViolation = "schema-violation";
inline constexpr std::string_view kParseFailure = "parse-failure";
inline constexpr std::string_view kUnsupportedEncryption = "unsupported-encryption";
inline constexpr std::string_view kUnknownLabel = "unknown-label";
inline constexpr std::string_view kEmptyDataset = "empty-dataset";
inline constexpr std::string_view kSchemaMismatch = "schema-mismatch";
inline constexpr std::string_view kShapeError = "shape-error";
inline constexpr std::string_view kBadScale = "bad-scale";
inline constexpr std::string_view kEmptyInput = "empty-input";
inline constexpr std::string_view kMissingLabel = "missing-label";
inline constexpr std::string_view kNoSuchOperation = "no-such-operation";
inline constexpr std::string_view kMissingInput = "missing-input";
inline constexpr std::string_view kBadOrdering = "bad-ordering";
inline constexpr std::string_view kInvalidArgument = "invalid-argument";
inline constexpr std::string_view kIo = "io-error";
}  // namespace errc

class Error : public std::runtime_error {
public:
    Error(std::string_view code, const std::string& message)
        : std::runtime_error(std::string(code) + ": " + message), code_(code), detail_(message) {}

    const std::string& code() const noexcept { return code_; }
    const std::string& detail() const noexcept { return detail_; }

private:
    std::string code_;
    std::string detail_;
};

}  // namespace ccs
