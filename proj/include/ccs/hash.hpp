#pragma once

#include <span>
#include <string>
#include <string_view>

namespace ccs {

/// Lower-case hex SHA-256 of the given bytes. Used for every content key
/// (document ids, object-store keys, task ids).
std::string sha256_hex(std::string_view bytes);

}  // namespace ccs
