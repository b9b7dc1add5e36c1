#pragma once

#include <string>
#include <string_view>

namespace catforge::util {

// SHA-256 of the input, lowercase hex (64 chars).
std::string sha256_hex(std::string_view data);

}  // namespace catforge::util
