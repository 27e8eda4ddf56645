#pragma once

#include <string>
#include <string_view>

namespace monge {

// Lower-case hex SHA-256 of `data`.
std::string sha256_hex(std::string_view data);

// First 16 hex digits of sha256_hex; used as a provenance tag in outputs.
std::string short_digest(std::string_view data);

}  // namespace monge
