#pragma once

#include <string>
#include <string_view>

namespace retraction {

// Lowercase hex SHA-256. Throws FileNotFound / Io.
std::string sha256_file(const std::string& path);
std::string sha256_hex(std::string_view data);

}  // namespace retraction
