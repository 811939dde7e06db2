#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace ssync {

// Lowercase hex SHA-256.
std::string sha256_hex(std::string_view bytes);
std::string file_sha256_hex(const std::filesystem::path& path);

}  // namespace ssync
