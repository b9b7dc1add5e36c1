#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace catforge::util {

std::string read_file(const std::filesystem::path& path);

// Write via temp file + rename so readers never observe a partial file.
void atomic_write(const std::filesystem::path& path, std::string_view content);

std::vector<std::string> read_lines(const std::filesystem::path& path);

}  // namespace catforge::util
