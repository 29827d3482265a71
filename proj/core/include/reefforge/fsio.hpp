#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace reefforge {

std::vector<uint8_t> read_binary_file(const std::filesystem::path& path);
std::string read_text_file(const std::filesystem::path& path);

// Writes go through a sibling temp file + rename so readers never observe a
// half-written file.
void write_binary_file_atomic(const std::filesystem::path& path,
                              const std::vector<uint8_t>& bytes);
void write_text_file_atomic(const std::filesystem::path& path, const std::string& text);

void ensure_directory(const std::filesystem::path& dir);

}  // namespace reefforge
