#pragma once

#include <filesystem>
#include <string>

namespace dual {

// Shortest decimal string that parses back to exactly the same double.
std::string format_double(double v);

// Writes to a sibling temp file, then renames into place.
void write_text_atomic(const std::filesystem::path& path, const std::string& content);

std::string read_text(const std::filesystem::path& path);

}  // namespace dual
