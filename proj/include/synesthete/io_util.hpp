#pragma once

#include <filesystem>
#include <string>

namespace synesthete {

std::string read_text_file(const std::filesystem::path& path);

// Writes via a sibling temp file and renames over the target, so an
// interrupted run never leaves a truncated file behind.
void write_text_atomic(const std::filesystem::path& path,
                       std::string_view content);

}  // namespace synesthete
