#pragma once

#include <filesystem>
#include <string>

namespace scg {

/// Whole-file read. Throws ParseError when the file cannot be opened.
std::string read_file(const std::filesystem::path& path);

/// Write-to-temp-then-rename so an interrupted write never leaves a partial
/// file at the final path. Creates parent directories as needed.
void atomic_write_file(const std::filesystem::path& path,
                       const std::string& content);

}  // namespace scg
