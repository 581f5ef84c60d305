#pragma once

#include <filesystem>
#include <string>

namespace cyclonids {

// Writes to "<path>.tmp" and renames over path. Throws DataError(io_write_failure).
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

} // namespace cyclonids
