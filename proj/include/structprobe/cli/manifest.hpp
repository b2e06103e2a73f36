#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace structprobe::cli {

/// Lowercase hex SHA-256 of the file's bytes.
std::string sha256_file(const std::filesystem::path& path);

/// Records `artifacts` (paths inside `dir`) in dir/manifest.json with their
/// size and SHA-256. Existing entries are kept unless their file is gone;
/// entries are sorted by relative path.
void update_manifest(const std::filesystem::path& dir, const std::vector<std::filesystem::path>& artifacts);

} // namespace structprobe::cli
