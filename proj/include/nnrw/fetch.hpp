#pragma once

// Optional download of benchmark files into a data directory.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "nnrw/data.hpp"

namespace nnrw {

struct FetchEntry {
  std::string dataset;  ///< satimage, letter or mnist
  std::string file;     ///< name under data_dir/<dataset>/
  std::string url;
  /// Hex SHA-256 of the file content after gzip inflation; empty skips the check.
  std::string sha256;
};

/// Upstream locations of every benchmark file.
std::vector<FetchEntry> default_manifest();

/// JSON array of {"dataset", "file", "url", "sha256"?} objects.
std::vector<FetchEntry> read_manifest(const std::filesystem::path& path);

std::string sha256_hex(std::span<const std::uint8_t> bytes);

/// Downloads the entries for `benchmark` that are missing (or all of them with
/// `force`), verifies checksums, then checks the result loads. A file is only
/// moved into place after its checksum matches.
void fetch_benchmark(Benchmark benchmark, const std::filesystem::path& data_dir,
                     const std::vector<FetchEntry>& manifest, std::ostream& log, bool force = false);

}  // namespace nnrw
