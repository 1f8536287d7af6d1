#pragma once

// On-disk cache of the memo tables: <root>/<kind>/<key>, each file carrying
// a SHA-256 checksum of its kind, key and payload. A file that fails the
// check is ignored and its value recomputed.

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace gammalab::cli {

enum class CacheKind { d_n, stirling_row, log_factorial, constant };

std::string_view kind_name(CacheKind kind);

struct CacheStats {
  std::size_t hits = 0;
  std::size_t misses = 0;
  std::size_t corrupt = 0;
  std::size_t written = 0;
};

class DiskCache {
 public:
  explicit DiskCache(std::filesystem::path root);

  const std::filesystem::path& root() const { return root_; }

  // nullopt when absent or when the checksum does not match.
  std::optional<std::string> read(CacheKind kind, const std::string& key);
  // Atomic replace (write to a temporary, then rename). Throws on I/O error.
  void write(CacheKind kind, const std::string& key, const std::string& value);
  std::vector<std::string> keys(CacheKind kind) const;

  const CacheStats& stats() const { return stats_; }

 private:
  std::filesystem::path path_for(CacheKind kind, const std::string& key) const;

  std::filesystem::path root_;
  CacheStats stats_;
};

std::string sha256_hex(const std::string& data);

// Seeds the in-memory tables from the cache; returns the number of entries used.
std::size_t load_tables(DiskCache& cache);
// Persists the current in-memory tables.
void store_tables(DiskCache& cache);

}  // namespace gammalab::cli
