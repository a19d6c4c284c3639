#pragma once

// Best-known configurations keyed by a content hash of (set, s, N).
//
// File layout:
//   {"schema_version":1,
//    "entries":{"<key>":{"set_hash":..,"s":..,"N":..,"energy":..,
//                        "configuration":{..},"status":"heuristic",
//                        "timestamp":"2026-01-01T00:00:00Z"}}}
//
// Entries only ever improve: put() keeps the lower energy. Entries that fail
// to parse are dropped with a warning on load.

#include <map>
#include <mutex>
#include <optional>
#include <string>

#include "rieszlab/energy.hpp"
#include "rieszlab/geometry.hpp"

namespace rieszlab {

inline constexpr int kCacheSchemaVersion = 1;

struct CacheEntry {
  double energy = 0.0;
  Configuration config;
  std::string status;
  std::string timestamp;
};

class Cache {
 public:
  Cache() = default;
  /// In-memory cache persisted to `path` on save(). A missing file is an
  /// empty cache; an unreadable or corrupt file is reported and ignored.
  explicit Cache(std::string path);

  static std::string key(const std::string& set_hash, double s, std::size_t n);

  std::optional<CacheEntry> get(const std::string& set_hash, double s, std::size_t n) const;
  /// Stores the entry when no entry exists or `energy` is strictly lower.
  /// Returns true when the stored value changed.
  bool put(const std::string& set_hash, double s, std::size_t n, double energy, const Configuration& config,
           const std::string& status);

  /// True when the entry was written or confirmed by this process.
  bool fresh(const std::string& set_hash, double s, std::size_t n) const;
  void mark_fresh(const std::string& set_hash, double s, std::size_t n);

  void save() const;
  const std::string& path() const noexcept { return path_; }
  std::size_t size() const;
  std::size_t skipped_on_load() const noexcept { return skipped_; }

 private:
  struct Stored {
    std::string set_hash;
    double s;
    std::size_t n;
    CacheEntry entry;
  };

  std::string path_;
  std::map<std::string, Stored> entries_;
  std::map<std::string, bool> fresh_;
  std::size_t skipped_ = 0;
  mutable std::mutex mu_;
};

/// The cache path: `explicit_path` if non-empty, else $RIESZLAB_CACHE, else
/// ".rieszlab_cache.json".
std::string resolve_cache_path(const std::string& explicit_path);

}  // namespace rieszlab
