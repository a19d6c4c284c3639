#include "rieszlab/cache.hpp"

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <iostream>

#include "rieszlab/error.hpp"
#include "rieszlab/io.hpp"

namespace rieszlab {

namespace {

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

Cache::Cache(std::string path) : path_(std::move(path)) {
  if (path_.empty() || !std::filesystem::exists(path_)) return;
  Json root;
  try {
    root = Json::parse(read_file(path_));
  } catch (const std::exception& e) {
    std::cerr << "warning: ignoring unreadable cache '" << path_ << "': " << e.what() << "\n";
    return;
  }
  if (!root.is_object() || root.value("schema_version", 0) != kCacheSchemaVersion || !root.contains("entries") ||
      !root.at("entries").is_object()) {
    std::cerr << "warning: ignoring cache '" << path_ << "' with unexpected layout or schema version\n";
    return;
  }
  for (const auto& [k, v] : root.at("entries").items()) {
    try {
      Stored st;
      st.set_hash = v.at("set_hash").get<std::string>();
      st.s = v.at("s").get<double>();
      st.n = v.at("N").get<std::size_t>();
      st.entry.energy = v.at("energy").get<double>();
      st.entry.config = parse_configuration(v.at("configuration"));
      st.entry.status = v.at("status").get<std::string>();
      st.entry.timestamp = v.value("timestamp", "");
      if (st.entry.config.size() != st.n || key(st.set_hash, st.s, st.n) != k || !(st.entry.energy >= 0.0)) {
        throw ValidationError("entry fields disagree with its key");
      }
      entries_.emplace(k, std::move(st));
    } catch (const std::exception& e) {
      ++skipped_;
      std::cerr << "warning: skipping corrupt cache entry '" << k << "': " << e.what() << "\n";
    }
  }
}

std::string Cache::key(const std::string& set_hash, double s, std::size_t n) {
  return hex64(fnv1a(set_hash + "|s=" + format_double(s) + "|N=" + std::to_string(n)));
}

std::optional<CacheEntry> Cache::get(const std::string& set_hash, double s, std::size_t n) const {
  std::lock_guard lock(mu_);
  auto it = entries_.find(key(set_hash, s, n));
  if (it == entries_.end()) return std::nullopt;
  return it->second.entry;
}

bool Cache::put(const std::string& set_hash, double s, std::size_t n, double energy, const Configuration& config,
                const std::string& status) {
  std::lock_guard lock(mu_);
  const std::string k = key(set_hash, s, n);
  fresh_[k] = true;
  auto it = entries_.find(k);
  if (it != entries_.end() && !(energy < it->second.entry.energy)) return false;
  entries_[k] = Stored{set_hash, s, n, CacheEntry{energy, config, status, utc_timestamp()}};
  return true;
}

bool Cache::fresh(const std::string& set_hash, double s, std::size_t n) const {
  std::lock_guard lock(mu_);
  return fresh_.count(key(set_hash, s, n)) > 0;
}

void Cache::mark_fresh(const std::string& set_hash, double s, std::size_t n) {
  std::lock_guard lock(mu_);
  fresh_[key(set_hash, s, n)] = true;
}

std::size_t Cache::size() const {
  std::lock_guard lock(mu_);
  return entries_.size();
}

void Cache::save() const {
  if (path_.empty()) return;
  std::lock_guard lock(mu_);
  Json entries = Json::object();
  for (const auto& [k, st] : entries_) {
    entries[k] = Json{{"set_hash", st.set_hash},
                      {"s", st.s},
                      {"N", st.n},
                      {"energy", st.entry.energy},
                      {"configuration", to_json(st.entry.config)},
                      {"status", st.entry.status},
                      {"timestamp", st.entry.timestamp}};
  }
  const Json root{{"schema_version", kCacheSchemaVersion}, {"entries", std::move(entries)}};
  write_file_atomic(path_, root.dump());
}

std::string resolve_cache_path(const std::string& explicit_path) {
  if (!explicit_path.empty()) return explicit_path;
  if (const char* env = std::getenv("RIESZLAB_CACHE"); env && *env) return env;
  return ".rieszlab_cache.json";
}

}  // namespace rieszlab
