/// @file cache.hpp
/// @brief Content-addressed on-disk cache for expensive exact computations
///        (symmetric-group characters, Schur polynomials).
///
/// Entries are keyed by (operation, canonical argument string); the file name
/// is a 64-bit FNV-1a hash of the key. Each file stores the key, the payload
/// and a payload checksum; any mismatch or parse failure is treated as a miss
/// so a corrupted entry is transparently recomputed and rewritten.
#pragma once

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <memory>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>

namespace taulab {

inline std::uint64_t fnv1a64(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  std::ostringstream os;
  os << std::hex;
  os.width(16);
  os.fill('0');
  os << v;
  return os.str();
}

class DiskCache {
 public:
  explicit DiskCache(std::filesystem::path dir) : dir_(std::move(dir)) {
    std::filesystem::create_directories(dir_);
  }

  std::optional<std::string> get(const std::string& key) const {
    std::lock_guard<std::mutex> lk(mu_);
    auto p = path_for(key);
    std::ifstream in(p);
    if (!in) return std::nullopt;
    try {
      nlohmann::json j = nlohmann::json::parse(in);
      if (j.value("schema", 0) != 1) return std::nullopt;
      if (j.value("key", std::string()) != key) return std::nullopt;  // hash collision or stale
      std::string payload = j.at("payload").get<std::string>();
      if (j.value("checksum", std::string()) != hex64(fnv1a64(payload))) return std::nullopt;
      ++hits_;
      return payload;
    } catch (const std::exception&) {
      return std::nullopt;  // corrupted entry: miss
    }
  }

  void put(const std::string& key, const std::string& payload) const {
    std::lock_guard<std::mutex> lk(mu_);
    nlohmann::json j{{"schema", 1},
                     {"key", key},
                     {"payload", payload},
                     {"checksum", hex64(fnv1a64(payload))}};
    auto p = path_for(key);
    auto tmp = p;
    tmp += ".tmp";
    {
      std::ofstream out(tmp, std::ios::trunc);
      out << j.dump();
    }
    std::error_code ec;
    std::filesystem::rename(tmp, p, ec);  // atomic on POSIX; ignore failure (cache only)
  }

  long hits() const { return hits_; }
  const std::filesystem::path& dir() const { return dir_; }

 private:
  std::filesystem::path path_for(const std::string& key) const {
    return dir_ / (hex64(fnv1a64(key)) + ".json");
  }

  std::filesystem::path dir_;
  mutable std::mutex mu_;
  mutable long hits_ = 0;
};

/// Process-global cache handle. Null until installed; modules fall back to
/// in-memory memoization only. Results are identical with or without a disk
/// cache; only latency differs.
inline std::shared_ptr<DiskCache>& global_cache_slot() {
  static std::shared_ptr<DiskCache> c;
  return c;
}

inline void install_disk_cache(const std::filesystem::path& dir) {
  global_cache_slot() = std::make_shared<DiskCache>(dir);
}

inline void clear_disk_cache_handle() { global_cache_slot().reset(); }

inline DiskCache* disk_cache() { return global_cache_slot().get(); }

}  // namespace taulab
