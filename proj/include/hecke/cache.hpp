#pragma once
/// @file cache.hpp
/// Persistent memo cache: an append-only text log of key/value records,
/// each line protected by a checksum. Location comes from HECKE_CACHE_DIR;
/// when unset the cache is memory-only.

#include <cstdint>
#include <fstream>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <unordered_map>

namespace hecke {

class MemoCache {
public:
    /// Opens (or creates) <dir>/hecke-cache.log. Empty dir = memory only.
    explicit MemoCache(std::string dir = {});

    std::optional<std::string> get(const std::string& key) const;
    void put(const std::string& key, const std::string& value);

    std::size_t size() const;
    std::size_t discarded_on_load() const { return discarded_; }
    const std::string& path() const { return path_; }

    static std::uint64_t checksum(const std::string& key, const std::string& value);

private:
    void load();
    std::string path_;
    mutable std::shared_mutex mu_;
    std::unordered_map<std::string, std::string> map_;
    std::ofstream log_;
    std::size_t discarded_ = 0;
};

/// Process-wide cache, configured from HECKE_CACHE_DIR on first use.
MemoCache& global_cache();
/// Re-read HECKE_CACHE_DIR (used by tests and the CLI to switch directories).
void reset_global_cache();

std::string encode_double(double v);
double decode_double(const std::string& s);

}  // namespace hecke
