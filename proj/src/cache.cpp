#include "hecke/cache.hpp"

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <iostream>
#include <memory>
#include <sstream>
#include <vector>

namespace hecke {

std::uint64_t MemoCache::checksum(const std::string& key, const std::string& value) {
    // FNV-1a over key, a separator, and value.
    std::uint64_t h = 1469598103934665603ULL;
    auto mix = [&](unsigned char ch) {
        h ^= ch;
        h *= 1099511628211ULL;
    };
    for (unsigned char ch : key) mix(ch);
    mix(0x1f);
    for (unsigned char ch : value) mix(ch);
    return h;
}

MemoCache::MemoCache(std::string dir) {
    if (dir.empty()) return;
    std::filesystem::create_directories(dir);
    path_ = (std::filesystem::path(dir) / "hecke-cache.log").string();
    load();
    log_.open(path_, std::ios::app);
}

void MemoCache::load() {
    std::ifstream in(path_);
    if (!in) return;
    std::vector<std::pair<std::string, std::string>> good;
    std::string line;
    while (std::getline(in, line)) {
        auto t1 = line.find('\t');
        auto t2 = t1 == std::string::npos ? t1 : line.find('\t', t1 + 1);
        if (t2 == std::string::npos) {
            ++discarded_;
            continue;
        }
        std::string key = line.substr(0, t1), value = line.substr(t1 + 1, t2 - t1 - 1);
        char* end = nullptr;
        auto sum = std::strtoull(line.c_str() + t2 + 1, &end, 16);
        if (end == line.c_str() + t2 + 1 || *end != '\0' || sum != checksum(key, value)) {
            ++discarded_;
            continue;
        }
        good.emplace_back(key, value);
    }
    in.close();
    for (auto& [k, v] : good) map_[k] = v;
    if (discarded_) {
        // Rebuild the log from the verified records only.
        std::cerr << "[cache] " << discarded_ << " corrupt record(s) dropped from " << path_ << "\n";
        std::ofstream out(path_, std::ios::trunc);
        for (auto& [k, v] : good) {
            char buf[32];
            std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(checksum(k, v)));
            out << k << '\t' << v << '\t' << buf << '\n';
        }
    }
}

std::optional<std::string> MemoCache::get(const std::string& key) const {
    std::shared_lock lock(mu_);
    auto it = map_.find(key);
    if (it == map_.end()) return std::nullopt;
    return it->second;
}

void MemoCache::put(const std::string& key, const std::string& value) {
    if (key.find_first_of("\t\n") != std::string::npos || value.find_first_of("\t\n") != std::string::npos)
        throw std::invalid_argument("MemoCache: keys and values must not contain tabs or newlines");
    std::unique_lock lock(mu_);
    auto [it, inserted] = map_.emplace(key, value);
    if (!inserted) return;
    if (log_.is_open()) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(checksum(key, value)));
        log_ << key << '\t' << value << '\t' << buf << '\n';
        log_.flush();
    }
}

std::size_t MemoCache::size() const {
    std::shared_lock lock(mu_);
    return map_.size();
}

namespace {
std::mutex g_mu;
std::unique_ptr<MemoCache> g_cache;
}  // namespace

MemoCache& global_cache() {
    std::lock_guard lock(g_mu);
    if (!g_cache) {
        const char* dir = std::getenv("HECKE_CACHE_DIR");
        g_cache = std::make_unique<MemoCache>(dir ? dir : "");
    }
    return *g_cache;
}

void reset_global_cache() {
    std::lock_guard lock(g_mu);
    g_cache.reset();
}

std::string encode_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%a", v);
    return buf;
}

double decode_double(const std::string& s) { return std::strtod(s.c_str(), nullptr); }

}  // namespace hecke
