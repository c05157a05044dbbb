#include "cache.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>

namespace latdisc_cli {
namespace {

std::string checksum_hex(const std::string& key, const Json& value) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fnv1a(key + "\n" + value.dump())));
  return buf;
}

}  // namespace

std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

Cache::Cache(std::string path) : path_(std::move(path)) {
  if (path_.empty()) return;
  std::ifstream in(path_);
  if (!in) return;  // first use
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    Json rec;
    try {
      rec = Json::parse(line);
    } catch (const Json::exception&) {
      throw CacheCorrupt("cache " + path_ + ": line " + std::to_string(lineno) + " is not JSON");
    }
    if (!rec.is_object() || !rec.contains("key") || !rec.contains("value") ||
        !rec.contains("checksum") || !rec["key"].is_string() || !rec["checksum"].is_string())
      throw CacheCorrupt("cache " + path_ + ": line " + std::to_string(lineno) + " is malformed");
    const std::string key = rec["key"];
    if (rec["checksum"] != checksum_hex(key, rec["value"]))
      throw CacheCorrupt("cache " + path_ + ": checksum mismatch on line " + std::to_string(lineno));
    entries_[key] = rec["value"];
  }
}

std::optional<Json> Cache::lookup(const std::string& key) const {
  if (!enabled()) return std::nullopt;
  const auto it = entries_.find(key);
  if (it == entries_.end()) return std::nullopt;
  ++hits_;
  return it->second;
}

void Cache::store(const std::string& key, const Json& value) {
  if (!enabled() || entries_.count(key)) return;
  entries_[key] = value;
  pending_.emplace_back(key, value);
}

void Cache::flush() {
  if (!enabled() || pending_.empty()) return;
  std::ofstream out(path_, std::ios::app);
  if (!out) throw std::runtime_error("cannot write cache " + path_);
  const std::string now = utc_timestamp();
  for (const auto& [key, value] : pending_) {
    Json rec = Json::object();
    rec["key"] = key;
    rec["checksum"] = checksum_hex(key, value);
    rec["value"] = value;
    rec["created_at"] = now;
    out << rec.dump() << '\n';
  }
  pending_.clear();
}

std::string encode_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%a", x);
  return buf;
}

double decode_double(const Json& j) {
  if (!j.is_string()) throw CacheCorrupt("cached number is not encoded text");
  const std::string s = j;
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0') throw CacheCorrupt("cached number '" + s + "' is unreadable");
  return v;
}

}  // namespace latdisc_cli
