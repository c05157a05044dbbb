#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "output.hpp"

namespace latdisc_cli {

class CacheCorrupt : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::uint64_t fnv1a(const std::string& text);

/// Append-only JSON-lines store. Each line holds key, value, created_at and
/// an FNV-1a checksum over key and value; a line that fails to parse or to
/// match its checksum makes the whole file unusable.
class Cache {
 public:
  /// Empty path disables caching.
  explicit Cache(std::string path);

  bool enabled() const { return !path_.empty(); }
  std::optional<Json> lookup(const std::string& key) const;
  /// Queues a record; written by flush() in insertion order.
  void store(const std::string& key, const Json& value);
  void flush();

  /// Hits selected for re-verification (about 1%).
  static bool should_verify(const std::string& key) { return fnv1a(key) % 100 == 0; }

  std::size_t hits() const { return hits_; }

 private:
  std::string path_;
  std::map<std::string, Json> entries_;
  std::vector<std::pair<std::string, Json>> pending_;
  mutable std::size_t hits_ = 0;
};

/// Doubles are stored as hexadecimal floating-point text so that cached
/// values come back bit-identical.
std::string encode_double(double x);
double decode_double(const Json& j);

}  // namespace latdisc_cli
