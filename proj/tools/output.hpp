#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

namespace latdisc_cli {

using Json = nlohmann::ordered_json;
using Cell = std::variant<std::string, double, std::int64_t, std::uint64_t, bool>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
  /// Extra blocks: JSON fields next to "results", or trailing "#" lines in CSV.
  Json extra = Json::object();
};

enum class Format { Csv, Json };

struct Header {
  std::string command;
  Json config = Json::object();
  /// Empty under --reproducible.
  std::string created;
};

std::string render(const Table& table, const Header& header, Format format);

/// Round-trip decimal text of a double.
std::string format_double(double x);

/// Current UTC time, ISO 8601.
std::string utc_timestamp();

}  // namespace latdisc_cli
