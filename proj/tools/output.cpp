#include "output.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>

#include "latdisc/latdisc.h"

namespace latdisc_cli {
namespace {

std::string csv_cell(const Cell& c) {
  struct Visitor {
    std::string operator()(const std::string& s) const {
      if (s.find_first_of(",\"\n") == std::string::npos) return s;
      std::string out = "\"";
      for (char ch : s) {
        if (ch == '"') out += '"';
        out += ch;
      }
      return out + "\"";
    }
    std::string operator()(double d) const { return format_double(d); }
    std::string operator()(std::int64_t v) const { return std::to_string(v); }
    std::string operator()(std::uint64_t v) const { return std::to_string(v); }
    std::string operator()(bool b) const { return b ? "true" : "false"; }
  };
  return std::visit(Visitor{}, c);
}

Json json_cell(const Cell& c) {
  struct Visitor {
    Json operator()(const std::string& s) const { return s; }
    Json operator()(double d) const {
      if (std::isfinite(d)) return d;
      return nullptr;
    }
    Json operator()(std::int64_t v) const { return v; }
    Json operator()(std::uint64_t v) const { return v; }
    Json operator()(bool b) const { return b; }
  };
  return std::visit(Visitor{}, c);
}

}  // namespace

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string render(const Table& table, const Header& header, Format format) {
  if (format == Format::Json) {
    Json doc;
    Json config = header.config;
    config["command"] = header.command;
    config["version"] = latdisc_version();
    if (!header.created.empty()) config["created"] = header.created;
    doc["config"] = config;
    Json results = Json::array();
    for (const auto& row : table.rows) {
      Json obj = Json::object();
      for (std::size_t i = 0; i < table.columns.size(); ++i) obj[table.columns[i]] = json_cell(row[i]);
      results.push_back(std::move(obj));
    }
    doc["results"] = std::move(results);
    for (const auto& [key, value] : table.extra.items()) doc[key] = value;
    return doc.dump(2) + "\n";
  }

  std::string out;
  out += "# latdisc " + std::string(latdisc_version()) + "\n";
  out += "# command: " + header.command + "\n";
  out += "# config: " + header.config.dump() + "\n";
  if (!header.created.empty()) out += "# created: " + header.created + "\n";
  for (std::size_t i = 0; i < table.columns.size(); ++i) {
    if (i) out += ',';
    out += table.columns[i];
  }
  out += '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      out += csv_cell(row[i]);
    }
    out += '\n';
  }
  for (const auto& [key, value] : table.extra.items()) {
    if (value.is_array()) {
      for (const auto& item : value) out += "# " + key + ": " + item.dump() + "\n";
    } else {
      out += "# " + key + ": " + value.dump() + "\n";
    }
  }
  return out;
}

}  // namespace latdisc_cli
