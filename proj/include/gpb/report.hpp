#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace gpb {

using Json = nlohmann::ordered_json;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::string> descriptions;  // one per column, written as header comments
  std::vector<std::vector<double>> rows;

  bool operator==(const Table&) const;
};

struct RunReport {
  std::string command;
  bool ok = true;
  Json provenance = Json::object();
  Json result = Json::object();
  Table table;

  bool operator==(const RunReport&) const;
};

enum class Format { json, csv };
Format parse_format(const std::string& s);

/// JSON: the whole report. CSV: the table, preceded by '#' comment lines
/// naming the command and each column; numbers as %.17g.
std::string emit(const RunReport& report, Format format);

RunReport parse_json_report(const std::string& text);
Table parse_csv(const std::string& text);

/// Finite numbers as JSON numbers, non-finite ones as "inf", "-inf" or "nan".
Json number(double x);
double to_double(const Json& j);

std::uint64_t fnv1a64(std::string_view bytes);
std::string hex64(std::uint64_t v);

}  // namespace gpb
