#include "gpb/report.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace gpb {

namespace {

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

double parse_double(const std::string& s) {
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  std::size_t used = 0;
  const double v = std::stod(s, &used);
  if (used != s.size()) throw std::runtime_error("malformed number '" + s + "'");
  return v;
}

bool same(double a, double b) {
  return (std::isnan(a) && std::isnan(b)) || a == b;
}

}  // namespace

bool Table::operator==(const Table& o) const {
  if (columns != o.columns || descriptions != o.descriptions || rows.size() != o.rows.size())
    return false;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != o.rows[i].size()) return false;
    for (std::size_t j = 0; j < rows[i].size(); ++j)
      if (!same(rows[i][j], o.rows[i][j])) return false;
  }
  return true;
}

bool RunReport::operator==(const RunReport& o) const {
  return command == o.command && ok == o.ok && provenance == o.provenance &&
         result == o.result && table == o.table;
}

Format parse_format(const std::string& s) {
  if (s == "json") return Format::json;
  if (s == "csv") return Format::csv;
  throw std::invalid_argument("unknown format '" + s + "' (json or csv)");
}

Json number(double x) {
  if (std::isfinite(x)) return x;
  return format_double(x);
}

double to_double(const Json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) return parse_double(j.get<std::string>());
  throw std::runtime_error("expected a number in report");
}

std::string emit(const RunReport& report, Format format) {
  if (format == Format::json) {
    Json j;
    j["command"] = report.command;
    j["ok"] = report.ok;
    j["provenance"] = report.provenance;
    j["result"] = report.result;
    Json t;
    t["columns"] = report.table.columns;
    t["descriptions"] = report.table.descriptions;
    Json rows = Json::array();
    for (const auto& row : report.table.rows) {
      Json r = Json::array();
      for (double x : row) r.push_back(number(x));
      rows.push_back(std::move(r));
    }
    t["rows"] = std::move(rows);
    j["table"] = std::move(t);
    return j.dump(2) + "\n";
  }
  std::ostringstream out;
  out << "# gpb " << report.command << "\n";
  for (std::size_t i = 0; i < report.table.columns.size(); ++i) {
    out << "# " << report.table.columns[i];
    if (i < report.table.descriptions.size() && !report.table.descriptions[i].empty())
      out << ": " << report.table.descriptions[i];
    out << "\n";
  }
  for (std::size_t i = 0; i < report.table.columns.size(); ++i)
    out << (i ? "," : "") << report.table.columns[i];
  out << "\n";
  for (const auto& row : report.table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << format_double(row[i]);
    out << "\n";
  }
  return out.str();
}

RunReport parse_json_report(const std::string& text) {
  const Json j = Json::parse(text);
  RunReport r;
  r.command = j.at("command").get<std::string>();
  r.ok = j.at("ok").get<bool>();
  r.provenance = j.at("provenance");
  r.result = j.at("result");
  const Json& t = j.at("table");
  r.table.columns = t.at("columns").get<std::vector<std::string>>();
  r.table.descriptions = t.at("descriptions").get<std::vector<std::string>>();
  for (const auto& row : t.at("rows")) {
    std::vector<double> v;
    for (const auto& x : row) v.push_back(to_double(x));
    r.table.rows.push_back(std::move(v));
  }
  return r;
}

Table parse_csv(const std::string& text) {
  Table t;
  std::istringstream in(text);
  std::string line;
  bool header = false;
  std::vector<std::string> comments;
  auto split = [](const std::string& s) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream ss(s);
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    return out;
  };
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      comments.push_back(line.substr(line.size() > 1 && line[1] == ' ' ? 2 : 1));
      continue;
    }
    if (!header) {
      t.columns = split(line);
      header = true;
      continue;
    }
    std::vector<double> row;
    for (const auto& cell : split(line)) row.push_back(parse_double(cell));
    if (row.size() != t.columns.size()) throw std::runtime_error("CSV row width mismatch");
    t.rows.push_back(std::move(row));
  }
  // Column comments follow the command line; recover descriptions from them.
  for (const auto& col : t.columns) {
    std::string desc;
    for (const auto& c : comments) {
      if (c.rfind(col + ": ", 0) == 0) {
        desc = c.substr(col.size() + 2);
        break;
      }
    }
    t.descriptions.push_back(desc);
  }
  return t;
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace gpb
