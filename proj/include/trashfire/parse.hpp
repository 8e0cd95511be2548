#pragma once

#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "trashfire/error.hpp"
#include "trashfire/record.hpp"

namespace trashfire {

enum class LogFormat { csv, jsonl };

inline LogFormat log_format_from_string(const std::string& s) {
  if (s == "csv") return LogFormat::csv;
  if (s == "jsonl" || s == "json-lines") return LogFormat::jsonl;
  throw ContractError("unknown log format '" + s + "' (expected csv or jsonl)");
}

namespace detail {

inline std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(trim(cur));
  return out;
}

inline double parse_double(const std::string& s, const std::string& where) {
  double v = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last)
    throw ParseError(where + ": cannot parse '" + s + "' as a number");
  return v;
}

inline long parse_long(const std::string& s, const std::string& where) {
  long v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw ParseError(where + ": cannot parse '" + s + "' as an integer");
  return v;
}

inline bool parse_event(const std::string& s, const std::string& where) {
  if (s == "true" || s == "1") return true;
  if (s == "false" || s == "0") return false;
  throw ParseError(where + ": event must be one of true,false,1,0; got '" + s + "'");
}

}  // namespace detail

/// Parses a CSV log. The header row is required and must contain every
/// canonical column (extra columns are ignored); column order is free.
inline std::vector<ExperimentRecord> parse_csv(std::istream& in) {
  std::string header;
  if (!std::getline(in, header))
    throw SchemaError("csv: empty input, header row required");
  const auto names = detail::split_csv_line(header);
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < names.size(); ++i) index.emplace(names[i], i);
  for (const char* col : record_columns())
    if (!index.count(col))
      throw SchemaError(std::string("csv: missing required column '") + col + "'");

  std::vector<ExperimentRecord> records;
  std::string line;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (detail::trim(line).empty()) continue;
    const auto fields = detail::split_csv_line(line);
    const std::string where = "csv row " + std::to_string(row);
    if (fields.size() < names.size())
      throw ParseError(where + ": expected " + std::to_string(names.size()) +
                       " fields, got " + std::to_string(fields.size()));
    auto field = [&](const char* col) -> const std::string& {
      return fields[index.at(col)];
    };
    ExperimentRecord r;
    r.dataset = field("dataset");
    r.attack = field("attack");
    r.attack_strength = detail::parse_double(field("attack_strength"), where + " attack_strength");
    r.defence = field("defence");
    r.defence_strength = detail::parse_double(field("defence_strength"), where + " defence_strength");
    r.layers = detail::parse_long(field("layers"), where + " layers");
    r.epochs = detail::parse_long(field("epochs"), where + " epochs");
    r.t_train = detail::parse_double(field("t_train"), where + " t_train");
    r.t_predict = detail::parse_double(field("t_predict"), where + " t_predict");
    r.t_attack = detail::parse_double(field("t_attack"), where + " t_attack");
    r.event = detail::parse_event(field("event"), where + " event");
    r.acc_ben = detail::parse_double(field("acc_ben"), where + " acc_ben");
    r.acc_adv = detail::parse_double(field("acc_adv"), where + " acc_adv");
    validate_record(r, where);
    records.push_back(std::move(r));
  }
  return records;
}

/// Parses a JSON-lines log: one object per line, same field names as CSV.
inline std::vector<ExperimentRecord> parse_jsonl(std::istream& in) {
  std::vector<ExperimentRecord> records;
  std::string line;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (detail::trim(line).empty()) continue;
    const std::string where = "jsonl row " + std::to_string(row);
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(where + ": " + e.what());
    }
    if (!j.is_object()) throw ParseError(where + ": expected a JSON object");
    for (const char* col : record_columns())
      if (!j.contains(col))
        throw SchemaError(where + ": missing required field '" + std::string(col) + "'");
    auto num = [&](const char* col) -> double {
      if (!j[col].is_number())
        throw ParseError(where + " " + col + ": expected a number");
      return j[col].get<double>();
    };
    ExperimentRecord r;
    r.dataset = j["dataset"].get<std::string>();
    r.attack = j["attack"].get<std::string>();
    r.attack_strength = num("attack_strength");
    r.defence = j["defence"].get<std::string>();
    r.defence_strength = num("defence_strength");
    r.layers = static_cast<long>(num("layers"));
    r.epochs = static_cast<long>(num("epochs"));
    r.t_train = num("t_train");
    r.t_predict = num("t_predict");
    r.t_attack = num("t_attack");
    if (j["event"].is_boolean()) {
      r.event = j["event"].get<bool>();
    } else if (j["event"].is_number_integer()) {
      const auto v = j["event"].get<long>();
      if (v != 0 && v != 1)
        throw ParseError(where + ": event must be true,false,1,0");
      r.event = v == 1;
    } else {
      throw ParseError(where + ": event must be true,false,1,0");
    }
    r.acc_ben = num("acc_ben");
    r.acc_adv = num("acc_adv");
    validate_record(r, where);
    records.push_back(std::move(r));
  }
  return records;
}

inline std::vector<ExperimentRecord> parse_log(std::istream& in, LogFormat format) {
  return format == LogFormat::csv ? parse_csv(in) : parse_jsonl(in);
}

inline std::vector<ExperimentRecord> parse_log_file(const std::string& path,
                                                    LogFormat format) {
  std::ifstream in(path);
  if (!in) throw ContractError("cannot open input file '" + path + "'");
  return parse_log(in, format);
}

/// Fixed 17-significant-digit float formatting shared by every emitted file,
/// so identical inputs produce byte-identical outputs.
inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

/// Writes records in the canonical CSV schema.
inline void write_csv(const std::vector<ExperimentRecord>& records, std::ostream& out) {
  const auto& cols = record_columns();
  for (std::size_t i = 0; i < cols.size(); ++i)
    out << cols[i] << (i + 1 < cols.size() ? "," : "\n");
  for (const auto& r : records) {
    out << r.dataset << ',' << r.attack << ',' << format_double(r.attack_strength)
        << ',' << r.defence << ',' << format_double(r.defence_strength) << ','
        << r.layers << ',' << r.epochs << ',' << format_double(r.t_train) << ','
        << format_double(r.t_predict) << ',' << format_double(r.t_attack) << ','
        << (r.event ? "true" : "false") << ',' << format_double(r.acc_ben) << ','
        << format_double(r.acc_adv) << "\n";
  }
}

}  // namespace trashfire
