#pragma once

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "trashfire/error.hpp"

namespace trashfire {

namespace detail {

inline void dump_canonical(const nlohmann::json& j, std::ostream& out, int indent) {
  const std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
  const std::string pad_in(static_cast<std::size_t>(indent + 1) * 2, ' ');
  switch (j.type()) {
    case nlohmann::json::value_t::object: {
      if (j.empty()) {
        out << "{}";
        return;
      }
      out << "{\n";
      std::size_t i = 0;
      for (auto it = j.begin(); it != j.end(); ++it, ++i) {
        out << pad_in << '"' << it.key() << "\": ";
        dump_canonical(it.value(), out, indent + 1);
        if (i + 1 < j.size()) out << ',';
        out << '\n';
      }
      out << pad << '}';
      return;
    }
    case nlohmann::json::value_t::array: {
      if (j.empty()) {
        out << "[]";
        return;
      }
      out << "[\n";
      for (std::size_t i = 0; i < j.size(); ++i) {
        out << pad_in;
        dump_canonical(j[i], out, indent + 1);
        if (i + 1 < j.size()) out << ',';
        out << '\n';
      }
      out << pad << ']';
      return;
    }
    case nlohmann::json::value_t::number_float: {
      const double v = j.get<double>();
      if (!std::isfinite(v)) {
        out << "null";
        return;
      }
      char buf[40];
      std::snprintf(buf, sizeof(buf), "%.17g", v);
      out << buf;
      return;
    }
    default:
      out << j.dump();
      return;
  }
}

}  // namespace detail

/// Canonical JSON text: objects with lexicographically sorted keys (the
/// default nlohmann::json map order), two-space indentation, and floats at
/// a fixed 17 significant digits so equal values always serialize to equal
/// bytes. Non-finite floats become null.
inline std::string canonical_dump(const nlohmann::json& j) {
  std::ostringstream out;
  detail::dump_canonical(j, out, 0);
  out << '\n';
  return out.str();
}

inline void write_json_file(const std::string& path, const nlohmann::json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ContractError("cannot open output file '" + path + "'");
  out << canonical_dump(j);
}

inline nlohmann::json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ContractError("cannot open input file '" + path + "'");
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("failed to parse '" + path + "': " + e.what());
  }
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ContractError("cannot open output file '" + path + "'");
  out << text;
}

}  // namespace trashfire
