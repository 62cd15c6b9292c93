// SPDX-License-Identifier: Apache-2.0
#include "sepred/jsonio.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "sepred/errors.hpp"

namespace sepred {

std::string format_double(double value) {
  if (!std::isfinite(value)) {
    throw ContractError("json: refusing to serialize a non-finite number");
  }
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), value, std::chars_format::general, 17);
  std::string out(buf, res.ptr);
  // Keep whole doubles recognizably floating-point.
  if (out.find('.') == std::string::npos && out.find('e') == std::string::npos &&
      out.find("inf") == std::string::npos) {
    out += ".0";
  }
  return out;
}

namespace {

void dump_value(const nlohmann::json& v, std::string& out, int indent, int depth) {
  const std::string pad(static_cast<std::size_t>(indent) * depth, ' ');
  const std::string pad_in(static_cast<std::size_t>(indent) * (depth + 1), ' ');
  switch (v.type()) {
    case nlohmann::json::value_t::object: {
      if (v.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      std::size_t i = 0;
      for (auto it = v.begin(); it != v.end(); ++it, ++i) {
        out += pad_in;
        out += nlohmann::json(it.key()).dump();
        out += ": ";
        dump_value(it.value(), out, indent, depth + 1);
        if (i + 1 < v.size()) out += ',';
        out += '\n';
      }
      out += pad + "}";
      return;
    }
    case nlohmann::json::value_t::array: {
      if (v.empty()) {
        out += "[]";
        return;
      }
      // Scalar-only arrays stay on one line; parameter vectors would
      // otherwise explode the file.
      bool scalars_only = true;
      for (const auto& e : v) {
        if (e.is_structured()) {
          scalars_only = false;
          break;
        }
      }
      if (scalars_only) {
        out += '[';
        for (std::size_t i = 0; i < v.size(); ++i) {
          if (i > 0) out += ", ";
          dump_value(v[i], out, indent, depth + 1);
        }
        out += ']';
        return;
      }
      out += "[\n";
      for (std::size_t i = 0; i < v.size(); ++i) {
        out += pad_in;
        dump_value(v[i], out, indent, depth + 1);
        if (i + 1 < v.size()) out += ',';
        out += '\n';
      }
      out += pad + "]";
      return;
    }
    case nlohmann::json::value_t::number_float:
      out += format_double(v.get<double>());
      return;
    default:
      out += v.dump();
      return;
  }
}

}  // namespace

std::string dump_json(const nlohmann::json& doc, int indent) {
  std::string out;
  dump_value(doc, out, indent, 0);
  return out;
}

void write_json_file(const std::filesystem::path& path, const nlohmann::json& doc) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  out << dump_json(doc) << '\n';
  if (!out) throw IoError("write failed: " + path.string());
}

nlohmann::json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open: " + path.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

}  // namespace sepred
