// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

namespace sepred {

/// Serializes a JSON document with sorted object keys and floating-point
/// numbers at 17 significant digits, so equal documents always produce
/// identical bytes and every double survives a parse round trip.
/// Non-finite numbers are rejected.
std::string dump_json(const nlohmann::json& doc, int indent = 2);

/// dump_json to a file, trailing newline included.
void write_json_file(const std::filesystem::path& path, const nlohmann::json& doc);

/// Parses a JSON file; IoError when unreadable, ParseError on bad syntax.
nlohmann::json read_json_file(const std::filesystem::path& path);

/// 17-significant-digit rendering used for all report floats.
std::string format_double(double value);

}  // namespace sepred
