// Copyright 2026 The sfequiv Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <iosfwd>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "sfe/table.hpp"

namespace sfe {

using CsvRow = std::vector<std::string>;

// RFC-4180 reader: quoted fields, doubled quotes, embedded newlines, CRLF.
// A trailing newline does not produce an empty record.
std::vector<CsvRow> parse_csv(std::istream& in);
std::vector<CsvRow> read_csv_file(const std::filesystem::path& path);

void write_csv_row(std::ostream& out, std::span<const std::string> fields);

// Shortest decimal text that parses back to the same double.
std::string format_number(double v);

// Header must contain every schema variable (any order, extra columns are
// ignored). Errors: EmptyFile, MissingColumn, UnknownCategory,
// MalformedNumeric, DuplicateHeader.
MicroTable load_csv(const std::filesystem::path& path, const Schema& schema);
MicroTable read_csv_table(std::istream& in, const Schema& schema);

// Columns are written in schema order; Missing is written as the variable's
// first missing code in sorted order ("" by default).
void write_csv(const MicroTable& t, std::ostream& out);
void write_csv(const MicroTable& t, const std::filesystem::path& path);

// Every column categorical unless named in numeric_hint.
Schema infer_schema(const std::filesystem::path& path,
                    const std::set<std::string>& numeric_hint);
Schema infer_schema(std::istream& in,
                    const std::set<std::string>& numeric_hint);

// Schema file (JSON):
//   { "extend_categories": false,
//     "variables": [ { "name": "sex", "kind": "categorical",
//                      "categories": ["M", "F"], "missing_codes": ["NA"] },
//                    { "name": "age", "kind": "numeric" } ] }
// "missing_codes" defaults to ["", "NA"].
Schema load_schema(const std::filesystem::path& path);
Schema parse_schema(const std::string& json_text);
std::string schema_to_json(const Schema& schema);
void save_schema(const Schema& schema, const std::filesystem::path& path);

}  // namespace sfe
