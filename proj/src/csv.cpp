// Copyright 2026 The sfequiv Authors
// SPDX-License-Identifier: Apache-2.0

#include "sfe/csv.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <iterator>
#include <map>
#include <ostream>
#include <sstream>

#include "json.hpp"
#include "sfe/error.hpp"

namespace sfe {

namespace {

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  return in;
}

bool parse_double(const std::string& text, double& out) {
  const char* first = text.data();
  const char* last = text.data() + text.size();
  while (first < last && *first == ' ') ++first;
  while (last > first && last[-1] == ' ') --last;
  if (first == last) return false;
  if (*first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last && std::isfinite(out);
}

const std::string& missing_token(const VariableSpec& spec) {
  static const std::string kEmpty;
  return spec.missing_codes.empty() ? kEmpty : *spec.missing_codes.begin();
}

}  // namespace

std::vector<CsvRow> parse_csv(std::istream& in) {
  const std::string text{std::istreambuf_iterator<char>(in),
                         std::istreambuf_iterator<char>()};
  std::vector<CsvRow> rows;
  CsvRow row;
  std::string field;
  bool in_quotes = false;
  bool field_started = false;
  const std::size_t n = text.size();
  std::size_t i = 0;
  // Skip a UTF-8 byte order mark.
  if (n >= 3 && text.compare(0, 3, "\xEF\xBB\xBF") == 0) i = 3;
  auto end_field = [&] {
    row.push_back(std::move(field));
    field.clear();
    field_started = false;
  };
  auto end_row = [&] {
    end_field();
    rows.push_back(std::move(row));
    row.clear();
  };
  for (; i < n; ++i) {
    const char ch = text[i];
    if (in_quotes) {
      if (ch == '"') {
        if (i + 1 < n && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        field.push_back(ch);
      }
      continue;
    }
    switch (ch) {
      case '"':
        if (field_started && !field.empty()) {
          throw Error(ErrorCode::MalformedInput,
                      "stray quote in unquoted field on line " +
                          std::to_string(rows.size() + 1));
        }
        in_quotes = true;
        field_started = true;
        break;
      case ',':
        end_field();
        break;
      case '\r':
        if (i + 1 < n && text[i + 1] == '\n') ++i;
        end_row();
        break;
      case '\n':
        end_row();
        break;
      default:
        field.push_back(ch);
        field_started = true;
    }
  }
  if (in_quotes) {
    throw Error(ErrorCode::MalformedInput, "unterminated quoted field");
  }
  if (field_started || !field.empty() || !row.empty()) end_row();
  return rows;
}

std::vector<CsvRow> read_csv_file(const std::filesystem::path& path) {
  auto in = open_input(path);
  return parse_csv(in);
}

void write_csv_row(std::ostream& out, std::span<const std::string> fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out << ',';
    const auto& f = fields[i];
    if (f.find_first_of(",\"\r\n") == std::string::npos) {
      out << f;
      continue;
    }
    out << '"';
    for (char c : f) {
      if (c == '"') out << '"';
      out << c;
    }
    out << '"';
  }
  out << '\n';
}

std::string format_number(double v) {
  if (is_missing(v)) return "NA";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

MicroTable read_csv_table(std::istream& in, const Schema& schema) {
  const auto rows = parse_csv(in);
  if (rows.empty()) throw Error(ErrorCode::EmptyFile, "no header row");
  if (rows.size() < 2) throw Error(ErrorCode::EmptyFile, "no data rows");
  const auto& header = rows.front();
  std::map<std::string, std::size_t> position;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (!position.emplace(header[c], c).second) {
      throw Error(ErrorCode::DuplicateHeader, "duplicate column " + header[c]);
    }
  }
  std::vector<std::size_t> source(schema.size());
  for (std::size_t j = 0; j < schema.size(); ++j) {
    auto it = position.find(schema[j].name);
    if (it == position.end()) {
      throw Error(ErrorCode::MissingColumn, "column " + schema[j].name);
    }
    source[j] = it->second;
  }
  TableBuilder builder(schema);
  builder.reserve(rows.size() - 1);
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.size() == 1 && row[0].empty() && header.size() > 1) continue;
    if (row.size() != header.size()) {
      throw Error(ErrorCode::MalformedInput,
                  "line " + std::to_string(r + 1) + " has " +
                      std::to_string(row.size()) + " fields, expected " +
                      std::to_string(header.size()));
    }
    for (std::size_t j = 0; j < schema.size(); ++j) {
      const auto& spec = builder.schema()[j];
      const auto& cell = row[source[j]];
      const bool missing = spec.missing_codes.count(cell) > 0;
      if (spec.is_categorical()) {
        builder.push_code(j, missing ? kMissingCode : builder.intern(j, cell));
      } else if (missing) {
        builder.push_value(j, missing_numeric());
      } else {
        double v;
        if (!parse_double(cell, v)) {
          throw Error(ErrorCode::MalformedNumeric,
                      "'" + cell + "' in column " + spec.name + " line " +
                          std::to_string(r + 1));
        }
        builder.push_value(j, v);
      }
    }
  }
  return std::move(builder).build();
}

MicroTable load_csv(const std::filesystem::path& path, const Schema& schema) {
  auto in = open_input(path);
  try {
    return read_csv_table(in, schema);
  } catch (const Error& e) {
    throw e.annotated(path.string());
  }
}

void write_csv(const MicroTable& t, std::ostream& out) {
  const auto& schema = t.schema();
  std::vector<std::string> fields(schema.size());
  for (std::size_t j = 0; j < schema.size(); ++j) fields[j] = schema[j].name;
  write_csv_row(out, fields);
  for (std::size_t i = 0; i < t.n_rows(); ++i) {
    for (std::size_t j = 0; j < schema.size(); ++j) {
      const auto& spec = schema[j];
      if (spec.is_categorical()) {
        const auto c = t.column(j).codes[i];
        fields[j] = c == kMissingCode
                        ? missing_token(spec)
                        : spec.categories[static_cast<std::size_t>(c)];
      } else {
        const double v = t.column(j).values[i];
        fields[j] = is_missing(v) ? missing_token(spec) : format_number(v);
      }
    }
    write_csv_row(out, fields);
  }
}

void write_csv(const MicroTable& t, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  write_csv(t, out);
}

Schema infer_schema(std::istream& in,
                    const std::set<std::string>& numeric_hint) {
  const auto rows = parse_csv(in);
  if (rows.empty()) throw Error(ErrorCode::EmptyFile, "no header row");
  const auto& header = rows.front();
  std::set<std::string> seen;
  for (const auto& h : header) {
    if (!seen.insert(h).second) {
      throw Error(ErrorCode::DuplicateHeader, "duplicate column " + h);
    }
  }
  std::vector<VariableSpec> vars(header.size());
  for (std::size_t c = 0; c < header.size(); ++c) {
    vars[c].name = header[c];
    vars[c].kind = numeric_hint.count(header[c]) ? VariableKind::Numeric
                                                 : VariableKind::Categorical;
  }
  for (const auto& hinted : numeric_hint) {
    if (!seen.count(hinted)) {
      throw Error(ErrorCode::MissingColumn, "numeric hint " + hinted);
    }
  }
  std::vector<std::set<std::string>> known(header.size());
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.size() == 1 && row[0].empty() && header.size() > 1) continue;
    if (row.size() != header.size()) {
      throw Error(ErrorCode::MalformedInput,
                  "line " + std::to_string(r + 1) + " has wrong field count");
    }
    for (std::size_t c = 0; c < row.size(); ++c) {
      auto& v = vars[c];
      if (!v.is_categorical() || v.missing_codes.count(row[c])) continue;
      if (known[c].insert(row[c]).second) v.categories.push_back(row[c]);
    }
  }
  for (auto& v : vars) {
    if (v.is_categorical() && v.categories.empty()) {
      throw Error(ErrorCode::EmptyFile,
                  "column " + v.name + " has no non-missing values");
    }
  }
  return Schema(std::move(vars));
}

Schema infer_schema(const std::filesystem::path& path,
                    const std::set<std::string>& numeric_hint) {
  auto in = open_input(path);
  return infer_schema(in, numeric_hint);
}

Schema parse_schema(const std::string& json_text) {
  using nlohmann::json;
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidSchema, e.what());
  }
  try {
    std::vector<VariableSpec> vars;
    for (const auto& jv : doc.at("variables")) {
      VariableSpec v;
      v.name = jv.at("name").get<std::string>();
      const auto kind = jv.value("kind", std::string("categorical"));
      if (kind == "categorical") {
        v.kind = VariableKind::Categorical;
      } else if (kind == "numeric") {
        v.kind = VariableKind::Numeric;
      } else {
        throw Error(ErrorCode::InvalidSchema,
                    "variable " + v.name + " has unknown kind " + kind);
      }
      if (jv.contains("categories")) {
        v.categories = jv.at("categories").get<std::vector<std::string>>();
      }
      if (jv.contains("missing_codes")) {
        const auto codes = jv.at("missing_codes").get<std::vector<std::string>>();
        v.missing_codes = std::set<std::string>(codes.begin(), codes.end());
      }
      vars.push_back(std::move(v));
    }
    return Schema(std::move(vars), doc.value("extend_categories", false));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidSchema, e.what());
  }
}

Schema load_schema(const std::filesystem::path& path) {
  auto in = open_input(path);
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return parse_schema(ss.str());
  } catch (const Error& e) {
    throw e.annotated(path.string());
  }
}

std::string schema_to_json(const Schema& schema) {
  using nlohmann::ordered_json;
  ordered_json doc;
  doc["extend_categories"] = schema.extend_categories();
  auto vars = ordered_json::array();
  for (const auto& v : schema.variables()) {
    ordered_json jv;
    jv["name"] = v.name;
    jv["kind"] = v.is_categorical() ? "categorical" : "numeric";
    if (v.is_categorical()) jv["categories"] = v.categories;
    jv["missing_codes"] =
        std::vector<std::string>(v.missing_codes.begin(), v.missing_codes.end());
    vars.push_back(std::move(jv));
  }
  doc["variables"] = std::move(vars);
  return doc.dump(2) + "\n";
}

void save_schema(const Schema& schema, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  out << schema_to_json(schema);
}

}  // namespace sfe
