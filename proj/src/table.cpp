// Copyright 2026 The sfequiv Authors
// SPDX-License-Identifier: Apache-2.0

#include "sfe/table.hpp"

#include <algorithm>
#include <unordered_map>
#include <utility>

#include "sfe/error.hpp"

namespace sfe {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::InvalidSchema: return "InvalidSchema";
    case ErrorCode::Io: return "Io";
    case ErrorCode::EmptyFile: return "EmptyFile";
    case ErrorCode::DuplicateHeader: return "DuplicateHeader";
    case ErrorCode::MissingColumn: return "MissingColumn";
    case ErrorCode::UnknownCategory: return "UnknownCategory";
    case ErrorCode::MalformedNumeric: return "MalformedNumeric";
    case ErrorCode::MalformedInput: return "MalformedInput";
    case ErrorCode::UnknownVariable: return "UnknownVariable";
    case ErrorCode::NotCategorical: return "NotCategorical";
    case ErrorCode::SchemaMismatch: return "SchemaMismatch";
    case ErrorCode::EmptyTable: return "EmptyTable";
    case ErrorCode::EmptySynth: return "EmptySynth";
    case ErrorCode::MissingBinning: return "MissingBinning";
    case ErrorCode::NegativeInput: return "NegativeInput";
    case ErrorCode::DegenerateBaseline: return "DegenerateBaseline";
    case ErrorCode::ZeroWidthInterval: return "ZeroWidthInterval";
    case ErrorCode::Separation: return "Separation";
    case ErrorCode::SingularInformation: return "SingularInformation";
    case ErrorCode::RankDeficient: return "RankDeficient";
    case ErrorCode::EmptyCurve: return "EmptyCurve";
    case ErrorCode::EmptyScores: return "EmptyScores";
  }
  return "Unknown";
}

ErrorCategory category_of(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidConfig:
    case ErrorCode::InvalidSchema:
      return ErrorCategory::Config;
    case ErrorCode::MissingBinning:
    case ErrorCode::NegativeInput:
    case ErrorCode::DegenerateBaseline:
    case ErrorCode::ZeroWidthInterval:
    case ErrorCode::Separation:
    case ErrorCode::SingularInformation:
    case ErrorCode::RankDeficient:
      return ErrorCategory::Metric;
    default:
      return ErrorCategory::Data;
  }
}

int exit_code_for(ErrorCode code) {
  switch (category_of(code)) {
    case ErrorCategory::Config: return 2;
    case ErrorCategory::Data: return 3;
    case ErrorCategory::Metric: return 4;
  }
  return 1;
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what),
      code_(code) {}

Error Error::annotated(std::string_view context) const {
  // Strip the "Code: " prefix so it is not repeated.
  std::string msg = what();
  const std::string prefix = std::string(to_string(code_)) + ": ";
  if (msg.rfind(prefix, 0) == 0) msg.erase(0, prefix.size());
  return Error(code_, std::string(context) + ": " + msg);
}

std::optional<std::int32_t> VariableSpec::code_of(
    const std::string& label) const {
  auto it = std::find(categories.begin(), categories.end(), label);
  if (it == categories.end()) return std::nullopt;
  return static_cast<std::int32_t>(it - categories.begin());
}

Schema::Schema(std::vector<VariableSpec> variables, bool extend_categories)
    : variables_(std::move(variables)), extend_categories_(extend_categories) {
  if (variables_.size() < 2) {
    throw Error(ErrorCode::InvalidSchema,
                "a schema needs at least 2 variables");
  }
  for (std::size_t i = 0; i < variables_.size(); ++i) {
    const auto& v = variables_[i];
    if (v.name.empty()) {
      throw Error(ErrorCode::InvalidSchema, "empty variable name");
    }
    if (!index_.emplace(v.name, i).second) {
      throw Error(ErrorCode::InvalidSchema, "duplicate variable " + v.name);
    }
    if (v.is_categorical()) {
      if (v.categories.empty() && !extend_categories_) {
        throw Error(ErrorCode::InvalidSchema,
                    "categorical variable " + v.name + " has no categories");
      }
      std::set<std::string> seen;
      for (const auto& c : v.categories) {
        if (!seen.insert(c).second) {
          throw Error(ErrorCode::InvalidSchema,
                      "duplicate category '" + c + "' in " + v.name);
        }
        if (v.missing_codes.count(c)) {
          throw Error(ErrorCode::InvalidSchema,
                      "category '" + c + "' of " + v.name +
                          " is also a missing code");
        }
      }
    } else if (!v.categories.empty()) {
      throw Error(ErrorCode::InvalidSchema,
                  "numeric variable " + v.name + " lists categories");
    }
  }
}

std::size_t Schema::index_of(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) {
    throw Error(ErrorCode::UnknownVariable, "unknown variable " + name);
  }
  return it->second;
}

std::optional<std::size_t> Schema::find(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::size_t Schema::categorical_count() const {
  return static_cast<std::size_t>(
      std::count_if(variables_.begin(), variables_.end(),
                    [](const VariableSpec& v) { return v.is_categorical(); }));
}

std::size_t Schema::numeric_count() const {
  return variables_.size() - categorical_count();
}

MicroTable::MicroTable(Schema schema, std::vector<Column> columns)
    : schema_(std::move(schema)), columns_(std::move(columns)) {
  if (columns_.size() != schema_.size()) {
    throw Error(ErrorCode::InvalidSchema, "column count does not match schema");
  }
  for (std::size_t j = 0; j < columns_.size(); ++j) {
    const auto& spec = schema_[j];
    const auto& col = columns_[j];
    const std::size_t len =
        spec.is_categorical() ? col.codes.size() : col.values.size();
    if (j == 0) n_rows_ = len;
    if (len != n_rows_) {
      throw Error(ErrorCode::InvalidSchema,
                  "column " + spec.name + " has inconsistent length");
    }
    if (spec.is_categorical()) {
      const auto ncat = static_cast<std::int32_t>(spec.categories.size());
      for (auto c : col.codes) {
        if (c != kMissingCode && (c < 0 || c >= ncat)) {
          throw Error(ErrorCode::UnknownCategory,
                      "invalid category code in " + spec.name);
        }
      }
    } else {
      for (auto v : col.values) {
        if (!is_missing(v) && !std::isfinite(v)) {
          throw Error(ErrorCode::MalformedNumeric,
                      "non-finite value in " + spec.name);
        }
      }
    }
  }
}

std::span<const std::int32_t> MicroTable::codes(std::size_t var) const {
  if (!schema_[var].is_categorical()) {
    throw Error(ErrorCode::NotCategorical,
                schema_[var].name + " is not categorical");
  }
  return columns_[var].codes;
}

std::span<const double> MicroTable::values(std::size_t var) const {
  if (schema_[var].is_categorical()) {
    throw Error(ErrorCode::SchemaMismatch,
                schema_[var].name + " is not numeric");
  }
  return columns_[var].values;
}

MicroTable MicroTable::select_rows(std::span<const std::size_t> rows) const {
  std::vector<Column> out(columns_.size());
  for (std::size_t j = 0; j < columns_.size(); ++j) {
    if (schema_[j].is_categorical()) {
      const auto& src = columns_[j].codes;
      auto& dst = out[j].codes;
      dst.reserve(rows.size());
      for (auto r : rows) dst.push_back(src[r]);
    } else {
      const auto& src = columns_[j].values;
      auto& dst = out[j].values;
      dst.reserve(rows.size());
      for (auto r : rows) dst.push_back(src[r]);
    }
  }
  MicroTable t;
  t.schema_ = schema_;
  t.columns_ = std::move(out);
  t.n_rows_ = rows.size();
  return t;
}

MicroTable MicroTable::with_schema(const Schema& extended) const {
  if (extended.size() != schema_.size()) {
    throw Error(ErrorCode::SchemaMismatch, "variable count differs");
  }
  for (std::size_t j = 0; j < schema_.size(); ++j) {
    const auto& a = schema_[j];
    const auto& b = extended[j];
    if (a.name != b.name || a.kind != b.kind ||
        b.categories.size() < a.categories.size() ||
        !std::equal(a.categories.begin(), a.categories.end(),
                    b.categories.begin())) {
      throw Error(ErrorCode::SchemaMismatch,
                  "schema for " + a.name + " is not an extension");
    }
  }
  MicroTable t = *this;
  t.schema_ = extended;
  return t;
}

std::optional<std::string> MicroTable::label(std::size_t row,
                                             std::size_t var) const {
  const auto& spec = schema_[var];
  if (spec.is_categorical()) {
    const auto c = columns_[var].codes[row];
    if (c == kMissingCode) return std::nullopt;
    return spec.categories[static_cast<std::size_t>(c)];
  }
  const double v = columns_[var].values[row];
  if (is_missing(v)) return std::nullopt;
  return std::to_string(v);
}

bool MicroTable::operator==(const MicroTable& other) const {
  if (!(schema_ == other.schema_) || n_rows_ != other.n_rows_) return false;
  for (std::size_t j = 0; j < columns_.size(); ++j) {
    if (columns_[j].codes != other.columns_[j].codes) return false;
    const auto& a = columns_[j].values;
    const auto& b = other.columns_[j].values;
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (is_missing(a[i]) != is_missing(b[i])) return false;
      if (!is_missing(a[i]) && a[i] != b[i]) return false;
    }
  }
  return true;
}

TableBuilder::TableBuilder(Schema schema)
    : schema_(std::move(schema)), columns_(schema_.size()) {}

void TableBuilder::reserve(std::size_t rows) {
  for (std::size_t j = 0; j < columns_.size(); ++j) {
    if (schema_[j].is_categorical()) {
      columns_[j].codes.reserve(rows);
    } else {
      columns_[j].values.reserve(rows);
    }
  }
}

void TableBuilder::push_code(std::size_t var, std::int32_t code) {
  columns_[var].codes.push_back(code);
}

void TableBuilder::push_value(std::size_t var, double value) {
  columns_[var].values.push_back(value);
}

std::int32_t TableBuilder::intern(std::size_t var, const std::string& label) {
  auto& spec = schema_.variables_[var];
  if (auto code = spec.code_of(label)) return *code;
  if (!schema_.extend_categories_) {
    throw Error(ErrorCode::UnknownCategory,
                "value '" + label + "' is not a category of " + spec.name);
  }
  spec.categories.push_back(label);
  return static_cast<std::int32_t>(spec.categories.size() - 1);
}

MicroTable TableBuilder::build() && {
  return MicroTable(std::move(schema_), std::move(columns_));
}

bool same_schema(const MicroTable& a, const MicroTable& b) {
  const auto& sa = a.schema().variables();
  const auto& sb = b.schema().variables();
  return sa == sb;
}

std::vector<std::string> harmonize(MicroTable& a, MicroTable& b) {
  const Schema& sa = a.schema();
  const Schema& sb = b.schema();
  if (sa.size() != sb.size()) {
    throw Error(ErrorCode::SchemaMismatch, "tables have different variables");
  }
  std::vector<std::string> novel;
  std::vector<VariableSpec> merged = sa.variables();
  std::vector<Column> b_cols(sa.size());
  for (std::size_t j = 0; j < sa.size(); ++j) {
    const auto bj = sb.find(sa[j].name);
    if (!bj) {
      throw Error(ErrorCode::MissingColumn,
                  "variable " + sa[j].name + " missing from second table");
    }
    const auto& bspec = sb[*bj];
    if (bspec.kind != sa[j].kind) {
      throw Error(ErrorCode::SchemaMismatch,
                  "variable " + sa[j].name + " differs in kind");
    }
    const auto& src = b.column(*bj);
    if (!bspec.is_categorical()) {
      b_cols[j].values = src.values;
      continue;
    }
    auto& spec = merged[j];
    std::vector<std::int32_t> remap(bspec.categories.size());
    for (std::size_t c = 0; c < bspec.categories.size(); ++c) {
      const auto& lbl = bspec.categories[c];
      if (auto code = spec.code_of(lbl)) {
        remap[c] = *code;
      } else {
        spec.categories.push_back(lbl);
        remap[c] = static_cast<std::int32_t>(spec.categories.size() - 1);
        novel.push_back(spec.name + "=" + lbl);
      }
    }
    b_cols[j].codes.reserve(src.codes.size());
    for (auto c : src.codes) {
      b_cols[j].codes.push_back(
          c == kMissingCode ? kMissingCode : remap[static_cast<std::size_t>(c)]);
    }
  }
  Schema schema(std::move(merged), sa.extend_categories());
  a = a.with_schema(schema);
  b = MicroTable(schema, std::move(b_cols));
  return novel;
}

std::map<std::string, double> column_proportions(const MicroTable& t,
                                                 const std::string& var,
                                                 bool include_missing) {
  const auto j = t.schema().index_of(var);
  const auto& spec = t.schema()[j];
  if (!spec.is_categorical()) {
    throw Error(ErrorCode::NotCategorical, var + " is not categorical");
  }
  std::vector<std::size_t> counts(spec.categories.size() + 1, 0);
  std::size_t total = 0;
  for (auto c : t.codes(j)) {
    if (c == kMissingCode) {
      if (!include_missing) continue;
      ++counts.back();
    } else {
      ++counts[static_cast<std::size_t>(c)];
    }
    ++total;
  }
  std::map<std::string, double> out;
  if (total == 0) return out;
  for (std::size_t c = 0; c < spec.categories.size(); ++c) {
    if (counts[c]) {
      out[spec.categories[c]] = static_cast<double>(counts[c]) / total;
    }
  }
  if (counts.back()) {
    out[kMissingLabel] = static_cast<double>(counts.back()) / total;
  }
  return out;
}

}  // namespace sfe
