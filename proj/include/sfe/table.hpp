// Copyright 2026 The sfequiv Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

namespace sfe {

enum class VariableKind { Categorical, Numeric };

// Categorical cells are stored as codes into VariableSpec::categories.
inline constexpr std::int32_t kMissingCode = -1;

inline bool is_missing(double v) { return std::isnan(v); }
inline double missing_numeric() {
  return std::numeric_limits<double>::quiet_NaN();
}

struct VariableSpec {
  std::string name;
  VariableKind kind = VariableKind::Categorical;
  std::vector<std::string> categories;
  std::set<std::string> missing_codes = {"", "NA"};

  bool is_categorical() const { return kind == VariableKind::Categorical; }

  // Index of `label` in categories, or nullopt.
  std::optional<std::int32_t> code_of(const std::string& label) const;

  bool operator==(const VariableSpec&) const = default;
};

class Schema {
 public:
  Schema() = default;
  // Validates on construction; throws Error(InvalidSchema).
  explicit Schema(std::vector<VariableSpec> variables,
                  bool extend_categories = false);

  const std::vector<VariableSpec>& variables() const { return variables_; }
  std::size_t size() const { return variables_.size(); }
  const VariableSpec& operator[](std::size_t i) const { return variables_[i]; }

  // Throws Error(UnknownVariable).
  std::size_t index_of(const std::string& name) const;
  std::optional<std::size_t> find(const std::string& name) const;
  const VariableSpec& variable(const std::string& name) const {
    return variables_[index_of(name)];
  }

  // When set, unseen categorical labels are appended in first-seen order
  // during loading instead of raising UnknownCategory.
  bool extend_categories() const { return extend_categories_; }

  std::size_t categorical_count() const;
  std::size_t numeric_count() const;

  bool operator==(const Schema&) const = default;

 private:
  friend class MicroTable;
  friend class TableBuilder;
  std::vector<VariableSpec> variables_;
  std::map<std::string, std::size_t> index_;
  bool extend_categories_ = false;
};

// One column. Exactly one of `codes` / `values` is populated, by kind.
struct Column {
  std::vector<std::int32_t> codes;
  std::vector<double> values;
};

// Immutable columnar table of categorical and numeric cells.
class MicroTable {
 public:
  MicroTable() = default;
  // Validates every invariant; throws Error(InvalidSchema / UnknownCategory /
  // MalformedNumeric) on violation.
  MicroTable(Schema schema, std::vector<Column> columns);

  const Schema& schema() const { return schema_; }
  std::size_t n_rows() const { return n_rows_; }
  std::size_t n_cols() const { return columns_.size(); }
  bool empty() const { return n_rows_ == 0; }

  std::span<const std::int32_t> codes(std::size_t var) const;
  std::span<const double> values(std::size_t var) const;
  const Column& column(std::size_t var) const { return columns_[var]; }

  // Rows in the given order (indices may repeat).
  MicroTable select_rows(std::span<const std::size_t> rows) const;

  // Same cells under a schema whose category lists extend this table's
  // (append-only). Throws Error(SchemaMismatch) otherwise.
  MicroTable with_schema(const Schema& extended) const;

  // Label of a cell for display / CSV output; Missing yields nullopt.
  std::optional<std::string> label(std::size_t row, std::size_t var) const;

  bool operator==(const MicroTable& other) const;

 private:
  Schema schema_;
  std::vector<Column> columns_;
  std::size_t n_rows_ = 0;
};

// Appends rows of raw cells; used by loaders and generators.
class TableBuilder {
 public:
  explicit TableBuilder(Schema schema);

  const Schema& schema() const { return schema_; }
  void reserve(std::size_t rows);

  void push_code(std::size_t var, std::int32_t code);
  void push_value(std::size_t var, double value);

  // Resolves `label` against the schema, extending categories when allowed.
  // Throws Error(UnknownCategory) in strict mode.
  std::int32_t intern(std::size_t var, const std::string& label);

  MicroTable build() &&;

 private:
  Schema schema_;
  std::vector<Column> columns_;
};

// True when both tables have identical schemas (names, kinds, categories).
bool same_schema(const MicroTable& a, const MicroTable& b);

// Rewrites both tables onto the union of their category dictionaries: a's
// labels keep their codes, labels only in b are appended in first-seen order.
// Variables must match by name and kind (order may differ; b is reordered).
// Returns the novel labels found in b, formatted "VAR=label".
std::vector<std::string> harmonize(MicroTable& a, MicroTable& b);

// Per-category proportions; Missing reported under the key "<missing>" when
// include_missing is set, otherwise Missing cells are excluded.
inline constexpr const char* kMissingLabel = "<missing>";
std::map<std::string, double> column_proportions(const MicroTable& t,
                                                 const std::string& var,
                                                 bool include_missing);

}  // namespace sfe
