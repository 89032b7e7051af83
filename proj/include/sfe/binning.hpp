// Copyright 2026 The sfequiv Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sfe/table.hpp"

namespace sfe {

// How a numeric variable is discretised for tabulation or key matching.
// All methods reduce to interior cut points; the outer bins are open-ended.
struct NumericBinning {
  enum class Method { Quantile, Width, Edges };
  Method method = Method::Quantile;
  int bins = 10;             // Quantile: equal-count bins on the original.
  double width = 1.0;        // Width: bins [origin + k*width, ...).
  double origin = 0.0;
  std::vector<double> edges; // Edges: explicit cut points, increasing.

  bool operator==(const NumericBinning&) const = default;
};

using BinningMap = std::map<std::string, NumericBinning>;

// Cut points derived from the original column (Missing values ignored).
std::vector<double> cut_points(std::span<const double> original,
                               const NumericBinning& binning);

// Dense level coding of one variable, fitted on the original table and
// applied identically to any table sharing its schema. Levels are
// 0..n_levels()-1 and the last level is Missing.
class LevelEncoder {
 public:
  // binning is required for numeric variables (Error MissingBinning).
  static LevelEncoder fit(const MicroTable& original, std::size_t var,
                          const NumericBinning* binning);

  std::int32_t n_levels() const { return n_levels_; }
  std::int32_t missing_level() const { return n_levels_ - 1; }

  std::vector<std::int32_t> encode(const MicroTable& t) const;
  std::int32_t level_of_value(double v) const;

  std::string level_label(std::int32_t level) const;
  std::size_t var() const { return var_; }

 private:
  std::size_t var_ = 0;
  bool numeric_ = false;
  bool right_closed_ = true;
  std::int32_t n_levels_ = 0;
  std::vector<double> cuts_;
  std::vector<std::string> labels_;
};

// Converts selected numeric variables to categorical bins fitted on the
// original; other variables pass through unchanged. Bin labels follow
// LevelEncoder::level_label.
class Discretizer {
 public:
  Discretizer() = default;
  // Every numeric variable in `vars` needs a binning (Error MissingBinning).
  Discretizer(const MicroTable& original, std::span<const std::string> vars,
              const BinningMap& binning);

  const Schema& schema() const { return schema_; }
  MicroTable apply(const MicroTable& t) const;

 private:
  Schema schema_;
  std::vector<std::optional<LevelEncoder>> encoders_;
};

// Resolves the binning for `name`: its explicit entry, else the "default"
// entry, else nullopt.
const NumericBinning* find_binning(const BinningMap& map,
                                   const std::string& name);

}  // namespace sfe
