// Copyright 2026 The sfequiv Authors
// SPDX-License-Identifier: Apache-2.0

#include "sfe/binning.hpp"

#include <algorithm>
#include <cmath>

#include "sfe/csv.hpp"
#include "sfe/error.hpp"

namespace sfe {

std::vector<double> cut_points(std::span<const double> original,
                               const NumericBinning& binning) {
  std::vector<double> present;
  present.reserve(original.size());
  for (double v : original) {
    if (!is_missing(v)) present.push_back(v);
  }
  std::vector<double> cuts;
  switch (binning.method) {
    case NumericBinning::Method::Edges:
      cuts = binning.edges;
      if (!std::is_sorted(cuts.begin(), cuts.end()) ||
          std::adjacent_find(cuts.begin(), cuts.end()) != cuts.end()) {
        throw Error(ErrorCode::InvalidConfig,
                    "binning edges must be strictly increasing");
      }
      return cuts;
    case NumericBinning::Method::Width: {
      if (!(binning.width > 0)) {
        throw Error(ErrorCode::InvalidConfig, "binning width must be > 0");
      }
      if (present.empty()) return cuts;
      const auto [lo, hi] = std::minmax_element(present.begin(), present.end());
      const double first = std::floor((*lo - binning.origin) / binning.width) + 1;
      const double last = std::floor((*hi - binning.origin) / binning.width);
      for (double k = first; k <= last; k += 1) {
        cuts.push_back(binning.origin + k * binning.width);
      }
      return cuts;
    }
    case NumericBinning::Method::Quantile: {
      if (binning.bins < 1) {
        throw Error(ErrorCode::InvalidConfig, "quantile bins must be >= 1");
      }
      if (present.empty()) return cuts;
      std::sort(present.begin(), present.end());
      const std::size_t n = present.size();
      for (int b = 1; b < binning.bins; ++b) {
        // Lower empirical quantile at b/bins; a cut sits just above it, so
        // bins are (prev, cut]. Ties collapse duplicate cuts.
        const std::size_t idx = (n * static_cast<std::size_t>(b)) /
                                static_cast<std::size_t>(binning.bins);
        if (idx == 0 || idx >= n) continue;
        const double cut = present[idx - 1];
        if (cut == present.back()) continue;
        if (cuts.empty() || cut > cuts.back()) cuts.push_back(cut);
      }
      return cuts;
    }
  }
  return cuts;
}

LevelEncoder LevelEncoder::fit(const MicroTable& original, std::size_t var,
                               const NumericBinning* binning) {
  LevelEncoder enc;
  enc.var_ = var;
  const auto& spec = original.schema()[var];
  if (spec.is_categorical()) {
    enc.labels_ = spec.categories;
  } else {
    if (!binning) {
      throw Error(ErrorCode::MissingBinning,
                  "numeric variable " + spec.name + " needs a binning");
    }
    enc.numeric_ = true;
    enc.cuts_ = cut_points(original.values(var), *binning);
    enc.right_closed_ = binning->method == NumericBinning::Method::Quantile;
    const std::size_t nbins = enc.cuts_.size() + 1;
    for (std::size_t b = 0; b < nbins; ++b) {
      const std::string lo = b == 0 ? "-inf" : format_number(enc.cuts_[b - 1]);
      const std::string hi =
          b + 1 == nbins ? "inf" : format_number(enc.cuts_[b]);
      enc.labels_.push_back(enc.right_closed_ ? "(" + lo + "," + hi + "]"
                                              : "[" + lo + "," + hi + ")");
    }
  }
  enc.n_levels_ = static_cast<std::int32_t>(enc.labels_.size() + 1);
  return enc;
}

std::int32_t LevelEncoder::level_of_value(double v) const {
  if (is_missing(v)) return missing_level();
  // Quantile bins are (cuts[b-1], cuts[b]]; width and edge bins are
  // [cuts[b-1], cuts[b]).
  const auto it = right_closed_
                      ? std::lower_bound(cuts_.begin(), cuts_.end(), v)
                      : std::upper_bound(cuts_.begin(), cuts_.end(), v);
  return static_cast<std::int32_t>(it - cuts_.begin());
}

std::vector<std::int32_t> LevelEncoder::encode(const MicroTable& t) const {
  std::vector<std::int32_t> out(t.n_rows());
  if (numeric_) {
    const auto vals = t.values(var_);
    for (std::size_t i = 0; i < vals.size(); ++i) {
      out[i] = level_of_value(vals[i]);
    }
    return out;
  }
  const auto codes = t.codes(var_);
  if (static_cast<std::int32_t>(t.schema()[var_].categories.size()) + 1 !=
      n_levels_) {
    throw Error(ErrorCode::SchemaMismatch,
                "category dictionary of " + t.schema()[var_].name +
                    " differs from the original");
  }
  for (std::size_t i = 0; i < codes.size(); ++i) {
    out[i] = codes[i] == kMissingCode ? missing_level() : codes[i];
  }
  return out;
}

std::string LevelEncoder::level_label(std::int32_t level) const {
  if (level == missing_level()) return kMissingLabel;
  return labels_.at(static_cast<std::size_t>(level));
}

Discretizer::Discretizer(const MicroTable& original,
                         std::span<const std::string> vars,
                         const BinningMap& binning) {
  const auto& src = original.schema();
  encoders_.resize(src.size());
  std::vector<VariableSpec> specs = src.variables();
  for (const auto& name : vars) {
    const auto j = src.index_of(name);
    if (src[j].is_categorical() || encoders_[j]) continue;
    encoders_[j] = LevelEncoder::fit(original, j, find_binning(binning, name));
    auto& spec = specs[j];
    spec.kind = VariableKind::Categorical;
    spec.categories.clear();
    for (std::int32_t l = 0; l < encoders_[j]->missing_level(); ++l) {
      spec.categories.push_back(encoders_[j]->level_label(l));
    }
  }
  schema_ = Schema(std::move(specs), src.extend_categories());
}

MicroTable Discretizer::apply(const MicroTable& t) const {
  if (t.n_cols() != encoders_.size()) {
    throw Error(ErrorCode::SchemaMismatch, "table does not match discretizer");
  }
  std::vector<Column> cols(t.n_cols());
  for (std::size_t j = 0; j < t.n_cols(); ++j) {
    if (!encoders_[j]) {
      cols[j] = t.column(j);
      continue;
    }
    auto levels = encoders_[j]->encode(t);
    for (auto& l : levels) {
      if (l == encoders_[j]->missing_level()) l = kMissingCode;
    }
    cols[j].codes = std::move(levels);
  }
  return MicroTable(schema_, std::move(cols));
}

const NumericBinning* find_binning(const BinningMap& map,
                                   const std::string& name) {
  if (auto it = map.find(name); it != map.end()) return &it->second;
  if (auto it = map.find("default"); it != map.end()) return &it->second;
  return nullptr;
}

}  // namespace sfe
