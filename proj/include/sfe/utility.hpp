// Copyright 2026 The sfequiv Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sfe/binning.hpp"
#include "sfe/error.hpp"
#include "sfe/logistic.hpp"
#include "sfe/table.hpp"

namespace sfe {

// min/max ratio of two non-negative estimates; 1 when both are zero.
double roc_cell(double y_orig, double y_synth);

// Mean over variables of the category-averaged ROC of proportions. Numeric
// variables are binned with cut points fitted on the original. Categories
// empty in both tables are skipped; categories present in one score 0.
double roc_univariate(const MicroTable& original, const MicroTable& synth,
                      std::span<const std::string> vars,
                      const BinningMap& binning);

// Same over the joint cells of every unordered pair of `vars`.
double roc_bivariate(const MicroTable& original, const MicroTable& synth,
                     std::span<const std::string> vars,
                     const BinningMap& binning);

struct ConfidenceInterval {
  double lower = 0.0;
  double upper = 0.0;
};

inline constexpr double kNormal975 = 1.95996;

// Averaged overlap of two intervals, relative to each width. 1 for
// identical intervals, negative when disjoint. Error ZeroWidthInterval.
double ci_overlap(const ConfidenceInterval& orig,
                  const ConfidenceInterval& synth);

// Logistic model: target binarised as (label in positive) -> 1.
struct RegressionSpec {
  std::string name;
  std::string target;
  std::vector<std::string> positive;
  std::vector<std::string> predictors;

  void validate(const Schema& schema) const;
};

struct TermOverlap {
  std::string model;
  std::string term;
  ConfidenceInterval original;
  ConfidenceInterval synthetic;
  double overlap = 0.0;  // unclamped
};

struct CioResult {
  double score = 0.0;
  std::vector<double> model_scores;
  std::vector<TermOverlap> terms;
  std::vector<std::string> warnings;
};

enum class FitFailurePolicy {
  Error,  // any failed fit fails the whole utility score
  Zero,   // a model whose fit fails on either table contributes CIO 0
};

struct UtilityWeights {
  double roc_univariate = 1.0;
  double roc_bivariate = 1.0;
  double cio = 1.0;
};

struct UtilityConfig {
  // Empty means every schema variable.
  std::vector<std::string> roc_variables;
  // Empty means every unordered pair of roc_variables.
  std::vector<std::pair<std::string, std::string>> roc_pairs;
  // Numeric binning for ROC; the "default" entry applies to unlisted
  // numeric variables.
  BinningMap binning = {{"default", NumericBinning{}}};
  std::vector<RegressionSpec> regressions;
  UtilityWeights weights;
  FitFailurePolicy on_fit_failure = FitFailurePolicy::Error;
  FitOptions fit;

  void validate(const Schema& schema) const;
};

struct UtilityScore {
  double roc_univariate = 0.0;
  double roc_bivariate = 0.0;
  double cio = 0.0;
  double overall = 0.0;
};

double combine_utility(double roc_univariate, double roc_bivariate, double cio,
                       const UtilityWeights& weights);

// Original-side tabulations and fits, reused across many synthetic or
// sample tables. score() is safe to call concurrently.
class UtilityEvaluator {
 public:
  UtilityEvaluator(const MicroTable& original, UtilityConfig cfg);

  UtilityScore score(const MicroTable& synth) const;
  double roc_univariate(const MicroTable& synth) const;
  double roc_bivariate(const MicroTable& synth) const;
  CioResult cio(const MicroTable& synth) const;

  const UtilityConfig& config() const { return cfg_; }

 private:
  struct Tabulation;
  struct FitCache;
  struct Model;

  std::vector<std::vector<std::int32_t>> encode_all(const MicroTable& t) const;

  UtilityConfig cfg_;
  MicroTable original_;
  std::vector<std::size_t> roc_vars_;
  std::vector<std::pair<std::size_t, std::size_t>> roc_pairs_;
  std::vector<LevelEncoder> encoders_;  // indexed like roc_vars_
  std::vector<std::vector<double>> uni_props_;
  std::vector<std::vector<double>> bi_props_;
  std::vector<std::shared_ptr<const Model>> models_;
  std::shared_ptr<FitCache> cache_;
};

UtilityScore overall_utility(const MicroTable& original,
                             const MicroTable& synth, const UtilityConfig& cfg);

// CIO over the given models; fit failures propagate annotated with
// (model, table).
double cio_score(const MicroTable& original, const MicroTable& synth,
                 std::span<const RegressionSpec> specs);
CioResult cio_detail(const MicroTable& original, const MicroTable& synth,
                     std::span<const RegressionSpec> specs);

}  // namespace sfe
