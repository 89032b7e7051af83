// Copyright 2026 The sfequiv Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "sfe/csv.hpp"
#include "sfe/evaluation.hpp"
#include "sfe/fixture.hpp"
#include "sfe/rng.hpp"
#include "sfe/table.hpp"

namespace sfe::test {

inline VariableSpec cat(std::string name, std::vector<std::string> cats) {
  VariableSpec v;
  v.name = std::move(name);
  v.categories = std::move(cats);
  return v;
}

inline VariableSpec num(std::string name) {
  VariableSpec v;
  v.name = std::move(name);
  v.kind = VariableKind::Numeric;
  return v;
}

inline MicroTable from_csv(const std::string& text, const Schema& schema) {
  std::istringstream in(text);
  return read_csv_table(in, schema);
}

// Categorical table V0..V{k-1}; card[j] categories named "a", "b", ...
inline MicroTable random_table(Rng& rng, std::size_t rows,
                               const std::vector<int>& card,
                               double missing = 0.0) {
  std::vector<VariableSpec> vars;
  std::vector<Column> cols(card.size());
  for (std::size_t j = 0; j < card.size(); ++j) {
    std::vector<std::string> labels;
    for (int c = 0; c < card[j]; ++c) labels.push_back(std::string(1, char('a' + c)));
    vars.push_back(cat("V" + std::to_string(j), labels));
    for (std::size_t i = 0; i < rows; ++i) {
      const bool miss = missing > 0 && rng.uniform01() < missing;
      cols[j].codes.push_back(
          miss ? kMissingCode
               : static_cast<std::int32_t>(rng.uniform_index(static_cast<std::size_t>(card[j]))));
    }
  }
  return MicroTable(Schema(std::move(vars)), std::move(cols));
}

// The shared correlated population used across suites.
inline const MicroTable& correlated_fixture() {
  static const MicroTable t = [] {
    FixtureParams p;
    p.n = 10000;
    p.dependence = 0.8;
    p.seed = 7;
    return make_fixture(p);
  }();
  return t;
}

// Toy-sized attack and utility settings over the fixture variables.
inline EvaluationConfig fixture_evaluation(int replicates = 10) {
  EvaluationConfig cfg;
  cfg.attack.keys = {"N1", "C5", "C4", "C3", "C2", "C1"};
  cfg.attack.targets = {"C6", "N2"};
  cfg.attack.binning["N1"] = NumericBinning{NumericBinning::Method::Width, 10, 5.0, 0.0, {}};
  cfg.attack.binning["N2"] = NumericBinning{NumericBinning::Method::Quantile, 5, 1.0, 0.0, {}};
  cfg.utility.regressions = {{"c1_is_1", "C1", {"1"}, {"C2", "C3", "C4", "N1", "N2"}},
                             {"c6_low", "C6", {"1", "2"}, {"C2", "C3", "C5", "N1"}}};
  cfg.utility.on_fit_failure = FitFailurePolicy::Zero;
  cfg.plan.replicates = replicates;
  cfg.plan.base_seed = 20260101;
  return cfg;
}

}  // namespace sfe::test
