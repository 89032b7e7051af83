// Copyright 2026 The sfequiv Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sfe/table.hpp"

namespace sfe {

// Latent-class mixture population. Each row draws a class uniformly; given
// the class, variables are independent. A categorical variable takes its
// class-specific mode with extra probability `dependence`, otherwise follows
// a fixed base distribution. Numeric variables shift their mean by class.
struct FixtureParams {
  std::size_t n = 10000;
  int n_categorical = 6;
  int n_numeric = 2;
  // Per categorical variable; cycled when shorter. Empty uses {2,3,4,5,6,8}.
  std::vector<int> cardinalities;
  int latent_classes = 4;
  double dependence = 0.8;
  double missing_rate = 0.0;
  std::uint64_t seed = 1;

  // Error InvalidConfig.
  void validate() const;
};

// Categorical C1..Cn with labels "1".."k", then numeric N1..Nm.
Schema fixture_schema(const FixtureParams& params);
MicroTable make_fixture(const FixtureParams& params);

// Cramér's V of two categorical variables over rows where both are present.
double cramers_v(const MicroTable& t, std::size_t a, std::size_t b);
// Mean over every pair of categorical variables.
double mean_cramers_v(const MicroTable& t);

}  // namespace sfe
