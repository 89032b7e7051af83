// Copyright 2026 The sfequiv Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <vector>

#include "sfe/table.hpp"

namespace sfe {

struct FractionGrid {
  std::vector<double> fractions;

  // 0.1% .. 99%: 22 fractions, dense near both ends.
  static FractionGrid standard();
  // Strictly increasing, all in (0, 1]. Error InvalidConfig.
  void validate() const;
};

struct ReplicatePlan {
  int replicates = 100;
  std::uint64_t base_seed = 0;

  void validate() const;
};

// round(fraction * n), at least 1.
std::size_t sample_size(std::size_t n_rows, double fraction);

// Simple random sample without replacement (partial Fisher-Yates); rows come
// out in draw order. Deterministic in (t, fraction, seed). Error EmptyTable.
MicroTable draw_sample(const MicroTable& t, double fraction,
                       std::uint64_t seed);

// derive_seed(base_seed, bits(fraction), index) for index in [0, replicates).
std::vector<std::uint64_t> replicate_seeds(const ReplicatePlan& plan,
                                           double fraction);

struct CurvePoint {
  double fraction = 0.0;
  double mean_utility = 0.0;
  double sd_utility = 0.0;
  double mean_risk = 0.0;
  double sd_risk = 0.0;
  int n_replicates = 0;
};

// One scored sample, kept only when requested.
struct ReplicateRecord {
  double fraction = 0.0;
  int replicate = 0;
  std::uint64_t seed = 0;
  double utility = 0.0;
  double risk = 0.0;
};

// Reference curve: one point per grid fraction in increasing order,
// followed by the terminal (1, 1, 1) point unless the grid already ends at
// 1. sd uses the R-1 denominator (0 for a single replicate).
struct RUCurve {
  std::vector<CurvePoint> points;
  std::vector<ReplicateRecord> replicates;

  // Sorted copy with the terminal point present exactly once.
  RUCurve normalized() const;
};

CurvePoint terminal_point();

// CSV: fraction,mean_utility,sd_utility,mean_risk,sd_risk,n_replicates
void write_curve_csv(const RUCurve& curve, std::ostream& out);
void write_curve_csv(const RUCurve& curve, const std::filesystem::path& path);
RUCurve read_curve_csv(std::istream& in);
RUCurve read_curve_csv(const std::filesystem::path& path);

}  // namespace sfe
