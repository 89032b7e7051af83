// Copyright 2026 The sfequiv Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <span>
#include <string>

#include "sfe/risk.hpp"
#include "sfe/sampling.hpp"
#include "sfe/utility.hpp"

namespace sfe {

enum class CurveAxis { Utility, Risk };

// Sample-fraction bracket for a score. Either `exact` is set, or the value
// lies between `lower` and `upper`; an absent lower means below the
// smallest grid fraction, an absent upper means above every point.
struct FractionInterval {
  std::optional<double> lower;
  std::optional<double> upper;
  std::optional<double> exact;

  bool below_min() const { return !exact && !lower; }
  bool above_max() const { return !exact && !upper; }
  bool operator==(const FractionInterval&) const = default;
};

struct EquivalenceResult {
  double utility = 0.0;
  double risk = 0.0;
  FractionInterval utility_interval;
  FractionInterval risk_interval;
};

inline constexpr double kExactTolerance = 1e-9;

// Scans the (sorted, terminal-augmented) curve in increasing fraction and
// returns the first point equal to `value` (exact) or the first adjacent
// pair whose means bracket it from below. Values under the smallest mean
// give "<f_min"; values above every mean give "> f_last". Error EmptyCurve.
FractionInterval locate_on_curve(double value, const RUCurve& curve,
                                 CurveAxis axis);

// Linear interpolation of the fraction inside a bracketing interval, for
// diagnostics. nullopt for open-ended intervals.
std::optional<double> interpolate_fraction(double value, const RUCurve& curve,
                                           CurveAxis axis,
                                           const FractionInterval& interval);

struct ScorePair {
  UtilityScore utility;
  RiskScore risk;
};

// Averages overall utility and overall marginal risk across the synthetic
// replicates and places both means on the curve. Error EmptyScores.
EquivalenceResult equivalence(std::span<const ScorePair> scores,
                              const RUCurve& curve);
EquivalenceResult equivalence_of_means(double utility, double risk,
                                       const RUCurve& curve);

// Pool-adjacent-violators fit of both mean columns, so each is
// non-decreasing in fraction. Sorted and terminal-augmented; sds kept.
RUCurve isotonic_smooth(const RUCurve& curve);

// "0.1%", "0.25%", "10%".
std::string format_percent(double fraction);
// "exact 10%", "<0.1%", "10% - 20%", ">99%".
std::string format_interval(const FractionInterval& interval,
                            const RUCurve& curve);

}  // namespace sfe
