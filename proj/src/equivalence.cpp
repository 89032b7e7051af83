// Copyright 2026 The sfequiv Authors
// SPDX-License-Identifier: Apache-2.0

#include "sfe/equivalence.hpp"

#include <cmath>
#include <cstdio>
#include <vector>

#include "sfe/error.hpp"

namespace sfe {

namespace {

double mean_of(const CurvePoint& p, CurveAxis axis) {
  return axis == CurveAxis::Utility ? p.mean_utility : p.mean_risk;
}

void pava(std::vector<CurvePoint>& pts, double CurvePoint::*field) {
  struct Block {
    double sum;
    std::size_t count;
  };
  std::vector<Block> blocks;
  for (const auto& p : pts) {
    blocks.push_back({p.*field, 1});
    while (blocks.size() > 1) {
      auto& b = blocks[blocks.size() - 1];
      auto& a = blocks[blocks.size() - 2];
      if (a.sum / a.count <= b.sum / b.count) break;
      a.sum += b.sum;
      a.count += b.count;
      blocks.pop_back();
    }
  }
  std::size_t i = 0;
  for (const auto& b : blocks) {
    for (std::size_t k = 0; k < b.count; ++k) pts[i++].*field = b.sum / b.count;
  }
}

}  // namespace

RUCurve isotonic_smooth(const RUCurve& curve) {
  RUCurve out = curve.normalized();
  pava(out.points, &CurvePoint::mean_utility);
  pava(out.points, &CurvePoint::mean_risk);
  return out;
}

FractionInterval locate_on_curve(double value, const RUCurve& curve,
                                 CurveAxis axis) {
  if (curve.points.empty()) throw Error(ErrorCode::EmptyCurve, "curve has no points");
  const auto pts = curve.normalized().points;
  FractionInterval out;
  double lowest = mean_of(pts.front(), axis);
  for (const auto& p : pts) lowest = std::min(lowest, mean_of(p, axis));
  for (const auto& p : pts) {
    if (std::abs(value - mean_of(p, axis)) <= kExactTolerance) {
      out.exact = p.fraction;
      return out;
    }
  }
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    if (mean_of(pts[i], axis) <= value && value <= mean_of(pts[i + 1], axis)) {
      out.lower = pts[i].fraction;
      out.upper = pts[i + 1].fraction;
      return out;
    }
  }
  // No ascending bracket. When the last point carries the highest mean (the
  // terminal point at 1 does) this only happens below or above every mean.
  if (value < lowest) {
    out.upper = pts.front().fraction;
  } else {
    out.lower = pts.back().fraction;
  }
  return out;
}

std::optional<double> interpolate_fraction(double value, const RUCurve& curve,
                                           CurveAxis axis,
                                           const FractionInterval& interval) {
  if (interval.exact) return interval.exact;
  if (!interval.lower || !interval.upper) return std::nullopt;
  const auto pts = curve.normalized().points;
  const CurvePoint* lo = nullptr;
  const CurvePoint* hi = nullptr;
  for (const auto& p : pts) {
    if (p.fraction == *interval.lower) lo = &p;
    if (p.fraction == *interval.upper) hi = &p;
  }
  if (!lo || !hi) return std::nullopt;
  const double a = mean_of(*lo, axis);
  const double b = mean_of(*hi, axis);
  if (b == a) return lo->fraction;
  const double t = (value - a) / (b - a);
  return lo->fraction + t * (hi->fraction - lo->fraction);
}

EquivalenceResult equivalence_of_means(double utility, double risk,
                                       const RUCurve& curve) {
  EquivalenceResult r;
  r.utility = utility;
  r.risk = risk;
  r.utility_interval = locate_on_curve(utility, curve, CurveAxis::Utility);
  r.risk_interval = locate_on_curve(risk, curve, CurveAxis::Risk);
  return r;
}

EquivalenceResult equivalence(std::span<const ScorePair> scores,
                              const RUCurve& curve) {
  if (scores.empty()) throw Error(ErrorCode::EmptyScores, "no synthetic scores");
  double u = 0.0, k = 0.0;
  for (const auto& s : scores) {
    u += s.utility.overall;
    k += s.risk.marginal;
  }
  const double n = static_cast<double>(scores.size());
  return equivalence_of_means(u / n, k / n, curve);
}

std::string format_percent(double fraction) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", fraction * 100.0);
  std::string s(buf);
  while (!s.empty() && s.back() == '0') s.pop_back();
  if (!s.empty() && s.back() == '.') s.pop_back();
  return s + "%";
}

std::string format_interval(const FractionInterval& interval,
                            const RUCurve& curve) {
  if (interval.exact) return "exact " + format_percent(*interval.exact);
  if (!interval.lower) {
    const double f = interval.upper ? *interval.upper
                                    : curve.normalized().points.front().fraction;
    return "<" + format_percent(f);
  }
  if (!interval.upper) return ">" + format_percent(*interval.lower);
  return format_percent(*interval.lower) + " - " +
         format_percent(*interval.upper);
}

}  // namespace sfe
