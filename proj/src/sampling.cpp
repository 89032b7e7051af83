// Copyright 2026 The sfequiv Authors
// SPDX-License-Identifier: Apache-2.0

#include "sfe/sampling.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <ostream>

#include "sfe/csv.hpp"
#include "sfe/error.hpp"
#include "sfe/rng.hpp"

namespace sfe {

FractionGrid FractionGrid::standard() {
  return {{0.001, 0.0025, 0.005, 0.01, 0.02, 0.03, 0.04, 0.05, 0.10, 0.20,
           0.30, 0.40, 0.50, 0.60, 0.70, 0.80, 0.90, 0.95, 0.96, 0.97, 0.98,
           0.99}};
}

void FractionGrid::validate() const {
  if (fractions.empty()) {
    throw Error(ErrorCode::InvalidConfig, "fraction grid is empty");
  }
  for (std::size_t i = 0; i < fractions.size(); ++i) {
    const double f = fractions[i];
    if (!(f > 0.0 && f <= 1.0)) {
      throw Error(ErrorCode::InvalidConfig,
                  "fraction " + format_number(f) + " outside (0, 1]");
    }
    if (i > 0 && !(f > fractions[i - 1])) {
      throw Error(ErrorCode::InvalidConfig,
                  "fraction grid must be strictly increasing");
    }
  }
}

void ReplicatePlan::validate() const {
  if (replicates < 1) {
    throw Error(ErrorCode::InvalidConfig, "replicates must be >= 1");
  }
}

std::size_t sample_size(std::size_t n_rows, double fraction) {
  const auto m = static_cast<std::size_t>(
      std::llround(fraction * static_cast<double>(n_rows)));
  return std::clamp<std::size_t>(m, 1, n_rows);
}

MicroTable draw_sample(const MicroTable& t, double fraction,
                       std::uint64_t seed) {
  if (t.empty()) throw Error(ErrorCode::EmptyTable, "cannot sample an empty table");
  if (!(fraction > 0.0 && fraction <= 1.0)) {
    throw Error(ErrorCode::InvalidConfig, "fraction outside (0, 1]");
  }
  const std::size_t n = t.n_rows();
  const std::size_t m = sample_size(n, fraction);
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  Rng rng(seed);
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t j = i + rng.uniform_index(n - i);
    std::swap(idx[i], idx[j]);
  }
  idx.resize(m);
  return t.select_rows(idx);
}

std::vector<std::uint64_t> replicate_seeds(const ReplicatePlan& plan,
                                           double fraction) {
  std::vector<std::uint64_t> seeds;
  seeds.reserve(static_cast<std::size_t>(std::max(plan.replicates, 0)));
  for (int r = 0; r < plan.replicates; ++r) {
    seeds.push_back(derive_seed(plan.base_seed, fraction_bits(fraction),
                                static_cast<std::uint64_t>(r)));
  }
  return seeds;
}

CurvePoint terminal_point() { return {1.0, 1.0, 0.0, 1.0, 0.0, 0}; }

RUCurve RUCurve::normalized() const {
  RUCurve out = *this;
  std::stable_sort(out.points.begin(), out.points.end(),
                   [](const CurvePoint& a, const CurvePoint& b) {
                     return a.fraction < b.fraction;
                   });
  if (out.points.empty() || out.points.back().fraction < 1.0) {
    out.points.push_back(terminal_point());
  }
  return out;
}

void write_curve_csv(const RUCurve& curve, std::ostream& out) {
  out << "fraction,mean_utility,sd_utility,mean_risk,sd_risk,n_replicates\n";
  for (const auto& p : curve.points) {
    const std::string fields[] = {
        format_number(p.fraction), format_number(p.mean_utility),
        format_number(p.sd_utility), format_number(p.mean_risk),
        format_number(p.sd_risk), std::to_string(p.n_replicates)};
    write_csv_row(out, fields);
  }
}

void write_curve_csv(const RUCurve& curve, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  write_curve_csv(curve, out);
}

namespace {

double parse_field(const std::string& s, const char* what) {
  double v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw Error(ErrorCode::MalformedInput,
                std::string("bad ") + what + " value '" + s + "'");
  }
  return v;
}

}  // namespace

RUCurve read_curve_csv(std::istream& in) {
  const auto rows = parse_csv(in);
  if (rows.empty()) throw Error(ErrorCode::EmptyCurve, "curve file is empty");
  const std::vector<std::string> expected = {
      "fraction", "mean_utility", "sd_utility",
      "mean_risk", "sd_risk",     "n_replicates"};
  std::vector<std::size_t> col(expected.size());
  for (std::size_t k = 0; k < expected.size(); ++k) {
    auto it = std::find(rows[0].begin(), rows[0].end(), expected[k]);
    if (it == rows[0].end()) {
      throw Error(ErrorCode::MissingColumn, "curve column " + expected[k]);
    }
    col[k] = static_cast<std::size_t>(it - rows[0].begin());
  }
  RUCurve curve;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.size() != rows[0].size()) {
      throw Error(ErrorCode::MalformedInput,
                  "curve line " + std::to_string(r + 1) + " has wrong width");
    }
    CurvePoint p;
    p.fraction = parse_field(row[col[0]], "fraction");
    p.mean_utility = parse_field(row[col[1]], "mean_utility");
    p.sd_utility = parse_field(row[col[2]], "sd_utility");
    p.mean_risk = parse_field(row[col[3]], "mean_risk");
    p.sd_risk = parse_field(row[col[4]], "sd_risk");
    p.n_replicates = static_cast<int>(parse_field(row[col[5]], "n_replicates"));
    curve.points.push_back(p);
  }
  if (curve.points.empty()) {
    throw Error(ErrorCode::EmptyCurve, "curve has no points");
  }
  return curve;
}

RUCurve read_curve_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  return read_curve_csv(in);
}

}  // namespace sfe
