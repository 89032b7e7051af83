// Copyright 2026 The sfequiv Authors
// SPDX-License-Identifier: Apache-2.0

#include "sfe/fixture.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "sfe/error.hpp"
#include "sfe/rng.hpp"

namespace sfe {

namespace {

int cardinality(const FixtureParams& p, int v) {
  static const std::vector<int> kDefault = {2, 3, 4, 5, 6, 8};
  const auto& c = p.cardinalities.empty() ? kDefault : p.cardinalities;
  return c[static_cast<std::size_t>(v) % c.size()];
}

double normal(Rng& rng) {
  const double u1 = 1.0 - rng.uniform01();
  const double u2 = rng.uniform01();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::size_t draw(Rng& rng, const std::vector<double>& cdf) {
  const double u = rng.uniform01() * cdf.back();
  const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
  return std::min(static_cast<std::size_t>(it - cdf.begin()), cdf.size() - 1);
}

}  // namespace

void FixtureParams::validate() const {
  auto bad = [](const std::string& m) {
    throw Error(ErrorCode::InvalidConfig, "fixture: " + m);
  };
  if (n < 1) bad("n must be >= 1");
  if (n_categorical < 0 || n_numeric < 0) bad("variable counts must be >= 0");
  if (n_categorical + n_numeric < 2) bad("at least two variables are needed");
  for (int c : cardinalities) {
    if (c < 2) bad("cardinalities must be >= 2");
  }
  if (latent_classes < 1) bad("latent_classes must be >= 1");
  if (!(dependence >= 0.0 && dependence <= 1.0)) bad("dependence must be in [0, 1]");
  if (!(missing_rate >= 0.0 && missing_rate < 1.0)) bad("missing_rate must be in [0, 1)");
}

Schema fixture_schema(const FixtureParams& p) {
  p.validate();
  std::vector<VariableSpec> vars;
  for (int v = 0; v < p.n_categorical; ++v) {
    VariableSpec s;
    s.name = "C" + std::to_string(v + 1);
    for (int j = 1; j <= cardinality(p, v); ++j) s.categories.push_back(std::to_string(j));
    vars.push_back(std::move(s));
  }
  for (int v = 0; v < p.n_numeric; ++v) {
    VariableSpec s;
    s.name = "N" + std::to_string(v + 1);
    s.kind = VariableKind::Numeric;
    vars.push_back(std::move(s));
  }
  return Schema(std::move(vars));
}

MicroTable make_fixture(const FixtureParams& p) {
  Schema schema = fixture_schema(p);
  const int K = p.latent_classes;

  // Per variable and class: cumulative category weights.
  std::vector<std::vector<std::vector<double>>> cdfs(p.n_categorical);
  Rng shape(derive_seed(p.seed, 1, 0));
  for (int v = 0; v < p.n_categorical; ++v) {
    const int k = cardinality(p, v);
    std::vector<double> base(k);
    double total = 0;
    for (auto& b : base) total += (b = 0.5 + shape.uniform01());
    for (auto& b : base) b /= total;
    for (int c = 0; c < K; ++c) {
      std::vector<double> cdf(k);
      double acc = 0;
      for (int j = 0; j < k; ++j) {
        acc += (1.0 - p.dependence) * base[j] +
               (j == (c + v) % k ? p.dependence : 0.0);
        cdf[j] = acc;
      }
      cdfs[v].push_back(std::move(cdf));
    }
  }

  std::vector<Column> cols(schema.size());
  for (std::size_t j = 0; j < schema.size(); ++j) {
    if (schema[j].is_categorical()) {
      cols[j].codes.reserve(p.n);
    } else {
      cols[j].values.reserve(p.n);
    }
  }
  Rng rng(derive_seed(p.seed, 2, 0));
  const double centre = (K - 1) / 2.0;
  for (std::size_t i = 0; i < p.n; ++i) {
    const int c = static_cast<int>(rng.uniform_index(static_cast<std::size_t>(K)));
    for (int v = 0; v < p.n_categorical; ++v) {
      const auto code = static_cast<std::int32_t>(draw(rng, cdfs[v][c]));
      const bool miss = p.missing_rate > 0 && rng.uniform01() < p.missing_rate;
      cols[v].codes.push_back(miss ? kMissingCode : code);
    }
    for (int v = 0; v < p.n_numeric; ++v) {
      const double shift = centre > 0 ? (c - centre) / centre : 0.0;
      double x = 40.0 + 15.0 * (v + 1) * p.dependence * shift + 8.0 * normal(rng);
      x = std::round(std::max(0.0, x) * 10.0) / 10.0;
      const bool miss = p.missing_rate > 0 && rng.uniform01() < p.missing_rate;
      cols[p.n_categorical + v].values.push_back(miss ? missing_numeric() : x);
    }
  }
  return MicroTable(std::move(schema), std::move(cols));
}

double cramers_v(const MicroTable& t, std::size_t a, std::size_t b) {
  const auto ca = t.codes(a);
  const auto cb = t.codes(b);
  const std::size_t ka = t.schema()[a].categories.size();
  const std::size_t kb = t.schema()[b].categories.size();
  std::vector<double> joint(ka * kb, 0.0), ra(ka, 0.0), rb(kb, 0.0);
  double n = 0;
  for (std::size_t i = 0; i < t.n_rows(); ++i) {
    if (ca[i] == kMissingCode || cb[i] == kMissingCode) continue;
    joint[ca[i] * kb + cb[i]] += 1;
    ra[ca[i]] += 1;
    rb[cb[i]] += 1;
    n += 1;
  }
  const auto present = [](const std::vector<double>& m) {
    return std::count_if(m.begin(), m.end(), [](double x) { return x > 0; });
  };
  const auto r = present(ra), c = present(rb);
  if (n == 0 || std::min(r, c) < 2) return 0.0;
  double chi2 = 0;
  for (std::size_t x = 0; x < ka; ++x) {
    for (std::size_t y = 0; y < kb; ++y) {
      const double e = ra[x] * rb[y] / n;
      if (e > 0) chi2 += (joint[x * kb + y] - e) * (joint[x * kb + y] - e) / e;
    }
  }
  return std::sqrt(chi2 / (n * static_cast<double>(std::min(r, c) - 1)));
}

double mean_cramers_v(const MicroTable& t) {
  std::vector<std::size_t> cat;
  for (std::size_t j = 0; j < t.n_cols(); ++j) {
    if (t.schema()[j].is_categorical()) cat.push_back(j);
  }
  double sum = 0;
  int pairs = 0;
  for (std::size_t x = 0; x < cat.size(); ++x) {
    for (std::size_t y = x + 1; y < cat.size(); ++y) {
      sum += cramers_v(t, cat[x], cat[y]);
      ++pairs;
    }
  }
  return pairs ? sum / pairs : 0.0;
}

}  // namespace sfe
