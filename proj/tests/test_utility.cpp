// Copyright 2026 The sfequiv Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <numbers>

#include "doctest.h"
#include "helpers.hpp"
#include "sfe/error.hpp"
#include "sfe/logistic.hpp"
#include "sfe/sampling.hpp"
#include "sfe/synth.hpp"
#include "sfe/utility.hpp"

using namespace sfe;
using sfe::test::cat;
using sfe::test::from_csv;

namespace {

double normal(Rng& rng) {
  const double u1 = 1.0 - rng.uniform01();
  const double u2 = rng.uniform01();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

struct Simulated {
  Eigen::MatrixXd X;
  Eigen::VectorXd y;
};

Simulated simulate(std::uint64_t seed, std::size_t n, const Eigen::VectorXd& beta) {
  Rng rng(seed);
  Simulated s{Eigen::MatrixXd(n, 3), Eigen::VectorXd(n)};
  for (std::size_t i = 0; i < n; ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    s.X(r, 0) = 1.0;
    s.X(r, 1) = normal(rng);
    s.X(r, 2) = rng.uniform01() < 0.4 ? 1.0 : 0.0;
    const double eta = s.X.row(r).dot(beta);
    s.y(r) = rng.uniform01() < 1.0 / (1.0 + std::exp(-eta)) ? 1.0 : 0.0;
  }
  return s;
}

std::vector<RegressionSpec> fixture_models() {
  return {{"c1_is_1", "C1", {"1"}, {"C2", "C3", "C4", "N1", "N2"}},
          {"c6_low", "C6", {"1", "2"}, {"C2", "C3", "C5", "N1"}}};
}

UtilityConfig fixture_utility() {
  UtilityConfig cfg;
  cfg.regressions = fixture_models();
  return cfg;
}

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error thrown");
  return ErrorCode::InvalidConfig;
}

}  // namespace

TEST_CASE("roc_cell") {
  CHECK(roc_cell(0.2, 0.2) == 1.0);
  CHECK(roc_cell(0.5, 0.25) == 0.5);
  CHECK(roc_cell(0.3, 0.0) == 0.0);
  CHECK(roc_cell(0.0, 0.0) == 1.0);
  CHECK(code_of([] { roc_cell(-0.1, 0.2); }) == ErrorCode::NegativeInput);
  Rng rng(1);
  for (int i = 0; i < 100; ++i) {
    const double a = rng.uniform01(), b = rng.uniform01(), k = 0.1 + 5 * rng.uniform01();
    CHECK(roc_cell(a, b) == roc_cell(b, a));
    CHECK(roc_cell(k * a, k * b) == doctest::Approx(roc_cell(a, b)).epsilon(1e-12));
  }
}

TEST_CASE("roc_univariate worked cases") {
  const Schema schema({cat("a", {"x", "y"}), cat("b", {"u", "v", "w"})});
  const auto o = from_csv("a,b\nx,u\ny,v\nx,u\ny,v\n", schema);
  const auto s = from_csv("a,b\nx,u\ny,v\ny,v\ny,w\n", schema);
  const std::vector<std::string> a = {"a"};
  CHECK(roc_univariate(o, o, a, {}) == 1.0);
  // (0.5, 0.5) against (0.25, 0.75).
  CHECK(roc_univariate(o, s, a, {}) == doctest::Approx((0.5 + 0.5 / 0.75) / 2).epsilon(1e-15));
  // b: u 0.5/0.25, v 0.5/0.5, w absent in the original scores 0.
  const std::vector<std::string> b = {"b"};
  CHECK(roc_univariate(o, s, b, {}) == doctest::Approx((0.5 + 1.0 + 0.0) / 3).epsilon(1e-15));
}

TEST_CASE("roc_bivariate worked cases") {
  const Schema schema({cat("a", {"x", "y"}), cat("b", {"u", "v"})});
  const auto o = from_csv("a,b\nx,u\nx,v\ny,u\ny,v\n", schema);
  const auto s = from_csv("a,b\nx,u\nx,u\nx,v\nx,v\ny,u\ny,u\ny,v\ny,v\n", schema);
  const std::vector<std::string> vars = {"a", "b"};
  CHECK(roc_bivariate(o, o, vars, {}) == 1.0);
  CHECK(roc_bivariate(o, s, vars, {}) == 1.0);
}

TEST_CASE("roc is invariant to row order and replication") {
  Rng rng(4);
  const auto o = sfe::test::random_table(rng, 200, {3, 4, 2}, 0.05);
  const auto s = sfe::test::random_table(rng, 150, {3, 4, 2}, 0.05);
  std::vector<std::size_t> twice, reversed;
  for (std::size_t i = 0; i < s.n_rows(); ++i) {
    twice.push_back(i);
    twice.push_back(i);
    reversed.push_back(s.n_rows() - 1 - i);
  }
  const std::vector<std::string> vars = {"V0", "V1", "V2"};
  const double u = roc_univariate(o, s, vars, {});
  const double b = roc_bivariate(o, s, vars, {});
  CHECK(roc_univariate(o, s.select_rows(twice), vars, {}) == doctest::Approx(u).epsilon(1e-14));
  CHECK(roc_bivariate(o, s.select_rows(reversed), vars, {}) == doctest::Approx(b).epsilon(1e-14));
}

TEST_CASE("roc needs a binning for numeric variables") {
  const Schema schema({sfe::test::num("x"), cat("a", {"p"})});
  const auto t = from_csv("x,a\n1,p\n2,p\n", schema);
  const std::vector<std::string> vars = {"x"};
  CHECK(code_of([&] { roc_univariate(t, t, vars, {}); }) == ErrorCode::MissingBinning);
  const BinningMap binning = {{"default", NumericBinning{}}};
  CHECK(roc_univariate(t, t, vars, binning) == 1.0);
}

TEST_CASE("independent marginals keep univariate ROC and break bivariate ROC") {
  const auto& t = sfe::test::correlated_fixture();
  const auto s = synth_independent(t, t.n_rows(), 3);
  const std::vector<std::string> vars = {"C1", "C2", "C3", "C4", "C5", "C6", "N1", "N2"};
  const BinningMap binning = {{"default", NumericBinning{}}};
  CHECK(roc_bivariate(t, s, vars, binning) < roc_univariate(t, s, vars, binning));
}

TEST_CASE("ci_overlap") {
  CHECK(ci_overlap({0, 2}, {0, 2}) == 1.0);
  CHECK(ci_overlap({0, 2}, {1, 3}) == 0.5);
  CHECK(ci_overlap({0, 1}, {2, 3}) == -1.0);
  CHECK(code_of([] { ci_overlap({1, 1}, {0, 2}); }) == ErrorCode::ZeroWidthInterval);
}

TEST_CASE("fit_logistic recovers known coefficients") {
  Eigen::VectorXd beta(3);
  beta << -0.5, 1.0, 0.8;
  const auto s = simulate(17, 5000, beta);
  const auto fit = fit_logistic(s.X, s.y);
  CHECK(fit.converged);
  CHECK(fit.score.cwiseAbs().maxCoeff() < 1e-8);
  for (int k = 0; k < 3; ++k) {
    CHECK(std::abs(fit.coefficients(k) - beta(k)) < 3 * fit.standard_errors(k));
  }
  // Independent check of the returned score.
  const Eigen::VectorXd p =
      (1.0 + (-(s.X * fit.coefficients).array()).exp()).inverse().matrix();
  CHECK((s.X.transpose() * (s.y - p)).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("fit_logistic null model") {
  Rng rng(2);
  Eigen::MatrixXd X(400, 2);
  Eigen::VectorXd y(400);
  for (int i = 0; i < 400; ++i) {
    X(i, 0) = 1;
    X(i, 1) = normal(rng);
    y(i) = i % 2;
  }
  const auto fit = fit_logistic(X, y);
  CHECK(std::abs(fit.coefficients(0)) < 3 * fit.standard_errors(0));
}

TEST_CASE("standard errors match a finite-difference Hessian") {
  Eigen::VectorXd beta(3);
  beta << 0.3, -0.7, 0.5;
  const auto s = simulate(99, 500, beta);
  const auto fit = fit_logistic(s.X, s.y);
  const double h = 1e-4;
  Eigen::MatrixXd H(3, 3);
  const auto& b0 = fit.coefficients;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      Eigen::VectorXd pp = b0, pm = b0, mp = b0, mm = b0;
      pp(i) += h; pp(j) += h;
      pm(i) += h; pm(j) -= h;
      mp(i) -= h; mp(j) += h;
      mm(i) -= h; mm(j) -= h;
      H(i, j) = (logistic_log_likelihood(s.X, s.y, pp) - logistic_log_likelihood(s.X, s.y, pm) -
                 logistic_log_likelihood(s.X, s.y, mp) + logistic_log_likelihood(s.X, s.y, mm)) /
                (4 * h * h);
    }
  }
  const Eigen::MatrixXd cov = (-H).inverse();
  for (int k = 0; k < 3; ++k) {
    CHECK(fit.standard_errors(k) == doctest::Approx(std::sqrt(cov(k, k))).epsilon(1e-4));
  }
}

TEST_CASE("fit_logistic failure modes") {
  Eigen::MatrixXd X(20, 2);
  Eigen::VectorXd y(20);
  for (int i = 0; i < 20; ++i) {
    X(i, 0) = 1;
    X(i, 1) = i - 9.5;
    y(i) = i >= 10;
  }
  CHECK(code_of([&] { fit_logistic(X, y); }) == ErrorCode::Separation);

  Eigen::MatrixXd dup(20, 3);
  dup << X, X.col(1) * 2.0;
  for (int i = 0; i < 20; ++i) y(i) = (i * 7) % 3 == 0;
  CHECK(code_of([&] { fit_logistic(dup, y); }) == ErrorCode::RankDeficient);

  CHECK(code_of([&] { fit_logistic(X.topRows(2), y.head(2)); }) == ErrorCode::RankDeficient);
}

TEST_CASE("cio on the fixture") {
  const auto& t = sfe::test::correlated_fixture();
  const auto models = fixture_models();
  CHECK(cio_score(t, t, models) == 1.0);

  const auto ind = synth_independent(t, t.n_rows(), 5);
  double half = 0.0;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    half += cio_score(t, draw_sample(t, 0.5, seed), models);
  }
  CHECK(cio_score(t, ind, models) < half / 5);

  const auto detail = cio_detail(t, ind, models);
  REQUIRE(detail.model_scores.size() == 2);
  bool negative = false;
  for (const auto& term : detail.terms) negative = negative || term.overlap < 0;
  CHECK(negative);  // raw values are kept unclamped
  for (double m : detail.model_scores) CHECK(m >= 0.0);
}

TEST_CASE("a failed fit follows the configured policy") {
  const auto& t = sfe::test::correlated_fixture();
  // C1 copies C2 == "1" in the synthetic table: perfect separation.
  auto cols = std::vector<Column>();
  for (std::size_t j = 0; j < t.n_cols(); ++j) cols.push_back(t.column(j));
  const auto c1 = t.schema().index_of("C1");
  const auto c2 = t.schema().index_of("C2");
  for (std::size_t i = 0; i < t.n_rows(); ++i) {
    cols[c1].codes[i] = cols[c2].codes[i] == 0 ? 0 : 1;
  }
  const MicroTable broken(t.schema(), std::move(cols));

  auto cfg = fixture_utility();
  const UtilityEvaluator strict(t, cfg);
  CHECK(code_of([&] { strict.score(broken); }) == ErrorCode::Separation);

  cfg.on_fit_failure = FitFailurePolicy::Zero;
  const UtilityEvaluator lenient(t, cfg);
  const auto cio = lenient.cio(broken);
  REQUIRE(cio.model_scores.size() == 2);
  CHECK(cio.model_scores[0] == 0.0);
  CHECK(cio.model_scores[1] > 0.0);
  CHECK_FALSE(cio.warnings.empty());
}

TEST_CASE("overall utility") {
  CHECK(combine_utility(0.9, 0.8, 0.7, {}) == doctest::Approx(0.8).epsilon(1e-15));
  Rng rng(8);
  for (int i = 0; i < 50; ++i) {
    const double a = rng.uniform01(), b = rng.uniform01(), c = rng.uniform01();
    const UtilityWeights w{rng.uniform01(), rng.uniform01(), 0.1 + rng.uniform01()};
    const double o = combine_utility(a, b, c, w);
    CHECK(o >= std::min({a, b, c}) - 1e-15);
    CHECK(o <= std::max({a, b, c}) + 1e-15);
  }

  const auto& t = sfe::test::correlated_fixture();
  const auto cfg = fixture_utility();
  const auto self = overall_utility(t, t, cfg);
  CHECK(self.overall == doctest::Approx(1.0).epsilon(1e-9));

  const UtilityEvaluator ev(t, cfg);
  const MicroTable empty(t.schema(), std::vector<Column>(t.n_cols()));
  CHECK(code_of([&] { ev.score(empty); }) == ErrorCode::EmptySynth);
}

TEST_CASE("utility config validation") {
  const auto& t = sfe::test::correlated_fixture();
  auto cfg = fixture_utility();
  CHECK_NOTHROW(cfg.validate(t.schema()));
  auto bad = cfg;
  bad.regressions[0].predictors.push_back("C1");  // target among predictors
  CHECK_THROWS_AS(bad.validate(t.schema()), Error);
  bad = cfg;
  bad.regressions[0].positive = {"9"};
  CHECK_THROWS_AS(bad.validate(t.schema()), Error);
  bad = cfg;
  bad.weights = {0, 0, 0};
  CHECK_THROWS_AS(bad.validate(t.schema()), Error);
  bad = cfg;
  bad.weights.roc_bivariate = -1;
  CHECK_THROWS_AS(bad.validate(t.schema()), Error);
  bad = cfg;
  bad.roc_variables = {"nope"};
  CHECK_THROWS_AS(bad.validate(t.schema()), Error);
}
