// Copyright 2026 The sfequiv Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <map>
#include <numeric>

#include "doctest.h"
#include "helpers.hpp"
#include "oracles.hpp"
#include "sfe/error.hpp"
#include "sfe/risk.hpp"
#include "sfe/synth.hpp"

using namespace sfe;
using sfe::test::cat;
using sfe::test::from_csv;
using sfe::test::oracle_tcap;
using sfe::test::random_table;

namespace {

std::vector<std::string> names(const MicroTable& t, std::size_t n) {
  std::vector<std::string> out;
  for (std::size_t j = 0; j < n; ++j) out.push_back(t.schema()[j].name);
  return out;
}

const Schema kToy({cat("k", {"A", "B", "C"}), cat("t", {"X", "Y"})});

}  // namespace

TEST_CASE("weap_table on unanimous and split classes") {
  auto s = from_csv("k,t\nA,X\nA,X\n", kToy);
  const std::vector<std::string> keys = {"k"};
  auto w = weap_table(s, keys, "t");
  REQUIRE(w.size() == 1);
  CHECK(w.at({0}) == WeapEntry{0, 1.0, 2});

  s = from_csv("k,t\nA,Y\nA,X\n", kToy);
  w = weap_table(s, keys, "t");
  CHECK(w.at({0}) == WeapEntry{0, 0.5, 2});  // tie goes to the lowest code
}

TEST_CASE("weap_table matches a group-by oracle on an 8-row table") {
  const Schema schema({cat("a", {"p", "q"}), cat("b", {"u", "v"}), cat("t", {"X", "Y", "Z"})});
  const auto s = from_csv(
      "a,b,t\np,u,X\np,u,Y\np,u,Y\np,v,Z\nq,u,X\nq,u,X\nq,v,\nq,v,Z\n", schema);
  const std::vector<std::string> keys = {"a", "b"};
  const auto w = weap_table(s, keys, "t");
  CHECK(w.size() == 4);
  CHECK(w.at({0, 0}) == WeapEntry{1, 2.0 / 3.0, 3});
  CHECK(w.at({0, 1}) == WeapEntry{2, 1.0, 1});
  CHECK(w.at({1, 0}) == WeapEntry{0, 1.0, 2});
  // One Z and one Missing: Missing sorts after every category.
  CHECK(w.at({1, 1}) == WeapEntry{2, 0.5, 2});
}

TEST_CASE("weap_table rejects numeric keys and empty synth") {
  const Schema schema({sfe::test::num("x"), cat("t", {"X"})});
  const auto s = from_csv("x,t\n1,X\n", schema);
  const std::vector<std::string> keys = {"x"};
  CHECK_THROWS_AS(weap_table(s, keys, "t"), Error);
  try {
    weap_table(s, keys, "t");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotCategorical);
  }
  const MicroTable empty(kToy, {Column{}, Column{}});
  const std::vector<std::string> k2 = {"k"};
  try {
    weap_table(empty, k2, "t");
    FAIL("expected EmptySynth");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::EmptySynth);
  }
}

TEST_CASE("tcap_raw worked cases") {
  const std::vector<std::string> keys = {"k"};
  const auto o = from_csv("k,t\nA,X\nA,Y\n", kToy);
  const auto s = from_csv("k,t\nA,X\nA,X\n", kToy);
  auto r = tcap_raw(o, s, keys, "t", 1.0);
  CHECK(r.raw_tcap == 0.5);
  CHECK(r.matched_fraction == 1.0);
  CHECK_FALSE(r.no_matches);

  r = tcap_raw(o, o, keys, "t", 1.0);
  CHECK(r.no_matches);  // the only class is split
  CHECK(r.raw_tcap == 0.0);
  CHECK(r.matched_fraction == 0.0);

  const auto far = from_csv("k,t\nC,X\nB,Y\n", kToy);
  r = tcap_raw(o, far, keys, "t", 1.0);
  CHECK(r.no_matches);
  CHECK(r.raw_tcap == 0.0);
}

TEST_CASE("tcap_raw of a table against itself is 1 when any class is unanimous") {
  Rng rng(3);
  const auto t = random_table(rng, 400, {6, 6, 5, 2});
  const auto keys = names(t, 3);
  const auto r = tcap_raw(t, t, keys, "V3", 1.0);
  REQUIRE_FALSE(r.no_matches);
  CHECK(r.raw_tcap == 1.0);
}

TEST_CASE("tcap_raw equals the nested-loop oracle on random pairs") {
  Rng rng(11);
  const int thresholds[][2] = {{1, 1}, {1, 2}, {2, 3}, {3, 4}};
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t nkeys = 1 + rng.uniform_index(4);
    std::vector<int> card;
    for (std::size_t j = 0; j <= nkeys; ++j) card.push_back(2 + static_cast<int>(rng.uniform_index(4)));
    const double missing = trial % 3 == 0 ? 0.1 : 0.0;
    const auto o = random_table(rng, 20 + rng.uniform_index(200), card, missing);
    auto s = random_table(rng, 20 + rng.uniform_index(200), card, missing);
    const auto& thr = thresholds[trial % 4];
    std::vector<std::size_t> key_idx(nkeys);
    std::iota(key_idx.begin(), key_idx.end(), 0);
    const auto keys = names(o, nkeys);
    const auto got = tcap_raw(o, s, keys, o.schema()[nkeys].name,
                              static_cast<double>(thr[0]) / thr[1]);
    const auto want = oracle_tcap(o, s, key_idx, nkeys, thr[0], thr[1]);
    CAPTURE(trial);
    CHECK(got.matched == want.matched);
    CHECK(got.correct == want.correct);
    CHECK(got.raw_tcap == want.raw_tcap);
    CHECK(got.matched_fraction == want.matched_fraction);
    CHECK(got.no_matches == want.no_matches);
  }
}

TEST_CASE("tcap_raw is invariant to row order") {
  Rng rng(5);
  const auto o = random_table(rng, 150, {3, 3, 4});
  const auto s = random_table(rng, 150, {3, 3, 4});
  std::vector<std::size_t> perm(150);
  std::iota(perm.rbegin(), perm.rend(), 0);
  const auto keys = names(o, 2);
  const auto a = tcap_raw(o, s, keys, "V2", 1.0);
  const auto b = tcap_raw(o.select_rows(perm), s.select_rows(perm), keys, "V2", 1.0);
  CHECK(a.raw_tcap == b.raw_tcap);
  CHECK(a.matched == b.matched);
}

TEST_CASE("baseline_cap") {
  const Schema schema({cat("k", {"A"}), cat("t", {"X", "Y"})});
  CHECK(baseline_cap(from_csv("k,t\nA,X\nA,Y\n", schema), "t") == 0.5);
  CHECK(baseline_cap(from_csv("k,t\nA,X\nA,X\n", schema), "t") == 1.0);
  CHECK(baseline_cap(from_csv("k,t\nA,X\nA,X\nA,X\nA,Y\n", schema), "t") == 0.625);
  // Missing counts as its own category.
  CHECK(baseline_cap(from_csv("k,t\nA,X\nA,\n", schema), "t") == 0.5);
}

TEST_CASE("marginal_tcap") {
  CHECK(marginal_tcap(1.0, 0.5) == 1.0);
  CHECK(marginal_tcap(0.5, 0.5) == 0.0);
  CHECK(marginal_tcap(0.4, 0.5) == doctest::Approx(-0.2).epsilon(1e-15));
  CHECK_THROWS_AS(marginal_tcap(1.0, 1.0), Error);
  double prev = -1e9;
  for (double raw = 0.0; raw <= 1.0; raw += 0.05) {
    const double m = marginal_tcap(raw, 0.3);
    CHECK(m > prev);
    prev = m;
  }
}

TEST_CASE("AttackConfig validation") {
  const Schema schema({cat("a", {"x"}), cat("b", {"x"}), cat("c", {"x"}), sfe::test::num("n")});
  AttackConfig cfg;
  cfg.keys = {"a", "b"};
  cfg.targets = {"c"};
  cfg.key_sizes = {1, 2};
  CHECK_NOTHROW(cfg.validate(schema));

  auto bad = cfg;
  bad.key_sizes = {3};
  CHECK_THROWS_AS(bad.validate(schema), Error);
  bad = cfg;
  bad.targets = {"a"};
  CHECK_THROWS_AS(bad.validate(schema), Error);
  bad = cfg;
  bad.keys = {"a", "a"};
  CHECK_THROWS_AS(bad.validate(schema), Error);
  bad = cfg;
  bad.keys = {"a", "zzz"};
  CHECK_THROWS_AS(bad.validate(schema), Error);
  bad = cfg;
  bad.keys = {"a", "n"};
  try {
    bad.validate(schema);
    FAIL("numeric key without binning accepted");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::MissingBinning);
  }
  bad.binning["n"] = NumericBinning{};
  CHECK_NOTHROW(bad.validate(schema));
  bad = cfg;
  bad.weap_threshold = 0.0;
  CHECK_THROWS_AS(bad.validate(schema), Error);
}

TEST_CASE("overall_risk") {
  const auto& t = sfe::test::correlated_fixture();
  AttackConfig cfg;
  cfg.keys = {"N1", "C5", "C4", "C3", "C2", "C1"};
  cfg.targets = {"C6"};
  cfg.binning["N1"] = NumericBinning{NumericBinning::Method::Width, 10, 5.0, 0.0, {}};

  SUBCASE("identity gives exactly 1") {
    const auto r = overall_risk(t, t, cfg);
    CHECK(r.marginal == 1.0);
    CHECK(r.pairs.size() == 4);
    CHECK(r.no_match_pairs == 0);
  }
  SUBCASE("single pair is its own mean") {
    auto one = cfg;
    one.key_sizes = {3};
    const auto s = synth_independent(t, t.n_rows(), 1);
    const auto r = overall_risk(t, s, one);
    REQUIRE(r.pairs.size() == 1);
    CHECK(r.marginal == r.pairs[0].marginal);
  }
  SUBCASE("independent marginals destroy the association") {
    // Single seeds scatter by about 0.1 because few records match at 3 and
    // 4 keys; the five-seed mean sits near 0.
    double sum = 0.0;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      const auto s = synth_independent(t, t.n_rows(), seed);
      sum += overall_risk(t, s, cfg).marginal;
    }
    CHECK(std::abs(sum / 5.0) < 0.1);
  }
  SUBCASE("baseline ignores the keys") {
    auto fewer = cfg;
    fewer.keys = {"N1", "C5", "C4"};
    fewer.key_sizes = {3};
    CHECK(overall_risk(t, t, fewer).baseline == overall_risk(t, t, cfg).baseline);
  }
}
