// Copyright 2026 The sfequiv Authors
// SPDX-License-Identifier: Apache-2.0

// Reference-curve construction: serial reference against the OpenMP build.

#include <benchmark/benchmark.h>

#include "sfe/curve.hpp"
#include "sfe/evaluation.hpp"
#include "sfe/fixture.hpp"

namespace {

const sfe::MicroTable& population() {
  static const sfe::MicroTable t = [] {
    sfe::FixtureParams p;
    p.n = 10000;
    p.dependence = 0.8;
    p.seed = 7;
    return sfe::make_fixture(p);
  }();
  return t;
}

sfe::EvaluationConfig config() {
  sfe::EvaluationConfig cfg;
  cfg.attack.keys = {"N1", "C5", "C4", "C3", "C2", "C1"};
  cfg.attack.targets = {"C6", "N2"};
  cfg.attack.binning["N1"] = {sfe::NumericBinning::Method::Width, 10, 5.0, 0.0, {}};
  cfg.attack.binning["N2"] = {sfe::NumericBinning::Method::Quantile, 5, 1.0, 0.0, {}};
  cfg.utility.regressions = {{"c1_is_1", "C1", {"1"}, {"C2", "C3", "C4", "N1", "N2"}},
                             {"c6_low", "C6", {"1", "2"}, {"C2", "C3", "C5", "N1"}}};
  cfg.utility.on_fit_failure = sfe::FitFailurePolicy::Zero;
  cfg.plan.replicates = 10;
  cfg.plan.base_seed = 1;
  return cfg;
}

const sfe::FractionGrid kGrid{{0.01, 0.05, 0.1, 0.3, 0.5}};

void BM_CurveSerial(benchmark::State& state) {
  const auto cfg = config();
  const sfe::Evaluator ev(population(), cfg);
  for (auto _ : state) {
    benchmark::DoNotOptimize(sfe::build_curve_serial(ev, kGrid, cfg.plan));
  }
}

void BM_CurveParallel(benchmark::State& state) {
  const auto cfg = config();
  const sfe::Evaluator ev(population(), cfg);
  sfe::CurveOptions opts;
  opts.jobs = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(sfe::build_curve(ev, kGrid, cfg.plan, opts));
  }
}

}  // namespace

BENCHMARK(BM_CurveSerial)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_CurveParallel)
    ->Arg(1)
    ->Arg(2)
    ->Arg(4)
    ->Arg(8)
    ->Unit(benchmark::kMillisecond)
    ->UseRealTime();

BENCHMARK_MAIN();
