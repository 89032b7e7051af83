// Copyright 2026 The sfequiv Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "sfe/evaluation.hpp"
#include "sfe/sampling.hpp"

namespace sfe {

struct CurveOptions {
  int jobs = 0;                    // worker cap; 0 = OpenMP default
  bool store_replicates = false;   // keep per-replicate scores
};

// Sample reference curve: for every grid fraction, `plan.replicates`
// samples are drawn and scored against the full original with `evaluator`.
// Replicates run in parallel; results are reduced in (fraction, replicate)
// order so the output does not depend on scheduling. Errors carry the
// (fraction, replicate) that failed.
RUCurve build_curve(const Evaluator& evaluator, const FractionGrid& grid,
                    const ReplicatePlan& plan, const CurveOptions& opts = {});

RUCurve build_curve(const MicroTable& t, const FractionGrid& grid,
                    const ReplicatePlan& plan, const EvaluationConfig& cfg,
                    const CurveOptions& opts = {});

// Single-threaded reference implementation of build_curve, kept for tests
// and benchmarks. Produces bit-identical output.
RUCurve build_curve_serial(const Evaluator& evaluator, const FractionGrid& grid,
                           const ReplicatePlan& plan,
                           const CurveOptions& opts = {});

}  // namespace sfe
