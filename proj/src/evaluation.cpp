// Copyright 2026 The sfequiv Authors
// SPDX-License-Identifier: Apache-2.0

#include "sfe/evaluation.hpp"

#include "sfe/error.hpp"

namespace sfe {

void EvaluationConfig::validate(const Schema& schema) const {
  attack.validate(schema);
  utility.validate(schema);
  grid.validate();
  plan.validate();
  if (synth_replicates < 1) {
    throw Error(ErrorCode::InvalidConfig, "synthesis replicates must be >= 1");
  }
}

Evaluator::Evaluator(const MicroTable& original, const EvaluationConfig& cfg)
    : original_(original),
      risk_(original, cfg.attack),
      utility_(original, cfg.utility) {}

Scores Evaluator::evaluate(const MicroTable& candidate) const {
  if (candidate.empty()) {
    throw Error(ErrorCode::EmptySynth, "candidate table is empty");
  }
  return {utility_.score(candidate), risk_.score(candidate)};
}

}  // namespace sfe
