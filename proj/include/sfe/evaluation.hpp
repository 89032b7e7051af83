// Copyright 2026 The sfequiv Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <optional>
#include <vector>

#include "sfe/risk.hpp"
#include "sfe/sampling.hpp"
#include "sfe/table.hpp"
#include "sfe/utility.hpp"

namespace sfe {

struct EvaluationConfig {
  std::filesystem::path schema_path;
  AttackConfig attack;
  UtilityConfig utility;
  FractionGrid grid = FractionGrid::standard();
  ReplicatePlan plan;
  int synth_replicates = 5;

  void validate(const Schema& schema) const;
};

struct Scores {
  UtilityScore utility;
  RiskScore risk;
};

// The single scoring pipeline applied to synthetic tables and to samples
// alike: both are compared against the full original. Thread-safe.
class Evaluator {
 public:
  Evaluator(const MicroTable& original, const EvaluationConfig& cfg);

  Scores evaluate(const MicroTable& candidate) const;
  CioResult cio_detail(const MicroTable& candidate) const {
    return utility_.cio(candidate);
  }
  const MicroTable& original() const { return original_; }

 private:
  MicroTable original_;
  RiskEvaluator risk_;
  UtilityEvaluator utility_;
};

}  // namespace sfe
