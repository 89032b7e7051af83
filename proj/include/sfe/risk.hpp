// Copyright 2026 The sfequiv Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "sfe/binning.hpp"
#include "sfe/table.hpp"

namespace sfe {

// Attribution attack sweep. Key set of size k uses the first k keys.
struct AttackConfig {
  std::vector<std::string> keys;
  std::vector<std::string> targets;
  std::vector<int> key_sizes = {3, 4, 5, 6};
  double weap_threshold = 1.0;
  // Binning for numeric keys or targets; fitted on the original table.
  BinningMap binning;

  // Throws Error(InvalidConfig / UnknownVariable / MissingBinning).
  void validate(const Schema& schema) const;
};

// Key tuples and targets are expressed as category codes, with Missing
// encoded as the variable's category count (so it sorts last).
using KeyTuple = std::vector<std::int32_t>;

struct WeapEntry {
  std::int32_t modal_target = 0;
  double weap = 0.0;
  std::size_t count = 0;

  bool operator==(const WeapEntry&) const = default;
};

// Per synthetic key class: most frequent target (ties to the lowest code),
// its within-class share and the class size. Keys and target must be
// categorical (Error NotCategorical); synth must be non-empty (EmptySynth).
std::map<KeyTuple, WeapEntry> weap_table(const MicroTable& synth,
                                         std::span<const std::string> keys,
                                         const std::string& target);

struct TcapResult {
  double raw_tcap = 0.0;
  double matched_fraction = 0.0;
  std::size_t matched = 0;
  std::size_t correct = 0;
  bool no_matches = false;
};

// Raw TCAP of `original` records attacked through `synth`. Both tables must
// share a schema; keys and target categorical.
TcapResult tcap_raw(const MicroTable& original, const MicroTable& synth,
                    std::span<const std::string> keys,
                    const std::string& target, double weap_threshold);

// Sum of squared target proportions in the original (Missing a category).
double baseline_cap(const MicroTable& original, const std::string& target);

// (raw - baseline) / (1 - baseline). Error DegenerateBaseline at baseline 1.
double marginal_tcap(double raw, double baseline);

struct PairRisk {
  std::string target;
  int key_size = 0;
  double raw_tcap = 0.0;
  double baseline = 0.0;
  double marginal = 0.0;
  double matched_fraction = 0.0;
  bool no_matches = false;
};

// Means over the (target x key size) sweep; per-pair values in `pairs`.
struct RiskScore {
  double raw_tcap = 0.0;
  double baseline = 0.0;
  double marginal = 0.0;
  double matched_fraction = 0.0;
  std::size_t no_match_pairs = 0;
  std::vector<PairRisk> pairs;
};

// Precomputes the original side of the attack (key classes and baselines)
// so that many synthetic or sample tables can be scored against it.
class TcapAttack {
 public:
  // key_vars in order; class ids are built for every prefix length.
  TcapAttack(const MicroTable& original, std::vector<std::size_t> key_vars);

  std::size_t max_keys() const { return key_vars_.size(); }

  // Class ids of synth rows for every prefix (index k-1), -1 when the
  // tuple never occurs in the original.
  std::vector<std::vector<std::int32_t>> classify(const MicroTable& synth) const;

  TcapResult score(std::span<const std::vector<std::int32_t>> synth_classes,
                   const MicroTable& synth, std::size_t key_size,
                   std::size_t target_var, double weap_threshold) const;

 private:
  MicroTable original_;
  std::vector<std::size_t> key_vars_;
  // step k: (previous id << 32 | level) -> id
  std::vector<std::unordered_map<std::uint64_t, std::int32_t>> refine_;
  std::vector<std::vector<std::int32_t>> original_classes_;
  std::vector<std::int32_t> class_counts_;
};

class RiskEvaluator {
 public:
  // Throws on invalid config.
  RiskEvaluator(const MicroTable& original, AttackConfig cfg);

  RiskScore score(const MicroTable& synth) const;

 private:
  AttackConfig cfg_;
  Discretizer discretizer_;
  Schema schema_;
  std::vector<std::size_t> target_vars_;
  std::vector<double> baselines_;
  std::optional<TcapAttack> attack_;
};

RiskScore overall_risk(const MicroTable& original, const MicroTable& synth,
                       const AttackConfig& cfg);

}  // namespace sfe
