// Copyright 2026 The sfequiv Authors
// SPDX-License-Identifier: Apache-2.0

#include "sfe/risk.hpp"

#include <algorithm>
#include <set>

#include "sfe/error.hpp"

namespace sfe {

namespace {

std::size_t categorical_index(const Schema& schema, const std::string& name) {
  const auto j = schema.index_of(name);
  if (!schema[j].is_categorical()) {
    throw Error(ErrorCode::NotCategorical,
                name + " is numeric; bin it before use as a key or target");
  }
  return j;
}

// Category code with Missing mapped past the last category.
inline std::int32_t level(std::int32_t code, std::size_t n_categories) {
  return code == kMissingCode ? static_cast<std::int32_t>(n_categories) : code;
}

bool retained(std::size_t modal_count, std::size_t total, double threshold) {
  return static_cast<double>(modal_count) >=
         threshold * static_cast<double>(total) - 1e-9;
}

}  // namespace

void AttackConfig::validate(const Schema& schema) const {
  if (keys.empty()) throw Error(ErrorCode::InvalidConfig, "attack has no keys");
  if (keys.size() > 6) {
    throw Error(ErrorCode::InvalidConfig, "attack allows at most 6 keys");
  }
  if (targets.empty()) {
    throw Error(ErrorCode::InvalidConfig, "attack has no targets");
  }
  if (std::set<std::string>(keys.begin(), keys.end()).size() != keys.size()) {
    throw Error(ErrorCode::InvalidConfig, "attack keys are not distinct");
  }
  if (std::set<std::string>(targets.begin(), targets.end()).size() !=
      targets.size()) {
    throw Error(ErrorCode::InvalidConfig, "attack targets are not distinct");
  }
  if (key_sizes.empty()) {
    throw Error(ErrorCode::InvalidConfig, "attack has no key sizes");
  }
  for (int k : key_sizes) {
    if (k < 1 || static_cast<std::size_t>(k) > keys.size()) {
      throw Error(ErrorCode::InvalidConfig,
                  "key size " + std::to_string(k) + " outside 1.." +
                      std::to_string(keys.size()));
    }
  }
  if (!(weap_threshold > 0.0 && weap_threshold <= 1.0)) {
    throw Error(ErrorCode::InvalidConfig, "weap_threshold must be in (0, 1]");
  }
  const int largest = *std::max_element(key_sizes.begin(), key_sizes.end());
  for (const auto& t : targets) {
    auto used_end = keys.begin() + largest;
    if (std::find(keys.begin(), used_end, t) != used_end) {
      throw Error(ErrorCode::InvalidConfig,
                  "target " + t + " is also one of its keys");
    }
  }
  auto check_var = [&](const std::string& name) {
    const auto j = schema.index_of(name);
    if (!schema[j].is_categorical() && !find_binning(binning, name)) {
      throw Error(ErrorCode::MissingBinning,
                  "numeric attack variable " + name + " needs a binning");
    }
  };
  for (const auto& k : keys) check_var(k);
  for (const auto& t : targets) check_var(t);
}

std::map<KeyTuple, WeapEntry> weap_table(const MicroTable& synth,
                                         std::span<const std::string> keys,
                                         const std::string& target) {
  const auto& schema = synth.schema();
  std::vector<std::size_t> kv;
  for (const auto& k : keys) kv.push_back(categorical_index(schema, k));
  const auto tv = categorical_index(schema, target);
  if (synth.empty()) throw Error(ErrorCode::EmptySynth, "synthetic table is empty");

  const std::size_t n_target = schema[tv].categories.size() + 1;
  std::map<KeyTuple, std::vector<std::size_t>> counts;
  KeyTuple tuple(kv.size());
  const auto tcodes = synth.codes(tv);
  for (std::size_t i = 0; i < synth.n_rows(); ++i) {
    for (std::size_t k = 0; k < kv.size(); ++k) {
      tuple[k] = level(synth.codes(kv[k])[i], schema[kv[k]].categories.size());
    }
    auto& c = counts[tuple];
    if (c.empty()) c.assign(n_target, 0);
    ++c[static_cast<std::size_t>(level(tcodes[i], n_target - 1))];
  }
  std::map<KeyTuple, WeapEntry> out;
  for (const auto& [key, c] : counts) {
    const auto it = std::max_element(c.begin(), c.end());
    std::size_t total = 0;
    for (auto x : c) total += x;
    out.emplace(key, WeapEntry{static_cast<std::int32_t>(it - c.begin()),
                               static_cast<double>(*it) / total, total});
  }
  return out;
}

TcapAttack::TcapAttack(const MicroTable& original,
                       std::vector<std::size_t> key_vars)
    : original_(original), key_vars_(std::move(key_vars)) {
  const auto& schema = original.schema();
  const std::size_t n = original.n_rows();
  refine_.resize(key_vars_.size());
  original_classes_.resize(key_vars_.size());
  class_counts_.resize(key_vars_.size());
  std::vector<std::int32_t> prev(n, 0);
  for (std::size_t k = 0; k < key_vars_.size(); ++k) {
    const auto j = key_vars_[k];
    if (!schema[j].is_categorical()) {
      throw Error(ErrorCode::NotCategorical, schema[j].name + " is numeric");
    }
    const auto codes = original.codes(j);
    const auto ncat = schema[j].categories.size();
    auto& map = refine_[k];
    auto& cls = original_classes_[k];
    cls.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      const std::uint64_t key =
          (static_cast<std::uint64_t>(prev[i]) << 32) |
          static_cast<std::uint32_t>(level(codes[i], ncat));
      auto [it, inserted] =
          map.try_emplace(key, static_cast<std::int32_t>(map.size()));
      cls[i] = it->second;
    }
    class_counts_[k] = static_cast<std::int32_t>(map.size());
    prev = cls;
  }
}

std::vector<std::vector<std::int32_t>> TcapAttack::classify(
    const MicroTable& synth) const {
  const auto& schema = synth.schema();
  const std::size_t n = synth.n_rows();
  std::vector<std::vector<std::int32_t>> out(key_vars_.size());
  std::vector<std::int32_t> prev(n, 0);
  for (std::size_t k = 0; k < key_vars_.size(); ++k) {
    const auto j = key_vars_[k];
    const auto codes = synth.codes(j);
    const auto ncat = schema[j].categories.size();
    const auto& map = refine_[k];
    auto& cls = out[k];
    cls.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      if (prev[i] < 0) {
        cls[i] = -1;
        continue;
      }
      const std::uint64_t key =
          (static_cast<std::uint64_t>(prev[i]) << 32) |
          static_cast<std::uint32_t>(level(codes[i], ncat));
      const auto it = map.find(key);
      cls[i] = it == map.end() ? -1 : it->second;
    }
    prev = cls;
  }
  return out;
}

TcapResult TcapAttack::score(
    std::span<const std::vector<std::int32_t>> synth_classes,
    const MicroTable& synth, std::size_t key_size, std::size_t target_var,
    double weap_threshold) const {
  const auto& schema = original_.schema();
  const std::size_t n_target = schema[target_var].categories.size() + 1;
  const std::size_t ncls = static_cast<std::size_t>(class_counts_[key_size - 1]);
  const auto& scls = synth_classes[key_size - 1];
  const auto& ocls = original_classes_[key_size - 1];

  std::vector<std::uint32_t> counts(ncls * n_target, 0);
  const auto stcodes = synth.codes(target_var);
  for (std::size_t i = 0; i < scls.size(); ++i) {
    if (scls[i] < 0) continue;
    const auto t = static_cast<std::size_t>(level(stcodes[i], n_target - 1));
    ++counts[static_cast<std::size_t>(scls[i]) * n_target + t];
  }
  // Retained modal target per class, -1 when the class is absent from the
  // synthetic data or fails the WEAP threshold.
  std::vector<std::int32_t> modal(ncls, -1);
  for (std::size_t c = 0; c < ncls; ++c) {
    const auto* row = &counts[c * n_target];
    std::size_t total = 0, best = 0;
    std::int32_t arg = 0;
    for (std::size_t t = 0; t < n_target; ++t) {
      total += row[t];
      if (row[t] > best) {
        best = row[t];
        arg = static_cast<std::int32_t>(t);
      }
    }
    if (total > 0 && retained(best, total, weap_threshold)) modal[c] = arg;
  }

  TcapResult r;
  const auto otcodes = original_.codes(target_var);
  for (std::size_t i = 0; i < ocls.size(); ++i) {
    const auto m = modal[static_cast<std::size_t>(ocls[i])];
    if (m < 0) continue;
    ++r.matched;
    if (level(otcodes[i], n_target - 1) == m) ++r.correct;
  }
  if (r.matched == 0) {
    r.no_matches = true;
    return r;
  }
  r.raw_tcap = static_cast<double>(r.correct) / static_cast<double>(r.matched);
  r.matched_fraction =
      static_cast<double>(r.matched) / static_cast<double>(ocls.size());
  return r;
}

TcapResult tcap_raw(const MicroTable& original, const MicroTable& synth,
                    std::span<const std::string> keys,
                    const std::string& target, double weap_threshold) {
  if (!same_schema(original, synth)) {
    throw Error(ErrorCode::SchemaMismatch,
                "original and synthetic schemas differ; harmonize first");
  }
  if (original.empty()) throw Error(ErrorCode::EmptyTable, "original is empty");
  const auto& schema = original.schema();
  std::vector<std::size_t> kv;
  for (const auto& k : keys) kv.push_back(categorical_index(schema, k));
  const auto tv = categorical_index(schema, target);
  TcapAttack attack(original, kv);
  const auto classes = attack.classify(synth);
  return attack.score(classes, synth, kv.size(), tv, weap_threshold);
}

double baseline_cap(const MicroTable& original, const std::string& target) {
  const auto tv = categorical_index(original.schema(), target);
  if (original.empty()) throw Error(ErrorCode::EmptyTable, "original is empty");
  const std::size_t ncat = original.schema()[tv].categories.size();
  std::vector<std::size_t> counts(ncat + 1, 0);
  for (auto c : original.codes(tv)) ++counts[static_cast<std::size_t>(level(c, ncat))];
  const double n = static_cast<double>(original.n_rows());
  double sum = 0.0;
  for (auto c : counts) {
    const double p = static_cast<double>(c) / n;
    sum += p * p;
  }
  return sum;
}

double marginal_tcap(double raw, double baseline) {
  if (baseline >= 1.0) {
    throw Error(ErrorCode::DegenerateBaseline,
                "baseline of 1 leaves no room above it");
  }
  return (raw - baseline) / (1.0 - baseline);
}

RiskEvaluator::RiskEvaluator(const MicroTable& original, AttackConfig cfg)
    : cfg_(std::move(cfg)) {
  cfg_.validate(original.schema());
  if (original.empty()) throw Error(ErrorCode::EmptyTable, "original is empty");
  std::vector<std::string> vars = cfg_.keys;
  vars.insert(vars.end(), cfg_.targets.begin(), cfg_.targets.end());
  discretizer_ = Discretizer(original, vars, cfg_.binning);
  const MicroTable binned = discretizer_.apply(original);
  schema_ = binned.schema();
  const auto& schema = schema_;
  std::vector<std::size_t> kv;
  for (const auto& k : cfg_.keys) kv.push_back(schema.index_of(k));
  for (const auto& t : cfg_.targets) {
    target_vars_.push_back(schema.index_of(t));
    baselines_.push_back(baseline_cap(binned, t));
  }
  attack_.emplace(binned, std::move(kv));
}

RiskScore RiskEvaluator::score(const MicroTable& synth_in) const {
  if (synth_in.empty()) {
    throw Error(ErrorCode::EmptySynth, "synthetic table is empty");
  }
  const MicroTable synth = discretizer_.apply(synth_in);
  if (!(synth.schema().variables() == schema_.variables())) {
    throw Error(ErrorCode::SchemaMismatch,
                "synthetic schema differs from the original; harmonize first");
  }
  const auto classes = attack_->classify(synth);
  RiskScore out;
  for (std::size_t t = 0; t < target_vars_.size(); ++t) {
    for (int k : cfg_.key_sizes) {
      PairRisk p;
      p.target = cfg_.targets[t];
      p.key_size = k;
      try {
        const auto r = attack_->score(classes, synth, static_cast<std::size_t>(k),
                                      target_vars_[t], cfg_.weap_threshold);
        p.raw_tcap = r.raw_tcap;
        p.matched_fraction = r.matched_fraction;
        p.no_matches = r.no_matches;
        p.baseline = baselines_[t];
        p.marginal = marginal_tcap(p.raw_tcap, p.baseline);
      } catch (const Error& e) {
        throw e.annotated("target " + p.target + ", " + std::to_string(k) +
                          " keys");
      }
      out.raw_tcap += p.raw_tcap;
      out.baseline += p.baseline;
      out.marginal += p.marginal;
      out.matched_fraction += p.matched_fraction;
      if (p.no_matches) ++out.no_match_pairs;
      out.pairs.push_back(std::move(p));
    }
  }
  const double n = static_cast<double>(out.pairs.size());
  out.raw_tcap /= n;
  out.baseline /= n;
  out.marginal /= n;
  out.matched_fraction /= n;
  return out;
}

RiskScore overall_risk(const MicroTable& original, const MicroTable& synth,
                       const AttackConfig& cfg) {
  return RiskEvaluator(original, cfg).score(synth);
}

}  // namespace sfe
