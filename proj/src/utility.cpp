// Copyright 2026 The sfequiv Authors
// SPDX-License-Identifier: Apache-2.0

#include "sfe/utility.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace sfe {

double roc_cell(double y_orig, double y_synth) {
  if (y_orig < 0 || y_synth < 0) {
    throw Error(ErrorCode::NegativeInput, "ROC estimates must be >= 0");
  }
  const double hi = std::max(y_orig, y_synth);
  if (hi == 0.0) return 1.0;
  return std::min(y_orig, y_synth) / hi;
}

double ci_overlap(const ConfidenceInterval& orig,
                  const ConfidenceInterval& synth) {
  const double wo = orig.upper - orig.lower;
  const double ws = synth.upper - synth.lower;
  if (!(wo > 0) || !(ws > 0)) {
    throw Error(ErrorCode::ZeroWidthInterval,
                "confidence intervals need positive width");
  }
  const double inner = std::min(orig.upper, synth.upper) -
                       std::max(orig.lower, synth.lower);
  return 0.5 * (inner / wo + inner / ws);
}

void RegressionSpec::validate(const Schema& schema) const {
  const auto tv = schema.index_of(target);
  if (!schema[tv].is_categorical()) {
    throw Error(ErrorCode::InvalidConfig,
                "regression " + name + ": target " + target +
                    " must be categorical");
  }
  if (positive.empty()) {
    throw Error(ErrorCode::InvalidConfig,
                "regression " + name + ": binarisation needs positive labels");
  }
  for (const auto& p : positive) {
    if (p != kMissingLabel && !schema[tv].code_of(p)) {
      throw Error(ErrorCode::InvalidConfig,
                  "regression " + name + ": '" + p + "' is not a category of " +
                      target);
    }
  }
  if (predictors.empty()) {
    throw Error(ErrorCode::InvalidConfig,
                "regression " + name + " has no predictors");
  }
  std::set<std::string> seen;
  for (const auto& p : predictors) {
    schema.index_of(p);
    if (p == target) {
      throw Error(ErrorCode::InvalidConfig,
                  "regression " + name + ": target is also a predictor");
    }
    if (!seen.insert(p).second) {
      throw Error(ErrorCode::InvalidConfig,
                  "regression " + name + ": duplicate predictor " + p);
    }
  }
}

void UtilityConfig::validate(const Schema& schema) const {
  for (const auto& v : roc_variables) schema.index_of(v);
  for (const auto& [a, b] : roc_pairs) {
    schema.index_of(a);
    schema.index_of(b);
    if (a == b) {
      throw Error(ErrorCode::InvalidConfig, "ROC pair repeats " + a);
    }
  }
  for (const auto& r : regressions) r.validate(schema);
  const auto& w = weights;
  if (w.roc_univariate < 0 || w.roc_bivariate < 0 || w.cio < 0 ||
      !(w.roc_univariate + w.roc_bivariate + w.cio > 0)) {
    throw Error(ErrorCode::InvalidConfig,
                "utility weights must be non-negative with a positive sum");
  }
  if (w.cio > 0 && regressions.empty()) {
    throw Error(ErrorCode::InvalidConfig,
                "CIO has positive weight but no regressions are configured");
  }
}

double combine_utility(double roc_univariate, double roc_bivariate, double cio,
                       const UtilityWeights& w) {
  const double total = w.roc_univariate + w.roc_bivariate + w.cio;
  return (w.roc_univariate * roc_univariate + w.roc_bivariate * roc_bivariate +
          w.cio * cio) /
         total;
}

// ---------------------------------------------------------------------------
// Regression models.

struct UtilityEvaluator::Model {
  struct Predictor {
    std::size_t var = 0;
    bool numeric = false;
    std::int32_t n_levels = 0;  // categorical: categories + Missing
    std::int32_t reference = 0;
    std::size_t first_term = 0;  // index of the first term it owns
  };
  RegressionSpec spec;
  std::size_t target_var = 0;
  std::vector<char> positive;  // per target level
  std::vector<Predictor> predictors;
  std::vector<std::string> term_names;  // candidate terms, [0] intercept

  std::size_t term_of(const Predictor& p, std::int32_t level) const {
    return p.first_term + static_cast<std::size_t>(
                              level < p.reference ? level : level - 1);
  }
};

namespace {

struct Encoded {
  Eigen::MatrixXd x;
  Eigen::VectorXd y;
};

std::int32_t cat_level(std::int32_t code, std::size_t ncat) {
  return code == kMissingCode ? static_cast<std::int32_t>(ncat) : code;
}

}  // namespace

struct UtilityEvaluator::FitCache {
  struct Outcome {
    std::optional<FitResult> fit;
    std::optional<Error> error;
  };
  std::mutex mu;
  std::map<std::pair<std::size_t, std::vector<bool>>,
           std::shared_ptr<const Outcome>>
      entries;
};

namespace {

// Which candidate terms have at least one row in `t` (complete cases only).
std::vector<bool> present_terms(const MicroTable& t, const auto& model) {
  std::vector<bool> present(model.term_names.size(), false);
  present[0] = true;
  std::vector<char> complete(t.n_rows(), 1);
  for (const auto& p : model.predictors) {
    if (!p.numeric) continue;
    const auto vals = t.values(p.var);
    for (std::size_t i = 0; i < t.n_rows(); ++i) {
      if (is_missing(vals[i])) complete[i] = 0;
    }
  }
  for (const auto& p : model.predictors) {
    if (p.numeric) {
      present[p.first_term] = true;
      continue;
    }
    const auto codes = t.codes(p.var);
    const auto ncat = t.schema()[p.var].categories.size();
    for (std::size_t i = 0; i < t.n_rows(); ++i) {
      if (!complete[i]) continue;
      const auto l = cat_level(codes[i], ncat);
      if (l != p.reference) present[model.term_of(p, l)] = true;
    }
  }
  return present;
}

Encoded encode_design(const MicroTable& t, const auto& model,
                      const std::vector<bool>& active) {
  std::vector<std::size_t> column_of(active.size(), SIZE_MAX);
  std::size_t ncols = 0;
  for (std::size_t k = 0; k < active.size(); ++k) {
    if (active[k]) column_of[k] = ncols++;
  }
  std::vector<std::size_t> rows;
  rows.reserve(t.n_rows());
  for (std::size_t i = 0; i < t.n_rows(); ++i) {
    bool ok = true;
    for (const auto& p : model.predictors) {
      if (p.numeric && is_missing(t.values(p.var)[i])) ok = false;
    }
    if (ok) rows.push_back(i);
  }
  Encoded e;
  e.x = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(rows.size()),
                              static_cast<Eigen::Index>(ncols));
  e.y.resize(static_cast<Eigen::Index>(rows.size()));
  const auto tcodes = t.codes(model.target_var);
  const auto tcat = t.schema()[model.target_var].categories.size();
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto i = rows[r];
    const auto ri = static_cast<Eigen::Index>(r);
    e.y[ri] = model.positive[static_cast<std::size_t>(cat_level(tcodes[i], tcat))]
                  ? 1.0
                  : 0.0;
    e.x(ri, 0) = 1.0;
    for (const auto& p : model.predictors) {
      if (p.numeric) {
        e.x(ri, static_cast<Eigen::Index>(column_of[p.first_term])) =
            t.values(p.var)[i];
        continue;
      }
      const auto l =
          cat_level(t.codes(p.var)[i], t.schema()[p.var].categories.size());
      if (l == p.reference) continue;
      const auto term = model.term_of(p, l);
      if (column_of[term] != SIZE_MAX) {
        e.x(ri, static_cast<Eigen::Index>(column_of[term])) = 1.0;
      }
    }
  }
  return e;
}

}  // namespace

// ---------------------------------------------------------------------------

UtilityEvaluator::UtilityEvaluator(const MicroTable& original,
                                   UtilityConfig cfg)
    : cfg_(std::move(cfg)), original_(original),
      cache_(std::make_shared<FitCache>()) {
  const auto& schema = original_.schema();
  cfg_.validate(schema);
  if (original_.empty()) {
    throw Error(ErrorCode::EmptyTable, "original table is empty");
  }

  std::vector<std::string> names = cfg_.roc_variables;
  if (names.empty()) {
    for (const auto& v : schema.variables()) names.push_back(v.name);
  }
  for (const auto& n : names) {
    const auto j = schema.index_of(n);
    if (std::find(roc_vars_.begin(), roc_vars_.end(), j) != roc_vars_.end()) {
      throw Error(ErrorCode::InvalidConfig, "ROC variable repeated: " + n);
    }
    roc_vars_.push_back(j);
    encoders_.push_back(
        LevelEncoder::fit(original_, j, find_binning(cfg_.binning, n)));
  }
  auto position = [&](const std::string& n) {
    const auto j = schema.index_of(n);
    auto it = std::find(roc_vars_.begin(), roc_vars_.end(), j);
    if (it == roc_vars_.end()) {
      throw Error(ErrorCode::InvalidConfig,
                  "ROC pair variable " + n + " is not an ROC variable");
    }
    return static_cast<std::size_t>(it - roc_vars_.begin());
  };
  if (cfg_.roc_pairs.empty()) {
    for (std::size_t a = 0; a < roc_vars_.size(); ++a) {
      for (std::size_t b = a + 1; b < roc_vars_.size(); ++b) {
        roc_pairs_.emplace_back(a, b);
      }
    }
  } else {
    for (const auto& [a, b] : cfg_.roc_pairs) {
      roc_pairs_.emplace_back(position(a), position(b));
    }
  }

  const auto levels = encode_all(original_);
  const double n = static_cast<double>(original_.n_rows());
  for (std::size_t v = 0; v < roc_vars_.size(); ++v) {
    std::vector<double> p(static_cast<std::size_t>(encoders_[v].n_levels()), 0);
    for (auto l : levels[v]) p[static_cast<std::size_t>(l)] += 1;
    for (auto& x : p) x /= n;
    uni_props_.push_back(std::move(p));
  }
  for (const auto& [a, b] : roc_pairs_) {
    const auto lb = static_cast<std::size_t>(encoders_[b].n_levels());
    std::vector<double> p(
        static_cast<std::size_t>(encoders_[a].n_levels()) * lb, 0);
    for (std::size_t i = 0; i < levels[a].size(); ++i) {
      p[static_cast<std::size_t>(levels[a][i]) * lb +
        static_cast<std::size_t>(levels[b][i])] += 1;
    }
    for (auto& x : p) x /= n;
    bi_props_.push_back(std::move(p));
  }

  for (const auto& spec : cfg_.regressions) {
    auto m = std::make_shared<Model>();
    m->spec = spec;
    m->target_var = schema.index_of(spec.target);
    const auto& tspec = schema[m->target_var];
    m->positive.assign(tspec.categories.size() + 1, 0);
    for (const auto& p : spec.positive) {
      if (p == kMissingLabel) {
        m->positive.back() = 1;
      } else {
        m->positive[static_cast<std::size_t>(*tspec.code_of(p))] = 1;
      }
    }
    m->term_names.push_back("(Intercept)");
    for (const auto& name : spec.predictors) {
      Model::Predictor p;
      p.var = schema.index_of(name);
      p.first_term = m->term_names.size();
      if (!schema[p.var].is_categorical()) {
        p.numeric = true;
        m->term_names.push_back(name);
        m->predictors.push_back(p);
        continue;
      }
      const auto ncat = schema[p.var].categories.size();
      p.n_levels = static_cast<std::int32_t>(ncat + 1);
      // Reference level: most frequent in the original, ties to lowest.
      std::vector<std::size_t> counts(ncat + 1, 0);
      for (auto c : original_.codes(p.var)) {
        ++counts[static_cast<std::size_t>(cat_level(c, ncat))];
      }
      p.reference = static_cast<std::int32_t>(
          std::max_element(counts.begin(), counts.end()) - counts.begin());
      for (std::int32_t l = 0; l < p.n_levels; ++l) {
        if (l == p.reference) continue;
        const std::string label =
            static_cast<std::size_t>(l) == ncat
                ? std::string(kMissingLabel)
                : schema[p.var].categories[static_cast<std::size_t>(l)];
        m->term_names.push_back(name + "=" + label);
      }
      m->predictors.push_back(p);
    }
    models_.push_back(std::move(m));
  }
}

std::vector<std::vector<std::int32_t>> UtilityEvaluator::encode_all(
    const MicroTable& t) const {
  if (!(t.schema().variables() == original_.schema().variables())) {
    throw Error(ErrorCode::SchemaMismatch,
                "table schema differs from the original; harmonize first");
  }
  std::vector<std::vector<std::int32_t>> out;
  out.reserve(encoders_.size());
  for (const auto& e : encoders_) out.push_back(e.encode(t));
  return out;
}

double UtilityEvaluator::roc_univariate(const MicroTable& synth) const {
  if (synth.empty()) throw Error(ErrorCode::EmptySynth, "synthetic table is empty");
  const auto levels = encode_all(synth);
  const double n = static_cast<double>(synth.n_rows());
  double total = 0.0;
  for (std::size_t v = 0; v < roc_vars_.size(); ++v) {
    const auto& po = uni_props_[v];
    std::vector<double> ps(po.size(), 0);
    for (auto l : levels[v]) ps[static_cast<std::size_t>(l)] += 1;
    double sum = 0.0;
    std::size_t cells = 0;
    for (std::size_t c = 0; c < po.size(); ++c) {
      ps[c] /= n;
      if (po[c] == 0.0 && ps[c] == 0.0) continue;
      sum += roc_cell(po[c], ps[c]);
      ++cells;
    }
    total += sum / static_cast<double>(cells);
  }
  return total / static_cast<double>(roc_vars_.size());
}

double UtilityEvaluator::roc_bivariate(const MicroTable& synth) const {
  if (synth.empty()) throw Error(ErrorCode::EmptySynth, "synthetic table is empty");
  if (roc_pairs_.empty()) {
    throw Error(ErrorCode::InvalidConfig,
                "bivariate ROC needs at least 2 variables");
  }
  const auto levels = encode_all(synth);
  const double n = static_cast<double>(synth.n_rows());
  double total = 0.0;
  for (std::size_t k = 0; k < roc_pairs_.size(); ++k) {
    const auto [a, b] = roc_pairs_[k];
    const auto& po = bi_props_[k];
    const auto lb = static_cast<std::size_t>(encoders_[b].n_levels());
    std::vector<double> ps(po.size(), 0);
    for (std::size_t i = 0; i < levels[a].size(); ++i) {
      ps[static_cast<std::size_t>(levels[a][i]) * lb +
         static_cast<std::size_t>(levels[b][i])] += 1;
    }
    double sum = 0.0;
    std::size_t cells = 0;
    for (std::size_t c = 0; c < po.size(); ++c) {
      ps[c] /= n;
      if (po[c] == 0.0 && ps[c] == 0.0) continue;
      sum += roc_cell(po[c], ps[c]);
      ++cells;
    }
    total += sum / static_cast<double>(cells);
  }
  return total / static_cast<double>(roc_pairs_.size());
}

CioResult UtilityEvaluator::cio(const MicroTable& synth) const {
  if (synth.empty()) throw Error(ErrorCode::EmptySynth, "synthetic table is empty");
  if (!(synth.schema().variables() == original_.schema().variables())) {
    throw Error(ErrorCode::SchemaMismatch,
                "table schema differs from the original; harmonize first");
  }
  CioResult out;
  for (std::size_t m = 0; m < models_.size(); ++m) {
    const Model& model = *models_[m];
    const auto po = present_terms(original_, model);
    const auto ps = present_terms(synth, model);
    std::vector<bool> active(po.size());
    for (std::size_t k = 0; k < po.size(); ++k) {
      active[k] = po[k] && ps[k];
      if (po[k] != ps[k]) {
        out.warnings.push_back(
            model.spec.name + ": term " + model.term_names[k] + " absent from " +
            (po[k] ? "synthetic" : "original") +
            " data; dropped from both fits");
      }
    }

    // Original fit, memoised per active term set.
    std::shared_ptr<const FitCache::Outcome> orig;
    {
      std::lock_guard<std::mutex> lock(cache_->mu);
      auto it = cache_->entries.find({m, active});
      if (it != cache_->entries.end()) orig = it->second;
    }
    if (!orig) {
      auto outcome = std::make_shared<FitCache::Outcome>();
      try {
        const auto e = encode_design(original_, model, active);
        outcome->fit = fit_logistic(e.x, e.y, cfg_.fit);
      } catch (const Error& err) {
        outcome->error = err.annotated("model " + model.spec.name +
                                       ", original table");
      }
      std::lock_guard<std::mutex> lock(cache_->mu);
      orig = cache_->entries.try_emplace({m, active}, std::move(outcome))
                 .first->second;
    }

    std::optional<FitResult> synth_fit;
    std::optional<Error> failure = orig->error;
    if (!failure) {
      try {
        const auto e = encode_design(synth, model, active);
        synth_fit = fit_logistic(e.x, e.y, cfg_.fit);
      } catch (const Error& err) {
        failure = err.annotated("model " + model.spec.name +
                                ", synthetic table");
      }
    }
    if (failure) {
      if (cfg_.on_fit_failure == FitFailurePolicy::Error) throw *failure;
      out.warnings.push_back(std::string(failure->what()) +
                             "; model scored 0");
      out.model_scores.push_back(0.0);
      continue;
    }

    double sum = 0.0;
    std::size_t col = 0;
    for (std::size_t k = 0; k < active.size(); ++k) {
      if (!active[k]) continue;
      const auto c = static_cast<Eigen::Index>(col++);
      TermOverlap t;
      t.model = model.spec.name;
      t.term = model.term_names[k];
      const double bo = orig->fit->coefficients[c];
      const double so = orig->fit->standard_errors[c];
      const double bs = synth_fit->coefficients[c];
      const double ss = synth_fit->standard_errors[c];
      t.original = {bo - kNormal975 * so, bo + kNormal975 * so};
      t.synthetic = {bs - kNormal975 * ss, bs + kNormal975 * ss};
      t.overlap = ci_overlap(t.original, t.synthetic);
      sum += std::max(0.0, t.overlap);
      out.terms.push_back(std::move(t));
    }
    out.model_scores.push_back(sum / static_cast<double>(col));
  }
  double total = 0.0;
  for (double s : out.model_scores) total += s;
  out.score = total / static_cast<double>(out.model_scores.size());
  return out;
}

UtilityScore UtilityEvaluator::score(const MicroTable& synth) const {
  UtilityScore s;
  if (synth.empty()) throw Error(ErrorCode::EmptySynth, "synthetic table is empty");
  if (cfg_.weights.roc_univariate > 0) s.roc_univariate = roc_univariate(synth);
  if (cfg_.weights.roc_bivariate > 0) s.roc_bivariate = roc_bivariate(synth);
  if (cfg_.weights.cio > 0) s.cio = cio(synth).score;
  s.overall = combine_utility(s.roc_univariate, s.roc_bivariate, s.cio,
                              cfg_.weights);
  return s;
}

UtilityScore overall_utility(const MicroTable& original,
                             const MicroTable& synth,
                             const UtilityConfig& cfg) {
  return UtilityEvaluator(original, cfg).score(synth);
}

namespace {

UtilityConfig roc_only(std::span<const std::string> vars,
                       const BinningMap& binning) {
  UtilityConfig cfg;
  cfg.roc_variables.assign(vars.begin(), vars.end());
  cfg.binning = binning;
  cfg.weights = {1.0, 1.0, 0.0};
  return cfg;
}

UtilityConfig cio_only(std::span<const RegressionSpec> specs) {
  UtilityConfig cfg;
  cfg.regressions.assign(specs.begin(), specs.end());
  cfg.weights = {0.0, 0.0, 1.0};
  return cfg;
}

}  // namespace

double roc_univariate(const MicroTable& original, const MicroTable& synth,
                      std::span<const std::string> vars,
                      const BinningMap& binning) {
  if (vars.empty()) throw Error(ErrorCode::InvalidConfig, "no ROC variables");
  return UtilityEvaluator(original, roc_only(vars, binning))
      .roc_univariate(synth);
}

double roc_bivariate(const MicroTable& original, const MicroTable& synth,
                     std::span<const std::string> vars,
                     const BinningMap& binning) {
  if (vars.size() < 2) {
    throw Error(ErrorCode::InvalidConfig,
                "bivariate ROC needs at least 2 variables");
  }
  return UtilityEvaluator(original, roc_only(vars, binning))
      .roc_bivariate(synth);
}

CioResult cio_detail(const MicroTable& original, const MicroTable& synth,
                     std::span<const RegressionSpec> specs) {
  return UtilityEvaluator(original, cio_only(specs)).cio(synth);
}

double cio_score(const MicroTable& original, const MicroTable& synth,
                 std::span<const RegressionSpec> specs) {
  return cio_detail(original, synth, specs).score;
}

}  // namespace sfe
