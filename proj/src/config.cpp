// Copyright 2026 The sfequiv Authors
// SPDX-License-Identifier: Apache-2.0

#include "sfe/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "sfe/csv.hpp"
#include "sfe/error.hpp"

namespace sfe {

using nlohmann::json;

namespace {

[[noreturn]] void bad(const std::string& msg) {
  throw Error(ErrorCode::InvalidConfig, msg);
}

void check_keys(const json& obj, const std::set<std::string>& allowed,
                const std::string& section) {
  if (!obj.is_object()) bad(section + " must be an object");
  for (const auto& [k, v] : obj.items()) {
    if (!allowed.count(k)) bad("unknown key '" + k + "' in " + section);
  }
}

template <typename T>
T get(const json& obj, const std::string& key, const std::string& section) {
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception& e) {
    bad(section + "." + key + ": " + e.what());
  }
}

template <typename T>
T get_or(const json& obj, const std::string& key, T fallback,
         const std::string& section) {
  if (!obj.contains(key)) return fallback;
  return get<T>(obj, key, section);
}

NumericBinning parse_binning(const json& j, const std::string& section) {
  check_keys(j, {"method", "bins", "width", "origin", "edges"}, section);
  NumericBinning b;
  const auto method = get_or<std::string>(j, "method", "quantile", section);
  if (method == "quantile") {
    b.method = NumericBinning::Method::Quantile;
    b.bins = get_or<int>(j, "bins", 10, section);
    if (b.bins < 1) bad(section + ".bins must be >= 1");
  } else if (method == "width") {
    b.method = NumericBinning::Method::Width;
    b.width = get<double>(j, "width", section);
    b.origin = get_or<double>(j, "origin", 0.0, section);
    if (!(b.width > 0)) bad(section + ".width must be > 0");
  } else if (method == "edges") {
    b.method = NumericBinning::Method::Edges;
    b.edges = get<std::vector<double>>(j, "edges", section);
  } else {
    bad(section + ".method must be quantile, width or edges");
  }
  return b;
}

BinningMap parse_binning_map(const json& j, const std::string& section) {
  if (!j.is_object()) bad(section + " must be an object");
  BinningMap out;
  for (const auto& [name, spec] : j.items()) {
    out[name] = parse_binning(spec, section + "." + name);
  }
  return out;
}

AttackConfig parse_attack(const json& j) {
  const std::string s = "attack";
  check_keys(j, {"keys", "targets", "key_sizes", "weap_threshold", "binning"},
             s);
  AttackConfig a;
  a.keys = get<std::vector<std::string>>(j, "keys", s);
  a.targets = get<std::vector<std::string>>(j, "targets", s);
  a.key_sizes = get_or<std::vector<int>>(j, "key_sizes", a.key_sizes, s);
  a.weap_threshold = get_or<double>(j, "weap_threshold", 1.0, s);
  if (j.contains("binning")) a.binning = parse_binning_map(j["binning"], s + ".binning");
  return a;
}

RegressionSpec parse_regression(const json& j, std::size_t index) {
  const std::string s = "utility.regressions[" + std::to_string(index) + "]";
  check_keys(j, {"name", "target", "positive", "predictors"}, s);
  RegressionSpec r;
  r.target = get<std::string>(j, "target", s);
  r.name = get_or<std::string>(j, "name", r.target, s);
  r.positive = get<std::vector<std::string>>(j, "positive", s);
  r.predictors = get<std::vector<std::string>>(j, "predictors", s);
  return r;
}

UtilityConfig parse_utility(const json& j) {
  const std::string s = "utility";
  check_keys(j, {"roc_variables", "roc_pairs", "binning", "weights",
                 "on_fit_failure", "fit", "regressions"},
             s);
  UtilityConfig u;
  u.roc_variables =
      get_or<std::vector<std::string>>(j, "roc_variables", {}, s);
  if (j.contains("roc_pairs")) {
    for (const auto& p : j["roc_pairs"]) {
      if (!p.is_array() || p.size() != 2) bad("utility.roc_pairs entries are [a, b]");
      u.roc_pairs.emplace_back(p[0].get<std::string>(), p[1].get<std::string>());
    }
  }
  if (j.contains("binning")) {
    u.binning = parse_binning_map(j["binning"], s + ".binning");
    if (!u.binning.count("default")) u.binning["default"] = NumericBinning{};
  }
  if (j.contains("weights")) {
    const auto& w = j["weights"];
    check_keys(w, {"roc_univariate", "roc_bivariate", "cio"}, s + ".weights");
    u.weights.roc_univariate = get_or<double>(w, "roc_univariate", 1.0, s);
    u.weights.roc_bivariate = get_or<double>(w, "roc_bivariate", 1.0, s);
    u.weights.cio = get_or<double>(w, "cio", 1.0, s);
  }
  const auto policy = get_or<std::string>(j, "on_fit_failure", "error", s);
  if (policy == "error") {
    u.on_fit_failure = FitFailurePolicy::Error;
  } else if (policy == "zero") {
    u.on_fit_failure = FitFailurePolicy::Zero;
  } else {
    bad("utility.on_fit_failure must be 'error' or 'zero'");
  }
  if (j.contains("fit")) {
    const auto& f = j["fit"];
    check_keys(f, {"tol", "max_iter", "separation_eta"}, s + ".fit");
    u.fit.tol = get_or<double>(f, "tol", u.fit.tol, s);
    u.fit.max_iter = get_or<int>(f, "max_iter", u.fit.max_iter, s);
    u.fit.separation_eta =
        get_or<double>(f, "separation_eta", u.fit.separation_eta, s);
    if (!(u.fit.tol > 0) || u.fit.max_iter < 1) bad("utility.fit out of range");
  }
  if (j.contains("regressions")) {
    std::size_t i = 0;
    for (const auto& r : j["regressions"]) {
      u.regressions.push_back(parse_regression(r, i++));
    }
  }
  return u;
}

std::uint64_t parse_seed(const json& j, const std::string& key,
                         const std::string& s) {
  if (!j.contains(key)) return 0;
  const auto& v = j[key];
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer() && v.get<std::int64_t>() >= 0) {
    return static_cast<std::uint64_t>(v.get<std::int64_t>());
  }
  bad(s + "." + key + " must be a non-negative integer");
}

}  // namespace

std::string to_string(SynthMethod m) {
  return m == SynthMethod::Cart ? "cart" : "independent";
}

SynthMethod parse_synth_method(const std::string& s) {
  if (s == "cart") return SynthMethod::Cart;
  if (s == "independent") return SynthMethod::Independent;
  bad("synthesis method must be 'cart' or 'independent', got '" + s + "'");
}

RunConfig parse_config(const std::string& json_text,
                       const std::filesystem::path& base_dir) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& e) {
    bad(std::string("config is not valid JSON: ") + e.what());
  }
  check_keys(doc, {"schema", "attack", "utility", "sampling", "synthesis"},
             "config");
  RunConfig rc;
  std::filesystem::path schema_path = get<std::string>(doc, "schema", "config");
  if (schema_path.is_relative()) schema_path = base_dir / schema_path;
  rc.eval.schema_path = schema_path;
  rc.schema = load_schema(schema_path);

  if (!doc.contains("attack")) bad("config has no attack section");
  rc.eval.attack = parse_attack(doc["attack"]);
  if (!doc.contains("utility")) bad("config has no utility section");
  rc.eval.utility = parse_utility(doc["utility"]);

  if (doc.contains("sampling")) {
    const auto& j = doc["sampling"];
    check_keys(j, {"fractions", "replicates", "base_seed"}, "sampling");
    if (j.contains("fractions")) {
      rc.eval.grid.fractions =
          get<std::vector<double>>(j, "fractions", "sampling");
    }
    rc.eval.plan.replicates = get_or<int>(j, "replicates", 100, "sampling");
    rc.eval.plan.base_seed = parse_seed(j, "base_seed", "sampling");
  }
  if (doc.contains("synthesis")) {
    const auto& j = doc["synthesis"];
    const std::string s = "synthesis";
    check_keys(j, {"replicates", "method", "seed", "min_leaf", "max_depth",
                   "min_split_improvement", "exhaustive_max_levels", "jitter"},
               s);
    rc.eval.synth_replicates = get_or<int>(j, "replicates", 5, s);
    rc.synthesis.method =
        parse_synth_method(get_or<std::string>(j, "method", "cart", s));
    rc.synthesis.seed = parse_seed(j, "seed", s);
    auto& c = rc.synthesis.cart.cart;
    c.min_leaf = get_or<int>(j, "min_leaf", c.min_leaf, s);
    c.max_depth = get_or<int>(j, "max_depth", c.max_depth, s);
    c.min_split_improvement =
        get_or<double>(j, "min_split_improvement", c.min_split_improvement, s);
    c.exhaustive_max_levels =
        get_or<int>(j, "exhaustive_max_levels", c.exhaustive_max_levels, s);
    rc.synthesis.cart.jitter = get_or<double>(j, "jitter", 0.0, s);
    c.validate();
    if (rc.synthesis.cart.jitter < 0) bad("synthesis.jitter must be >= 0");
  }

  try {
    rc.eval.validate(rc.schema);
  } catch (const Error& e) {
    // Unknown variables and missing binnings in a config are config errors.
    if (category_of(e.code()) == ErrorCategory::Config) throw;
    throw Error(ErrorCode::InvalidConfig, e.what());
  }
  return rc;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::InvalidConfig, "cannot open config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.parent_path());
}

}  // namespace sfe
