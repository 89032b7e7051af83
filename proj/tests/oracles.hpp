// Copyright 2026 The sfequiv Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include "helpers.hpp"
#include "sfe/risk.hpp"
#include "sfe/rng.hpp"
#include "sfe/table.hpp"

namespace sfe::test {

// Nested loops over original x synth, no grouping structures.
inline TcapResult oracle_tcap(const MicroTable& o, const MicroTable& s,
                       const std::vector<std::size_t>& keys, std::size_t target,
                       int thr_num, int thr_den) {
  const auto ncat = static_cast<std::int32_t>(o.schema()[target].categories.size());
  auto order = [&](std::int32_t c) { return c == kMissingCode ? ncat : c; };
  TcapResult r;
  for (std::size_t i = 0; i < o.n_rows(); ++i) {
    std::vector<std::size_t> count(static_cast<std::size_t>(ncat) + 1, 0);
    std::size_t total = 0;
    for (std::size_t j = 0; j < s.n_rows(); ++j) {
      bool same = true;
      for (auto k : keys) same = same && o.codes(k)[i] == s.codes(k)[j];
      if (!same) continue;
      ++total;
      ++count[static_cast<std::size_t>(order(s.codes(target)[j]))];
    }
    if (total == 0) continue;
    std::size_t best = 0;
    for (std::size_t c = 1; c < count.size(); ++c) {
      if (count[c] > count[best]) best = c;
    }
    if (count[best] * static_cast<std::size_t>(thr_den) <
        total * static_cast<std::size_t>(thr_num)) {
      continue;
    }
    ++r.matched;
    if (static_cast<std::size_t>(order(o.codes(target)[i])) == best) ++r.correct;
  }
  if (r.matched == 0) {
    r.no_matches = true;
    return r;
  }
  r.raw_tcap = static_cast<double>(r.correct) / static_cast<double>(r.matched);
  r.matched_fraction = static_cast<double>(r.matched) / static_cast<double>(o.n_rows());
  return r;
}

// Impurities recomputed from scratch over an explicit row list.
inline double oracle_impurity(const MicroTable& t, std::size_t target,
                       const std::vector<std::size_t>& rows) {
  if (!t.schema()[target].is_categorical()) {
    std::vector<double> v;
    for (auto r : rows) {
      if (!is_missing(t.values(target)[r])) v.push_back(t.values(target)[r]);
    }
    if (v.empty()) return 0.0;
    const double mean = std::accumulate(v.begin(), v.end(), 0.0) / v.size();
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    return ss / v.size();
  }
  std::map<std::int32_t, double> counts;
  for (auto r : rows) counts[t.codes(target)[r]] += 1;
  double g = 1.0;
  for (const auto& [c, k] : counts) g -= (k / rows.size()) * (k / rows.size());
  return g;
}

inline double valid_count(const MicroTable& t, std::size_t target,
                   const std::vector<std::size_t>& rows) {
  if (t.schema()[target].is_categorical()) return static_cast<double>(rows.size());
  double n = 0;
  for (auto r : rows) n += !is_missing(t.values(target)[r]);
  return n;
}

inline double oracle_gain(const MicroTable& t, std::size_t target,
                   const std::vector<std::size_t>& rows,
                   const std::vector<char>& left) {
  std::vector<std::size_t> l, r;
  for (std::size_t i = 0; i < rows.size(); ++i) (left[i] ? l : r).push_back(rows[i]);
  const double n = valid_count(t, target, rows);
  return oracle_impurity(t, target, rows) -
         valid_count(t, target, l) / n * oracle_impurity(t, target, l) -
         valid_count(t, target, r) / n * oracle_impurity(t, target, r);
}

// Every partition the split space admits: subsets of present categorical
// levels (Missing a level), or midpoints between distinct numeric values
// with Missing sent either way.
inline double oracle_best_gain(const MicroTable& t, std::size_t target,
                        const std::vector<std::size_t>& rows,
                        const std::vector<std::size_t>& predictors,
                        std::size_t min_leaf, bool& any) {
  double best = -1e300;
  any = false;
  auto offer = [&](const std::vector<char>& left) {
    const auto nl = static_cast<std::size_t>(std::count(left.begin(), left.end(), 1));
    if (nl < min_leaf || rows.size() - nl < min_leaf) return;
    any = true;
    best = std::max(best, oracle_gain(t, target, rows, left));
  };
  for (auto var : predictors) {
    std::vector<char> left(rows.size());
    if (t.schema()[var].is_categorical()) {
      std::vector<std::int32_t> levels;
      for (auto r : rows) {
        if (std::find(levels.begin(), levels.end(), t.codes(var)[r]) == levels.end()) {
          levels.push_back(t.codes(var)[r]);
        }
      }
      for (std::size_t mask = 1; mask + 1 < (std::size_t{1} << levels.size()); ++mask) {
        for (std::size_t i = 0; i < rows.size(); ++i) {
          const auto pos = std::find(levels.begin(), levels.end(), t.codes(var)[rows[i]]) - levels.begin();
          left[i] = (mask >> pos) & 1;
        }
        offer(left);
      }
    } else {
      std::vector<double> vals;
      bool has_missing = false;
      for (auto r : rows) {
        const double v = t.values(var)[r];
        if (is_missing(v)) {
          has_missing = true;
        } else {
          vals.push_back(v);
        }
      }
      std::sort(vals.begin(), vals.end());
      vals.erase(std::unique(vals.begin(), vals.end()), vals.end());
      for (std::size_t k = 0; k + 1 < vals.size(); ++k) {
        const double thr = (vals[k] + vals[k + 1]) / 2;
        for (int missing_left = 0; missing_left < (has_missing ? 2 : 1); ++missing_left) {
          for (std::size_t i = 0; i < rows.size(); ++i) {
            const double v = t.values(var)[rows[i]];
            left[i] = is_missing(v) ? static_cast<char>(missing_left) : v <= thr;
          }
          offer(left);
        }
      }
    }
  }
  return best;
}

inline MicroTable random_mixed(Rng& rng, std::size_t rows, std::size_t predictors, bool numeric_target) {
  std::vector<VariableSpec> vars;
  std::vector<Column> cols;
  for (std::size_t j = 0; j <= predictors; ++j) {
    const bool is_target = j == predictors;
    const bool numeric = is_target ? numeric_target : rng.uniform_index(2) == 0;
    const std::string name = is_target ? "T" : "P" + std::to_string(j);
    Column c;
    if (numeric) {
      vars.push_back(num(name));
      const auto distinct = 2 + rng.uniform_index(15);
      for (std::size_t i = 0; i < rows; ++i) {
        const bool miss = !is_target && rng.uniform01() < 0.1;
        c.values.push_back(miss ? missing_numeric()
                                : static_cast<double>(rng.uniform_index(distinct)) * 0.5);
      }
    } else {
      const int k = 2 + static_cast<int>(rng.uniform_index(4));
      std::vector<std::string> labels;
      for (int l = 0; l < k; ++l) labels.push_back("L" + std::to_string(l));
      vars.push_back(cat(name, labels));
      for (std::size_t i = 0; i < rows; ++i) {
        const bool miss = rng.uniform01() < 0.1;
        c.codes.push_back(miss ? kMissingCode
                               : static_cast<std::int32_t>(rng.uniform_index(static_cast<std::size_t>(k))));
      }
    }
    cols.push_back(std::move(c));
  }
  return MicroTable(Schema(std::move(vars)), std::move(cols));
}

// Average ranks, ties sharing the mean position.
inline std::vector<double> ranks(const std::vector<double>& v) {
  std::vector<std::size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](auto a, auto b) { return v[a] < v[b]; });
  std::vector<double> r(v.size());
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
    for (std::size_t k = i; k <= j; ++k) r[idx[k]] = 0.5 * static_cast<double>(i + j) + 1;
    i = j + 1;
  }
  return r;
}

inline double spearman(const std::vector<double>& a, const std::vector<double>& b) {
  const auto ra = ranks(a), rb = ranks(b);
  const double n = static_cast<double>(a.size());
  const double ma = std::accumulate(ra.begin(), ra.end(), 0.0) / n;
  const double mb = std::accumulate(rb.begin(), rb.end(), 0.0) / n;
  double sab = 0, saa = 0, sbb = 0;
  for (std::size_t i = 0; i < ra.size(); ++i) {
    sab += (ra[i] - ma) * (rb[i] - mb);
    saa += (ra[i] - ma) * (ra[i] - ma);
    sbb += (rb[i] - mb) * (rb[i] - mb);
  }
  return sab / std::sqrt(saa * sbb);
}

}  // namespace sfe::test
