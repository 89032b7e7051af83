// Copyright 2026 The sfequiv Authors
// SPDX-License-Identifier: Apache-2.0

#include "sfe/cart.hpp"

#include <algorithm>
#include <numeric>

#include "sfe/error.hpp"

namespace sfe {

void CartParams::validate() const {
  if (min_leaf < 1) throw Error(ErrorCode::InvalidConfig, "min_leaf must be >= 1");
  if (max_depth < 0) throw Error(ErrorCode::InvalidConfig, "max_depth must be >= 0");
  if (exhaustive_max_levels < 2 || exhaustive_max_levels > 20) {
    throw Error(ErrorCode::InvalidConfig,
                "exhaustive_max_levels must be in [2, 20]");
  }
}

bool CartSplit::goes_left(std::int32_t code) const {
  const auto level = code == kMissingCode
                         ? left_levels.size() - 1
                         : static_cast<std::size_t>(code);
  if (level >= seen_levels.size() || !seen_levels[level]) return majority_left;
  return left_levels[level] != 0;
}

bool CartSplit::goes_left_value(double value) const {
  if (is_missing(value)) return missing_left;
  return value <= threshold;
}

namespace {

// Sufficient statistics of the target over a row set. Categorical layout:
// [n, count_0 .. count_{C-1}]; numeric: [n_valid, sum, sum_sq].
using Stats = std::vector<double>;

struct TargetView {
  bool numeric = false;
  std::size_t width = 0;
  std::span<const std::int32_t> codes;
  std::span<const double> values;
  std::size_t n_classes = 0;

  TargetView(const MicroTable& t, std::size_t target) {
    const auto& spec = t.schema()[target];
    numeric = !spec.is_categorical();
    if (numeric) {
      values = t.values(target);
      width = 3;
    } else {
      codes = t.codes(target);
      n_classes = spec.categories.size() + 1;
      width = 1 + n_classes;
    }
  }

  Stats empty() const { return Stats(width, 0.0); }

  void add(Stats& s, std::size_t row) const {
    if (numeric) {
      const double v = values[row];
      if (is_missing(v)) return;
      s[0] += 1;
      s[1] += v;
      s[2] += v * v;
    } else {
      const auto c = codes[row];
      s[0] += 1;
      s[1 + (c == kMissingCode ? n_classes - 1 : static_cast<std::size_t>(c))] += 1;
    }
  }

  double impurity(const Stats& s) const {
    const double n = s[0];
    if (n <= 0) return 0.0;
    if (numeric) {
      const double mean = s[1] / n;
      return std::max(0.0, s[2] / n - mean * mean);
    }
    double sum_sq = 0.0;
    for (std::size_t k = 1; k < s.size(); ++k) {
      const double p = s[k] / n;
      sum_sq += p * p;
    }
    return 1.0 - sum_sq;
  }

  double gain(const Stats& parent, const Stats& left,
              const Stats& right) const {
    const double n = parent[0];
    if (n <= 0) return 0.0;
    return impurity(parent) - (left[0] / n) * impurity(left) -
           (right[0] / n) * impurity(right);
  }
};

void add_into(Stats& dst, const Stats& src) {
  for (std::size_t k = 0; k < dst.size(); ++k) dst[k] += src[k];
}

Stats minus(const Stats& a, const Stats& b) {
  Stats out(a.size());
  for (std::size_t k = 0; k < a.size(); ++k) out[k] = a[k] - b[k];
  return out;
}

struct Candidate {
  CartSplit split;
  bool valid = false;
};

void consider(Candidate& best, CartSplit&& split) {
  if (!best.valid || split.gain > best.split.gain) {
    best.split = std::move(split);
    best.valid = true;
  }
}

void search_categorical(const MicroTable& t, const TargetView& tv,
                        std::size_t var, std::span<const std::size_t> rows,
                        const Stats& parent, const CartParams& params,
                        Candidate& best) {
  const auto codes = t.codes(var);
  const std::size_t n_levels = t.schema()[var].categories.size() + 1;
  std::vector<Stats> level_stats(n_levels, tv.empty());
  std::vector<std::size_t> level_rows(n_levels, 0);
  for (auto r : rows) {
    const auto l = codes[r] == kMissingCode ? n_levels - 1
                                            : static_cast<std::size_t>(codes[r]);
    tv.add(level_stats[l], r);
    ++level_rows[l];
  }
  std::vector<std::size_t> present;
  for (std::size_t l = 0; l < n_levels; ++l) {
    if (level_rows[l]) present.push_back(l);
  }
  const std::size_t m = present.size();
  if (m < 2) return;
  const std::size_t total_rows = rows.size();
  const auto min_leaf = static_cast<std::size_t>(params.min_leaf);

  std::vector<char> seen(n_levels, 0);
  for (auto l : present) seen[l] = 1;

  auto emit = [&](const std::vector<char>& left_mask) {
    Stats left = tv.empty();
    std::size_t nl = 0;
    for (auto l : present) {
      if (left_mask[l]) {
        add_into(left, level_stats[l]);
        nl += level_rows[l];
      }
    }
    const std::size_t nr = total_rows - nl;
    if (nl < min_leaf || nr < min_leaf) return;
    CartSplit s;
    s.var = var;
    s.numeric = false;
    s.left_levels = left_mask;
    s.seen_levels = seen;
    s.majority_left = nl >= nr;
    s.gain = tv.gain(parent, left, minus(parent, left));
    consider(best, std::move(s));
  };

  if (static_cast<int>(m) <= params.exhaustive_max_levels) {
    // First present level stays left; the remaining m-1 levels enumerate.
    const std::size_t combos = std::size_t{1} << (m - 1);
    std::vector<char> mask(n_levels, 0);
    for (std::size_t bits = 0; bits + 1 < combos; ++bits) {
      std::fill(mask.begin(), mask.end(), 0);
      mask[present[0]] = 1;
      for (std::size_t k = 1; k < m; ++k) {
        if (bits & (std::size_t{1} << (k - 1))) mask[present[k]] = 1;
      }
      emit(mask);
    }
    return;
  }

  // Ordering reduction: sort levels by target mean (numeric) or by the
  // share of the node's most frequent class, then scan prefixes.
  std::size_t major = 1;
  if (!tv.numeric) {
    for (std::size_t k = 2; k < parent.size(); ++k) {
      if (parent[k] > parent[major]) major = k;
    }
  }
  auto key = [&](std::size_t l) {
    const auto& s = level_stats[l];
    if (s[0] <= 0) return 0.0;
    return tv.numeric ? s[1] / s[0] : s[major] / s[0];
  };
  std::stable_sort(present.begin(), present.end(),
                   [&](std::size_t a, std::size_t b) { return key(a) < key(b); });
  std::vector<char> mask(n_levels, 0);
  for (std::size_t k = 0; k + 1 < m; ++k) {
    mask[present[k]] = 1;
    emit(mask);
  }
}

void search_numeric(const MicroTable& t, const TargetView& tv,
                    std::size_t var, std::span<const std::size_t> rows,
                    const Stats& parent, const CartParams& params,
                    Candidate& best) {
  const auto values = t.values(var);
  std::vector<std::size_t> ordered;
  ordered.reserve(rows.size());
  Stats missing = tv.empty();
  std::size_t n_missing = 0;
  for (auto r : rows) {
    if (is_missing(values[r])) {
      tv.add(missing, r);
      ++n_missing;
    } else {
      ordered.push_back(r);
    }
  }
  std::stable_sort(ordered.begin(), ordered.end(),
                   [&](std::size_t a, std::size_t b) {
                     return values[a] < values[b];
                   });
  const auto min_leaf = static_cast<std::size_t>(params.min_leaf);
  const std::size_t total_rows = rows.size();
  Stats left = tv.empty();
  for (std::size_t i = 0; i + 1 < ordered.size(); ++i) {
    tv.add(left, ordered[i]);
    const double a = values[ordered[i]];
    const double b = values[ordered[i + 1]];
    if (a == b) continue;
    double threshold = a + (b - a) / 2;
    if (!(threshold < b)) threshold = a;
    const std::size_t nl_present = i + 1;
    for (int side = 0; side < 2; ++side) {
      const bool missing_left = side == 0;
      if (n_missing == 0 && side == 1) break;
      Stats l = left;
      std::size_t nl = nl_present;
      if (missing_left) {
        add_into(l, missing);
        nl += n_missing;
      }
      const std::size_t nr = total_rows - nl;
      if (nl < min_leaf || nr < min_leaf) continue;
      CartSplit s;
      s.var = var;
      s.numeric = true;
      s.threshold = threshold;
      s.majority_left = nl >= nr;
      s.missing_left = n_missing == 0 ? s.majority_left : missing_left;
      s.gain = tv.gain(parent, l, minus(parent, l));
      consider(best, std::move(s));
    }
  }
}

}  // namespace

double node_impurity(const MicroTable& t, std::size_t target,
                     std::span<const std::size_t> rows) {
  const TargetView tv(t, target);
  Stats s = tv.empty();
  for (auto r : rows) tv.add(s, r);
  return tv.impurity(s);
}

std::optional<CartSplit> best_split(const MicroTable& t, std::size_t target,
                                    std::span<const std::size_t> rows,
                                    std::span<const std::size_t> predictors,
                                    const CartParams& params) {
  const TargetView tv(t, target);
  Stats parent = tv.empty();
  for (auto r : rows) tv.add(parent, r);
  Candidate best;
  for (auto var : predictors) {
    if (t.schema()[var].is_categorical()) {
      search_categorical(t, tv, var, rows, parent, params, best);
    } else {
      search_numeric(t, tv, var, rows, parent, params, best);
    }
  }
  if (!best.valid) return std::nullopt;
  return best.split;
}

namespace {

int grow(std::vector<CartNode>& nodes, const MicroTable& t,
         std::size_t target, std::span<const std::size_t> predictors,
         std::vector<std::size_t> rows, int depth, const CartParams& params) {
  const int id = static_cast<int>(nodes.size());
  nodes.emplace_back();
  nodes[static_cast<std::size_t>(id)].depth = depth;
  auto make_leaf = [&] {
    nodes[static_cast<std::size_t>(id)].rows = std::move(rows);
    return id;
  };
  if (depth >= params.max_depth ||
      rows.size() < 2 * static_cast<std::size_t>(params.min_leaf) ||
      node_impurity(t, target, rows) <= 0.0) {
    return make_leaf();
  }
  auto split = best_split(t, target, rows, predictors, params);
  if (!split || split->gain < params.min_split_improvement) return make_leaf();

  std::vector<std::size_t> left, right;
  for (auto r : rows) {
    const bool go_left =
        split->numeric ? split->goes_left_value(t.column(split->var).values[r])
                       : split->goes_left(t.column(split->var).codes[r]);
    (go_left ? left : right).push_back(r);
  }
  rows.clear();
  rows.shrink_to_fit();
  nodes[static_cast<std::size_t>(id)].split = std::move(*split);
  const int l = grow(nodes, t, target, predictors, std::move(left), depth + 1,
                     params);
  const int r = grow(nodes, t, target, predictors, std::move(right),
                     depth + 1, params);
  nodes[static_cast<std::size_t>(id)].left = l;
  nodes[static_cast<std::size_t>(id)].right = r;
  return id;
}

}  // namespace

CartTree cart_fit(const MicroTable& t, const std::string& target,
                  std::span<const std::string> predictors,
                  const CartParams& params) {
  params.validate();
  if (t.empty()) throw Error(ErrorCode::EmptyTable, "cannot fit CART on an empty table");
  if (predictors.empty()) {
    throw Error(ErrorCode::InvalidConfig, "CART needs at least one predictor");
  }
  CartTree tree;
  tree.target_ = t.schema().index_of(target);
  for (const auto& p : predictors) {
    const auto j = t.schema().index_of(p);
    if (j == tree.target_) {
      throw Error(ErrorCode::InvalidConfig, "target used as its own predictor");
    }
    tree.predictors_.push_back(j);
  }
  std::vector<std::size_t> rows(t.n_rows());
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  grow(tree.nodes_, t, tree.target_, tree.predictors_, std::move(rows), 0,
       params);
  return tree;
}

const CartNode& CartTree::leaf_for(std::span<const Column> columns,
                                   std::size_t row) const {
  const CartNode* node = &nodes_.front();
  while (node->split) {
    const auto& s = *node->split;
    const bool left = s.numeric ? s.goes_left_value(columns[s.var].values[row])
                                : s.goes_left(columns[s.var].codes[row]);
    node = &nodes_[static_cast<std::size_t>(left ? node->left : node->right)];
  }
  return *node;
}

std::size_t CartTree::leaf_count() const {
  return static_cast<std::size_t>(std::count_if(
      nodes_.begin(), nodes_.end(),
      [](const CartNode& n) { return !n.split.has_value(); }));
}

int CartTree::depth() const {
  int d = 0;
  for (const auto& n : nodes_) d = std::max(d, n.depth);
  return d;
}

Cell cart_draw(const CartTree& tree, std::span<const Column> columns,
               std::size_t row, const MicroTable& training, Rng& rng) {
  const auto& leaf = tree.leaf_for(columns, row);
  const auto donor = leaf.rows[rng.uniform_index(leaf.rows.size())];
  Cell c;
  const auto& col = training.column(tree.target());
  if (training.schema()[tree.target()].is_categorical()) {
    c.code = col.codes[donor];
  } else {
    c.value = col.values[donor];
  }
  return c;
}

}  // namespace sfe
