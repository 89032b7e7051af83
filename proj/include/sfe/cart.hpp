// Copyright 2026 The sfequiv Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sfe/rng.hpp"
#include "sfe/table.hpp"

namespace sfe {

struct CartParams {
  int min_leaf = 5;
  int max_depth = 30;
  // A split must reduce node impurity (Gini for categorical targets,
  // variance for numeric ones, per row) by at least this much.
  double min_split_improvement = 1e-7;
  // Categorical predictors with more levels present at a node are split by
  // ordering levels on the target instead of trying every subset.
  int exhaustive_max_levels = 12;

  void validate() const;
};

struct CartSplit {
  std::size_t var = 0;
  bool numeric = false;
  // Numeric: value <= threshold goes left; Missing follows missing_left.
  double threshold = 0.0;
  bool missing_left = false;
  // Categorical, per level (Missing is the last level): 1 = left.
  std::vector<char> left_levels;
  // Categorical levels seen at this node in training; others follow the
  // majority branch.
  std::vector<char> seen_levels;
  bool majority_left = true;
  double gain = 0.0;

  bool goes_left(std::int32_t code) const;    // categorical
  bool goes_left_value(double value) const;   // numeric
};

struct CartNode {
  std::optional<CartSplit> split;
  int left = -1;
  int right = -1;
  int depth = 0;
  std::vector<std::size_t> rows;  // training rows, leaves only
};

class CartTree {
 public:
  const std::vector<CartNode>& nodes() const { return nodes_; }
  const CartNode& root() const { return nodes_.front(); }
  std::size_t target() const { return target_; }
  const std::vector<std::size_t>& predictors() const { return predictors_; }

  // Leaf reached by row `row` of `columns` (laid out like the training
  // schema; only predictor columns are read).
  const CartNode& leaf_for(std::span<const Column> columns,
                           std::size_t row) const;

  std::size_t leaf_count() const;
  int depth() const;

 private:
  friend CartTree cart_fit(const MicroTable&, const std::string&,
                           std::span<const std::string>, const CartParams&);
  std::vector<CartNode> nodes_;
  std::size_t target_ = 0;
  std::vector<std::size_t> predictors_;
};

// Impurity of the target over `rows`: Gini (categorical, Missing a class) or
// population variance of non-missing values (numeric).
double node_impurity(const MicroTable& t, std::size_t target,
                     std::span<const std::size_t> rows);

// Best split of `rows`, or nullopt when no split satisfies min_leaf.
// Gain = impurity(parent) - weighted child impurities (row-weighted).
std::optional<CartSplit> best_split(const MicroTable& t, std::size_t target,
                                    std::span<const std::size_t> rows,
                                    std::span<const std::size_t> predictors,
                                    const CartParams& params);

// Greedy binary tree. A table where no split clears the thresholds yields
// a single root leaf. Error EmptyTable.
CartTree cart_fit(const MicroTable& t, const std::string& target,
                  std::span<const std::string> predictors,
                  const CartParams& params = {});

struct Cell {
  std::int32_t code = kMissingCode;
  double value = 0.0;
};

// Donor draw: routes the row to a leaf and copies the target cell of a
// uniformly chosen training row in that leaf.
Cell cart_draw(const CartTree& tree, std::span<const Column> columns,
                 std::size_t row, const MicroTable& training, Rng& rng);

}  // namespace sfe
