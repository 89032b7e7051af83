// Copyright 2026 The sfequiv Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "sfe/cart.hpp"
#include "sfe/table.hpp"

namespace sfe {

// Numeric variables first (alphabetical), then categorical variables by
// ascending category count, ties alphabetical.
std::vector<std::string> visit_sequence(const Schema& schema);

// Each column resampled independently from its empirical distribution.
// Error EmptyTable; n must be >= 1.
MicroTable synth_independent(const MicroTable& t, std::size_t n,
                             std::uint64_t seed);

struct CartSynthOptions {
  CartParams cart;
  // Uniform noise of this total width added to numeric donor values; 0 off.
  double jitter = 0.0;
};

// Sequential CART synthesis in visit_sequence order: the first variable is
// bootstrap-resampled, every later one is drawn from a tree fitted on the
// original with all earlier variables as predictors. Row i of variable k
// uses its own stream derive_seed(seed, k, i), so rows may be drawn in
// parallel.
MicroTable synth_cart(const MicroTable& t, std::size_t n, std::uint64_t seed,
                      const CartSynthOptions& opts = {});

struct ExternalSynth {
  MicroTable table;
  // One entry per category not present in the original dictionary.
  std::vector<std::string> warnings;
};

// Loads synthetic data produced elsewhere. Every schema variable must be
// present (MissingColumn); novel categories extend the dictionary (after the
// original's categories) and are reported in `warnings`.
ExternalSynth load_external_synth(const std::filesystem::path& path,
                                  const Schema& schema);

}  // namespace sfe
