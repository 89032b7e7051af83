// Copyright 2026 The sfequiv Authors
// SPDX-License-Identifier: Apache-2.0

#include "sfe/synth.hpp"

#include <algorithm>

#include "sfe/csv.hpp"
#include "sfe/error.hpp"
#include "sfe/rng.hpp"

namespace sfe {

std::vector<std::string> visit_sequence(const Schema& schema) {
  std::vector<const VariableSpec*> vars;
  for (const auto& v : schema.variables()) vars.push_back(&v);
  std::sort(vars.begin(), vars.end(),
            [](const VariableSpec* a, const VariableSpec* b) {
              if (a->is_categorical() != b->is_categorical()) {
                return !a->is_categorical();
              }
              if (a->is_categorical() &&
                  a->categories.size() != b->categories.size()) {
                return a->categories.size() < b->categories.size();
              }
              return a->name < b->name;
            });
  std::vector<std::string> out;
  for (const auto* v : vars) out.push_back(v->name);
  return out;
}

namespace {

void copy_cell(const Column& src, std::size_t from, Column& dst,
               std::size_t to, bool categorical) {
  if (categorical) {
    dst.codes[to] = src.codes[from];
  } else {
    dst.values[to] = src.values[from];
  }
}

std::vector<Column> allocate(const Schema& schema, std::size_t n) {
  std::vector<Column> cols(schema.size());
  for (std::size_t j = 0; j < schema.size(); ++j) {
    if (schema[j].is_categorical()) {
      cols[j].codes.assign(n, kMissingCode);
    } else {
      cols[j].values.assign(n, missing_numeric());
    }
  }
  return cols;
}

}  // namespace

MicroTable synth_independent(const MicroTable& t, std::size_t n,
                             std::uint64_t seed) {
  if (t.empty()) throw Error(ErrorCode::EmptyTable, "cannot synthesise from an empty table");
  if (n == 0) throw Error(ErrorCode::InvalidConfig, "synthetic size must be >= 1");
  const auto& schema = t.schema();
  auto cols = allocate(schema, n);
  for (std::size_t j = 0; j < schema.size(); ++j) {
    Rng rng(derive_seed(seed, j, 0));
    for (std::size_t i = 0; i < n; ++i) {
      copy_cell(t.column(j), rng.uniform_index(t.n_rows()), cols[j], i,
                schema[j].is_categorical());
    }
  }
  return MicroTable(schema, std::move(cols));
}

MicroTable synth_cart(const MicroTable& t, std::size_t n, std::uint64_t seed,
                      const CartSynthOptions& opts) {
  if (t.empty()) throw Error(ErrorCode::EmptyTable, "cannot synthesise from an empty table");
  if (n == 0) throw Error(ErrorCode::InvalidConfig, "synthetic size must be >= 1");
  opts.cart.validate();
  const auto& schema = t.schema();
  const auto order = visit_sequence(schema);
  auto cols = allocate(schema, n);

  const auto first = schema.index_of(order.front());
  {
    Rng rng(derive_seed(seed, 0, 0));
    for (std::size_t i = 0; i < n; ++i) {
      copy_cell(t.column(first), rng.uniform_index(t.n_rows()), cols[first], i,
                schema[first].is_categorical());
    }
  }

  for (std::size_t k = 1; k < order.size(); ++k) {
    const auto var = schema.index_of(order[k]);
    const std::vector<std::string> predictors(order.begin(),
                                              order.begin() + static_cast<std::ptrdiff_t>(k));
    CartTree tree;
    try {
      tree = cart_fit(t, order[k], predictors, opts.cart);
    } catch (const Error& e) {
      throw e.annotated("synthesising " + order[k]);
    }
    const bool categorical = schema[var].is_categorical();
    auto& out = cols[var];
    const auto nn = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t ii = 0; ii < nn; ++ii) {
      const auto i = static_cast<std::size_t>(ii);
      Rng rng(derive_seed(seed, k, i));
      const Cell c = cart_draw(tree, cols, i, t, rng);
      if (categorical) {
        out.codes[i] = c.code;
      } else {
        double v = c.value;
        if (opts.jitter > 0 && !is_missing(v)) {
          v += (rng.uniform01() - 0.5) * opts.jitter;
        }
        out.values[i] = v;
      }
    }
  }
  return MicroTable(schema, std::move(cols));
}

ExternalSynth load_external_synth(const std::filesystem::path& path,
                                  const Schema& schema) {
  Schema open(schema.variables(), /*extend_categories=*/true);
  ExternalSynth out;
  out.table = load_csv(path, open);
  const Schema& loaded = out.table.schema();
  for (std::size_t j = 0; j < schema.size(); ++j) {
    const auto& before = schema[j].categories;
    const auto& after = loaded[j].categories;
    for (std::size_t c = before.size(); c < after.size(); ++c) {
      out.warnings.push_back(path.string() + ": novel category " +
                             schema[j].name + "=" + after[c] +
                             " added to the dictionary");
    }
  }
  // Restore the caller's extension mode on the widened dictionary.
  out.table = out.table.with_schema(
      Schema(loaded.variables(), schema.extend_categories()));
  return out;
}

}  // namespace sfe
