// Copyright 2026 The sfequiv Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sfe/equivalence.hpp"
#include "sfe/evaluation.hpp"
#include "sfe/sampling.hpp"

namespace sfe {

// One line of the scores CSV. kind is "replicate" for a scored file and
// "mean" for the per-label average.
struct ScoreRow {
  std::string label;
  std::string file;
  std::string kind = "replicate";
  double roc_univariate = 0.0;
  double roc_bivariate = 0.0;
  double cio = 0.0;
  double overall_utility = 0.0;
  double raw_tcap = 0.0;
  double baseline = 0.0;
  double marginal_tcap = 0.0;
  double matched_fraction = 0.0;
  double no_match_pairs = 0.0;
};

ScoreRow score_row(const std::string& label, const std::string& file,
                   const Scores& scores);
// Column-wise mean of `rows`. Error EmptyScores.
ScoreRow mean_row(const std::string& label, std::span<const ScoreRow> rows);

void write_scores_csv(std::span<const ScoreRow> rows, std::ostream& out);
std::vector<ScoreRow> read_scores_csv(std::istream& in);
std::vector<ScoreRow> read_scores_csv(const std::filesystem::path& path);

struct EquivalenceRow {
  std::string synthesizer;
  EquivalenceResult result;
  std::string utility_text;
  std::string risk_text;
  std::optional<double> utility_interpolated;
  std::optional<double> risk_interpolated;
};

// One row per label, in first-appearance order. Replicate rows are averaged;
// a label with only a mean row uses that row.
std::vector<EquivalenceRow> equivalence_report(std::span<const ScoreRow> rows,
                                               const RUCurve& curve);

// synthesizer,overall_utility,risk_marginal_tcap,sample_equiv_utility,
// sample_equiv_risk
void write_equivalence_csv(std::span<const EquivalenceRow> rows,
                           std::ostream& out);
void write_equivalence_diagnostics(std::span<const EquivalenceRow> rows,
                                   std::ostream& out);

// Per-coefficient confidence intervals and raw overlaps.
void write_cio_header(std::ostream& out);
void write_cio_rows(const std::string& label, const std::string& file,
                    const CioResult& cio, std::ostream& out);

struct RuMapPoint {
  std::string label;
  double utility = 0.0;
  double risk = 0.0;
};

// Mean (utility, marginal risk) per label.
std::vector<RuMapPoint> synthetic_points(std::span<const ScoreRow> rows);

std::string render_rumap_svg(const RUCurve& curve,
                             std::span<const RuMapPoint> synthetic);

// Lowercase hex SHA-256 of a file's bytes.
std::string sha256_file(const std::filesystem::path& path);

}  // namespace sfe
