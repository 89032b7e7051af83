// Copyright 2026 The sfequiv Authors
// SPDX-License-Identifier: Apache-2.0

// sfe: score synthetic microdata, build the sample-fraction reference curve
// and report where synthetic data sits on it.

#include <omp.h>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "sfe/config.hpp"
#include "sfe/csv.hpp"
#include "sfe/curve.hpp"
#include "sfe/equivalence.hpp"
#include "sfe/error.hpp"
#include "sfe/evaluation.hpp"
#include "sfe/fixture.hpp"
#include "sfe/report.hpp"
#include "sfe/rng.hpp"
#include "sfe/synth.hpp"

namespace fs = std::filesystem;

namespace {

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw sfe::Error(sfe::ErrorCode::Io, "cannot write " + path.string());
  return out;
}

void set_jobs(int jobs) {
  if (jobs > 0) omp_set_num_threads(jobs);
}

sfe::MicroTable load_original(const sfe::RunConfig& rc, const fs::path& path) {
  try {
    return sfe::load_csv(path, rc.schema);
  } catch (const sfe::Error& e) {
    throw e.annotated(path.string());
  }
}

// ---------------------------------------------------------------- evaluate

struct EvaluateArgs {
  fs::path config, original, out, diagnostics;
  std::vector<fs::path> files;
  std::string label = "synthetic";
  bool append = false;
  int jobs = 0;
};

int cmd_evaluate(const EvaluateArgs& a) {
  set_jobs(a.jobs);
  const auto rc = sfe::load_config(a.config);
  auto original = load_original(rc, a.original);

  // Load every file first so all share one category dictionary.
  std::vector<std::optional<sfe::MicroTable>> synths(a.files.size());
  std::optional<sfe::Error> first_error;
  auto report = [&](const fs::path& file, const sfe::Error& e) {
    std::cerr << "error: " << file.string() << ": " << e.what() << '\n';
    if (!first_error) first_error = e;
  };
  for (std::size_t k = 0; k < a.files.size(); ++k) {
    try {
      auto ext = sfe::load_external_synth(a.files[k], original.schema());
      for (const auto& w : ext.warnings) std::cerr << "warning: " << w << '\n';
      sfe::harmonize(original, ext.table);
      synths[k] = std::move(ext.table);
    } catch (const sfe::Error& e) {
      report(a.files[k], e);
    }
  }

  const sfe::Evaluator evaluator(original, rc.eval);
  std::vector<sfe::ScoreRow> rows;
  if (a.append && fs::exists(a.out)) rows = sfe::read_scores_csv(a.out);
  std::vector<sfe::ScoreRow> mine;
  std::ostringstream diag;
  sfe::write_cio_header(diag);
  for (std::size_t k = 0; k < a.files.size(); ++k) {
    if (!synths[k]) continue;
    try {
      const auto table = synths[k]->with_schema(original.schema());
      mine.push_back(sfe::score_row(a.label, a.files[k].string(),
                                    evaluator.evaluate(table)));
      if (!a.diagnostics.empty()) {
        const auto cio = evaluator.cio_detail(table);
        for (const auto& w : cio.warnings) {
          std::cerr << "warning: " << a.files[k].string() << ": " << w << '\n';
        }
        sfe::write_cio_rows(a.label, a.files[k].string(), cio, diag);
      }
    } catch (const sfe::Error& e) {
      report(a.files[k], e);
    }
  }
  if (first_error) return sfe::exit_code_for(first_error->code());

  rows.insert(rows.end(), mine.begin(), mine.end());
  rows.push_back(sfe::mean_row(a.label, mine));
  auto out = open_out(a.out);
  sfe::write_scores_csv(rows, out);
  if (!a.diagnostics.empty()) open_out(a.diagnostics) << diag.str();
  return 0;
}

// ------------------------------------------------------------------- curve

struct CurveArgs {
  fs::path config, original, out, replicates_out;
  std::optional<std::uint64_t> seed;
  std::optional<int> replicates;
  int jobs = 0;
};

int cmd_curve(const CurveArgs& a) {
  auto rc = sfe::load_config(a.config);
  if (a.seed) rc.eval.plan.base_seed = *a.seed;
  if (a.replicates) rc.eval.plan.replicates = *a.replicates;
  rc.eval.plan.validate();
  const auto original = load_original(rc, a.original);
  const sfe::Evaluator evaluator(original, rc.eval);
  sfe::CurveOptions opts;
  opts.jobs = a.jobs;
  opts.store_replicates = !a.replicates_out.empty();
  const auto curve = sfe::build_curve(evaluator, rc.eval.grid, rc.eval.plan, opts);
  auto out = open_out(a.out);
  sfe::write_curve_csv(curve, out);
  if (opts.store_replicates) {
    auto rep = open_out(a.replicates_out);
    const std::string header[] = {"fraction", "replicate", "seed", "utility", "risk"};
    sfe::write_csv_row(rep, header);
    for (const auto& r : curve.replicates) {
      const std::string f[] = {sfe::format_number(r.fraction),
                               std::to_string(r.replicate),
                               std::to_string(r.seed),
                               sfe::format_number(r.utility),
                               sfe::format_number(r.risk)};
      sfe::write_csv_row(rep, f);
    }
  }
  return 0;
}

// ------------------------------------------------------------- equivalence

struct EquivalenceArgs {
  fs::path config, curve, scores, out, diagnostics;
  bool isotonic = false;
};

int cmd_equivalence(const EquivalenceArgs& a) {
  if (!a.config.empty()) sfe::load_config(a.config);
  auto curve = sfe::read_curve_csv(a.curve);
  if (a.isotonic) curve = sfe::isotonic_smooth(curve);
  const auto scores = sfe::read_scores_csv(a.scores);
  const auto rows = sfe::equivalence_report(scores, curve);
  auto out = open_out(a.out);
  sfe::write_equivalence_csv(rows, out);
  if (!a.diagnostics.empty()) {
    auto d = open_out(a.diagnostics);
    sfe::write_equivalence_diagnostics(rows, d);
  }
  return 0;
}

// ------------------------------------------------------------------- rumap

struct RumapArgs {
  fs::path curve, scores, out;
};

int cmd_rumap(const RumapArgs& a) {
  const auto curve = sfe::read_curve_csv(a.curve);
  std::vector<sfe::RuMapPoint> points;
  if (!a.scores.empty()) points = sfe::synthetic_points(sfe::read_scores_csv(a.scores));
  open_out(a.out) << sfe::render_rumap_svg(curve, points);
  return 0;
}

// -------------------------------------------------------------- synthesize

struct SynthesizeArgs {
  fs::path config, original, out;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> method;
  std::optional<std::size_t> rows;
  int replicates = 1;
  int jobs = 0;
};

fs::path replicate_path(const fs::path& out, int index, int total) {
  if (total == 1) return out;
  fs::path p = out;
  p.replace_filename(out.stem().string() + "_" + std::to_string(index + 1) +
                     out.extension().string());
  return p;
}

int cmd_synthesize(const SynthesizeArgs& a) {
  set_jobs(a.jobs);
  auto rc = sfe::load_config(a.config);
  if (a.seed) rc.synthesis.seed = *a.seed;
  if (a.method) rc.synthesis.method = sfe::parse_synth_method(*a.method);
  if (a.replicates < 1) {
    throw sfe::Error(sfe::ErrorCode::InvalidConfig, "--replicates must be >= 1");
  }
  const auto original = load_original(rc, a.original);
  const std::size_t n = a.rows.value_or(original.n_rows());
  const std::string digest = sfe::sha256_file(a.original);

  for (int m = 0; m < a.replicates; ++m) {
    // Replicate m uses an independent stream derived from the run seed.
    const std::uint64_t seed =
        a.replicates == 1 ? rc.synthesis.seed
                          : sfe::derive_seed(rc.synthesis.seed, 0x5EED, m);
    const auto synth = rc.synthesis.method == sfe::SynthMethod::Cart
                           ? sfe::synth_cart(original, n, seed, rc.synthesis.cart)
                           : sfe::synth_independent(original, n, seed);
    const fs::path path = replicate_path(a.out, m, a.replicates);
    sfe::write_csv(synth, path);

    const auto& c = rc.synthesis.cart.cart;
    nlohmann::ordered_json prov;
    prov["method"] = sfe::to_string(rc.synthesis.method);
    prov["seed"] = seed;
    prov["run_seed"] = rc.synthesis.seed;
    prov["replicate"] = m + 1;
    prov["rows"] = n;
    prov["visit_sequence"] = sfe::visit_sequence(original.schema());
    if (rc.synthesis.method == sfe::SynthMethod::Cart) {
      prov["params"] = {{"min_leaf", c.min_leaf},
                        {"max_depth", c.max_depth},
                        {"min_split_improvement", c.min_split_improvement},
                        {"exhaustive_max_levels", c.exhaustive_max_levels},
                        {"jitter", rc.synthesis.cart.jitter}};
    } else {
      prov["params"] = nlohmann::ordered_json::object();
    }
    prov["original"] = {{"file", a.original.filename().string()},
                        {"rows", original.n_rows()},
                        {"sha256", digest}};
    fs::path side = path;
    side += ".provenance.json";
    open_out(side) << prov.dump(2) << '\n';
  }
  return 0;
}

// ------------------------------------------------------------ make-fixture

struct FixtureArgs {
  fs::path out, schema_out;
  sfe::FixtureParams params;
};

int cmd_make_fixture(const FixtureArgs& a) {
  const auto table = sfe::make_fixture(a.params);
  sfe::write_csv(table, a.out);
  fs::path schema = a.schema_out;
  if (schema.empty()) {
    schema = a.out;
    schema.replace_extension(".schema.json");
  }
  sfe::save_schema(table.schema(), schema);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Risk/utility evaluation of synthetic microdata against sample fractions"};
  app.require_subcommand(1);

  EvaluateArgs ev;
  auto* evaluate = app.add_subcommand("evaluate", "Score synthetic files against the original");
  evaluate->add_option("--config", ev.config, "Run configuration (JSON)")->required()->check(CLI::ExistingFile);
  evaluate->add_option("--original", ev.original, "Original CSV")->required()->check(CLI::ExistingFile);
  evaluate->add_option("--out", ev.out, "Scores CSV to write")->required();
  evaluate->add_option("--label", ev.label, "Synthesizer label for these files");
  evaluate->add_option("--diagnostics", ev.diagnostics, "Per-coefficient CIO CSV");
  evaluate->add_flag("--append", ev.append, "Append to an existing scores CSV");
  evaluate->add_option("--jobs", ev.jobs, "Worker thread cap")->check(CLI::NonNegativeNumber);
  evaluate->add_option("files", ev.files, "Synthetic CSV files")->required()->check(CLI::ExistingFile);

  CurveArgs cu;
  auto* curve = app.add_subcommand("curve", "Build the sample-fraction reference curve");
  curve->add_option("--config", cu.config, "Run configuration (JSON)")->required()->check(CLI::ExistingFile);
  curve->add_option("--original", cu.original, "Original CSV")->required()->check(CLI::ExistingFile);
  curve->add_option("--out", cu.out, "Curve CSV to write")->required();
  curve->add_option("--seed", cu.seed, "Base seed (overrides sampling.base_seed)");
  curve->add_option("--replicates", cu.replicates, "Replicates per fraction");
  curve->add_option("--replicates-out", cu.replicates_out, "Per-replicate scores CSV");
  curve->add_option("--jobs", cu.jobs, "Worker thread cap")->check(CLI::NonNegativeNumber);

  EquivalenceArgs eq;
  auto* equiv = app.add_subcommand("equivalence", "Place synthetic scores on the curve");
  equiv->add_option("--config", eq.config, "Run configuration (validated only)")->check(CLI::ExistingFile);
  equiv->add_option("--curve", eq.curve, "Curve CSV")->required()->check(CLI::ExistingFile);
  equiv->add_option("--scores", eq.scores, "Scores CSV")->required()->check(CLI::ExistingFile);
  equiv->add_option("--out", eq.out, "Report CSV to write")->required();
  equiv->add_option("--diagnostics", eq.diagnostics, "Interpolated fractions CSV");
  equiv->add_flag("--isotonic", eq.isotonic, "Smooth curve means to be monotone first");

  RumapArgs rm;
  auto* rumap = app.add_subcommand("rumap", "Draw the risk-utility map as SVG");
  rumap->add_option("--curve", rm.curve, "Curve CSV")->required()->check(CLI::ExistingFile);
  rumap->add_option("--scores", rm.scores, "Scores CSV")->check(CLI::ExistingFile);
  rumap->add_option("--out", rm.out, "SVG to write")->required();

  SynthesizeArgs sy;
  auto* synth = app.add_subcommand("synthesize", "Generate synthetic data from the original");
  synth->add_option("--config", sy.config, "Run configuration (JSON)")->required()->check(CLI::ExistingFile);
  synth->add_option("--original", sy.original, "Original CSV")->required()->check(CLI::ExistingFile);
  synth->add_option("--out", sy.out, "Synthetic CSV to write")->required();
  synth->add_option("--seed", sy.seed, "Seed (overrides synthesis.seed)");
  synth->add_option("--method", sy.method, "cart or independent");
  synth->add_option("--rows", sy.rows, "Rows to generate (default: original size)");
  synth->add_option("--replicates", sy.replicates, "Number of datasets; files get _1.._m suffixes");
  synth->add_option("--jobs", sy.jobs, "Worker thread cap")->check(CLI::NonNegativeNumber);

  FixtureArgs fx;
  auto* fixture = app.add_subcommand("make-fixture", "Write a latent-class toy population");
  fixture->add_option("--out", fx.out, "CSV to write")->required();
  fixture->add_option("--schema-out", fx.schema_out, "Schema JSON (default: <out>.schema.json)");
  fixture->add_option("--rows", fx.params.n, "Number of rows");
  fixture->add_option("--categorical", fx.params.n_categorical, "Categorical variables");
  fixture->add_option("--numeric", fx.params.n_numeric, "Numeric variables");
  fixture->add_option("--cardinalities", fx.params.cardinalities, "Category counts, cycled")->delimiter(',');
  fixture->add_option("--classes", fx.params.latent_classes, "Latent classes");
  fixture->add_option("--dependence", fx.params.dependence, "Dependence strength in [0, 1]");
  fixture->add_option("--missing-rate", fx.params.missing_rate, "Per-cell missing probability");
  fixture->add_option("--seed", fx.params.seed, "Seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*evaluate) return cmd_evaluate(ev);
    if (*curve) return cmd_curve(cu);
    if (*equiv) return cmd_equivalence(eq);
    if (*rumap) return cmd_rumap(rm);
    if (*synth) return cmd_synthesize(sy);
    if (*fixture) return cmd_make_fixture(fx);
  } catch (const sfe::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return sfe::exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
  return 0;
}
