// Copyright 2026 The sfequiv Authors
// SPDX-License-Identifier: Apache-2.0

#include "sfe/curve.hpp"

#include <omp.h>

#include <cmath>
#include <exception>
#include <optional>

#include "sfe/csv.hpp"
#include "sfe/error.hpp"

namespace sfe {

namespace {

struct Task {
  double fraction;
  int replicate;
  std::uint64_t seed;
};

struct Outcome {
  double utility = 0.0;
  double risk = 0.0;
  std::exception_ptr error;
};

std::vector<Task> plan_tasks(const FractionGrid& grid,
                             const ReplicatePlan& plan) {
  grid.validate();
  plan.validate();
  std::vector<Task> tasks;
  tasks.reserve(grid.fractions.size() *
                static_cast<std::size_t>(plan.replicates));
  for (double f : grid.fractions) {
    const auto seeds = replicate_seeds(plan, f);
    for (int r = 0; r < plan.replicates; ++r) {
      tasks.push_back({f, r, seeds[static_cast<std::size_t>(r)]});
    }
  }
  return tasks;
}

Outcome run_task(const Evaluator& evaluator, const Task& task) {
  Outcome out;
  try {
    const auto sample =
        draw_sample(evaluator.original(), task.fraction, task.seed);
    const auto s = evaluator.evaluate(sample);
    out.utility = s.utility.overall;
    out.risk = s.risk.marginal;
  } catch (...) {
    out.error = std::current_exception();
  }
  return out;
}

[[noreturn]] void rethrow_annotated(const Task& task, std::exception_ptr e) {
  const std::string where = "fraction " + format_number(task.fraction) +
                            ", replicate " + std::to_string(task.replicate);
  try {
    std::rethrow_exception(e);
  } catch (const Error& err) {
    throw err.annotated(where);
  }
}

// Mean and R-1 standard deviation, summed in replicate order.
void summarize(const std::vector<Outcome>& outcomes, std::size_t first,
               std::size_t count, CurvePoint& p) {
  double su = 0.0, sr = 0.0;
  for (std::size_t i = first; i < first + count; ++i) {
    su += outcomes[i].utility;
    sr += outcomes[i].risk;
  }
  const double n = static_cast<double>(count);
  p.mean_utility = su / n;
  p.mean_risk = sr / n;
  double vu = 0.0, vr = 0.0;
  for (std::size_t i = first; i < first + count; ++i) {
    vu += (outcomes[i].utility - p.mean_utility) *
          (outcomes[i].utility - p.mean_utility);
    vr += (outcomes[i].risk - p.mean_risk) * (outcomes[i].risk - p.mean_risk);
  }
  p.sd_utility = count > 1 ? std::sqrt(vu / (n - 1)) : 0.0;
  p.sd_risk = count > 1 ? std::sqrt(vr / (n - 1)) : 0.0;
  p.n_replicates = static_cast<int>(count);
}

RUCurve reduce(const FractionGrid& grid, const ReplicatePlan& plan,
               const std::vector<Task>& tasks,
               const std::vector<Outcome>& outcomes, bool store) {
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    if (outcomes[i].error) rethrow_annotated(tasks[i], outcomes[i].error);
  }
  RUCurve curve;
  const auto reps = static_cast<std::size_t>(plan.replicates);
  for (std::size_t k = 0; k < grid.fractions.size(); ++k) {
    CurvePoint p;
    p.fraction = grid.fractions[k];
    summarize(outcomes, k * reps, reps, p);
    curve.points.push_back(p);
  }
  if (curve.points.back().fraction < 1.0) {
    curve.points.push_back(terminal_point());
  }
  if (store) {
    for (std::size_t i = 0; i < tasks.size(); ++i) {
      curve.replicates.push_back({tasks[i].fraction, tasks[i].replicate,
                                  tasks[i].seed, outcomes[i].utility,
                                  outcomes[i].risk});
    }
  }
  return curve;
}

}  // namespace

RUCurve build_curve(const Evaluator& evaluator, const FractionGrid& grid,
                    const ReplicatePlan& plan, const CurveOptions& opts) {
  const auto tasks = plan_tasks(grid, plan);
  std::vector<Outcome> outcomes(tasks.size());
  const int threads = opts.jobs > 0 ? opts.jobs : omp_get_max_threads();
  const auto n = static_cast<std::ptrdiff_t>(tasks.size());
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    outcomes[static_cast<std::size_t>(i)] =
        run_task(evaluator, tasks[static_cast<std::size_t>(i)]);
  }
  return reduce(grid, plan, tasks, outcomes, opts.store_replicates);
}

RUCurve build_curve_serial(const Evaluator& evaluator, const FractionGrid& grid,
                           const ReplicatePlan& plan,
                           const CurveOptions& opts) {
  const auto tasks = plan_tasks(grid, plan);
  std::vector<Outcome> outcomes;
  outcomes.reserve(tasks.size());
  for (const auto& t : tasks) outcomes.push_back(run_task(evaluator, t));
  return reduce(grid, plan, tasks, outcomes, opts.store_replicates);
}

RUCurve build_curve(const MicroTable& t, const FractionGrid& grid,
                    const ReplicatePlan& plan, const EvaluationConfig& cfg,
                    const CurveOptions& opts) {
  const Evaluator evaluator(t, cfg);
  return build_curve(evaluator, grid, plan, opts);
}

}  // namespace sfe
