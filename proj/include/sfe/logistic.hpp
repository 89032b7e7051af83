// Copyright 2026 The sfequiv Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>

namespace sfe {

struct FitOptions {
  double tol = 1e-8;   // on max |score component|
  int max_iter = 50;
  // A converged fit with any |linear predictor| above this is treated as
  // (quasi-)separated.
  double separation_eta = 15.0;
};

struct FitResult {
  Eigen::VectorXd coefficients;
  Eigen::VectorXd standard_errors;
  Eigen::VectorXd score;  // gradient of the log-likelihood at coefficients
  double log_likelihood = 0.0;
  bool converged = false;
  int iterations = 0;
};

// Maximum-likelihood logistic regression by Newton-Raphson (IRLS) with step
// halving. X must carry its own intercept column. Standard errors are the
// square roots of the inverse observed information diagonal.
// Errors: RankDeficient (n <= p or collinear X), SingularInformation,
// Separation (no convergence or diverging linear predictor), MalformedInput
// (y not 0/1 or size mismatch).
FitResult fit_logistic(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                       const FitOptions& opts = {});

double logistic_log_likelihood(const Eigen::MatrixXd& X,
                               const Eigen::VectorXd& y,
                               const Eigen::VectorXd& beta);

}  // namespace sfe
