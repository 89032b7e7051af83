// Copyright 2026 The sfequiv Authors
// SPDX-License-Identifier: Apache-2.0

#include "sfe/logistic.hpp"

#include <cmath>
#include <string>

#include "sfe/error.hpp"

namespace sfe {

namespace {

// log(1 + exp(x)) without overflow.
double softplus(double x) {
  return x > 0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

double sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

}  // namespace

double logistic_log_likelihood(const Eigen::MatrixXd& X,
                               const Eigen::VectorXd& y,
                               const Eigen::VectorXd& beta) {
  const Eigen::VectorXd eta = X * beta;
  double ll = 0.0;
  for (Eigen::Index i = 0; i < eta.size(); ++i) {
    ll += y[i] * eta[i] - softplus(eta[i]);
  }
  return ll;
}

FitResult fit_logistic(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                       const FitOptions& opts) {
  const Eigen::Index n = X.rows();
  const Eigen::Index p = X.cols();
  if (y.size() != n) {
    throw Error(ErrorCode::MalformedInput, "response length differs from X");
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    if (y[i] != 0.0 && y[i] != 1.0) {
      throw Error(ErrorCode::MalformedInput, "response must be 0/1");
    }
  }
  if (p == 0 || n <= p) {
    throw Error(ErrorCode::RankDeficient,
                std::to_string(n) + " rows cannot support " +
                    std::to_string(p) + " terms");
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
  if (qr.rank() < p) {
    throw Error(ErrorCode::RankDeficient,
                "design matrix rank " + std::to_string(qr.rank()) + " < " +
                    std::to_string(p));
  }

  FitResult fit;
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);
  Eigen::VectorXd prob(n);
  Eigen::VectorXd weight(n);
  Eigen::VectorXd eta = X * beta;
  double ll = logistic_log_likelihood(X, y, beta);

  Eigen::LLT<Eigen::MatrixXd> llt;
  auto factor_information = [&]() {
    for (Eigen::Index i = 0; i < n; ++i) {
      prob[i] = sigmoid(eta[i]);
      weight[i] = prob[i] * (1.0 - prob[i]);
    }
    const Eigen::MatrixXd info =
        X.transpose() * weight.asDiagonal() * X;
    llt.compute(info);
    return llt.info() == Eigen::Success;
  };

  for (int iter = 0;; ++iter) {
    const bool ok = factor_information();
    const Eigen::VectorXd score = X.transpose() * (y - prob);
    if (score.cwiseAbs().maxCoeff() < opts.tol) {
      if (!ok) {
        throw Error(ErrorCode::SingularInformation,
                    "information matrix not positive definite at optimum");
      }
      fit.converged = true;
      fit.iterations = iter;
      fit.score = score;
      break;
    }
    if (iter >= opts.max_iter) {
      throw Error(ErrorCode::Separation,
                  "no convergence after " + std::to_string(iter) +
                      " iterations (max |score| " +
                      std::to_string(score.cwiseAbs().maxCoeff()) + ")");
    }
    if (!ok) {
      if (eta.cwiseAbs().maxCoeff() > opts.separation_eta) {
        throw Error(ErrorCode::Separation,
                    "fitted probabilities collapsed to 0/1");
      }
      throw Error(ErrorCode::SingularInformation,
                  "information matrix not positive definite");
    }
    const Eigen::VectorXd step = llt.solve(score);
    double scale = 1.0;
    Eigen::VectorXd candidate;
    double cand_ll = -INFINITY;
    for (int halving = 0; halving < 40; ++halving) {
      candidate = beta + scale * step;
      cand_ll = logistic_log_likelihood(X, y, candidate);
      if (cand_ll >= ll - 1e-12 * std::abs(ll)) break;
      scale *= 0.5;
    }
    beta = candidate;
    ll = cand_ll;
    eta = X * beta;
  }

  if (eta.cwiseAbs().maxCoeff() > opts.separation_eta) {
    throw Error(ErrorCode::Separation,
                "fitted probabilities numerically 0 or 1 (|eta| > " +
                    std::to_string(opts.separation_eta) + ")");
  }
  const Eigen::MatrixXd cov =
      llt.solve(Eigen::MatrixXd::Identity(p, p));
  fit.coefficients = beta;
  fit.standard_errors = cov.diagonal().cwiseSqrt();
  fit.log_likelihood = ll;
  for (Eigen::Index j = 0; j < p; ++j) {
    if (!std::isfinite(fit.standard_errors[j]) ||
        !(fit.standard_errors[j] > 0)) {
      throw Error(ErrorCode::SingularInformation,
                  "non-positive variance for term " + std::to_string(j));
    }
  }
  return fit;
}

}  // namespace sfe
