#pragma once

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "didacks/errors.hpp"

namespace didacks {

struct SolverDiagnostics {
  double condition_estimate = 0.0; // (max L_ii / min L_ii)^2 from the Cholesky factor
  double relative_residual = 0.0;  // ||T mu - A|| / ||A||
  bool ridge_applied = false;
  double ridge = 0.0;
};

template <class Scalar>
struct SpdSolution {
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> mu;
  SolverDiagnostics diagnostics;
};

namespace detail {

template <class Scalar>
bool cholesky(const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& t,
              Eigen::LLT<Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>>& llt,
              double& min_pivot, double& max_pivot) {
  llt.compute(t);
  if (llt.info() != Eigen::Success) {
    return false;
  }
  const auto d = llt.matrixLLT().diagonal().real();
  min_pivot = d.minCoeff();
  max_pivot = d.maxCoeff();
  return std::isfinite(min_pivot) && min_pivot > 0.0;
}

} // namespace detail

// Solves T mu = A for Hermitian positive definite T by Cholesky. If the
// factorization breaks down or a pivot is numerically negligible, a ridge
// of 1e-12 max diag(T) is added once before giving up.
template <class Scalar>
SpdSolution<Scalar> spd_solve(const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& t,
                              const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& a) {
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  detail::require(t.rows() == t.cols(), "normal matrix must be square");
  detail::require(t.rows() == a.size(), "normal matrix and right-hand side sizes differ");
  detail::require(t.rows() > 0, "normal equations are empty");
  detail::require(t.allFinite() && a.allFinite(), "normal equations contain non-finite entries");

  const double max_diag = t.diagonal().real().maxCoeff();
  const double n = static_cast<double>(t.rows());
  const double eps = std::numeric_limits<double>::epsilon();

  SpdSolution<Scalar> out;
  Eigen::LLT<Matrix> llt;
  double lo = 0.0, hi = 0.0;
  bool ok = detail::cholesky<Scalar>(t, llt, lo, hi) && lo * lo > n * eps * max_diag;
  if (!ok) {
    const double ridge = 1e-12 * max_diag;
    Matrix shifted = t;
    shifted.diagonal().array() += Scalar(ridge);
    if (!detail::cholesky<Scalar>(shifted, llt, lo, hi)) {
      throw solver_error("Cholesky factorization failed after ridge regularization");
    }
    out.diagnostics.ridge_applied = true;
    out.diagnostics.ridge = ridge;
  }
  out.mu = llt.solve(a);
  if (!out.mu.allFinite()) {
    throw solver_error("solution is not finite");
  }
  out.diagnostics.condition_estimate = (hi / lo) * (hi / lo);
  const double anorm = a.norm();
  const double rnorm = (t * out.mu - a).norm();
  out.diagnostics.relative_residual = anorm > 0.0 ? rnorm / anorm : rnorm;
  return out;
}

} // namespace didacks
