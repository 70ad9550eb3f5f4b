#pragma once

#include <algorithm>
#include <complex>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "didacks/spd_solve.hpp"

namespace didacks {

enum class Setting { dirichlet_rn, surface_rn, complex_sigma, complex_dirichlet };

inline std::string to_string(Setting s) {
  switch (s) {
  case Setting::dirichlet_rn: return "dirichlet-rn";
  case Setting::surface_rn: return "surface-rn";
  case Setting::complex_sigma: return "sigma/2";
  case Setting::complex_dirichlet: return "D/2";
  }
  return "unknown";
}

template <class Scalar>
struct BasicNormalEquations {
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Column = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  Matrix T;
  Column A;
  Setting setting = Setting::dirichlet_rn;
  // Constant multiplying the point functional of each row (1/2, 2 pi, -1/2, ...).
  std::vector<Scalar> replication;
  double condition_estimate = 0.0;

  [[nodiscard]] Eigen::Index size() const { return A.size(); }
};

using NormalEquations = BasicNormalEquations<double>;

// One row of the interpolation table: the row's point functional applied to
// the fit and to the target.
template <class Scalar>
struct BasicInterpolationRow {
  Scalar fit;
  Scalar target;
  double abs_residual;
  double rel_residual; // relative to the largest |target| in the table
};

template <class Scalar>
struct BasicFitResult {
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> mu;
  Setting setting = Setting::dirichlet_rn;
  SolverDiagnostics diagnostics;
  double fit_energy = 0.0;                   // ||phi||^2
  std::optional<double> target_energy;       // ||f||^2 when closed form exists
  std::optional<double> error_energy;        // Phi
  std::vector<BasicInterpolationRow<Scalar>> interpolation;
};

using FitResult = BasicFitResult<double>;

namespace detail {

template <class Scalar>
double quadratic_form(const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& t,
                      const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& mu) {
  return std::real(mu.dot(t * mu));
}

template <class Scalar>
std::vector<BasicInterpolationRow<Scalar>> interpolation_table(const std::vector<Scalar>& fit,
                                                               const std::vector<Scalar>& target) {
  double scale = 0.0;
  for (const auto& v : target) {
    scale = std::max(scale, std::abs(v));
  }
  std::vector<BasicInterpolationRow<Scalar>> rows;
  rows.reserve(fit.size());
  for (std::size_t i = 0; i < fit.size(); ++i) {
    const double abs_res = std::abs(fit[i] - target[i]);
    rows.push_back({fit[i], target[i], abs_res, scale > 0.0 ? abs_res / scale : abs_res});
  }
  return rows;
}

} // namespace detail

template <class Scalar>
BasicFitResult<Scalar> solve(const BasicNormalEquations<Scalar>& ne) {
  auto sol = spd_solve<Scalar>(ne.T, ne.A);
  BasicFitResult<Scalar> out;
  out.mu = std::move(sol.mu);
  out.setting = ne.setting;
  out.diagnostics = sol.diagnostics;
  out.fit_energy = detail::quadratic_form<Scalar>(ne.T, out.mu);
  return out;
}

// Phi = ||f||^2 - 2 Re(mu^H A) + mu^H T mu; equals ||f||^2 - mu^H A at the optimum.
template <class Scalar>
double error_energy(double target_energy, const BasicNormalEquations<Scalar>& ne,
                    const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& mu) {
  return target_energy - 2.0 * std::real(mu.dot(ne.A)) + detail::quadratic_form<Scalar>(ne.T, mu);
}

// Cheap conditioning figure for an assembled system, without solving.
template <class Scalar>
double estimate_condition(const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& t) {
  Eigen::LLT<Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>> llt(t);
  if (llt.info() != Eigen::Success) {
    return std::numeric_limits<double>::infinity();
  }
  const auto d = llt.matrixLLT().diagonal().real();
  const double r = d.maxCoeff() / d.minCoeff();
  return r * r;
}

} // namespace didacks
