#pragma once

#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/LU>

#include "didacks/dirichlet_fit.hpp"
#include "didacks/surface_fit.hpp"

namespace didacks {

// Inverse-multiquadric interpolation problem: phi(X) = sum mu_k (|X - Q_k|^2 + a^2)^-beta.
struct ImqSpec {
  std::vector<Vector> sites;
  double shape = 1.0; // a
  double beta = 0.5;
  Vector values;

  void validate() const {
    detail::require(!sites.empty(), "IMQ spec needs at least one site");
    detail::require(std::isfinite(shape) && shape > 0.0, "shape parameter must be positive");
    detail::require(std::isfinite(beta) && beta > 0.0, "exponent beta must be positive");
    detail::require(values.size() == static_cast<Eigen::Index>(sites.size()),
                    "one data value per site is required");
    detail::require(values.allFinite(), "data values must be finite");
    const auto d = sites.front().size();
    detail::require(d >= 2, "sites must lie in R^d with d >= 2");
    for (std::size_t i = 0; i < sites.size(); ++i) {
      detail::require(sites[i].size() == d, "sites must share one dimension");
      detail::require(sites[i].allFinite(), "sites must be finite");
      for (std::size_t j = 0; j < i; ++j) {
        detail::require(sites[i] != sites[j], "duplicate IMQ sites");
      }
    }
  }

  [[nodiscard]] int site_dimension() const { return static_cast<int>(sites.front().size()); }

  [[nodiscard]] double radial(double r2) const { return std::pow(r2 + shape * shape, -beta); }

  [[nodiscard]] Eigen::MatrixXd collocation() const {
    const auto N = static_cast<Eigen::Index>(sites.size());
    Eigen::MatrixXd b(N, N);
    for (Eigen::Index j = 0; j < N; ++j) {
      for (Eigen::Index k = 0; k < N; ++k) {
        b(j, k) = radial((sites[j] - sites[k]).squaredNorm());
      }
    }
    return b;
  }

  [[nodiscard]] double interpolant(const Vector& mu, const Vector& x) const {
    double sum = 0.0;
    for (std::size_t k = 0; k < sites.size(); ++k) {
      sum += mu[k] * radial((x - sites[k]).squaredNorm());
    }
    return sum;
  }
};

struct ImqSolution {
  Vector mu;
  double relative_residual = 0.0;
};

inline ImqSolution imq_solve(const ImqSpec& spec) {
  spec.validate();
  const auto b = spec.collocation();
  ImqSolution out;
  Eigen::LLT<Eigen::MatrixXd> llt(b);
  out.mu = llt.info() == Eigen::Success ? Vector(llt.solve(spec.values))
                                        : Vector(b.partialPivLu().solve(spec.values));
  if (!out.mu.allFinite()) {
    throw solver_error("IMQ collocation solve failed");
  }
  const double fn = spec.values.norm();
  const double rn = (b * out.mu - spec.values).norm();
  out.relative_residual = fn > 0.0 ? rn / fn : rn;
  return out;
}

enum class RbfRoute { dimension_monopole, vertical_dipole };

inline std::string to_string(RbfRoute r) {
  return r == RbfRoute::dimension_monopole ? "dimension-monopole" : "vertical-dipole";
}

struct HalfspaceEquivalence {
  RbfRoute route = RbfRoute::dimension_monopole;
  Setting setting = Setting::dirichlet_rn;
  int dimension = 3;          // embedding dimension of the half-space
  double source_depth = -0.5; // w = -a/2
  double plane_height = 0.5;  // h = a/2, where the mirror nodes sit
  double gamma_T = 0.0;
  double gamma_A = 0.0;
  double gamma_mu = 0.0;
};

namespace detail {

inline bool is_integer(double v) { return std::abs(v - std::round(v)) < 1e-12; }

} // namespace detail

// Dimension route: 2 beta + 2 = m >= d + 1, monopoles in R^m, Dirichlet norm.
// Vertical-dipole route: 2 beta = d + 1, dipoles in R^{d+1}, surface norm.
inline HalfspaceEquivalence to_halfspace(const ImqSpec& spec,
                                         RbfRoute route = RbfRoute::dimension_monopole) {
  spec.validate();
  const int d = spec.site_dimension();
  HalfspaceEquivalence eq;
  eq.route = route;
  eq.source_depth = -0.5 * spec.shape;
  eq.plane_height = 0.5 * spec.shape;
  if (route == RbfRoute::dimension_monopole) {
    const double m = 2.0 * spec.beta + 2.0;
    detail::require(detail::is_integer(m) && std::lround(m) >= d + 1,
                    "dimension route needs 2 beta + 2 to be an integer >= d + 1");
    eq.dimension = static_cast<int>(std::lround(m));
    eq.setting = Setting::dirichlet_rn;
    const double dm = constants(Dimension(eq.dimension)).kernel_scale;
    eq.gamma_T = 0.5 * dm;
    eq.gamma_A = 0.5;
  } else {
    detail::require(std::abs(2.0 * spec.beta - (d + 1)) < 1e-12,
                    "vertical-dipole route needs 2 beta = d + 1");
    eq.dimension = d + 1;
    eq.setting = Setting::surface_rn;
    const double cn = constants(Dimension(eq.dimension)).poisson_scale;
    eq.gamma_T = 0.25 * cn * spec.shape;
    eq.gamma_A = -0.5;
  }
  eq.gamma_mu = eq.gamma_A / eq.gamma_T;
  return eq;
}

inline SourceBasisSpec equivalent_basis(const ImqSpec& spec, const HalfspaceEquivalence& eq) {
  const Dimension n(eq.dimension);
  const auto kind = eq.route == RbfRoute::dimension_monopole ? KernelKind::monopole()
                                                             : KernelKind::vertical_dipole();
  std::vector<BasisEntry> entries;
  for (const auto& q : spec.sites) {
    Vector t = Vector::Zero(n.horizontal());
    t.head(q.size()) = q;
    entries.push_back({SourcePoint(t, eq.source_depth), kind});
  }
  return {n, std::move(entries)};
}

inline NormalEquations equivalent_system(const ImqSpec& spec, const HalfspaceEquivalence& eq) {
  const auto basis = equivalent_basis(spec, eq);
  return eq.route == RbfRoute::dimension_monopole ? assemble_dirichlet_data(basis, spec.values)
                                                  : assemble_surface_dipole_data(basis, spec.values);
}

struct EquivalenceReport {
  double gram_rel_error = 0.0;  // max |T - gamma_T B| / max |gamma_T B|
  double mu_rel_error = 0.0;    // max |mu_H - gamma_mu mu_RBF| / max |gamma_mu mu_RBF|
  double probe_abs_error = 0.0; // max over probes |phi_RBF - phi_H|
  double probe_scale = 0.0;     // max over probes |phi_RBF|
  double condition_estimate = 0.0;
  double fit_energy = 0.0;      // half-space energy attached to the RBF interpolant
  Vector mu_rbf;
  Vector mu_halfspace;
  bool gram_ok = false;
  bool mu_ok = false;
  bool probe_ok = false;

  [[nodiscard]] bool ok() const { return gram_ok && mu_ok && probe_ok; }
};

// Probe grid: a square grid of probes_per_axis^d points over the bounding box
// of the sites, widened by one shape parameter.
inline EquivalenceReport verify_equivalence(const ImqSpec& spec, const HalfspaceEquivalence& eq,
                                            int probes_per_axis = 9) {
  detail::require(probes_per_axis >= 2, "need at least two probes per axis");
  EquivalenceReport rep;
  const auto rbf = imq_solve(spec);
  const auto basis = equivalent_basis(spec, eq);
  const auto ne = equivalent_system(spec, eq);
  const auto fit = solve(ne);
  rep.mu_rbf = rbf.mu;
  rep.mu_halfspace = fit.mu;
  rep.condition_estimate = ne.condition_estimate;
  rep.fit_energy = fit.fit_energy;

  const Eigen::MatrixXd scaled_b = eq.gamma_T * spec.collocation();
  rep.gram_rel_error = (ne.T - scaled_b).cwiseAbs().maxCoeff() / scaled_b.cwiseAbs().maxCoeff();
  const Vector scaled_mu = eq.gamma_mu * rbf.mu;
  const double mu_scale = scaled_mu.cwiseAbs().maxCoeff();
  rep.mu_rel_error = (fit.mu - scaled_mu).cwiseAbs().maxCoeff() / (mu_scale > 0.0 ? mu_scale : 1.0);

  const int d = spec.site_dimension();
  Vector lo = spec.sites.front(), hi = spec.sites.front();
  for (const auto& q : spec.sites) {
    lo = lo.cwiseMin(q);
    hi = hi.cwiseMax(q);
  }
  lo.array() -= spec.shape;
  hi.array() += spec.shape;
  const auto phi = fit_field(basis, fit.mu);
  const Dimension n(eq.dimension);
  std::vector<int> idx(d, 0);
  long total = 1;
  for (int i = 0; i < d; ++i) {
    total *= probes_per_axis;
  }
  for (long p = 0; p < total; ++p) {
    long rem = p;
    Vector x(d);
    for (int i = 0; i < d; ++i) {
      const int c = static_cast<int>(rem % probes_per_axis);
      rem /= probes_per_axis;
      x[i] = lo[i] + (hi[i] - lo[i]) * c / (probes_per_axis - 1);
    }
    Vector t = Vector::Zero(n.horizontal());
    t.head(d) = x;
    const double v_rbf = spec.interpolant(rbf.mu, x);
    const double v_h = phi.value(HalfSpacePoint(t, eq.plane_height));
    rep.probe_abs_error = std::max(rep.probe_abs_error, std::abs(v_rbf - v_h));
    rep.probe_scale = std::max(rep.probe_scale, std::abs(v_rbf));
  }
  rep.gram_ok = rep.gram_rel_error <= 1e-12;
  rep.mu_ok = rep.mu_rel_error <= 1e-10;
  rep.probe_ok = rep.probe_abs_error <= 1e-12 * (rep.probe_scale > 0.0 ? rep.probe_scale : 1.0);
  return rep;
}

} // namespace didacks
