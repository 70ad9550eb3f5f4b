#pragma once

#include <cmath>
#include <numbers>
#include <optional>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "didacks/dirichlet_fit.hpp"

namespace didacks {

namespace detail {

inline double surface_dipole_constant(const KernelKind& kind, Dimension n) {
  return -convention_scale(kind.convention, n) / (2.0 * constants(n).kernel_scale);
}

inline double monopole_line_constant(KernelConvention c, Dimension n) {
  return convention_scale(c, n) / (2.0 * constants(n).kernel_scale);
}

// int_p^inf g(h) dh through h = p/u, u in (0, 1].
template <class G>
double vertical_line_integral(const G& g, double p) {
  auto integrand = [&](double u) {
    if (u <= 0.0) {
      return 0.0;
    }
    return g(p / u) * p / (u * u);
  };
  double err = 0.0;
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(integrand, 0.0, 1.0, 15,
                                                                        1e-14, &err);
}

inline bool has_monopole_terms(const PointSourceSum& f) {
  for (const auto& t : f.terms()) {
    if (t.kind.tag == KernelTag::monopole) {
      return true;
    }
  }
  return false;
}

inline void check_line_convergence(const HarmonicField& f) {
  const auto* sum = std::get_if<PointSourceSum>(&f);
  if (sum != nullptr && sum->dimension().value() == 3 && has_monopole_terms(*sum)) {
    throw divergence_error(
        "vertical line integral of a monopole field diverges in R^3 (logarithmic surface Gram)");
  }
}

// int_p^inf of one point-source term along the vertical line above t.
inline double line_integral_term(const PointSource& term, const Vector& t, double p, Dimension n) {
  const double scale = convention_scale(term.kind.convention, n);
  switch (term.kind.tag) {
  case KernelTag::vertical_dipole: {
    // d/dh integrates to minus the monopole value at the lower end.
    return -term.strength * scale *
           std::pow((HalfSpacePoint(t, p).coords() - term.location.coords()).squaredNorm(),
                    0.5 * (2.0 - n.value()));
  }
  case KernelTag::monopole:
    if (n.value() == 4) {
      const double rho = (t - term.location.t()).norm();
      const double b = p - term.location.w();
      const double value = rho > 0.0 ? (0.5 * std::numbers::pi - std::atan(b / rho)) / rho : 1.0 / b;
      return term.strength * scale * value;
    }
    [[fallthrough]];
  case KernelTag::horizontal_dipole: {
    const auto g = [&](double h) {
      return term.strength * kernel_field_partial(term.kind, HalfSpacePoint(t, h), term.location, n, {});
    };
    return vertical_line_integral(g, p);
  }
  }
  return 0.0;
}

} // namespace detail

// (F(., S), f) in the surface norm, as +1/2 times the integral of f along the
// vertical line above S starting at the mirror height. Closed forms are used
// for Fourier fields, dipole terms and R^4 monopoles; other terms use 1-D
// quadrature on a compactified line.
inline double monopole_line_inner(const SourcePoint& s, const HarmonicField& f, Dimension n,
                                  KernelConvention convention = KernelConvention::scaled) {
  detail::require(field_dimension(f) == n && s.dimension() == n.value(),
                  "dimension mismatch in line inner product");
  detail::check_line_convergence(f);
  const double p = -s.w();
  double integral = 0.0;
  if (const auto* fourier = std::get_if<FourierField>(&f)) {
    for (const auto& m : fourier->modes()) {
      const double kappa = m.kappa();
      integral += FourierField::mode_pattern(m, s.t()[0], s.t()[1]) * std::exp(-kappa * p) / kappa;
    }
  } else {
    const auto& sum = std::get<PointSourceSum>(f);
    for (const auto& term : sum.terms()) {
      integral += detail::line_integral_term(term, s.t(), p, n);
    }
  }
  return detail::monopole_line_constant(convention, n) * integral;
}

// Same quantity by direct quadrature of the whole field along the line.
inline double monopole_line_inner_numeric(const SourcePoint& s, const HarmonicField& f, Dimension n,
                                          KernelConvention convention = KernelConvention::scaled) {
  detail::require(field_dimension(f) == n && s.dimension() == n.value(),
                  "dimension mismatch in line inner product");
  detail::check_line_convergence(f);
  const auto g = [&](double h) { return field_value(f, HalfSpacePoint(s.t(), h)); };
  return detail::monopole_line_constant(convention, n) * detail::vertical_line_integral(g, -s.w());
}

// Surface-norm inner product (K_e, f) for a vertical dipole or monopole entry.
inline double surface_inner(const BasisEntry& e, Dimension n, const HarmonicField& f) {
  switch (e.kind.tag) {
  case KernelTag::vertical_dipole:
    return detail::surface_dipole_constant(e.kind, n) * field_value(f, mirror(e.source).point());
  case KernelTag::monopole: return monopole_line_inner(e.source, f, n, e.kind.convention);
  case KernelTag::horizontal_dipole: break;
  }
  throw validation_error("horizontal dipoles are not supported in the surface norm");
}

namespace detail {

inline NormalEquations assemble_surface(const SourceBasisSpec& basis, const HarmonicField& f) {
  const auto n = basis.dimension();
  detail::require(field_dimension(f) == n, "target field dimension does not match basis dimension");
  const auto N = static_cast<Eigen::Index>(basis.size());
  NormalEquations ne;
  ne.setting = Setting::surface_rn;
  ne.T.resize(N, N);
  ne.A.resize(N);
  ne.replication.resize(basis.size());
  for (Eigen::Index j = 0; j < N; ++j) {
    const auto& ej = basis[j];
    ne.replication[j] = ej.kind.tag == KernelTag::vertical_dipole
                            ? surface_dipole_constant(ej.kind, n)
                            : monopole_line_constant(ej.kind.convention, n);
    for (Eigen::Index k = 0; k < N; ++k) {
      ne.T(j, k) = surface_inner(ej, n, HarmonicField(basis.kernel_field(k)));
    }
    ne.A[j] = surface_inner(ej, n, f);
  }
  check_gram(ne);
  ne.condition_estimate = estimate_condition<double>(ne.T);
  return ne;
}

} // namespace detail

// Vertical-dipole basis: T[j,k] = -1/2 K_k(P_j), A[j] = -1/2 f(P_j).
inline NormalEquations assemble_surface_dipole(const SourceBasisSpec& basis, const HarmonicField& f) {
  for (const auto& e : basis.entries()) {
    if (e.kind.tag == KernelTag::monopole && basis.dimension().value() == 3) {
      throw divergence_error("monopole surface Gram diverges in R^3; use vertical dipoles");
    }
    detail::require(e.kind.tag == KernelTag::vertical_dipole,
                    "surface dipole assembly requires vertical dipole entries");
  }
  return detail::assemble_surface(basis, f);
}

// Same system when only the boundary-adjacent values f(P_k) are known.
inline NormalEquations assemble_surface_dipole_data(const SourceBasisSpec& basis,
                                                    const Vector& values) {
  detail::require(values.size() == static_cast<Eigen::Index>(basis.size()),
                  "one value per basis entry is required");
  detail::require(values.allFinite(), "data must be finite");
  const auto n = basis.dimension();
  const auto N = values.size();
  NormalEquations ne;
  ne.setting = Setting::surface_rn;
  ne.T.resize(N, N);
  ne.A.resize(N);
  ne.replication.resize(basis.size());
  for (Eigen::Index j = 0; j < N; ++j) {
    const auto& ej = basis[j];
    detail::require(ej.kind.tag == KernelTag::vertical_dipole,
                    "surface dipole assembly requires vertical dipole entries");
    ne.replication[j] = detail::surface_dipole_constant(ej.kind, n);
    const auto pj = mirror(ej.source).point();
    for (Eigen::Index k = 0; k < N; ++k) {
      ne.T(j, k) = ne.replication[j] * basis.kernel_field(k).value(pj);
    }
    ne.A[j] = ne.replication[j] * values[j];
  }
  detail::check_gram(ne);
  ne.condition_estimate = estimate_condition<double>(ne.T);
  return ne;
}

// Monopole basis in R^n, n >= 4, through the line-integral form.
inline NormalEquations assemble_surface_monopole(const SourceBasisSpec& basis,
                                                 const HarmonicField& f) {
  if (basis.dimension().value() == 3) {
    throw divergence_error(
        "monopole surface Gram diverges logarithmically in R^3 (boundary integrand ~ r^-2)");
  }
  for (const auto& e : basis.entries()) {
    detail::require(e.kind.tag == KernelTag::monopole,
                    "surface monopole assembly requires monopole entries");
  }
  return detail::assemble_surface(basis, f);
}

// ||f||^2 in the surface norm for point-source sums of vertical dipoles and
// (n >= 4) monopoles.
inline std::optional<double> surface_norm_squared(const HarmonicField& f) {
  const auto* sum = std::get_if<PointSourceSum>(&f);
  if (sum == nullptr) {
    return std::nullopt;
  }
  const auto n = sum->dimension();
  double total = 0.0;
  for (const auto& term : sum->terms()) {
    if (term.kind.tag == KernelTag::horizontal_dipole ||
        (term.kind.tag == KernelTag::monopole && n.value() == 3)) {
      return std::nullopt;
    }
    total += term.strength * surface_inner({term.location, term.kind}, n, f);
  }
  return total;
}

inline std::vector<InterpolationRow> surface_interpolation_check(const SourceBasisSpec& basis,
                                                                 const Vector& mu,
                                                                 const HarmonicField& f) {
  const HarmonicField phi = fit_field(basis, mu);
  std::vector<double> fit, target;
  for (const auto& e : basis.entries()) {
    const double c = e.kind.tag == KernelTag::vertical_dipole
                         ? detail::surface_dipole_constant(e.kind, basis.dimension())
                         : detail::monopole_line_constant(e.kind.convention, basis.dimension());
    fit.push_back(surface_inner(e, basis.dimension(), phi) / c);
    target.push_back(surface_inner(e, basis.dimension(), f) / c);
  }
  return detail::interpolation_table(fit, target);
}

inline FitResult solve_surface(const NormalEquations& ne) {
  detail::require(ne.setting == Setting::surface_rn, "system is not a surface-norm system");
  return solve(ne);
}

inline FitResult fit_surface(const SourceBasisSpec& basis, const HarmonicField& f) {
  bool dipoles = true;
  for (const auto& e : basis.entries()) {
    dipoles = dipoles && e.kind.tag == KernelTag::vertical_dipole;
  }
  const auto ne = dipoles ? assemble_surface_dipole(basis, f) : assemble_surface_monopole(basis, f);
  auto result = solve_surface(ne);
  const auto e = energies(result.mu, ne, surface_norm_squared(f));
  result.target_energy = e.target_energy;
  result.error_energy = e.error_energy;
  result.interpolation = surface_interpolation_check(basis, result.mu, f);
  return result;
}

} // namespace didacks
