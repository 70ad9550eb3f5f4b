#pragma once

#include <optional>
#include <vector>

#include "didacks/field.hpp"
#include "didacks/normal_equations.hpp"

namespace didacks {

struct BasisEntry {
  SourcePoint source;
  KernelKind kind;
};

class SourceBasisSpec {
public:
  SourceBasisSpec(Dimension n, std::vector<BasisEntry> entries,
                  KernelConvention convention = KernelConvention::scaled)
      : n_(n), entries_(std::move(entries)), convention_(convention) {
    detail::require(!entries_.empty(), "source basis must not be empty");
    for (std::size_t i = 0; i < entries_.size(); ++i) {
      const auto& e = entries_[i];
      detail::require(e.source.dimension() == n_.value(),
                      "basis entry " + std::to_string(i) + " has the wrong dimension");
      detail::require(e.kind.convention == convention_,
                      "basis entry " + std::to_string(i) + " uses a different kernel convention");
      (void)detail::kernel_form(e.kind, n_);
      for (std::size_t j = 0; j < i; ++j) {
        detail::require(!(entries_[j].source == e.source && entries_[j].kind == e.kind),
                        "basis entries " + std::to_string(j) + " and " + std::to_string(i) +
                            " coincide");
      }
    }
  }

  // Data-first construction: sources are the reflections of the given nodes.
  static SourceBasisSpec from_nodes(Dimension n, const std::vector<HalfSpacePoint>& nodes,
                                    KernelKind kind) {
    std::vector<BasisEntry> entries;
    entries.reserve(nodes.size());
    for (const auto& z : nodes) {
      detail::require(z.h() > 0.0, "interpolation nodes must lie strictly above the boundary");
      entries.push_back({reflect(MirrorNode{z.x(), z.h()}), kind});
    }
    return {n, std::move(entries), kind.convention};
  }

  [[nodiscard]] Dimension dimension() const noexcept { return n_; }
  [[nodiscard]] KernelConvention convention() const noexcept { return convention_; }
  [[nodiscard]] const std::vector<BasisEntry>& entries() const noexcept { return entries_; }
  [[nodiscard]] std::size_t size() const noexcept { return entries_.size(); }
  [[nodiscard]] const BasisEntry& operator[](std::size_t i) const { return entries_[i]; }

  [[nodiscard]] PointSourceSum kernel_field(std::size_t k, double strength = 1.0) const {
    return {n_, {{strength, entries_[k].source, entries_[k].kind}}};
  }

private:
  Dimension n_;
  std::vector<BasisEntry> entries_;
  KernelConvention convention_;
};

namespace detail {

// Field-derivative multi-index picked out by the Dirichlet replication
// functional of a kernel kind: value for monopoles, d/dh for vertical
// dipoles, d/dx_j for horizontal dipoles.
inline Axes replication_axes(const KernelKind& kind, Dimension n) {
  switch (kind.tag) {
  case KernelTag::monopole: return {};
  case KernelTag::vertical_dipole: return {n.vertical_axis()};
  case KernelTag::horizontal_dipole: return {kind.axis - 1};
  }
  return {};
}

// D[K, f] = c * (point functional of f at P); c = 1/2 for the scaled
// convention and 1/(2 d_n) (2 pi in R^3) for the raw one.
inline double dirichlet_constant(const KernelKind& kind, Dimension n) {
  return convention_scale(kind.convention, n) / (2.0 * constants(n).kernel_scale);
}

template <class Field>
double node_functional(const BasisEntry& e, Dimension n, const Field& f) {
  return f.partial(mirror(e.source).point(), replication_axes(e.kind, n));
}

} // namespace detail

inline double node_functional(const BasisEntry& e, Dimension n, const HarmonicField& f) {
  return field_partial(f, mirror(e.source).point(), detail::replication_axes(e.kind, n));
}

// Dirichlet inner product D[K_e, f] by replication.
inline double dirichlet_inner(const BasisEntry& e, Dimension n, const HarmonicField& f) {
  return detail::dirichlet_constant(e.kind, n) * node_functional(e, n, f);
}

namespace detail {

inline NormalEquations assemble_dirichlet_gram(const SourceBasisSpec& basis) {
  const auto n = basis.dimension();
  const auto N = static_cast<Eigen::Index>(basis.size());
  NormalEquations ne;
  ne.setting = Setting::dirichlet_rn;
  ne.T.resize(N, N);
  ne.A = Vector::Zero(N);
  ne.replication.resize(basis.size());
  for (Eigen::Index j = 0; j < N; ++j) {
    const auto& ej = basis[j];
    ne.replication[j] = dirichlet_constant(ej.kind, n);
    for (Eigen::Index k = 0; k < N; ++k) {
      ne.T(j, k) = ne.replication[j] * node_functional(ej, n, basis.kernel_field(k));
    }
  }
  return ne;
}

inline void check_gram(const NormalEquations& ne) {
  for (Eigen::Index j = 0; j < ne.T.rows(); ++j) {
    detail::require(ne.T(j, j) > 0.0, "Gram diagonal must be positive");
  }
}

} // namespace detail

inline NormalEquations assemble_dirichlet(const SourceBasisSpec& basis, const HarmonicField& f) {
  detail::require(field_dimension(f) == basis.dimension(),
                  "target field dimension does not match basis dimension");
  auto ne = detail::assemble_dirichlet_gram(basis);
  detail::check_gram(ne);
  const auto n = basis.dimension();
  for (std::size_t j = 0; j < basis.size(); ++j) {
    ne.A[j] = ne.replication[j] * node_functional(basis[j], n, f);
  }
  ne.condition_estimate = estimate_condition<double>(ne.T);
  return ne;
}

// Same system when only the node functionals of f are known (values at
// mirror nodes for monopoles, derivatives for dipoles).
inline NormalEquations assemble_dirichlet_data(const SourceBasisSpec& basis, const Vector& data) {
  detail::require(data.size() == static_cast<Eigen::Index>(basis.size()),
                  "one datum per basis entry is required");
  detail::require(data.allFinite(), "data must be finite");
  auto ne = detail::assemble_dirichlet_gram(basis);
  detail::check_gram(ne);
  for (Eigen::Index j = 0; j < data.size(); ++j) {
    ne.A[j] = ne.replication[j] * data[j];
  }
  ne.condition_estimate = estimate_condition<double>(ne.T);
  return ne;
}

inline PointSourceSum fit_field(const SourceBasisSpec& basis, const Vector& mu) {
  detail::require(mu.size() == static_cast<Eigen::Index>(basis.size()),
                  "coefficient count does not match basis size");
  std::vector<PointSource> terms;
  terms.reserve(basis.size());
  for (std::size_t k = 0; k < basis.size(); ++k) {
    terms.push_back({mu[k], basis[k].source, basis[k].kind});
  }
  return {basis.dimension(), std::move(terms)};
}

inline double evaluate(const SourceBasisSpec& basis, const Vector& mu, const HalfSpacePoint& z) {
  return fit_field(basis, mu).value(z);
}

// ||f||^2 in the Dirichlet norm; closed form only for point-source sums.
inline std::optional<double> dirichlet_norm_squared(const HarmonicField& f) {
  const auto* sum = std::get_if<PointSourceSum>(&f);
  if (sum == nullptr) {
    return std::nullopt;
  }
  const auto n = sum->dimension();
  double total = 0.0;
  for (const auto& term : sum->terms()) {
    total += term.strength * dirichlet_inner({term.location, term.kind}, n, f);
  }
  return total;
}

struct Energies {
  double fit_energy = 0.0;
  std::optional<double> target_energy;
  std::optional<double> error_energy;
};

inline Energies energies(const Vector& mu, const NormalEquations& ne,
                         std::optional<double> target_energy) {
  detail::require(mu.size() == ne.size(), "coefficient count does not match system size");
  Energies e;
  e.fit_energy = detail::quadratic_form<double>(ne.T, mu);
  e.target_energy = target_energy;
  if (target_energy) {
    e.error_energy = error_energy<double>(*target_energy, ne, mu);
  }
  return e;
}

inline Energies energies(const SourceBasisSpec& basis, const Vector& mu, const NormalEquations& ne,
                         const HarmonicField& f) {
  detail::require(mu.size() == static_cast<Eigen::Index>(basis.size()),
                  "coefficient count does not match basis size");
  return energies(mu, ne, dirichlet_norm_squared(f));
}

using InterpolationRow = BasicInterpolationRow<double>;

// Node functionals of the fit against those of f (the interpolation property).
inline std::vector<InterpolationRow> interpolation_check(const SourceBasisSpec& basis,
                                                         const Vector& mu, const HarmonicField& f) {
  const auto phi = fit_field(basis, mu);
  std::vector<double> fit, target;
  for (const auto& e : basis.entries()) {
    fit.push_back(detail::node_functional(e, basis.dimension(), phi));
    target.push_back(node_functional(e, basis.dimension(), f));
  }
  return detail::interpolation_table(fit, target);
}

// assemble, solve, and attach energies and the interpolation table.
inline FitResult fit_dirichlet(const SourceBasisSpec& basis, const HarmonicField& f) {
  const auto ne = assemble_dirichlet(basis, f);
  auto result = solve(ne);
  const auto e = energies(basis, result.mu, ne, f);
  result.target_energy = e.target_energy;
  result.error_energy = e.error_energy;
  result.interpolation = interpolation_check(basis, result.mu, f);
  return result;
}

} // namespace didacks
