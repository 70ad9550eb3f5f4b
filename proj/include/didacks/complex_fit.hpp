#pragma once

#include <cmath>
#include <complex>
#include <optional>
#include <variant>
#include <vector>

#include "didacks/normal_equations.hpp"

namespace didacks {

using Complex = std::complex<double>;
using ComplexVector = Eigen::VectorXcd;

enum class ComplexSetting { sigma, dirichlet };

inline Setting to_setting(ComplexSetting s) {
  return s == ComplexSetting::sigma ? Setting::complex_sigma : Setting::complex_dirichlet;
}

namespace detail {

inline bool finite(Complex z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

inline void require_below(Complex z, const char* what) {
  require(finite(z), std::string(what) + " must be finite");
  require(z.imag() < 0.0, std::string(what) + " must lie strictly below the real axis");
}

inline double factorial(int k) { return std::tgamma(k + 1.0); }

} // namespace detail

// Pole of order m at z_k; its kernel is i (m-1)!/(z - z_k)^m in the sigma
// setting and (m-1)!/(z - z_k)^m in the Dirichlet setting.
struct ComplexPole {
  Complex z;
  int order = 1;

  ComplexPole(Complex z_, int order_ = 1) : z(z_), order(order_) {
    detail::require_below(z, "pole");
    detail::require(order >= 1, "pole order must be >= 1");
  }

  [[nodiscard]] Complex q() const { return std::conj(z); }
  friend bool operator==(const ComplexPole&, const ComplexPole&) = default;
};

// xi(z) = ln((z - z')/(z - z_k)), principal branch.
struct PairedLogSource {
  Complex z;
  Complex z_prime;

  PairedLogSource(Complex z_, Complex zp) : z(z_), z_prime(zp) {
    detail::require_below(z, "log source");
    detail::require_below(z_prime, "paired log source");
    detail::require(z != z_prime, "paired log source members coincide");
  }

  [[nodiscard]] Complex q() const { return std::conj(z); }
  [[nodiscard]] Complex q_prime() const { return std::conj(z_prime); }
  friend bool operator==(const PairedLogSource&, const PairedLogSource&) = default;
};

struct RationalTerm {
  Complex coefficient;
  Complex pole;
  int order = 1;
};

struct LogTerm {
  Complex coefficient;
  Complex z;
  Complex z_prime;
};

// f(z) = sum c/(z - a)^m + sum c ln((z - b)/(z - a)), singularities below the axis.
class ComplexField {
public:
  ComplexField() = default;
  ComplexField(std::vector<RationalTerm> rational, std::vector<LogTerm> logs = {})
      : rational_(std::move(rational)), logs_(std::move(logs)) {
    for (const auto& t : rational_) {
      detail::require(detail::finite(t.coefficient), "field coefficient must be finite");
      detail::require_below(t.pole, "field pole");
      detail::require(t.order >= 1, "field pole order must be >= 1");
    }
    for (const auto& t : logs_) {
      detail::require(detail::finite(t.coefficient), "field coefficient must be finite");
      detail::require_below(t.z, "field log source");
      detail::require_below(t.z_prime, "field log source");
      detail::require(t.z != t.z_prime, "field log source members coincide");
    }
  }

  [[nodiscard]] const std::vector<RationalTerm>& rational() const noexcept { return rational_; }
  [[nodiscard]] const std::vector<LogTerm>& logs() const noexcept { return logs_; }

  // r-th complex derivative.
  [[nodiscard]] Complex derivative(Complex z, int r) const {
    detail::require(r >= 0, "derivative order must be >= 0");
    Complex sum = 0.0;
    for (const auto& t : rational_) {
      const double sign = r % 2 == 0 ? 1.0 : -1.0;
      const double ratio = detail::factorial(t.order + r - 1) / detail::factorial(t.order - 1);
      sum += t.coefficient * sign * ratio / std::pow(z - t.pole, t.order + r);
    }
    for (const auto& t : logs_) {
      if (r == 0) {
        sum += t.coefficient * std::log((z - t.z_prime) / (z - t.z));
      } else {
        const double sign = (r - 1) % 2 == 0 ? 1.0 : -1.0;
        sum += t.coefficient * sign * detail::factorial(r - 1) *
               (1.0 / std::pow(z - t.z_prime, r) - 1.0 / std::pow(z - t.z, r));
      }
    }
    return sum;
  }

  [[nodiscard]] Complex value(Complex z) const { return derivative(z, 0); }

private:
  std::vector<RationalTerm> rational_;
  std::vector<LogTerm> logs_;
};

using ComplexBasisEntry = std::variant<ComplexPole, PairedLogSource>;

class ComplexBasis {
public:
  ComplexBasis(ComplexSetting setting, std::vector<ComplexBasisEntry> entries)
      : setting_(setting), entries_(std::move(entries)) {
    detail::require(!entries_.empty(), "complex basis must not be empty");
    for (std::size_t i = 0; i < entries_.size(); ++i) {
      if (setting_ == ComplexSetting::sigma) {
        detail::require(std::holds_alternative<ComplexPole>(entries_[i]),
                        "paired log sources are only available in the Dirichlet setting");
      }
      for (std::size_t j = 0; j < i; ++j) {
        detail::require(!(entries_[i] == entries_[j]),
                        "complex basis entries " + std::to_string(j) + " and " +
                            std::to_string(i) + " coincide");
      }
      // Conjugate-involution points, kept explicitly.
      std::visit(
          [&](const auto& e) {
            using E = std::decay_t<decltype(e)>;
            if constexpr (std::is_same_v<E, ComplexPole>) {
              q_.push_back(e.q());
              q_prime_.push_back(e.q());
            } else {
              q_.push_back(e.q());
              q_prime_.push_back(e.q_prime());
            }
          },
          entries_[i]);
    }
  }

  [[nodiscard]] ComplexSetting setting() const noexcept { return setting_; }
  [[nodiscard]] const std::vector<ComplexBasisEntry>& entries() const noexcept { return entries_; }
  [[nodiscard]] std::size_t size() const noexcept { return entries_.size(); }
  [[nodiscard]] const ComplexBasisEntry& operator[](std::size_t i) const { return entries_[i]; }
  [[nodiscard]] const std::vector<Complex>& q() const noexcept { return q_; }
  [[nodiscard]] const std::vector<Complex>& q_prime() const noexcept { return q_prime_; }

  // Kernel k as a field, optionally scaled.
  [[nodiscard]] ComplexField kernel_field(std::size_t k, Complex scale = 1.0) const {
    if (const auto* p = std::get_if<ComplexPole>(&entries_[k])) {
      const Complex c = kernel_prefactor(setting_, p->order);
      return ComplexField({{scale * c, p->z, p->order}});
    }
    const auto& l = std::get<PairedLogSource>(entries_[k]);
    return ComplexField({}, {{scale, l.z, l.z_prime}});
  }

  static Complex kernel_prefactor(ComplexSetting s, int order) {
    const double f = detail::factorial(order - 1);
    return s == ComplexSetting::sigma ? Complex(0.0, f) : Complex(f, 0.0);
  }

private:
  ComplexSetting setting_;
  std::vector<ComplexBasisEntry> entries_;
  std::vector<Complex> q_;
  std::vector<Complex> q_prime_;
};

using HermitianNormalEquations = BasicNormalEquations<Complex>;
using ComplexFitResult = BasicFitResult<Complex>;

namespace detail {

inline double replication_constant(ComplexSetting s) { return s == ComplexSetting::sigma ? 1.0 : 0.5; }

// Point functional matched by an entry, without its replication constant.
inline Complex point_functional(ComplexSetting s, const ComplexBasisEntry& e, const ComplexField& f) {
  if (const auto* p = std::get_if<ComplexPole>(&e)) {
    const int r = s == ComplexSetting::sigma ? p->order - 1 : p->order;
    return f.derivative(p->q(), r);
  }
  const auto& l = std::get<PairedLogSource>(e);
  require(s == ComplexSetting::dirichlet, "paired log sources need the Dirichlet setting");
  return f.value(l.q()) - f.value(l.q_prime());
}

} // namespace detail

// (K_e, f) in left-conjugate form.
inline Complex complex_inner(ComplexSetting s, const ComplexBasisEntry& e, const ComplexField& f) {
  return detail::replication_constant(s) * detail::point_functional(s, e, f);
}

// Order-(m+1) pole at z_k, i.e. the kernel differentiated m times in conj(z_k).
inline Complex higher_pole_inner(ComplexSetting s, Complex z_k, int m, const ComplexField& f) {
  detail::require(m >= 0, "derivative count must be >= 0");
  return complex_inner(s, ComplexPole(z_k, m + 1), f);
}

inline HermitianNormalEquations assemble_complex(const ComplexBasis& basis, const ComplexField& f) {
  const auto s = basis.setting();
  const auto N = static_cast<Eigen::Index>(basis.size());
  HermitianNormalEquations ne;
  ne.setting = to_setting(s);
  ne.T.resize(N, N);
  ne.A.resize(N);
  ne.replication.assign(basis.size(), detail::replication_constant(s));
  for (Eigen::Index j = 0; j < N; ++j) {
    for (Eigen::Index k = 0; k < N; ++k) {
      ne.T(j, k) = complex_inner(s, basis[j], basis.kernel_field(k));
    }
    ne.A[j] = complex_inner(s, basis[j], f);
    detail::require(ne.T(j, j).real() > 0.0, "Hermitian Gram diagonal must be positive");
  }
  ne.condition_estimate = estimate_condition<Complex>(ne.T);
  return ne;
}

namespace detail {

inline void require_simple_poles(const ComplexBasis& basis) {
  for (const auto& e : basis.entries()) {
    const auto* p = std::get_if<ComplexPole>(&e);
    require(p != nullptr && p->order == 1, "this assembly expects simple poles only");
  }
}

} // namespace detail

inline HermitianNormalEquations assemble_sigma(const ComplexBasis& basis, const ComplexField& f) {
  detail::require(basis.setting() == ComplexSetting::sigma, "basis is not a sigma basis");
  detail::require_simple_poles(basis);
  return assemble_complex(basis, f);
}

inline HermitianNormalEquations assemble_dirichlet_cx(const ComplexBasis& basis,
                                                      const ComplexField& f) {
  detail::require(basis.setting() == ComplexSetting::dirichlet, "basis is not a Dirichlet basis");
  detail::require_simple_poles(basis);
  return assemble_complex(basis, f);
}

inline HermitianNormalEquations assemble_log(const ComplexBasis& basis, const ComplexField& f) {
  detail::require(basis.setting() == ComplexSetting::dirichlet, "basis is not a Dirichlet basis");
  for (const auto& e : basis.entries()) {
    detail::require(std::holds_alternative<PairedLogSource>(e), "log assembly expects log pairs");
  }
  return assemble_complex(basis, f);
}

inline ComplexField complex_fit_field(const ComplexBasis& basis, const ComplexVector& mu) {
  detail::require(mu.size() == static_cast<Eigen::Index>(basis.size()),
                  "coefficient count does not match basis size");
  std::vector<RationalTerm> rational;
  std::vector<LogTerm> logs;
  for (std::size_t k = 0; k < basis.size(); ++k) {
    const auto kf = basis.kernel_field(k, mu[k]);
    rational.insert(rational.end(), kf.rational().begin(), kf.rational().end());
    logs.insert(logs.end(), kf.logs().begin(), kf.logs().end());
  }
  return {std::move(rational), std::move(logs)};
}

inline Complex evaluate_cx(const ComplexBasis& basis, const ComplexVector& mu, Complex z) {
  detail::require(detail::finite(z) && z.imag() >= 0.0,
                  "evaluation point must lie in the closed upper half-plane");
  return complex_fit_field(basis, mu).value(z);
}

// ||f||^2 by replication, writing each term of f as a multiple of a basis kernel.
inline std::optional<double> complex_norm_squared(ComplexSetting s, const ComplexField& f) {
  if (s == ComplexSetting::sigma && !f.logs().empty()) {
    return std::nullopt;
  }
  Complex total = 0.0;
  for (const auto& t : f.rational()) {
    const Complex alpha = t.coefficient / ComplexBasis::kernel_prefactor(s, t.order);
    total += std::conj(alpha) * complex_inner(s, ComplexPole(t.pole, t.order), f);
  }
  for (const auto& t : f.logs()) {
    total += std::conj(t.coefficient) * complex_inner(s, PairedLogSource(t.z, t.z_prime), f);
  }
  return total.real();
}

inline std::vector<BasicInterpolationRow<Complex>> complex_interpolation_check(
    const ComplexBasis& basis, const ComplexVector& mu, const ComplexField& f) {
  const auto phi = complex_fit_field(basis, mu);
  std::vector<Complex> fit, target;
  for (const auto& e : basis.entries()) {
    fit.push_back(detail::point_functional(basis.setting(), e, phi));
    target.push_back(detail::point_functional(basis.setting(), e, f));
  }
  return detail::interpolation_table(fit, target);
}

inline ComplexFitResult solve_hermitian(const HermitianNormalEquations& ne) { return solve(ne); }

inline ComplexFitResult fit_complex(const ComplexBasis& basis, const ComplexField& f) {
  const auto ne = assemble_complex(basis, f);
  auto result = solve_hermitian(ne);
  result.target_energy = complex_norm_squared(basis.setting(), f);
  if (result.target_energy) {
    result.error_energy = error_energy<Complex>(*result.target_energy, ne, result.mu);
  }
  result.interpolation = complex_interpolation_check(basis, result.mu, f);
  return result;
}

} // namespace didacks
