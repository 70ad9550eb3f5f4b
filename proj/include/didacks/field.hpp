#pragma once

#include <cmath>
#include <numbers>
#include <variant>
#include <vector>

#include "didacks/halfspace.hpp"

namespace didacks {

struct PointSource {
  double strength;
  SourcePoint location;
  KernelKind kind;
};

// f(Z) = sum_l s_l K_l(Z; S_l).
class PointSourceSum {
public:
  PointSourceSum(Dimension n, std::vector<PointSource> terms) : n_(n), terms_(std::move(terms)) {
    for (const auto& term : terms_) {
      detail::require(std::isfinite(term.strength), "point source strength must be finite");
      detail::require(term.location.dimension() == n_.value(),
                      "point source dimension does not match field dimension");
      (void)detail::kernel_form(term.kind, n_);
    }
  }

  [[nodiscard]] Dimension dimension() const noexcept { return n_; }
  [[nodiscard]] const std::vector<PointSource>& terms() const noexcept { return terms_; }

  [[nodiscard]] double partial(const HalfSpacePoint& z, const Axes& axes) const {
    double sum = 0.0;
    for (const auto& term : terms_) {
      sum += term.strength * kernel_field_partial(term.kind, z, term.location, n_, axes);
    }
    return sum;
  }

  [[nodiscard]] double value(const HalfSpacePoint& z) const { return partial(z, {}); }

  [[nodiscard]] Vector gradient(const HalfSpacePoint& z) const {
    Vector g(n_.value());
    for (int a = 0; a < n_.value(); ++a) {
      g[a] = partial(z, {a});
    }
    return g;
  }

private:
  Dimension n_;
  std::vector<PointSource> terms_;
};

// One (k1, k2) wavenumber with its four quadrant coefficients:
// a_cc cos cos + a_cs cos sin + a_sc sin cos + a_ss sin sin.
struct FourierMode {
  double k1 = 0.0;
  double k2 = 0.0;
  double a_cc = 0.0;
  double a_cs = 0.0;
  double a_sc = 0.0;
  double a_ss = 0.0;

  [[nodiscard]] double kappa() const { return std::hypot(k1, k2); }
};

// Harmonic field in the upper half of R^3 built from decaying plane waves,
// each mode weighted by exp(-kappa h).
class FourierField {
public:
  FourierField(double half_extent, std::vector<FourierMode> modes)
      : half_extent_(half_extent), modes_(std::move(modes)) {
    detail::require(half_extent_ > 0.0 && std::isfinite(half_extent_),
                    "Fourier field half-extent must be positive");
    for (const auto& m : modes_) {
      detail::require(std::isfinite(m.k1) && std::isfinite(m.k2) && std::isfinite(m.a_cc) &&
                          std::isfinite(m.a_cs) && std::isfinite(m.a_sc) && std::isfinite(m.a_ss),
                      "Fourier mode must be finite");
      if (m.kappa() == 0.0) {
        throw divergence_error("Fourier field must not contain a DC mode");
      }
    }
  }

  [[nodiscard]] static Dimension dimension() { return Dimension(3); }
  [[nodiscard]] double half_extent() const noexcept { return half_extent_; }
  [[nodiscard]] const std::vector<FourierMode>& modes() const noexcept { return modes_; }

  // Horizontal pattern of one mode, differentiated rx times in x and ry in y.
  static double mode_pattern(const FourierMode& m, double x, double y, int rx = 0, int ry = 0) {
    constexpr double quarter = 0.5 * std::numbers::pi;
    const double px = m.k1 * x + rx * quarter;
    const double py = m.k2 * y + ry * quarter;
    const double cx = std::cos(px), sx = std::sin(px);
    const double cy = std::cos(py), sy = std::sin(py);
    return std::pow(m.k1, rx) * std::pow(m.k2, ry) *
           (m.a_cc * cx * cy + m.a_cs * cx * sy + m.a_sc * sx * cy + m.a_ss * sx * sy);
  }

  [[nodiscard]] double partial(const HalfSpacePoint& z, const Axes& axes) const {
    detail::require(z.dimension() == 3, "Fourier field is defined on R^3 only");
    int r[3] = {0, 0, 0};
    for (int i = 0; i < axes.size(); ++i) {
      detail::require(axes[i] >= 0 && axes[i] < 3, "axis out of range");
      ++r[axes[i]];
    }
    double sum = 0.0;
    for (const auto& m : modes_) {
      const double kappa = m.kappa();
      sum += mode_pattern(m, z.x()[0], z.x()[1], r[0], r[1]) * std::pow(-kappa, r[2]) *
             std::exp(-kappa * z.h());
    }
    return sum;
  }

  [[nodiscard]] double value(const HalfSpacePoint& z) const { return partial(z, {}); }

  [[nodiscard]] Vector gradient(const HalfSpacePoint& z) const {
    Vector g(3);
    for (int a = 0; a < 3; ++a) {
      g[a] = partial(z, {a});
    }
    return g;
  }

private:
  double half_extent_;
  std::vector<FourierMode> modes_;
};

using HarmonicField = std::variant<PointSourceSum, FourierField>;

inline Dimension field_dimension(const HarmonicField& f) {
  return std::visit([](const auto& g) { return g.dimension(); }, f);
}

inline double field_partial(const HarmonicField& f, const HalfSpacePoint& z, const Axes& axes) {
  return std::visit([&](const auto& g) { return g.partial(z, axes); }, f);
}

inline double field_value(const HarmonicField& f, const HalfSpacePoint& z) {
  return field_partial(f, z, {});
}

inline Vector field_gradient(const HarmonicField& f, const HalfSpacePoint& z) {
  return std::visit([&](const auto& g) { return g.gradient(z); }, f);
}

} // namespace didacks
