#pragma once

#include <array>
#include <cmath>
#include <initializer_list>
#include <string>

#include <Eigen/Core>

#include "didacks/constants.hpp"
#include "didacks/errors.hpp"

namespace didacks {

using Vector = Eigen::VectorXd;

namespace detail {

inline bool all_finite(const Vector& v) { return v.allFinite(); }

inline Vector join(const Vector& horizontal, double vertical) {
  Vector z(horizontal.size() + 1);
  z.head(horizontal.size()) = horizontal;
  z[horizontal.size()] = vertical;
  return z;
}

} // namespace detail

// A point Z = [x | h] of the closed upper half-space, h >= 0.
class HalfSpacePoint {
public:
  HalfSpacePoint(Vector x, double h) : x_(std::move(x)), h_(h) {
    detail::require(detail::all_finite(x_) && std::isfinite(h_), "half-space point must be finite");
    detail::require(h_ >= 0.0, "half-space point must have h >= 0");
  }

  [[nodiscard]] const Vector& x() const noexcept { return x_; }
  [[nodiscard]] double h() const noexcept { return h_; }
  [[nodiscard]] int dimension() const noexcept { return static_cast<int>(x_.size()) + 1; }
  [[nodiscard]] Vector coords() const { return detail::join(x_, h_); }

private:
  Vector x_;
  double h_;
};

// A source S = [t | w] strictly below the boundary plane.
class SourcePoint {
public:
  SourcePoint(Vector t, double w) : t_(std::move(t)), w_(w) {
    detail::require(detail::all_finite(t_) && std::isfinite(w_), "source point must be finite");
    detail::require(w_ < 0.0, "source point must have w < 0");
  }

  [[nodiscard]] const Vector& t() const noexcept { return t_; }
  [[nodiscard]] double w() const noexcept { return w_; }
  [[nodiscard]] int dimension() const noexcept { return static_cast<int>(t_.size()) + 1; }
  [[nodiscard]] Vector coords() const { return detail::join(t_, w_); }

  friend bool operator==(const SourcePoint& a, const SourcePoint& b) {
    return a.w_ == b.w_ && a.t_ == b.t_;
  }

private:
  Vector t_;
  double w_;
};

// Reflection P = [t | -w] of a source through the boundary plane; this is
// where the replication identities evaluate the target field.
struct MirrorNode {
  Vector t;
  double p_h;

  [[nodiscard]] HalfSpacePoint point() const { return {t, p_h}; }
};

inline MirrorNode mirror(const SourcePoint& s) { return {s.t(), -s.w()}; }

inline SourcePoint reflect(const MirrorNode& p) { return {p.t, -p.p_h}; }

enum class KernelTag { monopole, vertical_dipole, horizontal_dipole };

// scaled: d_n |Z - S|^{2-n}; raw: |Z - S|^{2-n}.
enum class KernelConvention { scaled, raw };

struct KernelKind {
  KernelTag tag = KernelTag::monopole;
  int axis = 0; // 1-based horizontal axis for horizontal dipoles, otherwise 0
  KernelConvention convention = KernelConvention::scaled;

  static KernelKind monopole(KernelConvention c = KernelConvention::scaled) {
    return {KernelTag::monopole, 0, c};
  }
  static KernelKind vertical_dipole(KernelConvention c = KernelConvention::scaled) {
    return {KernelTag::vertical_dipole, 0, c};
  }
  static KernelKind horizontal_dipole(int axis, KernelConvention c = KernelConvention::scaled) {
    detail::require(axis >= 1, "horizontal dipole axis is 1-based");
    return {KernelTag::horizontal_dipole, axis, c};
  }

  friend bool operator==(const KernelKind&, const KernelKind&) = default;
};

inline std::string to_string(KernelTag tag) {
  switch (tag) {
  case KernelTag::monopole: return "monopole";
  case KernelTag::vertical_dipole: return "vertical_dipole";
  case KernelTag::horizontal_dipole: return "horizontal_dipole";
  }
  return "unknown";
}

// Small fixed-capacity list of 0-based coordinate indices naming a mixed
// partial derivative with respect to the field point.
class Axes {
public:
  static constexpr int kCapacity = 4;

  Axes() = default;
  Axes(std::initializer_list<int> list) {
    for (int a : list) {
      push(a);
    }
  }

  void push(int axis) {
    detail::require(count_ < kCapacity, "derivative order too high");
    idx_[count_++] = axis;
  }

  [[nodiscard]] int size() const noexcept { return count_; }
  [[nodiscard]] int operator[](int i) const noexcept { return idx_[i]; }

  [[nodiscard]] Axes with(const Axes& more) const {
    Axes out = *this;
    for (int i = 0; i < more.size(); ++i) {
      out.push(more[i]);
    }
    return out;
  }

private:
  std::array<int, kCapacity> idx_{};
  int count_ = 0;
};

namespace detail {

inline double delta(int a, int b) { return a == b ? 1.0 : 0.0; }

// Mixed partials of |u|^p with respect to u, up to third order.
inline double radial_power_partial(const Vector& u, double p, const Axes& axes) {
  const double r2 = u.squaredNorm();
  switch (axes.size()) {
  case 0: return std::pow(r2, 0.5 * p);
  case 1: {
    const int a = axes[0];
    return p * std::pow(r2, 0.5 * p - 1.0) * u[a];
  }
  case 2: {
    const int a = axes[0], b = axes[1];
    return p * std::pow(r2, 0.5 * p - 1.0) * delta(a, b) +
           p * (p - 2.0) * std::pow(r2, 0.5 * p - 2.0) * u[a] * u[b];
  }
  case 3: {
    const int a = axes[0], b = axes[1], c = axes[2];
    const double q2 = p * (p - 2.0) * std::pow(r2, 0.5 * p - 2.0);
    const double q3 = p * (p - 2.0) * (p - 4.0) * std::pow(r2, 0.5 * p - 3.0);
    return q2 * (delta(a, b) * u[c] + delta(a, c) * u[b] + delta(b, c) * u[a]) +
           q3 * u[a] * u[b] * u[c];
  }
  default:
    throw validation_error("radial partials are implemented up to third order");
  }
}

inline double convention_scale(KernelConvention c, Dimension n) {
  return c == KernelConvention::scaled ? constants(n).kernel_scale : 1.0;
}

// Every kernel is sign * scale * (field partial of |Z - S|^{2-n}). The
// horizontal dipole is the source partial d/dt_j, which is minus the field
// partial d/dx_j; the vertical dipole is the field partial d/dh.
struct KernelForm {
  double factor;
  Axes axes;
};

inline KernelForm kernel_form(const KernelKind& kind, Dimension n) {
  const double scale = convention_scale(kind.convention, n);
  switch (kind.tag) {
  case KernelTag::monopole: return {scale, {}};
  case KernelTag::vertical_dipole: return {scale, {n.vertical_axis()}};
  case KernelTag::horizontal_dipole:
    require(kind.axis >= 1 && kind.axis <= n.horizontal(),
            "horizontal dipole axis must lie in [1, n-1]");
    return {-scale, {kind.axis - 1}};
  }
  throw validation_error("unknown kernel tag");
}

inline void check_point_dims(const HalfSpacePoint& z, const SourcePoint& s, Dimension n) {
  require(z.dimension() == n.value() && s.dimension() == n.value(),
          "point dimension does not match kernel dimension");
}

} // namespace detail

// Partial derivative of a kernel with respect to field coordinates (0-based
// axes into [x_1..x_{n-1}, h]).
inline double kernel_field_partial(const KernelKind& kind, const HalfSpacePoint& z,
                                   const SourcePoint& s, Dimension n, const Axes& axes) {
  detail::check_point_dims(z, s, n);
  const auto form = detail::kernel_form(kind, n);
  const Vector u = z.coords() - s.coords();
  return form.factor * detail::radial_power_partial(u, 2.0 - n.value(), form.axes.with(axes));
}

inline double eval_kernel(const KernelKind& kind, const HalfSpacePoint& z, const SourcePoint& s,
                          Dimension n) {
  return kernel_field_partial(kind, z, s, n, {});
}

// Source-side partial of order 1 or 2 along a 1-based source axis
// (1..n-1 horizontal, n = depth w). Source partials are negated field
// partials because the kernel depends on Z - S only.
inline double eval_kernel_derivative(const KernelKind& kind, const HalfSpacePoint& z,
                                     const SourcePoint& s, Dimension n, int axis, int order) {
  detail::require(order == 1 || order == 2, "kernel derivative order must be 1 or 2");
  detail::require(axis >= 1 && axis <= n.value(), "source axis must lie in [1, n]");
  Axes axes;
  for (int i = 0; i < order; ++i) {
    axes.push(axis - 1);
  }
  const double sign = order % 2 == 0 ? 1.0 : -1.0;
  return sign * kernel_field_partial(kind, z, s, n, axes);
}

} // namespace didacks
