#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include "didacks/errors.hpp"

namespace didacks {

// Spatial dimension of the half-space H^n = {x_n >= 0}. The planar case is
// handled by the complex module, so only n >= 3 is representable.
class Dimension {
public:
  explicit Dimension(int n) : n_(n) {
    detail::require(n >= 3, "dimension must be >= 3, got " + std::to_string(n));
  }

  [[nodiscard]] int value() const noexcept { return n_; }
  // Number of horizontal coordinates.
  [[nodiscard]] int horizontal() const noexcept { return n_ - 1; }
  // Index of the vertical (height) coordinate in a full coordinate vector.
  [[nodiscard]] int vertical_axis() const noexcept { return n_ - 1; }

  friend bool operator==(Dimension, Dimension) = default;

private:
  int n_;
};

struct Constants {
  double unit_ball_volume; // V(B)
  double poisson_scale;    // c_n, the half-space Poisson kernel constant
  double kernel_scale;     // d_n, scale of the "scaled" fundamental solution
};

namespace detail {

inline constexpr int kConstantTableMax = 10;

inline Constants constants_from_volume(int n, double volume) {
  const double c = 2.0 / (n * volume);
  return {volume, c, c / (2.0 * (n - 2))};
}

inline const std::array<Constants, kConstantTableMax + 1>& constant_table() {
  static const auto table = [] {
    std::array<Constants, kConstantTableMax + 1> t{};
    for (int n = 3; n <= kConstantTableMax; ++n) {
      const double volume = std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(0.5 * n + 1.0);
      t[n] = constants_from_volume(n, volume);
    }
    return t;
  }();
  return table;
}

} // namespace detail

// V(B) = pi^{n/2} / Gamma(n/2 + 1), c_n = 2 / (n V(B)), d_n = c_n / (2 (n - 2)).
inline Constants constants(Dimension dim) {
  const int n = dim.value();
  if (n <= detail::kConstantTableMax) {
    return detail::constant_table()[n];
  }
  const double log_volume = 0.5 * n * std::log(std::numbers::pi) - std::lgamma(0.5 * n + 1.0);
  return detail::constants_from_volume(n, std::exp(log_volume));
}

} // namespace didacks
