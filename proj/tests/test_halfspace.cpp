#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "support/generators.hpp"

using namespace didacks;
using std::numbers::pi;

namespace {

Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) {
    v[i++] = x;
  }
  return v;
}

const Dimension n3(3), n4(4);

} // namespace

TEST(Constants, ThreeDimensions) {
  const auto c = constants(n3);
  EXPECT_NEAR(c.unit_ball_volume, 4.0 * pi / 3.0, 1e-15);
  EXPECT_NEAR(c.kernel_scale, 1.0 / (4.0 * pi), 1e-16);
  EXPECT_NEAR(c.poisson_scale, 1.0 / (2.0 * pi), 1e-16);
}

TEST(Constants, FourDimensions) {
  const auto c = constants(n4);
  EXPECT_NEAR(c.unit_ball_volume, pi * pi / 2.0, 1e-14);
  EXPECT_NEAR(c.poisson_scale, 1.0 / (pi * pi), 1e-16);
  EXPECT_NEAR(c.kernel_scale, 1.0 / (4.0 * pi * pi), 1e-16);
}

TEST(Constants, IdentitiesHoldUpToTen) {
  for (int n = 3; n <= 10; ++n) {
    const auto c = constants(Dimension(n));
    EXPECT_GT(c.unit_ball_volume, 0.0);
    EXPECT_NEAR(c.kernel_scale, c.poisson_scale / (2.0 * (n - 2)), 1e-15 * c.kernel_scale);
    EXPECT_NEAR(c.poisson_scale * n * c.unit_ball_volume, 2.0, 1e-14);
  }
}

TEST(Constants, LargeDimensionUsesLogGamma) {
  const auto c = constants(Dimension(40));
  const double expected = std::pow(pi, 20.0) / std::tgamma(21.0);
  EXPECT_NEAR(c.unit_ball_volume / expected, 1.0, 1e-12);
}

TEST(Constants, RejectsPlane) {
  EXPECT_THROW(Dimension(2), validation_error);
  EXPECT_THROW(Dimension(0), validation_error);
}

TEST(Points, Invariants) {
  EXPECT_THROW(HalfSpacePoint(vec({0.0, 0.0}), -1e-9), validation_error);
  EXPECT_THROW(SourcePoint(vec({0.0, 0.0}), 0.0), validation_error);
  EXPECT_THROW(SourcePoint(vec({NAN, 0.0}), -1.0), validation_error);
  EXPECT_NO_THROW(HalfSpacePoint(vec({0.0, 0.0}), 0.0));
}

TEST(Mirror, Examples) {
  const auto p = mirror(SourcePoint(vec({1.0, 2.0}), -3.0));
  EXPECT_EQ(p.t, vec({1.0, 2.0}));
  EXPECT_EQ(p.p_h, 3.0);
  EXPECT_EQ(mirror(SourcePoint(vec({0.0, 0.0, 0.0}), -0.5)).p_h, 0.5);
  const SourcePoint s(vec({0.3, -1.2}), -0.7);
  EXPECT_EQ(reflect(mirror(s)), s);
}

TEST(Kernel, Goldens) {
  const HalfSpacePoint z(vec({0.0, 0.0}), 1.0);
  const SourcePoint s(vec({0.0, 0.0}), -1.0);
  EXPECT_NEAR(eval_kernel(KernelKind::monopole(), z, s, n3), 1.0 / (8.0 * pi), 1e-16);
  EXPECT_NEAR(eval_kernel(KernelKind::vertical_dipole(), z, s, n3), -1.0 / (16.0 * pi), 1e-16);

  const HalfSpacePoint z4(vec({0.0, 0.0, 0.0}), 1.0);
  const SourcePoint s4(vec({0.0, 0.0, 0.0}), -1.0);
  EXPECT_NEAR(eval_kernel(KernelKind::monopole(KernelConvention::raw), z4, s4, n4), 0.25, 1e-16);
}

TEST(Kernel, HorizontalDipoleClosedForm) {
  // (c_3/2)(x - t)/|Z - S|^3 with x - t = 1, |Z - S|^2 = 5
  const HalfSpacePoint z(vec({1.0, 0.0}), 1.0);
  const SourcePoint s(vec({0.0, 0.0}), -1.0);
  EXPECT_NEAR(eval_kernel(KernelKind::horizontal_dipole(1), z, s, n3), 1.0 / (4.0 * pi * 5.0 * std::sqrt(5.0)),
              1e-16);
  EXPECT_NEAR(eval_kernel(KernelKind::horizontal_dipole(2), z, s, n3), 0.0, 1e-18);
  EXPECT_THROW(eval_kernel(KernelKind::horizontal_dipole(3), z, s, n3), validation_error);
  EXPECT_THROW(KernelKind::horizontal_dipole(0), validation_error);
}

TEST(Kernel, SourceDepthDerivativeGolden) {
  const HalfSpacePoint z(vec({0.0, 0.0}), 1.0);
  const SourcePoint s(vec({0.0, 0.0}), -1.0);
  const double d = eval_kernel_derivative(KernelKind::monopole(), z, s, n3, 3, 1);
  EXPECT_NEAR(d, 1.0 / (16.0 * pi), 1e-16);
  EXPECT_NEAR(d, -kernel_field_partial(KernelKind::monopole(), z, s, n3, {2}), 1e-18);
  EXPECT_THROW(eval_kernel_derivative(KernelKind::monopole(), z, s, n3, 3, 3), validation_error);
  EXPECT_THROW(eval_kernel_derivative(KernelKind::monopole(), z, s, n3, 4, 1), validation_error);
}

TEST(Kernel, DerivativesMatchFiniteDifferences) {
  gen::Rng rng(11);
  for (int trial = 0; trial < 60; ++trial) {
    const int n = rng.integer(3, 5);
    const Dimension dim(n);
    const auto kind = rng.kind(n);
    const auto z = rng.point(n);
    const auto s = rng.source(n, 2.0, 0.8, 2.0);
    for (int axis = 1; axis <= n; ++axis) {
      for (int order = 1; order <= 2; ++order) {
        const auto fn = [&](const Vector& c) {
          return eval_kernel(kind, z, SourcePoint(c.head(n - 1), c[n - 1]), dim);
        };
        const double fd = finite_difference(fn, s.coords(), axis - 1, order, 1e-3);
        const double an = eval_kernel_derivative(kind, z, s, dim, axis, order);
        const double scale = std::abs(eval_kernel(KernelKind::monopole(), z, s, dim));
        EXPECT_NEAR(an, fd, 1e-8 * std::max(std::abs(an), scale)) << "n=" << n << " axis=" << axis;
      }
    }
  }
}

TEST(Kernel, PlainCenteredDifferenceStep1e5) {
  gen::Rng rng(5);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = rng.integer(3, 4);
    const Dimension dim(n);
    const auto kind = rng.kind(n);
    const auto z = rng.point(n, 1.0, 1.0);
    const auto s = rng.source(n, 1.0, 0.8, 1.5);
    const int axis = rng.integer(1, n);
    const double h = 1e-5;
    Vector p = s.coords(), m = s.coords();
    p[axis - 1] += h;
    m[axis - 1] -= h;
    const double fd = (eval_kernel(kind, z, SourcePoint(p.head(n - 1), p[n - 1]), dim) -
                       eval_kernel(kind, z, SourcePoint(m.head(n - 1), m[n - 1]), dim)) /
                      (2.0 * h);
    const double an = eval_kernel_derivative(kind, z, s, dim, axis, 1);
    EXPECT_NEAR(an, fd, 1e-8 * std::max(std::abs(an), std::abs(eval_kernel(kind, z, s, dim))));
  }
}

TEST(KernelProperty, TranslationInvariance) {
  gen::Rng rng(21);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = rng.integer(3, 6);
    const Dimension dim(n);
    const auto kind = rng.kind(n);
    const auto z = rng.point(n);
    const auto s = rng.source(n);
    const Vector shift = rng.vector(n - 1, -5.0, 5.0);
    const double a = eval_kernel(kind, z, s, dim);
    const double b = eval_kernel(kind, HalfSpacePoint(z.x() + shift, z.h()), SourcePoint(s.t() + shift, s.w()), dim);
    EXPECT_NEAR(a, b, 1e-13 * std::abs(a) + 1e-300);
  }
}

TEST(KernelProperty, Signs) {
  gen::Rng rng(22);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = rng.integer(3, 7);
    const Dimension dim(n);
    const auto z = rng.point(n, 3.0, 3.0);
    const auto s = rng.source(n, 3.0, 0.01, 3.0);
    for (auto conv : {KernelConvention::scaled, KernelConvention::raw}) {
      EXPECT_GT(eval_kernel(KernelKind::monopole(conv), z, s, dim), 0.0);
      EXPECT_LT(eval_kernel(KernelKind::vertical_dipole(conv), z, s, dim), 0.0);
    }
  }
}

TEST(KernelProperty, DiscreteLaplacianVanishes) {
  gen::Rng rng(23);
  for (int trial = 0; trial < 60; ++trial) {
    const int n = 3 + trial % 3;
    const Dimension dim(n);
    const auto kind = rng.kind(n);
    const HalfSpacePoint z(rng.vector(n - 1, -1.0, 1.0), rng.uniform(1.0, 2.0));
    const auto s = rng.source(n, 1.0, 1.0, 2.0);
    const double h = 1e-3;
    const Vector c = z.coords();
    const auto k = [&](const Vector& v) { return eval_kernel(kind, HalfSpacePoint(v.head(n - 1), v[n - 1]), s, dim); };
    double lap = 0.0;
    for (int a = 0; a < n; ++a) {
      Vector p = c, m = c;
      p[a] += h;
      m[a] -= h;
      lap += (k(p) - 2.0 * k(c) + k(m)) / (h * h);
    }
    const double scale = std::abs(eval_kernel(KernelKind::monopole(), z, s, dim));
    EXPECT_LE(std::abs(lap), 1e-6 * scale) << "n=" << n;
  }
}

TEST(KernelProperty, SourcePartialsAreNegatedFieldPartials) {
  gen::Rng rng(24);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = rng.integer(3, 6);
    const Dimension dim(n);
    const auto kind = rng.kind(n);
    const auto z = rng.point(n);
    const auto s = rng.source(n);
    for (int axis = 1; axis <= n; ++axis) {
      const double src = eval_kernel_derivative(kind, z, s, dim, axis, 1);
      const double fld = kernel_field_partial(kind, z, s, dim, {axis - 1});
      EXPECT_NEAR(src, -fld, 1e-10 * (std::abs(src) + 1e-300));
    }
  }
}

TEST(KernelProperty, HorizontalDipoleIsSourcePartialOfMonopole) {
  gen::Rng rng(25);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = rng.integer(3, 6);
    const Dimension dim(n);
    const auto z = rng.point(n);
    const auto s = rng.source(n);
    const int j = rng.integer(1, n - 1);
    EXPECT_NEAR(eval_kernel(KernelKind::horizontal_dipole(j), z, s, dim),
                eval_kernel_derivative(KernelKind::monopole(), z, s, dim, j, 1), 1e-15);
    // vertical dipole is the field partial d/dh, i.e. minus the depth partial
    EXPECT_NEAR(eval_kernel(KernelKind::vertical_dipole(), z, s, dim),
                -eval_kernel_derivative(KernelKind::monopole(), z, s, dim, n, 1), 1e-15);
  }
}
