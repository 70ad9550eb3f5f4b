#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "support/generators.hpp"

using namespace didacks;
using std::numbers::pi;

namespace {

const Complex I(0.0, 1.0);

Vector at(int n, double x1) {
  Vector t = Vector::Zero(n - 1);
  t[0] = x1;
  return t;
}

PointSourceSum single(int n, const SourcePoint& s, KernelKind kind = KernelKind::monopole(), double c = 1.0) {
  return {Dimension(n), {{c, s, kind}}};
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

} // namespace

TEST(OracleDirichlet, ReplicationThreeDimensions) {
  const SourcePoint s(at(3, 0.0), -1.0);
  const auto F = single(3, s);
  const auto f = PointSourceSum(Dimension(3), {{1.0, SourcePoint(at(3, 0.5), -1.5), KernelKind::monopole()},
                                               {-0.4, SourcePoint(at(3, -0.3), -0.8), KernelKind::vertical_dipole()}});
  const auto r = quad_dirichlet_rn(F, f);
  const double exact = 0.5 * f.value(HalfSpacePoint(at(3, 0.0), 1.0));
  EXPECT_LE(rel(r.value, exact), 1e-3);
  EXPECT_TRUE(r.converged);
  EXPECT_TRUE(r.agrees_with(exact));
}

TEST(OracleDirichlet, WorkedPairGolden) {
  const auto F = single(3, SourcePoint(at(3, 0.0), -1.0));
  const auto f = single(3, SourcePoint(at(3, 0.0), -2.0));
  EXPECT_LE(rel(quad_dirichlet_rn(F, f).value, 1.0 / (24.0 * pi)), 1e-3);
  EXPECT_LE(rel(quad_dirichlet_rn(f, f).value, 1.0 / (32.0 * pi)), 1e-3);
  EXPECT_LE(rel(quad_dirichlet_rn(F, F).value, 1.0 / (16.0 * pi)), 1e-3);
}

TEST(OracleDirichlet, ReplicationFourDimensions) {
  const auto F = single(4, SourcePoint(at(4, 0.0), -1.0));
  const auto f = single(4, SourcePoint(at(4, 0.5), -1.5));
  const auto r = quad_dirichlet_rn(F, f);
  EXPECT_LE(rel(r.value, 0.5 * f.value(HalfSpacePoint(at(4, 0.0), 1.0))), 1e-3);
}

TEST(OracleDirichlet, RawKernelCarriesTwoPi) {
  const SourcePoint s(at(3, 0.2), -0.7);
  const auto F = single(3, s, KernelKind::monopole(KernelConvention::raw));
  const auto f = single(3, SourcePoint(at(3, -0.4), -1.2));
  EXPECT_LE(rel(quad_dirichlet_rn(F, f).value, 2.0 * pi * f.value(HalfSpacePoint(at(3, 0.2), 0.7))), 1e-3);
}

TEST(OracleDirichlet, MatchesAssembledGram) {
  gen::Rng rng(91);
  const auto sources = gen::separated_sources(rng, 3, 3, 0.5, 1.0, 0.6, 1.5);
  std::vector<BasisEntry> entries;
  for (const auto& s : sources) {
    entries.push_back({s, rng.kind(3, true)});
  }
  const SourceBasisSpec basis(Dimension(3), entries);
  const auto f = gen::random_field(rng, 3, 2, true);
  const auto ne = assemble_dirichlet(basis, f);
  for (std::size_t j = 0; j < basis.size(); ++j) {
    const auto r = quad_dirichlet_rn(basis.kernel_field(j), f);
    EXPECT_NEAR(r.value, ne.A[static_cast<Eigen::Index>(j)], 1e-3 * std::abs(ne.A[static_cast<Eigen::Index>(j)]) + 1e-9);
    for (std::size_t k = 0; k <= j; ++k) {
      const auto rt = quad_dirichlet_rn(basis.kernel_field(j), basis.kernel_field(k));
      const double t = ne.T(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k));
      EXPECT_NEAR(rt.value, t, 1e-3 * std::abs(t));
    }
  }
}

TEST(OracleDirichlet, SelfProductIsNonNegative) {
  gen::Rng rng(92);
  for (int trial = 0; trial < 5; ++trial) {
    const auto f = gen::random_field(rng, 3, 3, true);
    EXPECT_GE(quad_dirichlet_rn(f, f).value, 0.0);
  }
}

TEST(OracleDirichlet, Rejections) {
  const auto f5 = single(5, SourcePoint(at(5, 0.0), -1.0));
  EXPECT_THROW(quad_dirichlet_rn(f5, f5), validation_error);
  const auto f3 = single(3, SourcePoint(at(3, 0.0), -1.0));
  const auto g4 = single(4, SourcePoint(at(4, 0.0), -1.0));
  EXPECT_THROW(quad_dirichlet_rn(f3, g4), validation_error);
}

TEST(OracleSurface, DipoleGoldens) {
  const SourcePoint s(at(3, 0.0), -1.0);
  const auto F = single(3, s, KernelKind::vertical_dipole());
  EXPECT_LE(rel(quad_surface_rn(F, F).value, 1.0 / (32.0 * pi)), 1e-3);
  const auto f = single(3, SourcePoint(at(3, 0.6), -1.4));
  EXPECT_LE(rel(quad_surface_rn(F, f).value, -0.5 * f.value(HalfSpacePoint(at(3, 0.0), 1.0))), 1e-3);
}

TEST(OracleSurface, MonopoleDiagonalFourDimensions) {
  const auto F = single(4, SourcePoint(at(4, 0.0), -1.0));
  const auto r = quad_surface_rn(F, F);
  EXPECT_LE(rel(r.value, 1.0 / (16.0 * pi * pi)), 1e-3);
  EXPECT_LE(rel(r.value, constants(Dimension(4)).kernel_scale / 4.0), 1e-3);
}

TEST(OracleSurface, SignCorrectedLineIntegral) {
  const Dimension n(4);
  const SourcePoint s(at(4, 0.0), -1.0), s2(at(4, 0.8), -0.6);
  const auto F = single(4, s);
  for (const auto& f : {single(4, s2), single(4, s2, KernelKind::vertical_dipole(), 0.7)}) {
    const double closed = monopole_line_inner(s, f, n);
    const double quad = quad_surface_rn(F, f).value;
    EXPECT_LE(rel(closed, quad), 1e-3);
    // opposite sign on the line functional: the uncorrected form
    EXPECT_GT(rel(-closed, quad), 1e-3);
  }
}

TEST(OracleSurface, NThreeMonopolePairDiverges) {
  const auto F = single(3, SourcePoint(at(3, 0.0), -1.0));
  EXPECT_THROW(quad_surface_rn(F, F), divergence_error);
  const auto D = single(3, SourcePoint(at(3, 0.0), -1.0), KernelKind::vertical_dipole());
  EXPECT_NO_THROW(quad_surface_rn(F, D));
}

TEST(OracleSurface, FiveDimensionsQuadraturePath) {
  const Dimension n(5);
  const SourcePoint s(at(5, 0.0), -1.0);
  const auto f = single(5, SourcePoint(at(5, 0.5), -1.5));
  EXPECT_LE(rel(monopole_line_inner(s, f, n), quad_surface_rn(single(5, s), f).value), 1e-3);
}

TEST(OracleComplex, SigmaAndDirichletGoldens) {
  const ComplexField F({{1.0, -I, 1}});
  const auto sig = quad_complex(ComplexSetting::sigma, F, F);
  const auto dir = quad_complex(ComplexSetting::dirichlet, F, F);
  EXPECT_LE(std::abs(sig.value - 0.5), 1e-6);
  EXPECT_LE(std::abs(dir.value - 0.125), 1e-6);
  EXPECT_LE(sig.error_bound, 1e-6);
  EXPECT_LE(dir.error_bound, 1e-6);
}

TEST(OracleComplex, MatchesAssembly) {
  const ComplexBasis b(ComplexSetting::dirichlet, {ComplexPole(-I), ComplexPole(Complex(-1, -1)), PairedLogSource(-I, -2.0 * I)});
  const ComplexField f({{1.0, -2.0 * I, 1}});
  const auto ne = assemble_complex(b, f);
  for (std::size_t j = 0; j < b.size(); ++j) {
    const auto r = quad_complex(ComplexSetting::dirichlet, b.kernel_field(j), f);
    EXPECT_LE(std::abs(r.value - ne.A[static_cast<Eigen::Index>(j)]), 1e-5);
    for (std::size_t k = 0; k < b.size(); ++k) {
      const auto rt = quad_complex(ComplexSetting::dirichlet, b.kernel_field(j), b.kernel_field(k));
      EXPECT_LE(std::abs(rt.value - ne.T(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k))), 1e-5);
    }
  }
  const ComplexBasis s(ComplexSetting::sigma, {ComplexPole(-I), ComplexPole(Complex(-1, -1), 2)});
  const auto nes = assemble_complex(s, f);
  for (std::size_t j = 0; j < s.size(); ++j) {
    EXPECT_LE(std::abs(quad_complex(ComplexSetting::sigma, s.kernel_field(j), f).value - nes.A[static_cast<Eigen::Index>(j)]), 1e-6);
  }
}

TEST(OracleFiniteDifference, Goldens) {
  const ComplexField f({{1.0, -2.0 * I, 1}});
  const auto d = complex_derivative([&](Complex z) { return f.value(z); }, I, 1);
  EXPECT_LE(std::abs(d - 1.0 / 9.0), 1e-9);
  const auto c = finite_difference([](const Vector&) { return 3.0; }, Vector::Zero(2), 0, 2);
  EXPECT_EQ(c, 0.0);
  const SourcePoint s(at(3, 0.0), -1.0);
  const HalfSpacePoint z(at(3, 0.0), 1.0);
  const auto fn = [&](const Vector& v) {
    return eval_kernel(KernelKind::monopole(), z, SourcePoint(v.head(2), v[2]), Dimension(3));
  };
  EXPECT_NEAR(finite_difference(fn, s.coords(), 2, 1), 1.0 / (16.0 * pi), 1e-10);
}

TEST(OracleFiniteDifference, Validation) {
  const auto fn = [](const Vector& v) { return v[0]; };
  EXPECT_THROW(finite_difference(fn, Vector::Zero(1), 0, 3), validation_error);
  EXPECT_THROW(finite_difference(fn, Vector::Zero(1), 1, 1), validation_error);
  Vector big(1);
  big[0] = 1e20;
  EXPECT_THROW(finite_difference(fn, big, 0, 1), validation_error);
}

TEST(OracleHonesty, RefinementShrinksDiscrepancy) {
  const auto F = single(3, SourcePoint(at(3, 0.0), -1.0));
  const auto f = single(3, SourcePoint(at(3, 0.5), -1.5));
  const double exact = 0.5 * f.value(HalfSpacePoint(at(3, 0.0), 1.0));
  QuadratureSpec coarse;
  coarse.radius = 1e3;
  coarse.radial_panels = 4;
  coarse.angular_panels = 2;
  QuadratureSpec fine = coarse;
  fine.radius = 2e3;
  fine.radial_panels = 8;
  fine.angular_panels = 4;
  const auto a = quad_dirichlet_rn(F, f, coarse);
  const auto b = quad_dirichlet_rn(F, f, fine);
  EXPECT_LT(std::abs(b.value - exact), std::abs(a.value - exact));
  EXPECT_LT(b.error_bound, a.error_bound);
  EXPECT_GE(a.error_bound, std::abs(a.value - exact));
  EXPECT_GE(b.error_bound, std::abs(b.value - exact));
}
