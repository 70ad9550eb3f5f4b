#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "support/generators.hpp"

using namespace didacks;
using std::numbers::pi;

namespace {

struct Verdict {
  bool pass = true;
  std::string detail;
};

Vector at(int n, double x1 = 0.0) {
  Vector t = Vector::Zero(n - 1);
  t[0] = x1;
  return t;
}

PointSourceSum single(int n, const SourcePoint& s, KernelKind k = KernelKind::monopole()) {
  return {Dimension(n), {{1.0, s, k}}};
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2e", v);
  return buf;
}

// Replication identities against the Dirichlet quadrature oracle.
Verdict ac1() {
  Verdict v;
  double worst = 0.0, slowest = 0.0;
  auto check = [&](int n, KernelKind kind, double factor) {
    const SourcePoint s(at(n), -1.0);
    const auto f = PointSourceSum(Dimension(n), {{1.0, SourcePoint(at(n, 0.5), -1.5), KernelKind::monopole()},
                                                 {-0.3, SourcePoint(at(n, -0.4), -0.9), KernelKind::vertical_dipole()}});
    const auto t0 = std::chrono::steady_clock::now();
    const auto q = quad_dirichlet_rn(single(n, s, kind), f);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const double closed = dirichlet_inner({s, kind}, Dimension(n), f);
    const double identity = factor * f.value(mirror(s).point());
    const double e = std::max(rel(q.value, closed), rel(closed, identity) > 1e-14 ? 1.0 : 0.0);
    worst = std::max(worst, e);
    slowest = std::max(slowest, secs);
    v.pass = v.pass && e <= 1e-3 && secs <= 60.0;
  };
  check(3, KernelKind::monopole(), 0.5);
  check(4, KernelKind::monopole(), 0.5);
  check(3, KernelKind::monopole(KernelConvention::raw), 2.0 * pi);
  v.detail = "max rel err " + sci(worst) + ", slowest check " + sci(slowest) + " s";
  return v;
}

// Complex analytic goldens.
Verdict ac2() {
  Verdict v;
  const Complex I(0.0, 1.0);
  const ComplexField target({{1.0, -2.0 * I, 1}});
  const auto ts = assemble_sigma(ComplexBasis(ComplexSetting::sigma, {ComplexPole(-I)}), target).T(0, 0);
  const auto td = assemble_dirichlet_cx(ComplexBasis(ComplexSetting::dirichlet, {ComplexPole(-I)}), target).T(0, 0);
  const auto tl = assemble_log(ComplexBasis(ComplexSetting::dirichlet, {PairedLogSource(-I, -2.0 * I)}), target).T(0, 0);
  const ComplexField F({{1.0, -I, 1}});
  const auto qs = quad_complex(ComplexSetting::sigma, F, F).value;
  const auto qd = quad_complex(ComplexSetting::dirichlet, F, F).value;
  const double closed = std::max({std::abs(ts - 0.5), std::abs(td - 0.125)});
  const double quad = std::max(std::abs(qs - 0.5), std::abs(qd - 0.125));
  const double log = std::abs(tl - 0.5 * std::log(9.0 / 8.0));
  v.pass = closed <= 1e-14 && quad <= 1e-6 && log <= 1e-12;
  v.detail = "closed " + sci(closed) + ", quadrature " + sci(quad) + ", log " + sci(log);
  return v;
}

std::vector<Complex> separated_poles(gen::Rng& rng, int count, double sep) {
  std::vector<Complex> out;
  for (int attempts = 0; static_cast<int>(out.size()) < count && attempts < 100000; ++attempts) {
    const auto z = gen::below(rng, 3.0, 0.5, 2.0);
    bool ok = true;
    for (auto o : out) {
      ok = ok && std::abs(o - z) >= sep;
    }
    if (ok) {
      out.push_back(z);
    }
  }
  return out;
}

template <class Scalar>
double max_residual(const std::vector<BasicInterpolationRow<Scalar>>& rows) {
  double m = 0.0;
  for (const auto& r : rows) {
    m = std::max(m, r.rel_residual);
  }
  return m;
}

// Interpolation property: 100 accepted configurations per setting.
Verdict ac3() {
  Verdict v;
  gen::Rng rng(2024);
  constexpr int wanted = 100;
  constexpr double cond_limit = 1e8;
  double worst = 0.0;
  const std::vector<std::string> names{"dirichlet-rn", "surface-rn", "complex-sigma", "complex-dirichlet"};
  for (std::size_t setting = 0; setting < names.size(); ++setting) {
    int accepted = 0;
    for (int draw = 0; accepted < wanted && draw < 20 * wanted; ++draw) {
      const int N = rng.integer(1, 20);
      double residual = 0.0, cond = 0.0;
      if (setting < 2) {
        const int n = rng.integer(3, 5);
        std::vector<BasisEntry> entries;
        for (const auto& s : gen::separated_sources(rng, n, N, 0.6, 3.0, 0.5, 2.0)) {
          entries.push_back({s, setting == 0 ? rng.kind(n) : KernelKind::vertical_dipole()});
        }
        const SourceBasisSpec basis(Dimension(n), entries);
        const auto f = gen::random_field(rng, n, 3, setting == 0);
        const auto ne = setting == 0 ? assemble_dirichlet(basis, f) : assemble_surface_dipole(basis, f);
        cond = ne.condition_estimate;
        if (cond > cond_limit) {
          continue;
        }
        const auto r = solve(ne);
        residual = max_residual(setting == 0 ? interpolation_check(basis, r.mu, f)
                                             : surface_interpolation_check(basis, r.mu, f));
      } else {
        const auto cs = setting == 2 ? ComplexSetting::sigma : ComplexSetting::dirichlet;
        std::vector<ComplexBasisEntry> entries;
        for (auto z : separated_poles(rng, N, 0.6)) {
          if (cs == ComplexSetting::dirichlet && rng.integer(0, 3) == 0) {
            entries.push_back(PairedLogSource(z, z - Complex(0.0, 1.5)));
          } else {
            entries.push_back(ComplexPole(z));
          }
        }
        const ComplexBasis basis(cs, entries);
        std::vector<RationalTerm> terms;
        for (int i = 0; i < 3; ++i) {
          terms.push_back({Complex(rng.uniform(-1, 1), rng.uniform(-1, 1)), gen::below(rng, 2.0, 1.0, 3.0), rng.integer(1, 2)});
        }
        const ComplexField f(terms);
        const auto ne = assemble_complex(basis, f);
        cond = ne.condition_estimate;
        if (cond > cond_limit) {
          continue;
        }
        residual = max_residual(complex_interpolation_check(basis, solve_hermitian(ne).mu, f));
      }
      ++accepted;
      worst = std::max(worst, residual);
      v.pass = v.pass && residual <= 1e-9;
    }
    if (accepted < wanted) {
      v.pass = false;
      v.detail += names[setting] + " accepted only " + std::to_string(accepted) + "; ";
    }
  }
  v.detail += "4 settings x 100 configs, max rel residual " + sci(worst);
  return v;
}

// Worked example and nested dual minimum-norm chain.
Verdict ac4() {
  Verdict v;
  const SourceBasisSpec basis(Dimension(3), {{SourcePoint(at(3), -1.0), KernelKind::monopole()}});
  const auto f = single(3, SourcePoint(at(3), -2.0));
  const auto fit = fit_dirichlet(basis, f);
  const double golden = std::max({std::abs(fit.fit_energy - 1.0 / (36.0 * pi)),
                                  std::abs(*fit.target_energy - 1.0 / (32.0 * pi)),
                                  std::abs(*fit.error_energy - 1.0 / (288.0 * pi))});
  v.pass = golden <= 1e-12;

  gen::Rng rng(77);
  double worst_violation = 0.0;
  int sweeps = 0;
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 3 + trial % 2;
    const auto sources = gen::separated_sources(rng, n, 12, 0.7, 3.0, 0.5, 2.0);
    const auto target = gen::random_field(rng, n, 3);
    const double norm = *dirichlet_norm_squared(target);
    double prev_fit = 0.0, prev_err = norm;
    for (std::size_t k = 1; k <= sources.size(); ++k) {
      std::vector<BasisEntry> entries;
      for (std::size_t i = 0; i < k; ++i) {
        entries.push_back({sources[i], i % 2 == 0 ? KernelKind::monopole() : KernelKind::vertical_dipole()});
      }
      const SourceBasisSpec b(Dimension(n), entries);
      const auto r = fit_dirichlet(b, target);
      if (r.diagnostics.condition_estimate > 1e8) {
        break;
      }
      const double slack = 1e-12 * norm;
      worst_violation = std::max({worst_violation, prev_fit - r.fit_energy - slack, r.fit_energy - norm - slack,
                                  *r.error_energy - prev_err - slack, -*r.error_energy - slack});
      prev_fit = r.fit_energy;
      prev_err = *r.error_energy;
    }
    ++sweeps;
  }
  v.pass = v.pass && worst_violation <= 0.0;
  v.detail = "worked-example err " + sci(golden) + ", " + std::to_string(sweeps) + " nested sweeps, worst violation " +
             sci(std::max(worst_violation, 0.0));
  return v;
}

// RBF equivalence for both routes.
Verdict ac5() {
  Verdict v;
  ImqSpec half;
  half.sites = {at(3, 0.0), at(3, 1.0)};
  half.shape = 1.0;
  half.beta = 0.5;
  half.values.resize(2);
  half.values << 1.0, 0.5;
  ImqSpec dip = half;
  dip.beta = 1.5;
  ImqSpec six = dip;
  gen::Rng rng(5);
  six.sites.clear();
  while (six.sites.size() < 6) {
    const Vector q = rng.vector(2, -2.0, 2.0);
    bool ok = true;
    for (const auto& o : six.sites) {
      ok = ok && (o - q).norm() > 0.5;
    }
    if (ok) {
      six.sites.push_back(q);
    }
  }
  six.values = rng.vector(6, -1.0, 1.0);

  double gram = 0.0, mu = 0.0, probe = 0.0;
  auto run = [&](const ImqSpec& s, RbfRoute route, double expected_scale) {
    const auto eq = to_halfspace(s, route);
    const auto r = verify_equivalence(s, eq);
    gram = std::max(gram, r.gram_rel_error);
    mu = std::max(mu, r.mu_rel_error);
    probe = std::max(probe, r.probe_abs_error / std::max(r.probe_scale, 1e-300));
    v.pass = v.pass && r.ok() && std::abs(eq.gamma_mu - expected_scale) <= 1e-10 * std::abs(expected_scale);
  };
  run(half, RbfRoute::dimension_monopole, 4.0 * pi);
  run(dip, RbfRoute::vertical_dipole, -4.0 * pi);
  run(six, RbfRoute::vertical_dipole, -4.0 * pi);
  v.detail = "T err " + sci(gram) + ", mu err " + sci(mu) + ", probe err/scale " + sci(probe);
  return v;
}

// Line-integral form of the monopole surface inner product in R^4.
Verdict ac6() {
  Verdict v;
  const Dimension n(4);
  const SourcePoint s(at(4), -1.0), s2(at(4, 0.8), -0.6);
  const auto F = single(4, s);
  const double diag_closed = monopole_line_inner(s, F, n);
  const double diag_golden = constants(n).kernel_scale / 4.0;
  const double diag_quad = quad_surface_rn(F, F).value;
  const auto G = single(4, s2);
  const double off_closed = monopole_line_inner(s, G, n);
  const double off_quad = quad_surface_rn(F, G).value;
  const double corrected = std::max({rel(diag_closed, diag_golden), rel(diag_closed, diag_quad), rel(off_closed, off_quad)});
  const double uncorrected = std::min(rel(-diag_closed, diag_quad), rel(-off_closed, off_quad));
  v.pass = corrected <= 1e-3 && uncorrected > 1e-3;
  v.detail = "corrected rel err " + sci(corrected) + ", uncorrected sign rel err " + sci(uncorrected) + " (must fail)";
  return v;
}

// Downward continuation at desk scale.
Verdict ac7() {
  Verdict v;
  const auto truth = three_source_truth();
  const auto t0 = std::chrono::steady_clock::now();
  const auto clean = run_pipeline(truth, PipelineConfig{});
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const double e0 = clean.errors.front().rms_relative;
  v.pass = e0 < 0.01 && secs <= 30.0;

  bool helps = true, deterministic = true;
  double adj_worst = 0.0, raw_best = 1e300;
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    PipelineConfig cfg;
    cfg.noise_fraction = 0.01;
    cfg.seed = seed;
    const auto a = run_pipeline(truth, cfg);
    const auto again = run_pipeline(truth, cfg);
    cfg.adjust = false;
    const auto raw = run_pipeline(truth, cfg);
    const double ea = a.errors.front().rms_relative, er = raw.errors.front().rms_relative;
    helps = helps && ea <= er;
    deterministic = deterministic && ea == again.errors.front().rms_relative && a.continued.fit.mu == again.continued.fit.mu;
    adj_worst = std::max(adj_worst, ea);
    raw_best = std::min(raw_best, er);
  }
  v.pass = v.pass && helps && deterministic;
  v.detail = "noise-free h=0.25 err " + sci(e0) + " in " + sci(secs) + " s; 1% noise adjusted <= raw: " +
             (helps ? "yes" : "no") + " (worst adjusted " + sci(adj_worst) + ", best raw " + sci(raw_best) +
             "); deterministic: " + (deterministic ? "yes" : "no");
  return v;
}

} // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
      {"AC1 replication identities vs quadrature", ac1}, {"AC2 complex analytic goldens", ac2},
      {"AC3 interpolation property", ac3},             {"AC4 dual minimum-norm chain", ac4},
      {"AC5 RBF equivalence", ac5},                    {"AC6 sign-corrected line integral", ac6},
      {"AC7 downward continuation", ac7}};
  int failures = 0;
  for (const auto& [name, fn] : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = fn();
    } catch (const std::exception& e) {
      v.pass = false;
      v.detail = std::string("threw: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s %s: %s [%.1f s]\n", v.pass ? "PASS" : "FAIL", name.c_str(), v.detail.c_str(), secs);
    failures += v.pass ? 0 : 1;
  }
  std::printf("%d/%zu acceptance criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
