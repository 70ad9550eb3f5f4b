#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>

#include "didacks/complex_fit.hpp"
#include "didacks/field.hpp"

namespace didacks {

// Truncated-domain quadrature budget. The radial coordinate is compactified
// as r = scale * s / (1 - s) and cut at r = radius; everything beyond is
// covered by an analytic tail bound.
struct QuadratureSpec {
  double radius = 0.0;     // <= 0: 1e9 on a line, 1e6 otherwise
  double radial_scale = 0.0; // <= 0: picked from the source depths
  int radial_panels = 0;  // <= 0: dimension default
  int angular_panels = 0; // <= 0: dimension default
  double tolerance = 1e-3; // relative target used for the converged flag
};

template <class T>
struct QuadratureResult {
  T value{};
  double rule_error = 0.0; // |full - half-resolution|
  double tail_bound = 0.0;
  double error_bound = 0.0; // rule_error + tail_bound
  long evaluations = 0;
  bool converged = false; // error_bound <= tolerance * |value|

  [[nodiscard]] bool agrees_with(T expected) const {
    return std::abs(value - expected) <= error_bound;
  }
};

namespace detail {

struct Rule1d {
  std::vector<double> x;
  std::vector<double> w;
};

// Composite 20-point Gauss-Legendre on [a, b].
inline Rule1d composite_gauss(double a, double b, int panels) {
  using G = boost::math::quadrature::gauss<double, 20>;
  const auto& ab = G::abscissa();
  const auto& wt = G::weights();
  Rule1d r;
  const double h = (b - a) / panels;
  for (int p = 0; p < panels; ++p) {
    const double mid = a + (p + 0.5) * h;
    for (std::size_t i = 0; i < ab.size(); ++i) {
      const double off = 0.5 * h * ab[i];
      const double ww = 0.5 * h * wt[i];
      if (ab[i] == 0.0) {
        r.x.push_back(mid);
        r.w.push_back(ww);
      } else {
        r.x.push_back(mid - off);
        r.w.push_back(ww);
        r.x.push_back(mid + off);
        r.w.push_back(ww);
      }
    }
  }
  return r;
}

// Radial rule on [0, R] in the mapped variable; weights include dr/ds.
inline Rule1d radial_rule(double scale, double radius, int panels) {
  const double s_max = radius / (scale + radius);
  auto r = composite_gauss(0.0, s_max, panels);
  for (std::size_t i = 0; i < r.x.size(); ++i) {
    const double s = r.x[i];
    r.x[i] = scale * s / (1.0 - s);
    r.w[i] *= scale / ((1.0 - s) * (1.0 - s));
  }
  return r;
}

inline constexpr int kMaxDim = 8;
using Coords = std::array<double, kMaxDim>;

// Flattened point-source sum with analytic value and gradient, written
// independently of the kernel module.
class FlatField {
public:
  FlatField(const PointSourceSum& f, const Coords& origin) : n_(f.dimension().value()) {
    require(n_ <= kMaxDim, "oracle supports n <= 8");
    const double p = 2.0 - n_;
    for (const auto& t : f.terms()) {
      Term term;
      const double scale = t.kind.convention == KernelConvention::scaled
                               ? constants(f.dimension()).kernel_scale
                               : 1.0;
      for (int a = 0; a < n_; ++a) {
        term.s[a] = t.location.coords()[a] - origin[a];
      }
      term.depth = -t.location.w();
      switch (t.kind.tag) {
      case KernelTag::monopole:
        term.axis = -1;
        term.c = t.strength * scale;
        break;
      case KernelTag::vertical_dipole:
        term.axis = n_ - 1;
        term.c = t.strength * scale;
        break;
      case KernelTag::horizontal_dipole:
        term.axis = t.kind.axis - 1;
        term.c = -t.strength * scale;
        break;
      }
      term.tag = t.kind.tag;
      terms_.push_back(term);
    }
    p_ = p;
  }

  [[nodiscard]] int dimension() const { return n_; }

  [[nodiscard]] double value(const Coords& z) const {
    double sum = 0.0;
    for (const auto& t : terms_) {
      double r2 = 0.0;
      Coords u{};
      for (int a = 0; a < n_; ++a) {
        u[a] = z[a] - t.s[a];
        r2 += u[a] * u[a];
      }
      if (t.axis < 0) {
        sum += t.c * std::pow(r2, 0.5 * p_);
      } else {
        sum += t.c * p_ * std::pow(r2, 0.5 * p_ - 1.0) * u[t.axis];
      }
    }
    return sum;
  }

  void gradient(const Coords& z, Coords& g) const {
    for (int a = 0; a < n_; ++a) {
      g[a] = 0.0;
    }
    for (const auto& t : terms_) {
      double r2 = 0.0;
      Coords u{};
      for (int a = 0; a < n_; ++a) {
        u[a] = z[a] - t.s[a];
        r2 += u[a] * u[a];
      }
      const double q1 = p_ * std::pow(r2, 0.5 * p_ - 1.0);
      if (t.axis < 0) {
        for (int a = 0; a < n_; ++a) {
          g[a] += t.c * q1 * u[a];
        }
      } else {
        const double q2 = p_ * (p_ - 2.0) * std::pow(r2, 0.5 * p_ - 2.0) * u[t.axis];
        for (int a = 0; a < n_; ++a) {
          g[a] += t.c * (q2 * u[a] + (a == t.axis ? q1 : 0.0));
        }
      }
    }
  }

  // Radius beyond which every source is closer to the origin than r/2.
  [[nodiscard]] double near_radius() const {
    double m = 0.0;
    for (const auto& t : terms_) {
      double r2 = 0.0;
      for (int a = 0; a < n_; ++a) {
        r2 += t.s[a] * t.s[a];
      }
      m = std::max(m, std::sqrt(r2));
    }
    return 2.0 * m;
  }

  // Terms of a far-field bound sum_l C_l r^-q_l on the boundary plane
  // (surface = true) or of |grad f| in the volume.
  struct Decay {
    double c;
    double q;
  };

  [[nodiscard]] std::vector<Decay> decay(bool surface) const {
    std::vector<Decay> out;
    const double k = n_ - 2.0;
    for (const auto& t : terms_) {
      const double c = std::abs(t.c);
      if (surface) {
        if (t.tag == KernelTag::monopole) {
          out.push_back({c * std::pow(2.0, k), k});
        } else if (t.tag == KernelTag::vertical_dipole) {
          out.push_back({c * k * t.depth * std::pow(2.0, n_), static_cast<double>(n_)});
        } else {
          out.push_back({c * k * std::pow(2.0, n_ - 1.0), n_ - 1.0});
        }
      } else if (t.tag == KernelTag::monopole) {
        out.push_back({c * k * std::pow(2.0, n_ - 1.0), n_ - 1.0});
      } else {
        // Hessian rows of r^(2-n): |row| <= sqrt(n) (n-2)(n+1) r^-n.
        out.push_back({c * std::sqrt(static_cast<double>(n_)) * k * (n_ + 1.0) * std::pow(2.0, n_),
                       static_cast<double>(n_)});
      }
    }
    return out;
  }

  [[nodiscard]] double min_depth() const {
    double m = std::numeric_limits<double>::infinity();
    for (const auto& t : terms_) {
      m = std::min(m, t.depth);
    }
    return m;
  }

private:
  struct Term {
    Coords s{};
    double c = 0.0;
    double depth = 0.0;
    int axis = -1;
    KernelTag tag = KernelTag::monopole;
  };
  int n_;
  double p_ = 0.0;
  std::vector<Term> terms_;
};

inline Coords centroid(const PointSourceSum& f, const PointSourceSum& g, bool include_vertical) {
  Coords c{};
  const int n = f.dimension().value();
  int count = 0;
  for (const auto* s : {&f, &g}) {
    for (const auto& t : s->terms()) {
      for (int a = 0; a < n - 1; ++a) {
        c[a] += t.location.t()[a];
      }
      ++count;
    }
  }
  for (int a = 0; a < n - 1; ++a) {
    c[a] = count > 0 ? c[a] / count : 0.0;
  }
  if (!include_vertical) {
    c[n - 1] = 0.0;
  }
  return c;
}

inline double sphere_area(int dim) { // area of the unit sphere in R^dim
  return 2.0 * std::pow(std::numbers::pi, 0.5 * dim) / std::tgamma(0.5 * dim);
}

// integral_R^inf C r^-q * area * r^(dim-1) dr for products of decay terms.
inline double tail_integral(const std::vector<FlatField::Decay>& a,
                            const std::vector<FlatField::Decay>& b, double area, int dim,
                            double radius, bool& divergent) {
  double sum = 0.0;
  divergent = false;
  for (const auto& x : a) {
    for (const auto& y : b) {
      const double expo = x.q + y.q - dim;
      if (expo <= 0.0) {
        divergent = true;
        return std::numeric_limits<double>::infinity();
      }
      sum += x.c * y.c * area * std::pow(radius, -expo) / expo;
    }
  }
  return sum;
}

// Tensor-product hemisphere/sphere rule in R^dim: radial x (dim-1) angles.
// `half` restricts the first polar angle to [0, pi/2] (upper half-space,
// vertical axis = last coordinate).
template <class Fn>
double spherical_integral(int dim, bool half, const Rule1d& radial, int angular_panels, const Fn& fn,
                          long& evaluations) {
  std::vector<Rule1d> angles;
  // polar angles theta_1..theta_{dim-2}, then azimuth
  for (int i = 0; i < dim - 2; ++i) {
    const double hi = (i == 0 && half) ? 0.5 * std::numbers::pi : std::numbers::pi;
    angles.push_back(composite_gauss(0.0, hi, angular_panels));
  }
  if (dim >= 2) {
    angles.push_back(composite_gauss(0.0, 2.0 * std::numbers::pi, 2 * angular_panels));
  } else {
    throw validation_error("spherical rule needs dim >= 2");
  }
  const int na = static_cast<int>(angles.size());
  // precompute unit directions and angular weights
  std::vector<Coords> dirs;
  std::vector<double> aw;
  std::vector<int> idx(na, 0);
  while (true) {
    Coords d{};
    double w = 1.0;
    double sinprod = 1.0;
    // coordinate ordering: last coordinate is the "vertical" axis
    // x_{dim-1} = cos t1, x_{dim-2} = sin t1 cos t2, ...
    for (int i = 0; i < na - 1; ++i) {
      const double t = angles[i].x[idx[i]];
      d[dim - 1 - i] = sinprod * std::cos(t);
      w *= angles[i].w[idx[i]] * std::pow(std::sin(t), dim - 2 - i);
      sinprod *= std::sin(t);
    }
    const double phi = angles[na - 1].x[idx[na - 1]];
    d[1] = sinprod * std::sin(phi);
    d[0] = sinprod * std::cos(phi);
    if (dim == 2) {
      d[1] = std::sin(phi);
      d[0] = std::cos(phi);
    }
    w *= angles[na - 1].w[idx[na - 1]];
    dirs.push_back(d);
    aw.push_back(w);
    int k = 0;
    while (k < na) {
      if (++idx[k] < static_cast<int>(angles[k].x.size())) {
        break;
      }
      idx[k] = 0;
      ++k;
    }
    if (k == na) {
      break;
    }
  }
  double total = 0.0;
  for (std::size_t ir = 0; ir < radial.x.size(); ++ir) {
    const double r = radial.x[ir];
    const double rw = radial.w[ir] * std::pow(r, dim - 1);
    double shell = 0.0;
    for (std::size_t id = 0; id < dirs.size(); ++id) {
      Coords z{};
      for (int a = 0; a < dim; ++a) {
        z[a] = r * dirs[id][a];
      }
      shell += aw[id] * fn(z);
    }
    evaluations += static_cast<long>(dirs.size());
    total += rw * shell;
  }
  return total;
}

// Defaults for an integral over `dim` dimensions: the tensor rule grows as
// panels^dim, so higher dimensions get coarser panels; a line integral is
// cheap enough to push the cut radius far out.
inline QuadratureSpec resolve_spec(QuadratureSpec spec, int dim) {
  if (spec.radius <= 0.0) {
    spec.radius = dim == 1 ? 1e9 : 1e6;
  }
  if (spec.radial_panels <= 0) {
    spec.radial_panels = dim <= 2 ? 16 : 8;
  }
  if (spec.angular_panels <= 0) {
    spec.angular_panels = dim <= 3 ? 6 : 2;
  }
  return spec;
}

inline double pick_scale(const QuadratureSpec& spec, double depth) {
  return spec.radial_scale > 0.0 ? spec.radial_scale : std::max(depth, 1e-3);
}

template <class T>
void finish(QuadratureResult<T>& res, T full, T half, double tail, double tolerance) {
  res.value = full;
  res.rule_error = std::abs(full - half);
  res.tail_bound = tail;
  res.error_bound = res.rule_error + tail;
  res.converged = std::isfinite(res.error_bound) && res.error_bound <= tolerance * std::abs(full);
}

} // namespace detail

// Dirichlet integral of grad f . grad g over the upper half-space.
inline QuadratureResult<double> quad_dirichlet_rn(const PointSourceSum& f, const PointSourceSum& g,
                                                  const QuadratureSpec& user_spec = {}) {
  detail::require(f.dimension() == g.dimension(), "fields must share a dimension");
  const int n = f.dimension().value();
  detail::require(n == 3 || n == 4, "Dirichlet oracle supports n = 3 and n = 4");
  const auto spec = detail::resolve_spec(user_spec, n);
  detail::require(!f.terms().empty() && !g.terms().empty(), "oracle fields must be non-empty");
  const auto origin = detail::centroid(f, g, false);
  const detail::FlatField ff(f, origin), gg(g, origin);
  const double scale = detail::pick_scale(spec, std::min(ff.min_depth(), gg.min_depth()));
  const double radius = std::max(spec.radius, 4.0 * std::max(ff.near_radius(), gg.near_radius()));

  auto integrand = [&](const detail::Coords& z) {
    detail::Coords a{}, b{};
    ff.gradient(z, a);
    gg.gradient(z, b);
    double dot = 0.0;
    for (int i = 0; i < n; ++i) {
      dot += a[i] * b[i];
    }
    return dot;
  };
  QuadratureResult<double> res;
  const auto full_r = detail::radial_rule(scale, radius, spec.radial_panels);
  const auto half_r = detail::radial_rule(scale, radius, std::max(1, spec.radial_panels / 2));
  const double full = detail::spherical_integral(n, true, full_r, spec.angular_panels, integrand, res.evaluations);
  const double half = detail::spherical_integral(n, true, half_r, std::max(1, spec.angular_panels / 2),
                                                 integrand, res.evaluations);
  bool divergent = false;
  const double tail = detail::tail_integral(ff.decay(false), gg.decay(false),
                                            0.5 * detail::sphere_area(n), n, radius, divergent);
  if (divergent) {
    throw divergence_error("Dirichlet integral does not converge for these fields");
  }
  detail::finish(res, full, half, tail, spec.tolerance);
  return res;
}

// Boundary-plane integral of f g over R^{n-1}.
inline QuadratureResult<double> quad_surface_rn(const PointSourceSum& f, const PointSourceSum& g,
                                                const QuadratureSpec& user_spec = {}) {
  detail::require(f.dimension() == g.dimension(), "fields must share a dimension");
  const int n = f.dimension().value();
  detail::require(n >= 3 && n <= 5, "surface oracle supports 3 <= n <= 5");
  const auto spec = detail::resolve_spec(user_spec, n - 1);
  detail::require(!f.terms().empty() && !g.terms().empty(), "oracle fields must be non-empty");
  const auto origin = detail::centroid(f, g, false);
  const detail::FlatField ff(f, origin), gg(g, origin);
  const int dim = n - 1;
  const double radius = std::max(spec.radius, 4.0 * std::max(ff.near_radius(), gg.near_radius()));
  bool divergent = false;
  const double tail = detail::tail_integral(ff.decay(true), gg.decay(true), detail::sphere_area(dim),
                                            dim, radius, divergent);
  if (divergent) {
    throw divergence_error("boundary integral of f g diverges (product decays no faster than r^-" +
                           std::to_string(dim) + ")");
  }
  const double scale = detail::pick_scale(spec, std::min(ff.min_depth(), gg.min_depth()));
  auto integrand = [&](const detail::Coords& x) {
    detail::Coords z{};
    for (int a = 0; a < dim; ++a) {
      z[a] = x[a];
    }
    z[n - 1] = 0.0;
    return ff.value(z) * gg.value(z);
  };
  QuadratureResult<double> res;
  const auto full_r = detail::radial_rule(scale, radius, spec.radial_panels);
  const auto half_r = detail::radial_rule(scale, radius, std::max(1, spec.radial_panels / 2));
  const double full = detail::spherical_integral(dim, false, full_r, spec.angular_panels, integrand,
                                                 res.evaluations);
  const double half = detail::spherical_integral(dim, false, half_r, std::max(1, spec.angular_panels / 2),
                                                 integrand, res.evaluations);
  detail::finish(res, full, half, tail, spec.tolerance);
  return res;
}

namespace detail {

struct ComplexDecay {
  double c;
  double q;
};

// |f| (order 0) or |f'| (order 1) <= sum C r^-q for |z - centre| >= r0.
inline std::vector<ComplexDecay> complex_decay(const ComplexField& f, Complex centre, int order,
                                               double& r0) {
  std::vector<ComplexDecay> out;
  r0 = 0.0;
  for (const auto& t : f.rational()) {
    r0 = std::max(r0, 2.0 * std::abs(t.pole - centre));
    const double k = t.order + order;
    const double ratio = order == 0 ? 1.0 : t.order;
    out.push_back({std::abs(t.coefficient) * ratio * std::pow(2.0, k), k});
  }
  for (const auto& t : f.logs()) {
    r0 = std::max({r0, 2.0 * std::abs(t.z - centre), 2.0 * std::abs(t.z_prime - centre),
                   4.0 * std::abs(t.z - t.z_prime)});
    const double dz = std::abs(t.z - t.z_prime);
    if (order == 0) {
      // |ln(1 + u)| <= 2|u|, |u| <= 2|z - z'|/r <= 1/2
      out.push_back({std::abs(t.coefficient) * 4.0 * dz, 1.0});
    } else {
      out.push_back({std::abs(t.coefficient) * dz * 4.0, 2.0});
    }
  }
  return out;
}

inline Complex complex_centre(const ComplexField& f, const ComplexField& g) {
  double sum = 0.0;
  int count = 0;
  for (const auto* h : {&f, &g}) {
    for (const auto& t : h->rational()) {
      sum += t.pole.real();
      ++count;
    }
    for (const auto& t : h->logs()) {
      sum += 0.5 * (t.z.real() + t.z_prime.real());
      ++count;
    }
  }
  return {count > 0 ? sum / count : 0.0, 0.0};
}

inline double complex_depth(const ComplexField& f, const ComplexField& g) {
  double m = std::numeric_limits<double>::infinity();
  for (const auto* h : {&f, &g}) {
    for (const auto& t : h->rational()) {
      m = std::min(m, -t.pole.imag());
    }
    for (const auto& t : h->logs()) {
      m = std::min({m, -t.z.imag(), -t.z_prime.imag()});
    }
  }
  return m;
}

} // namespace detail

// (g, f) in left-conjugate form: sigma/2 is (1/2pi) int conj(g) f dx over the
// real line; D/2 is (1/2pi) int conj(g') f' dA over the upper half-plane.
inline QuadratureResult<Complex> quad_complex(ComplexSetting setting, const ComplexField& g,
                                              const ComplexField& f, const QuadratureSpec& user_spec = {}) {
  const auto spec = detail::resolve_spec(user_spec, setting == ComplexSetting::sigma ? 1 : 2);
  const Complex c = detail::complex_centre(f, g);
  const double scale = detail::pick_scale(spec, detail::complex_depth(f, g));
  const int order = setting == ComplexSetting::sigma ? 0 : 1;
  double r0f = 0.0, r0g = 0.0;
  const auto df = detail::complex_decay(f, c, order, r0f);
  const auto dg = detail::complex_decay(g, c, order, r0g);
  const double radius = std::max({spec.radius, 2.0 * r0f, 2.0 * r0g});
  QuadratureResult<Complex> res;
  double tail = 0.0;
  const int dim = setting == ComplexSetting::sigma ? 1 : 2;
  const double area = setting == ComplexSetting::sigma ? 2.0 : std::numbers::pi;
  for (const auto& x : df) {
    for (const auto& y : dg) {
      const double expo = x.q + y.q - dim;
      if (expo <= 0.0) {
        throw divergence_error("complex inner product does not converge for these fields");
      }
      tail += x.c * y.c * area * std::pow(radius, -expo) / expo;
    }
  }
  tail /= 2.0 * std::numbers::pi;

  auto run = [&](int radial_panels, int angular_panels) {
    const auto rr = detail::radial_rule(scale, radius, radial_panels);
    Complex total = 0.0;
    if (setting == ComplexSetting::sigma) {
      for (std::size_t i = 0; i < rr.x.size(); ++i) {
        for (double sgn : {-1.0, 1.0}) {
          const Complex z = c + sgn * rr.x[i];
          total += rr.w[i] * std::conj(g.value(z)) * f.value(z);
        }
      }
      res.evaluations += 2 * static_cast<long>(rr.x.size());
    } else {
      const auto th = detail::composite_gauss(0.0, std::numbers::pi, angular_panels);
      for (std::size_t i = 0; i < rr.x.size(); ++i) {
        Complex shell = 0.0;
        for (std::size_t j = 0; j < th.x.size(); ++j) {
          const Complex z = c + std::polar(rr.x[i], th.x[j]);
          shell += th.w[j] * std::conj(g.derivative(z, 1)) * f.derivative(z, 1);
        }
        total += rr.w[i] * rr.x[i] * shell;
      }
      res.evaluations += static_cast<long>(rr.x.size() * th.x.size());
    }
    return total / (2.0 * std::numbers::pi);
  };
  const Complex full = run(spec.radial_panels, 4 * spec.angular_panels);
  const Complex half = run(std::max(1, spec.radial_panels / 2), 2 * spec.angular_panels);
  detail::finish(res, full, half, tail, spec.tolerance);
  return res;
}

// Centered difference with Richardson extrapolation (Ridders tableau).
inline double finite_difference(const std::function<double(const Vector&)>& fn, const Vector& point,
                                int axis, int order, double step = 1e-3) {
  detail::require(order == 1 || order == 2, "finite differences support order 1 or 2");
  detail::require(axis >= 0 && axis < point.size(), "axis out of range");
  detail::require(step > 0.0, "step must be positive");
  const double x0 = point[axis];
  if (x0 + step == x0 || x0 - step == x0) {
    throw validation_error("finite-difference step underflows at this point");
  }
  auto stencil = [&](double h) {
    Vector p = point, m = point;
    p[axis] = x0 + h;
    m[axis] = x0 - h;
    if (order == 1) {
      return (fn(p) - fn(m)) / (2.0 * h);
    }
    return (fn(p) - 2.0 * fn(point) + fn(m)) / (h * h);
  };
  // Tableau over steps 8h, 4h, 2h, h: the extrapolation removes the h^2,
  // h^4, h^6 terms while the smallest difference quotient keeps roundoff
  // at the level of the plain step-h stencil.
  constexpr int levels = 4;
  double table[levels][levels];
  for (int i = 0; i < levels; ++i) {
    table[i][0] = stencil(step * std::pow(2.0, levels - 1 - i));
    double fac = 4.0;
    for (int j = 1; j <= i; ++j) {
      table[i][j] = (fac * table[i][j - 1] - table[i - 1][j - 1]) / (fac - 1.0);
      fac *= 4.0;
    }
  }
  return table[levels - 1][levels - 1];
}

// Complex derivative of a holomorphic function along the real direction.
inline Complex complex_derivative(const std::function<Complex(Complex)>& fn, Complex z, int order,
                                  double step = 1e-3) {
  const auto re = [&](const Vector& p) { return fn(Complex(p[0], z.imag())).real(); };
  const auto im = [&](const Vector& p) { return fn(Complex(p[0], z.imag())).imag(); };
  Vector x(1);
  x[0] = z.real();
  return {finite_difference(re, x, 0, order, step), finite_difference(im, x, 0, order, step)};
}

} // namespace didacks
