#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "didacks/surface_fit.hpp"

namespace didacks {

// Uniform N x N survey over [-L, L]^2 at altitude z0, sampled at cell centres.
struct SurveyGrid {
  double half_extent = 4.0;
  int size = 32;
  double altitude = 1.0;
  Eigen::MatrixXd samples; // samples(i, j) at (coordinate(i), coordinate(j))
  double noise_sigma = 0.0;
  std::uint64_t seed = 0;

  [[nodiscard]] double spacing() const { return 2.0 * half_extent / size; }
  [[nodiscard]] double coordinate(int i) const { return -half_extent + (i + 0.5) * spacing(); }

  void validate() const {
    detail::require(std::isfinite(half_extent) && half_extent > 0.0, "survey half-extent must be positive");
    detail::require(size >= 2, "survey grid needs at least 2 points per axis");
    detail::require(std::isfinite(altitude) && altitude > 0.0, "survey altitude must be positive");
    detail::require(noise_sigma >= 0.0, "noise sigma must be non-negative");
    detail::require(samples.rows() == size && samples.cols() == size, "sample matrix has the wrong shape");
    detail::require(samples.allFinite(), "survey samples must be finite");
  }
};

inline SurveyGrid simulate_survey(const HarmonicField& truth, double half_extent, int size,
                                  double altitude, double sigma, std::uint64_t seed) {
  detail::require(field_dimension(truth).value() == 3, "surveys are simulated in R^3");
  detail::require(std::isfinite(sigma) && sigma >= 0.0, "noise sigma must be non-negative");
  SurveyGrid g;
  g.half_extent = half_extent;
  g.size = size;
  g.altitude = altitude;
  g.noise_sigma = sigma;
  g.seed = seed;
  detail::require(std::isfinite(half_extent) && half_extent > 0.0, "survey half-extent must be positive");
  detail::require(size >= 2, "survey grid needs at least 2 points per axis");
  detail::require(std::isfinite(altitude) && altitude > 0.0, "survey altitude must be positive");
  g.samples.resize(size, size);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (int i = 0; i < size; ++i) {
    for (int j = 0; j < size; ++j) {
      Vector x(2);
      x << g.coordinate(i), g.coordinate(j);
      const double v = field_value(truth, HalfSpacePoint(x, altitude));
      g.samples(i, j) = sigma > 0.0 ? v + sigma * normal(rng) : v;
    }
  }
  return g;
}

struct TukeyTaper {
  double alpha = 0.25;

  // Weight at normalized position u in [0, 1].
  [[nodiscard]] double operator()(double u) const {
    if (alpha <= 0.0) {
      return 1.0;
    }
    const double edge = 0.5 * alpha;
    if (u < edge) {
      return 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * u / alpha));
    }
    if (u > 1.0 - edge) {
      return 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * (1.0 - u) / alpha));
    }
    return 1.0;
  }
};

// f ~ c0 + cx x + cy y, removed before spectral modelling and kept for the
// continuation right-hand side.
struct TrendRecord {
  double mean = 0.0;
  double slope_x = 0.0;
  double slope_y = 0.0;

  [[nodiscard]] double operator()(double x, double y) const { return mean + slope_x * x + slope_y * y; }
};

// Noise variance of each quadrant coefficient of a mode (0 where absent).
struct ModeVariance {
  double v_cc = 0.0;
  double v_cs = 0.0;
  double v_sc = 0.0;
  double v_ss = 0.0;
};

struct SpectralModel {
  FourierField field{1.0, {}};
  std::vector<ModeVariance> variances; // parallel to field.modes()
  TukeyTaper taper;
  TrendRecord trend;
  int max_index = 0;   // K
  double altitude = 1.0;
  bool adjusted = false;

  // Model value including the trend; the trend is height independent.
  [[nodiscard]] double value(double x, double y, double h) const {
    Vector t(2);
    t << x, y;
    return trend(x, y) + field.value(HalfSpacePoint(t, h));
  }
};

namespace detail {

struct ModeColumn {
  int mode;    // index into the mode list
  int quadrant; // 0 cc, 1 cs, 2 sc, 3 ss
};

inline double quadrant_pattern(int quadrant, double kx, double ky, double x, double y) {
  const double fx = quadrant < 2 ? std::cos(kx * x) : std::sin(kx * x);
  const double fy = quadrant % 2 == 0 ? std::cos(ky * y) : std::sin(ky * y);
  return fx * fy;
}

inline double& quadrant_ref(FourierMode& m, int quadrant) {
  switch (quadrant) {
  case 0: return m.a_cc;
  case 1: return m.a_cs;
  case 2: return m.a_sc;
  default: return m.a_ss;
  }
}

inline double& quadrant_ref(ModeVariance& m, int quadrant) {
  switch (quadrant) {
  case 0: return m.v_cc;
  case 1: return m.v_cs;
  case 2: return m.v_sc;
  default: return m.v_ss;
  }
}

} // namespace detail

// Step (A): weighted least squares for trend plus the quadrant trig modes
// k = pi (p, q) / L, 0 <= p, q <= K, each column carrying exp(-kappa z0).
inline SpectralModel fourier_fit(const SurveyGrid& grid, int K, TukeyTaper taper = {}) {
  grid.validate();
  detail::require(K >= 1, "at least one mode index is required");
  detail::require(2 * K < grid.size, "mode index K must stay below the grid Nyquist index N/2");
  detail::require(taper.alpha >= 0.0 && taper.alpha <= 1.0, "taper alpha must lie in [0, 1]");
  const int N = grid.size;
  const double L = grid.half_extent;
  const double z0 = grid.altitude;

  std::vector<FourierMode> modes;
  std::vector<detail::ModeColumn> columns;
  for (int p = 0; p <= K; ++p) {
    for (int q = 0; q <= K; ++q) {
      if (p == 0 && q == 0) {
        continue;
      }
      FourierMode m;
      m.k1 = std::numbers::pi * p / L;
      m.k2 = std::numbers::pi * q / L;
      const int index = static_cast<int>(modes.size());
      modes.push_back(m);
      for (int quadrant = 0; quadrant < 4; ++quadrant) {
        const bool sin_x = quadrant >= 2, sin_y = quadrant % 2 == 1;
        if ((sin_x && p == 0) || (sin_y && q == 0)) {
          continue;
        }
        columns.push_back({index, quadrant});
      }
    }
  }

  const Eigen::Index rows = static_cast<Eigen::Index>(N) * N;
  const Eigen::Index cols = 3 + static_cast<Eigen::Index>(columns.size());
  Eigen::MatrixXd X(rows, cols);
  Vector w(rows), d(rows);
  for (int i = 0; i < N; ++i) {
    const double x = grid.coordinate(i);
    const double wx = taper((i + 0.5) / N);
    for (int j = 0; j < N; ++j) {
      const double y = grid.coordinate(j);
      const Eigen::Index r = static_cast<Eigen::Index>(i) * N + j;
      w[r] = wx * taper((j + 0.5) / N);
      d[r] = grid.samples(i, j);
      X(r, 0) = 1.0;
      X(r, 1) = x;
      X(r, 2) = y;
      for (std::size_t c = 0; c < columns.size(); ++c) {
        const auto& m = modes[columns[c].mode];
        X(r, 3 + static_cast<Eigen::Index>(c)) =
            detail::quadrant_pattern(columns[c].quadrant, m.k1, m.k2, x, y) * std::exp(-m.kappa() * z0);
      }
    }
  }

  const Eigen::MatrixXd WX = w.asDiagonal() * X;
  const Eigen::MatrixXd M = X.transpose() * WX;
  Eigen::LLT<Eigen::MatrixXd> llt(M);
  if (llt.info() != Eigen::Success) {
    throw solver_error("spectral least-squares system is not positive definite");
  }
  const Vector coef = llt.solve(WX.transpose() * d);

  SpectralModel model;
  model.taper = taper;
  model.max_index = K;
  model.altitude = z0;
  model.trend = {coef[0], coef[1], coef[2]};
  std::vector<ModeVariance> variances(modes.size());
  if (grid.noise_sigma > 0.0) {
    // Cov = sigma^2 M^-1 X^T W^2 X M^-1 for white noise.
    const Eigen::MatrixXd minv_xtw = llt.solve(WX.transpose());
    const Vector v = grid.noise_sigma * grid.noise_sigma * minv_xtw.rowwise().squaredNorm();
    for (std::size_t c = 0; c < columns.size(); ++c) {
      detail::quadrant_ref(variances[columns[c].mode], columns[c].quadrant) =
          v[3 + static_cast<Eigen::Index>(c)];
    }
  }
  for (std::size_t c = 0; c < columns.size(); ++c) {
    detail::quadrant_ref(modes[columns[c].mode], columns[c].quadrant) =
        coef[3 + static_cast<Eigen::Index>(c)];
  }
  model.field = FourierField(L, std::move(modes));
  model.variances = std::move(variances);
  return model;
}

// Step (B): per-coefficient Wiener shrinkage a s^2 / (s^2 + v), s^2 = max(a^2 - v, 0).
inline SpectralModel noise_adjust(const SpectralModel& model) {
  detail::require(model.variances.size() == model.field.modes().size(),
                  "spectral model carries no variance estimates");
  SpectralModel out = model;
  auto modes = model.field.modes();
  for (std::size_t i = 0; i < modes.size(); ++i) {
    auto var = model.variances[i];
    for (int quadrant = 0; quadrant < 4; ++quadrant) {
      double& a = detail::quadrant_ref(modes[i], quadrant);
      const double v = detail::quadrant_ref(var, quadrant);
      if (v <= 0.0) {
        continue;
      }
      const double s2 = std::max(a * a - v, 0.0);
      a = a * s2 / (s2 + v);
    }
  }
  out.field = FourierField(model.field.half_extent(), std::move(modes));
  out.adjusted = true;
  return out;
}

// Square grid of vertical dipoles at cell centres of [-E, E]^2, depth w.
struct SourceLayout {
  int count = 12;
  double extent = 4.0;
  double depth = -1.0;

  [[nodiscard]] SourceBasisSpec basis() const {
    detail::require(count >= 1, "source layout needs at least one source per axis");
    detail::require(extent > 0.0, "source layout extent must be positive");
    detail::require(depth < 0.0, "source layout must lie below the boundary");
    std::vector<BasisEntry> entries;
    const double step = 2.0 * extent / count;
    for (int i = 0; i < count; ++i) {
      for (int j = 0; j < count; ++j) {
        Vector t(2);
        t << -extent + (i + 0.5) * step, -extent + (j + 0.5) * step;
        entries.push_back({SourcePoint(t, depth), KernelKind::vertical_dipole()});
      }
    }
    return {Dimension(3), std::move(entries)};
  }

  // Layout matched to a survey: full window, mirror nodes on the survey plane.
  static SourceLayout for_survey(const SurveyGrid& g, int count = 12) {
    return {count, g.half_extent, -g.altitude};
  }
};

enum class ContinuationBasis { vertical_dipole, monopole };

struct ContinuedField {
  SourceBasisSpec basis;
  FitResult fit;
  NormalEquations system;

  [[nodiscard]] double value(double x, double y, double h) const {
    Vector t(2);
    t << x, y;
    return evaluate(basis, fit.mu, HalfSpacePoint(t, h));
  }
};

// Step (C): surface-norm dipole fit whose right-hand side is -1/2 the model
// (trend included) at the mirror nodes.
inline ContinuedField continue_to_plane(const SpectralModel& model, const SourceLayout& layout,
                                        ContinuationBasis kind = ContinuationBasis::vertical_dipole) {
  if (kind == ContinuationBasis::monopole) {
    throw divergence_error("monopole continuation basis diverges in R^3; use vertical dipoles");
  }
  detail::require(!model.field.modes().empty(), "spectral model has no modes");
  auto basis = layout.basis();
  Vector values(static_cast<Eigen::Index>(basis.size()));
  for (std::size_t k = 0; k < basis.size(); ++k) {
    const auto p = mirror(basis[k].source);
    values[static_cast<Eigen::Index>(k)] = model.value(p.t[0], p.t[1], p.p_h);
  }
  auto system = assemble_surface_dipole_data(basis, values);
  auto fit = solve_surface(system);
  return {std::move(basis), std::move(fit), std::move(system)};
}

struct PlaneError {
  double height = 0.0;
  double rms_relative = 0.0;
  double max_abs = 0.0; // sup-norm diagnostic
  double truth_rms = 0.0;
  int probes = 0;
};

// Error against a truth field over the central part of the survey window:
// survey cell centres with |x|, |y| < window * L.
template <class Evaluator>
PlaneError plane_error(const Evaluator& phi, const HarmonicField& truth, const SurveyGrid& grid,
                       double height, double window = 0.5) {
  PlaneError e;
  e.height = height;
  double se = 0.0, st = 0.0;
  const double limit = window * grid.half_extent;
  for (int i = 0; i < grid.size; ++i) {
    const double x = grid.coordinate(i);
    if (std::abs(x) >= limit) {
      continue;
    }
    for (int j = 0; j < grid.size; ++j) {
      const double y = grid.coordinate(j);
      if (std::abs(y) >= limit) {
        continue;
      }
      Vector t(2);
      t << x, y;
      const double f = field_value(truth, HalfSpacePoint(t, height));
      const double diff = phi(x, y, height) - f;
      se += diff * diff;
      st += f * f;
      e.max_abs = std::max(e.max_abs, std::abs(diff));
      ++e.probes;
    }
  }
  detail::require(e.probes > 0, "central window contains no probes");
  e.truth_rms = std::sqrt(st / e.probes);
  e.rms_relative = st > 0.0 ? std::sqrt(se / st) : std::sqrt(se / e.probes);
  return e;
}

inline std::vector<PlaneError> report(const ContinuedField& phi, const HarmonicField& truth,
                                      const SurveyGrid& grid, const std::vector<double>& heights,
                                      double window = 0.5) {
  std::vector<PlaneError> out;
  for (double h : heights) {
    detail::require(h >= 0.0, "report heights must be non-negative");
    out.push_back(plane_error([&](double x, double y, double z) { return phi.value(x, y, z); },
                              truth, grid, h, window));
  }
  return out;
}

inline double grid_rms(const SurveyGrid& g) {
  return std::sqrt(g.samples.squaredNorm() / static_cast<double>(g.samples.size()));
}

// Three monopoles at depth 2 with zero net strength, so the survey carries no
// monopole far field that a finite window would truncate.
inline PointSourceSum three_source_truth(double depth = -2.0) {
  detail::require(depth < 0.0, "source depth must be negative");
  const double xy[3][2] = {{-0.8, 0.4}, {0.9, -0.6}, {0.2, 1.0}};
  const double strength[3] = {1.0, -1.5, 0.5};
  std::vector<PointSource> terms;
  for (int i = 0; i < 3; ++i) {
    Vector t(2);
    t << xy[i][0], xy[i][1];
    terms.push_back({strength[i], SourcePoint(t, depth), KernelKind::monopole()});
  }
  return {Dimension(3), std::move(terms)};
}

struct PipelineConfig {
  double half_extent = 4.0;
  int grid_size = 32;
  double altitude = 1.0;
  double noise_fraction = 0.0; // sigma as a fraction of the noise-free survey RMS
  std::uint64_t seed = 1;
  int modes = 10;
  double taper_alpha = 0.25;
  int layout_count = 12;
  double layout_extent = 0.0; // <= 0: survey half-extent
  double layout_depth = 0.0;  // >= 0: minus the survey altitude
  bool adjust = true;
  std::vector<double> heights{0.25};
  double window = 0.5;
};

struct PipelineResult {
  SurveyGrid grid;
  SpectralModel model;
  ContinuedField continued;
  std::vector<PlaneError> errors;
};

inline PipelineResult run_pipeline(const HarmonicField& truth, const PipelineConfig& cfg) {
  detail::require(cfg.noise_fraction >= 0.0, "noise fraction must be non-negative");
  const auto clean = simulate_survey(truth, cfg.half_extent, cfg.grid_size, cfg.altitude, 0.0, cfg.seed);
  const double sigma = cfg.noise_fraction * grid_rms(clean);
  auto grid = sigma > 0.0 ? simulate_survey(truth, cfg.half_extent, cfg.grid_size, cfg.altitude,
                                            sigma, cfg.seed)
                          : clean;
  auto model = fourier_fit(grid, cfg.modes, TukeyTaper{cfg.taper_alpha});
  if (cfg.adjust) {
    model = noise_adjust(model);
  }
  SourceLayout layout{cfg.layout_count, cfg.layout_extent > 0.0 ? cfg.layout_extent : cfg.half_extent,
                      cfg.layout_depth < 0.0 ? cfg.layout_depth : -cfg.altitude};
  auto continued = continue_to_plane(model, layout);
  auto errors = report(continued, truth, grid, cfg.heights, cfg.window);
  return {std::move(grid), std::move(model), std::move(continued), std::move(errors)};
}

} // namespace didacks
