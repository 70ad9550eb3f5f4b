#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <didacks/didacks.hpp>

#include "json.hpp"

namespace didacks::cli {

using json = nlohmann::ordered_json;

enum ExitCode { ok = 0, usage = 2, solver = 3, tolerance = 4, internal = 1 };

struct Options {
  std::string config;
  std::string out = ".";
  std::optional<std::uint64_t> seed;
  std::optional<double> tolerance;
  std::string suite = "all";
};

struct Outcome {
  int code = ok;
  json report;
};

namespace schema {

inline void keys(const json& j, const std::string& where, std::initializer_list<const char*> allowed) {
  detail::require(j.is_object(), where + " must be a JSON object");
  const std::set<std::string> names(allowed.begin(), allowed.end());
  for (const auto& [k, v] : j.items()) {
    detail::require(names.count(k) == 1, "unknown key '" + k + "' in " + where);
  }
}

inline const json& at(const json& j, const std::string& key, const std::string& where) {
  detail::require(j.contains(key), "missing key '" + key + "' in " + where);
  return j.at(key);
}

inline double number(const json& j, const std::string& where) {
  detail::require(j.is_number(), where + " must be a number");
  return j.get<double>();
}

inline int integer(const json& j, const std::string& where) {
  detail::require(j.is_number_integer(), where + " must be an integer");
  return j.get<int>();
}

inline Vector vector(const json& j, const std::string& where) {
  detail::require(j.is_array(), where + " must be an array of numbers");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    v[static_cast<Eigen::Index>(i)] = number(j[i], where + "[" + std::to_string(i) + "]");
  }
  return v;
}

inline Complex complex(const json& j, const std::string& where) {
  if (j.is_number()) {
    return {j.get<double>(), 0.0};
  }
  detail::require(j.is_array() && j.size() == 2, where + " must be [re, im]");
  return {number(j[0], where), number(j[1], where)};
}

inline double number_or(const json& j, const char* key, double fallback, const std::string& where) {
  return j.contains(key) ? number(j.at(key), where + "." + key) : fallback;
}

inline KernelConvention convention(const json& cfg) {
  if (!cfg.contains("convention")) {
    return KernelConvention::scaled;
  }
  const auto s = cfg.at("convention").get<std::string>();
  detail::require(s == "scaled" || s == "raw", "convention must be 'scaled' or 'raw'");
  return s == "raw" ? KernelConvention::raw : KernelConvention::scaled;
}

inline KernelKind kind(const json& j, KernelConvention c, const std::string& where) {
  const auto s = at(j, "kind", where).get<std::string>();
  if (s == "monopole") {
    detail::require(!j.contains("axis"), where + ": 'axis' only applies to horizontal dipoles");
    return KernelKind::monopole(c);
  }
  if (s == "vertical_dipole") {
    detail::require(!j.contains("axis"), where + ": 'axis' only applies to horizontal dipoles");
    return KernelKind::vertical_dipole(c);
  }
  if (s == "horizontal_dipole") {
    return KernelKind::horizontal_dipole(integer(at(j, "axis", where), where + ".axis"), c);
  }
  throw validation_error(where + ": unknown kind '" + s + "'");
}

inline SourcePoint source(const json& j, const std::string& where) {
  return {vector(at(j, "t", where), where + ".t"), number(at(j, "w", where), where + ".w")};
}

inline SourceBasisSpec basis(const json& cfg, Dimension n) {
  const auto& b = at(cfg, "basis", "config");
  detail::require(b.is_array() && !b.empty(), "basis must be a non-empty array");
  const auto c = convention(cfg);
  std::vector<BasisEntry> entries;
  for (std::size_t i = 0; i < b.size(); ++i) {
    const std::string where = "basis[" + std::to_string(i) + "]";
    keys(b[i], where, {"t", "w", "kind", "axis"});
    entries.push_back({source(b[i], where), kind(b[i], c, where)});
  }
  return {n, std::move(entries), c};
}

inline PointSourceSum target(const json& j, Dimension n, KernelConvention c) {
  detail::require(j.is_array() && !j.empty(), "target must be a non-empty array of sources");
  std::vector<PointSource> terms;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string where = "target[" + std::to_string(i) + "]";
    keys(j[i], where, {"strength", "t", "w", "kind", "axis"});
    terms.push_back({number(at(j[i], "strength", where), where + ".strength"), source(j[i], where),
                     kind(j[i], c, where)});
  }
  return {n, std::move(terms)};
}

inline Dimension dimension(const json& cfg) { return Dimension(integer(at(cfg, "dimension", "config"), "dimension")); }

struct Axis {
  double lo, hi;
  int count;
  [[nodiscard]] double operator[](int i) const { return count == 1 ? lo : lo + (hi - lo) * i / (count - 1); }
};

inline Axis axis(const json& j, const std::string& where) {
  detail::require(j.is_array() && j.size() == 3, where + " must be [lo, hi, count]");
  Axis a{number(j[0], where), number(j[1], where), integer(j[2], where)};
  detail::require(a.count >= 1 && a.hi >= a.lo, where + " needs count >= 1 and hi >= lo");
  return a;
}

} // namespace schema

namespace report {

inline json vec(const Vector& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    a.push_back(v[i]);
  }
  return a;
}

inline json cx(Complex z) { return json::array({z.real(), z.imag()}); }

inline json vec(const ComplexVector& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    a.push_back(cx(v[i]));
  }
  return a;
}

inline json optional(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

inline json diagnostics(const SolverDiagnostics& d) {
  return {{"condition_estimate", d.condition_estimate},
          {"relative_residual", d.relative_residual},
          {"ridge_applied", d.ridge_applied},
          {"ridge", d.ridge}};
}

template <class Scalar>
json interpolation(const std::vector<BasicInterpolationRow<Scalar>>& rows, double tol, bool& all_ok) {
  json a = json::array();
  all_ok = true;
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const auto& r = rows[k];
    json row;
    row["node"] = k;
    if constexpr (std::is_same_v<Scalar, Complex>) {
      row["fit"] = cx(r.fit);
      row["target"] = cx(r.target);
    } else {
      row["fit"] = r.fit;
      row["target"] = r.target;
    }
    row["abs_residual"] = r.abs_residual;
    row["rel_residual"] = r.rel_residual;
    all_ok = all_ok && r.rel_residual <= tol;
    a.push_back(row);
  }
  return a;
}

template <class Scalar>
json fit(const BasicFitResult<Scalar>& r, double tol) {
  json j;
  j["setting"] = to_string(r.setting);
  j["mu"] = vec(r.mu);
  j["diagnostics"] = diagnostics(r.diagnostics);
  j["energies"] = {{"fit_norm_squared", r.fit_energy},
                   {"target_norm_squared", optional(r.target_energy)},
                   {"Phi", optional(r.error_energy)}};
  bool all_ok = true;
  j["interpolation"] = interpolation(r.interpolation, tol, all_ok);
  j["interpolation_tolerance"] = tol;
  j["interpolation_ok"] = all_ok;
  return j;
}

} // namespace report

inline std::string fmt(double v) {
  std::ostringstream s;
  s << std::setprecision(17) << v;
  return s.str();
}

inline void write_text(const std::filesystem::path& p, const std::string& text) {
  std::ofstream f(p);
  if (!f) {
    throw validation_error("cannot write " + p.string());
  }
  f << text;
}

// Real field on a tensor grid: header x1,...,x_{n-1},h,value.
inline std::string real_grid_csv(const json& g, int n, const std::function<double(const HalfSpacePoint&)>& phi) {
  schema::keys(g, "grid", {"axes", "heights"});
  const auto& axes_j = schema::at(g, "axes", "grid");
  detail::require(axes_j.is_array() && static_cast<int>(axes_j.size()) == n - 1,
                  "grid.axes needs one [lo, hi, count] per horizontal coordinate");
  std::vector<schema::Axis> axes;
  for (std::size_t i = 0; i < axes_j.size(); ++i) {
    axes.push_back(schema::axis(axes_j[i], "grid.axes[" + std::to_string(i) + "]"));
  }
  const Vector heights = schema::vector(schema::at(g, "heights", "grid"), "grid.heights");
  detail::require(heights.size() > 0, "grid.heights must not be empty");
  std::ostringstream out;
  for (int i = 1; i < n; ++i) {
    out << "x" << i << ",";
  }
  out << "h,value\n";
  long total = 1;
  for (const auto& a : axes) {
    total *= a.count;
  }
  for (Eigen::Index hi = 0; hi < heights.size(); ++hi) {
    detail::require(heights[hi] >= 0.0, "grid heights must be non-negative");
    for (long p = 0; p < total; ++p) {
      long rem = p;
      Vector x(n - 1);
      for (int i = n - 2; i >= 0; --i) {
        x[i] = axes[i][static_cast<int>(rem % axes[i].count)];
        rem /= axes[i].count;
      }
      for (int i = 0; i < n - 1; ++i) {
        out << fmt(x[i]) << ",";
      }
      out << fmt(heights[hi]) << "," << fmt(phi(HalfSpacePoint(x, heights[hi]))) << "\n";
    }
  }
  return out.str();
}

// Field on the upper half-plane: header x1,h,re,im.
inline std::string complex_grid_csv(const json& g, const std::function<Complex(Complex)>& phi) {
  schema::keys(g, "grid", {"x", "heights"});
  const auto ax = schema::axis(schema::at(g, "x", "grid"), "grid.x");
  const Vector heights = schema::vector(schema::at(g, "heights", "grid"), "grid.heights");
  std::ostringstream out;
  out << "x1,h,re,im\n";
  for (Eigen::Index hi = 0; hi < heights.size(); ++hi) {
    detail::require(heights[hi] >= 0.0, "grid heights must be non-negative");
    for (int i = 0; i < ax.count; ++i) {
      const Complex v = phi(Complex(ax[i], heights[hi]));
      out << fmt(ax[i]) << "," << fmt(heights[hi]) << "," << fmt(v.real()) << "," << fmt(v.imag()) << "\n";
    }
  }
  return out.str();
}

inline json echo(const json& cfg, const Options& opt) {
  json in;
  in["config"] = cfg;
  in["seed"] = opt.seed ? json(*opt.seed) : json(nullptr);
  in["tolerance"] = opt.tolerance ? json(*opt.tolerance) : json(nullptr);
  return in;
}

// Interpolation rows when only data values are known.
inline std::vector<InterpolationRow> data_rows(const std::vector<double>& fit, const Vector& data) {
  return detail::interpolation_table(fit, std::vector<double>(data.data(), data.data() + data.size()));
}

inline Outcome fit_rn(const json& cfg, const Options& opt, const std::filesystem::path& out) {
  schema::keys(cfg, "fit-rn config", {"dimension", "convention", "basis", "target", "data", "grid"});
  const auto n = schema::dimension(cfg);
  const auto basis = schema::basis(cfg, n);
  detail::require(cfg.contains("target") != cfg.contains("data"), "give exactly one of 'target' or 'data'");
  const double tol = opt.tolerance.value_or(1e-9);
  FitResult fit;
  if (cfg.contains("target")) {
    fit = fit_dirichlet(basis, schema::target(cfg.at("target"), n, basis.convention()));
  } else {
    const Vector data = schema::vector(cfg.at("data"), "data");
    const auto ne = assemble_dirichlet_data(basis, data);
    fit = solve(ne);
    const auto phi = fit_field(basis, fit.mu);
    std::vector<double> v;
    for (const auto& e : basis.entries()) {
      v.push_back(node_functional(e, n, phi));
    }
    fit.interpolation = data_rows(v, data);
  }
  Outcome o;
  o.report["command"] = "fit-rn";
  o.report["inputs"] = echo(cfg, opt);
  o.report.update(report::fit(fit, tol));
  if (cfg.contains("grid")) {
    write_text(out / "field.csv", real_grid_csv(cfg.at("grid"), n.value(), [&](const HalfSpacePoint& z) {
                 return evaluate(basis, fit.mu, z);
               }));
    o.report["grid_csv"] = "field.csv";
  }
  return o;
}

inline Outcome fit_surface_cmd(const json& cfg, const Options& opt, const std::filesystem::path& out) {
  schema::keys(cfg, "fit-surface config", {"dimension", "convention", "basis", "target", "data", "grid"});
  const auto n = schema::dimension(cfg);
  const auto basis = schema::basis(cfg, n);
  detail::require(cfg.contains("target") != cfg.contains("data"), "give exactly one of 'target' or 'data'");
  const double tol = opt.tolerance.value_or(1e-9);
  FitResult fit;
  if (cfg.contains("target")) {
    fit = fit_surface(basis, schema::target(cfg.at("target"), n, basis.convention()));
  } else {
    const Vector data = schema::vector(cfg.at("data"), "data");
    const auto ne = assemble_surface_dipole_data(basis, data);
    fit = solve_surface(ne);
    const auto phi = fit_field(basis, fit.mu);
    std::vector<double> v;
    for (const auto& e : basis.entries()) {
      v.push_back(phi.value(mirror(e.source).point()));
    }
    fit.interpolation = data_rows(v, data);
  }
  Outcome o;
  o.report["command"] = "fit-surface";
  o.report["inputs"] = echo(cfg, opt);
  o.report.update(report::fit(fit, tol));
  if (cfg.contains("grid")) {
    write_text(out / "field.csv", real_grid_csv(cfg.at("grid"), n.value(), [&](const HalfSpacePoint& z) {
                 return evaluate(basis, fit.mu, z);
               }));
    o.report["grid_csv"] = "field.csv";
  }
  return o;
}

inline ComplexField complex_target(const json& j) {
  schema::keys(j, "target", {"rational", "logs"});
  std::vector<RationalTerm> rational;
  std::vector<LogTerm> logs;
  if (j.contains("rational")) {
    const auto& r = j.at("rational");
    detail::require(r.is_array(), "target.rational must be an array");
    for (std::size_t i = 0; i < r.size(); ++i) {
      const std::string where = "target.rational[" + std::to_string(i) + "]";
      schema::keys(r[i], where, {"coefficient", "pole", "order"});
      rational.push_back({schema::complex(schema::at(r[i], "coefficient", where), where + ".coefficient"),
                          schema::complex(schema::at(r[i], "pole", where), where + ".pole"),
                          r[i].contains("order") ? schema::integer(r[i].at("order"), where + ".order") : 1});
    }
  }
  if (j.contains("logs")) {
    const auto& l = j.at("logs");
    detail::require(l.is_array(), "target.logs must be an array");
    for (std::size_t i = 0; i < l.size(); ++i) {
      const std::string where = "target.logs[" + std::to_string(i) + "]";
      schema::keys(l[i], where, {"coefficient", "z", "z_prime"});
      logs.push_back({schema::complex(schema::at(l[i], "coefficient", where), where + ".coefficient"),
                      schema::complex(schema::at(l[i], "z", where), where + ".z"),
                      schema::complex(schema::at(l[i], "z_prime", where), where + ".z_prime")});
    }
  }
  detail::require(!rational.empty() || !logs.empty(), "target must contain at least one term");
  return {std::move(rational), std::move(logs)};
}

inline Outcome fit_cx(const json& cfg, const Options& opt, const std::filesystem::path& out) {
  schema::keys(cfg, "fit-cx config", {"setting", "basis", "target", "grid"});
  const auto s = schema::at(cfg, "setting", "config").get<std::string>();
  detail::require(s == "sigma" || s == "dirichlet", "setting must be 'sigma' or 'dirichlet'");
  const auto setting = s == "sigma" ? ComplexSetting::sigma : ComplexSetting::dirichlet;
  const auto& b = schema::at(cfg, "basis", "config");
  detail::require(b.is_array() && !b.empty(), "basis must be a non-empty array");
  std::vector<ComplexBasisEntry> entries;
  for (std::size_t i = 0; i < b.size(); ++i) {
    const std::string where = "basis[" + std::to_string(i) + "]";
    const auto type = schema::at(b[i], "type", where).get<std::string>();
    if (type == "pole") {
      schema::keys(b[i], where, {"type", "z", "order"});
      entries.push_back(ComplexPole(schema::complex(schema::at(b[i], "z", where), where + ".z"),
                                    b[i].contains("order") ? schema::integer(b[i].at("order"), where + ".order") : 1));
    } else if (type == "log") {
      schema::keys(b[i], where, {"type", "z", "z_prime"});
      entries.push_back(PairedLogSource(schema::complex(schema::at(b[i], "z", where), where + ".z"),
                                        schema::complex(schema::at(b[i], "z_prime", where), where + ".z_prime")));
    } else {
      throw validation_error(where + ": type must be 'pole' or 'log'");
    }
  }
  const ComplexBasis basis(setting, std::move(entries));
  const auto fit = fit_complex(basis, complex_target(schema::at(cfg, "target", "config")));
  Outcome o;
  o.report["command"] = "fit-cx";
  o.report["inputs"] = echo(cfg, opt);
  o.report.update(report::fit(fit, opt.tolerance.value_or(1e-9)));
  if (cfg.contains("grid")) {
    write_text(out / "field.csv",
               complex_grid_csv(cfg.at("grid"), [&](Complex z) { return evaluate_cx(basis, fit.mu, z); }));
    o.report["grid_csv"] = "field.csv";
  }
  return o;
}

inline Outcome rbf_convert(const json& cfg, const Options& opt, const std::filesystem::path&) {
  schema::keys(cfg, "rbf-convert config", {"sites", "shape", "beta", "values", "route", "probes_per_axis"});
  ImqSpec spec;
  const auto& sites = schema::at(cfg, "sites", "config");
  detail::require(sites.is_array(), "sites must be an array of points");
  for (std::size_t i = 0; i < sites.size(); ++i) {
    spec.sites.push_back(schema::vector(sites[i], "sites[" + std::to_string(i) + "]"));
  }
  spec.shape = schema::number(schema::at(cfg, "shape", "config"), "shape");
  spec.beta = schema::number(schema::at(cfg, "beta", "config"), "beta");
  spec.values = schema::vector(schema::at(cfg, "values", "config"), "values");
  auto route = RbfRoute::dimension_monopole;
  if (cfg.contains("route")) {
    const auto r = cfg.at("route").get<std::string>();
    detail::require(r == "dimension_monopole" || r == "vertical_dipole",
                    "route must be 'dimension_monopole' or 'vertical_dipole'");
    route = r == "vertical_dipole" ? RbfRoute::vertical_dipole : RbfRoute::dimension_monopole;
  }
  const int probes = cfg.contains("probes_per_axis") ? schema::integer(cfg.at("probes_per_axis"), "probes_per_axis") : 9;
  const auto eq = to_halfspace(spec, route);
  const auto rep = verify_equivalence(spec, eq, probes);
  Outcome o;
  o.report["command"] = "rbf-convert";
  o.report["inputs"] = echo(cfg, opt);
  o.report["route"] = to_string(eq.route);
  o.report["setting"] = to_string(eq.setting);
  o.report["dimension"] = eq.dimension;
  o.report["source_depth"] = eq.source_depth;
  o.report["plane_height"] = eq.plane_height;
  o.report["gamma_T"] = eq.gamma_T;
  o.report["gamma_A"] = eq.gamma_A;
  o.report["gamma_mu"] = eq.gamma_mu;
  o.report["mu_rbf"] = report::vec(rep.mu_rbf);
  o.report["mu"] = report::vec(rep.mu_halfspace);
  o.report["condition_estimate"] = rep.condition_estimate;
  o.report["fit_norm_squared"] = rep.fit_energy;
  o.report["equivalence"] = {{"gram_rel_error", rep.gram_rel_error},
                             {"mu_rel_error", rep.mu_rel_error},
                             {"probe_abs_error", rep.probe_abs_error},
                             {"probe_scale", rep.probe_scale},
                             {"gram_ok", rep.gram_ok},
                             {"mu_ok", rep.mu_ok},
                             {"probe_ok", rep.probe_ok}};
  o.code = rep.ok() ? ok : tolerance;
  return o;
}

inline HarmonicField downcont_truth(const json& cfg) {
  if (!cfg.contains("truth") || (cfg.at("truth").is_string() && cfg.at("truth").get<std::string>() == "three_source")) {
    return three_source_truth();
  }
  return schema::target(cfg.at("truth"), Dimension(3), KernelConvention::scaled);
}

inline json errors_json(const std::vector<PlaneError>& errs) {
  json a = json::array();
  for (const auto& e : errs) {
    a.push_back({{"height", e.height},
                 {"rms_relative", e.rms_relative},
                 {"max_abs", e.max_abs},
                 {"truth_rms", e.truth_rms},
                 {"probes", e.probes}});
  }
  return a;
}

inline Outcome downcont(const json& cfg, const Options& opt, const std::filesystem::path& out) {
  schema::keys(cfg, "downcont config",
               {"truth", "half_extent", "grid_size", "altitude", "noise_fraction", "seed", "modes", "taper_alpha",
                "layout_count", "layout_extent", "layout_depth", "adjust", "heights", "window", "compare_unadjusted"});
  PipelineConfig p;
  const std::string w = "config";
  p.half_extent = schema::number_or(cfg, "half_extent", p.half_extent, w);
  p.grid_size = cfg.contains("grid_size") ? schema::integer(cfg.at("grid_size"), "grid_size") : p.grid_size;
  p.altitude = schema::number_or(cfg, "altitude", p.altitude, w);
  p.noise_fraction = schema::number_or(cfg, "noise_fraction", p.noise_fraction, w);
  if (cfg.contains("seed")) {
    detail::require(cfg.at("seed").is_number_unsigned(), "seed must be a non-negative integer");
    p.seed = cfg.at("seed").get<std::uint64_t>();
  }
  if (opt.seed) {
    p.seed = *opt.seed;
  }
  p.modes = cfg.contains("modes") ? schema::integer(cfg.at("modes"), "modes") : p.modes;
  p.taper_alpha = schema::number_or(cfg, "taper_alpha", p.taper_alpha, w);
  p.layout_count = cfg.contains("layout_count") ? schema::integer(cfg.at("layout_count"), "layout_count") : p.layout_count;
  p.layout_extent = schema::number_or(cfg, "layout_extent", p.layout_extent, w);
  p.layout_depth = schema::number_or(cfg, "layout_depth", p.layout_depth, w);
  if (cfg.contains("adjust")) {
    detail::require(cfg.at("adjust").is_boolean(), "adjust must be a boolean");
    p.adjust = cfg.at("adjust").get<bool>();
  }
  if (cfg.contains("heights")) {
    const Vector h = schema::vector(cfg.at("heights"), "heights");
    p.heights.assign(h.data(), h.data() + h.size());
  }
  p.window = schema::number_or(cfg, "window", p.window, w);
  const auto truth = downcont_truth(cfg);
  const auto r = run_pipeline(truth, p);

  Outcome o;
  o.report["command"] = "downcont";
  o.report["inputs"] = echo(cfg, opt);
  o.report["seed"] = p.seed;
  o.report["survey"] = {{"size", r.grid.size},
                        {"half_extent", r.grid.half_extent},
                        {"altitude", r.grid.altitude},
                        {"noise_sigma", r.grid.noise_sigma},
                        {"rms", grid_rms(r.grid)}};
  o.report["model"] = {{"max_index", r.model.max_index},
                       {"modes", r.model.field.modes().size()},
                       {"taper_alpha", r.model.taper.alpha},
                       {"adjusted", r.model.adjusted},
                       {"trend", {r.model.trend.mean, r.model.trend.slope_x, r.model.trend.slope_y}}};
  o.report["layout"] = {{"count", p.layout_count},
                        {"extent", p.layout_extent > 0.0 ? p.layout_extent : p.half_extent},
                        {"depth", r.continued.basis[0].source.w()}};
  o.report["mu"] = report::vec(r.continued.fit.mu);
  o.report["diagnostics"] = report::diagnostics(r.continued.fit.diagnostics);
  o.report["errors"] = errors_json(r.errors);
  const bool compare = cfg.contains("compare_unadjusted") && cfg.at("compare_unadjusted").get<bool>();
  if (compare && p.adjust) {
    auto q = p;
    q.adjust = false;
    o.report["unadjusted_errors"] = errors_json(run_pipeline(truth, q).errors);
  }

  std::ostringstream survey;
  survey << "x1,x2,h,value\n";
  for (int i = 0; i < r.grid.size; ++i) {
    for (int j = 0; j < r.grid.size; ++j) {
      survey << fmt(r.grid.coordinate(i)) << "," << fmt(r.grid.coordinate(j)) << "," << fmt(r.grid.altitude) << ","
             << fmt(r.grid.samples(i, j)) << "\n";
    }
  }
  write_text(out / "survey.csv", survey.str());
  std::ostringstream cont;
  cont << "x1,x2,h,value\n";
  for (double h : p.heights) {
    for (int i = 0; i < r.grid.size; ++i) {
      for (int j = 0; j < r.grid.size; ++j) {
        const double x = r.grid.coordinate(i), y = r.grid.coordinate(j);
        cont << fmt(x) << "," << fmt(y) << "," << fmt(h) << "," << fmt(r.continued.value(x, y, h)) << "\n";
      }
    }
  }
  write_text(out / "continued.csv", cont.str());
  o.report["grid_csv"] = {"survey.csv", "continued.csv"};
  return o;
}

// Canonical oracle checks: closed form against quadrature.
struct Check {
  std::string suite;
  std::string name;
  double tolerance; // relative unless absolute is set
  bool absolute;
  std::function<std::pair<double, QuadratureResult<double>>(const QuadratureSpec&)> run;
};

inline Vector origin(int n, double x1 = 0.0) {
  Vector t = Vector::Zero(n - 1);
  t[0] = x1;
  return t;
}

inline PointSourceSum one(int n, double x1, double w, KernelKind k = KernelKind::monopole()) {
  return {Dimension(n), {{1.0, SourcePoint(origin(n, x1), w), k}}};
}

inline QuadratureResult<double> real_part(const QuadratureResult<Complex>& r) {
  QuadratureResult<double> out;
  out.value = r.value.real();
  out.rule_error = r.rule_error;
  out.tail_bound = r.tail_bound;
  out.error_bound = r.error_bound;
  out.evaluations = r.evaluations;
  out.converged = r.converged;
  return out;
}

inline std::vector<Check> oracle_checks() {
  using std::numbers::pi;
  const Complex I(0.0, 1.0);
  std::vector<Check> c;
  c.push_back({"dirichlet", "replication n=3: D[F, f] = f(P)/2", 1e-3, false, [](const QuadratureSpec& s) {
                 const auto F = one(3, 0.0, -1.0), f = one(3, 0.0, -2.0);
                 return std::pair{1.0 / (24.0 * pi), quad_dirichlet_rn(F, f, s)};
               }});
  c.push_back({"dirichlet", "replication n=4: D[F, f] = f(P)/2", 1e-3, false, [](const QuadratureSpec& s) {
                 const auto F = one(4, 0.0, -1.0), f = one(4, 0.5, -1.5);
                 return std::pair{0.5 * f.value(HalfSpacePoint(origin(4), 1.0)), quad_dirichlet_rn(F, f, s)};
               }});
  c.push_back({"dirichlet", "raw kernel n=3: D[1/l, f] = 2 pi f(P)", 1e-3, false, [](const QuadratureSpec& s) {
                 const auto F = one(3, 0.0, -1.0, KernelKind::monopole(KernelConvention::raw));
                 const auto f = one(3, 0.4, -1.5);
                 return std::pair{2.0 * pi * f.value(HalfSpacePoint(origin(3), 1.0)), quad_dirichlet_rn(F, f, s)};
               }});
  c.push_back({"surface", "dipole diagonal n=3", 1e-3, false, [](const QuadratureSpec& s) {
                 const auto F = one(3, 0.0, -1.0, KernelKind::vertical_dipole());
                 return std::pair{1.0 / (32.0 * pi), quad_surface_rn(F, F, s)};
               }});
  c.push_back({"surface", "dipole replication n=3: (F, f) = -f(P)/2", 1e-3, false, [](const QuadratureSpec& s) {
                 const auto F = one(3, 0.0, -1.0, KernelKind::vertical_dipole());
                 const auto f = one(3, 0.6, -1.4, KernelKind::vertical_dipole());
                 return std::pair{-0.5 * f.value(HalfSpacePoint(origin(3), 1.0)), quad_surface_rn(F, f, s)};
               }});
  c.push_back({"surface", "monopole diagonal n=4", 1e-3, false, [](const QuadratureSpec& s) {
                 const auto F = one(4, 0.0, -1.0);
                 return std::pair{1.0 / (16.0 * pi * pi), quad_surface_rn(F, F, s)};
               }});
  c.push_back({"surface", "monopole line integral n=4, off-diagonal", 1e-3, false, [](const QuadratureSpec& s) {
                 const auto F = one(4, 0.0, -1.0), f = one(4, 0.8, -0.6);
                 return std::pair{monopole_line_inner(SourcePoint(origin(4), -1.0), f, Dimension(4)),
                                  quad_surface_rn(F, f, s)};
               }});
  c.push_back({"complex", "sigma/2 diagonal, pole at -i", 1e-6, true, [I](const QuadratureSpec& s) {
                 const ComplexField F({{1.0, -I, 1}});
                 return std::pair{0.5, real_part(quad_complex(ComplexSetting::sigma, F, F, s))};
               }});
  c.push_back({"complex", "D/2 diagonal, pole at -i", 1e-6, true, [I](const QuadratureSpec& s) {
                 const ComplexField F({{1.0, -I, 1}});
                 return std::pair{0.125, real_part(quad_complex(ComplexSetting::dirichlet, F, F, s))};
               }});
  c.push_back({"complex", "D/2 log pair functional, imaginary part", 1e-5, true, [I](const QuadratureSpec& s) {
                 const ComplexField xi({}, {{1.0, -I, -2.0 * I}});
                 const ComplexField f({{1.0, -2.0 * I, 1}});
                 const Complex expected = 0.5 * f.value(I) - 0.5 * f.value(2.0 * I);
                 auto r = quad_complex(ComplexSetting::dirichlet, xi, f, s);
                 auto out = real_part(r);
                 out.value = r.value.imag();
                 return std::pair{expected.imag(), out};
               }});
  return c;
}

inline Outcome oracle_check(const json& cfg, const Options& opt, const std::filesystem::path&) {
  schema::keys(cfg, "oracle-check config", {"suite", "quadrature"});
  std::string suite = opt.suite;
  if (cfg.contains("suite") && suite == "all") {
    suite = cfg.at("suite").get<std::string>();
  }
  detail::require(suite == "all" || suite == "dirichlet" || suite == "surface" || suite == "complex",
                  "suite must be one of all, dirichlet, surface, complex");
  QuadratureSpec spec;
  if (cfg.contains("quadrature")) {
    const auto& q = cfg.at("quadrature");
    schema::keys(q, "quadrature", {"radius", "radial_scale", "radial_panels", "angular_panels"});
    spec.radius = schema::number_or(q, "radius", spec.radius, "quadrature");
    spec.radial_scale = schema::number_or(q, "radial_scale", spec.radial_scale, "quadrature");
    spec.radial_panels = q.contains("radial_panels") ? schema::integer(q.at("radial_panels"), "radial_panels") : 0;
    spec.angular_panels = q.contains("angular_panels") ? schema::integer(q.at("angular_panels"), "angular_panels") : 0;
  }
  Outcome o;
  o.report["command"] = "oracle-check";
  o.report["inputs"] = echo(cfg, opt);
  o.report["suite"] = suite;
  json table = json::array();
  bool all = true;
  for (const auto& c : oracle_checks()) {
    if (suite != "all" && suite != c.suite) {
      continue;
    }
    const double tol = opt.tolerance.value_or(c.tolerance);
    const auto [expected, r] = c.run(spec);
    const double abs_err = std::abs(r.value - expected);
    const double err = c.absolute ? abs_err : abs_err / std::abs(expected);
    const bool pass = std::isfinite(err) && err <= tol;
    all = all && pass;
    table.push_back({{"suite", c.suite},
                     {"check", c.name},
                     {"closed_form", expected},
                     {"quadrature", r.value},
                     {"error", err},
                     {"error_kind", c.absolute ? "absolute" : "relative"},
                     {"tolerance", tol},
                     {"rule_error", r.rule_error},
                     {"tail_bound", r.tail_bound},
                     {"error_bound", r.error_bound},
                     {"within_bound", abs_err <= r.error_bound || abs_err <= 1e-14 * std::abs(expected)},
                     {"evaluations", r.evaluations},
                     {"pass", pass}});
  }
  o.report["checks"] = table;
  o.report["pass"] = all;
  o.code = all ? ok : tolerance;
  return o;
}

inline json load_config(const std::string& path, bool required) {
  if (path.empty()) {
    detail::require(!required, "--config is required for this command");
    return json::object();
  }
  std::ifstream f(path);
  detail::require(static_cast<bool>(f), "cannot open config file " + path);
  try {
    return json::parse(f);
  } catch (const json::parse_error& e) {
    throw validation_error(std::string("config is not valid JSON: ") + e.what());
  }
}

// Runs one subcommand, writes report.json into opt.out and returns the exit code.
inline int run(const std::string& command, const Options& opt, std::ostream& err) {
  try {
    const auto cfg = load_config(opt.config, command != "oracle-check");
    const std::filesystem::path out(opt.out);
    std::filesystem::create_directories(out);
    Outcome o;
    if (command == "fit-rn") {
      o = fit_rn(cfg, opt, out);
    } else if (command == "fit-surface") {
      o = fit_surface_cmd(cfg, opt, out);
    } else if (command == "fit-cx") {
      o = fit_cx(cfg, opt, out);
    } else if (command == "rbf-convert") {
      o = rbf_convert(cfg, opt, out);
    } else if (command == "downcont") {
      o = downcont(cfg, opt, out);
    } else if (command == "oracle-check") {
      o = oracle_check(cfg, opt, out);
    } else {
      throw validation_error("unknown command " + command);
    }
    o.report["exit_code"] = o.code;
    write_text(out / "report.json", o.report.dump(2) + "\n");
    if (o.code == tolerance) {
      err << command << ": tolerance check failed (see report.json)\n";
    }
    return o.code;
  } catch (const validation_error& e) {
    err << "error: " << e.what() << "\n";
    return usage;
  } catch (const divergence_error& e) {
    err << "error: " << e.what() << "\n";
    return usage;
  } catch (const json::exception& e) {
    err << "error: malformed config: " << e.what() << "\n";
    return usage;
  } catch (const solver_error& e) {
    err << "solver failure: " << e.what() << "\n";
    return solver;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return usage;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return internal;
  }
}

} // namespace didacks::cli
