#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "hermite_nc/bochner_riesz.hpp"
#include "hermite_nc/fields.hpp"
#include "hermite_nc/hermite.hpp"
#include "hermite_nc/multipliers.hpp"
#include "hermite_nc/nc_norms.hpp"
#include "hermite_nc/probe.hpp"
#include "hermite_nc/quadrature.hpp"
#include "hermite_nc/semigroup.hpp"
#include "hermite_nc/svg.hpp"
#include "hermite_nc/synthetic.hpp"
#include "hermite_nc/transform.hpp"

namespace hermite_nc {

/// Config or usage problem; the CLI maps this to exit code 2.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline const std::vector<std::string>& experiment_kinds() {
  static const std::vector<std::string> kinds = {
      "riesz-convergence", "riesz-kernel-probe", "semigroup-gfunction",
      "mehler-probe",      "marcinkiewicz",      "oscillating-probe",
      "h1-atoms",          "norm-equivalence"};
  return kinds;
}

/// Declarative experiment description. Every field has a serializable
/// default; parsing is strict (unknown keys are errors, not silently
/// ignored defaults).
struct ExperimentConfig {
  std::string kind = "riesz-convergence";
  int dim = 1;
  int matrix_size = 2;
  int degree_cap = 32;
  int grid_points = 0;  // nodes per axis; 0 = degree_cap + 17
  double alpha = 1.0;
  double gamma = 1.0;                  // marcinkiewicz power exponent
  std::string multiplier = "power";    // power | parity | inverse-power
  double kernel_exponent = -0.5;       // oscillating-probe convention
  std::vector<double> r_sweep = {4, 16, 64, 256, 1024, 4096};
  std::vector<double> p_values = {2.0};
  std::vector<double> t_values = {0.1, 0.5, 1.0};
  std::vector<double> x_values = {-1.5, -0.4, 0.0, 0.7, 2.0};
  std::vector<double> radii = {0.25, 1.0};
  std::vector<double> deltas = {0.125, 0.25, 0.5, 1.0, 2.0, 4.0, 8.0};
  int atoms_per_delta = 20;
  int sample_count = 20;  // random fields per sweep point
  long long n_max = 4096;
  std::uint64_t seed = 1;
  std::string output_dir = "out";

  bool operator==(const ExperimentConfig&) const = default;

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["kind"] = kind;
    j["dim"] = dim;
    j["matrix_size"] = matrix_size;
    j["degree_cap"] = degree_cap;
    j["grid_points"] = grid_points;
    j["alpha"] = alpha;
    j["gamma"] = gamma;
    j["multiplier"] = multiplier;
    j["kernel_exponent"] = kernel_exponent;
    j["r_sweep"] = r_sweep;
    j["p_values"] = p_values;
    j["t_values"] = t_values;
    j["x_values"] = x_values;
    j["radii"] = radii;
    j["deltas"] = deltas;
    j["atoms_per_delta"] = atoms_per_delta;
    j["sample_count"] = sample_count;
    j["n_max"] = n_max;
    j["seed"] = seed;
    j["output_dir"] = output_dir;
    return j;
  }

  static ExperimentConfig from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw ConfigError("config: top level must be an object");
    ExperimentConfig c;
    for (const auto& [key, value] : j.items()) {
      try {
        if (key == "kind") value.get_to(c.kind);
        else if (key == "dim") value.get_to(c.dim);
        else if (key == "matrix_size") value.get_to(c.matrix_size);
        else if (key == "degree_cap") value.get_to(c.degree_cap);
        else if (key == "grid_points") value.get_to(c.grid_points);
        else if (key == "alpha") value.get_to(c.alpha);
        else if (key == "gamma") value.get_to(c.gamma);
        else if (key == "multiplier") value.get_to(c.multiplier);
        else if (key == "kernel_exponent") value.get_to(c.kernel_exponent);
        else if (key == "r_sweep") value.get_to(c.r_sweep);
        else if (key == "p_values") value.get_to(c.p_values);
        else if (key == "t_values") value.get_to(c.t_values);
        else if (key == "x_values") value.get_to(c.x_values);
        else if (key == "radii") value.get_to(c.radii);
        else if (key == "deltas") value.get_to(c.deltas);
        else if (key == "atoms_per_delta") value.get_to(c.atoms_per_delta);
        else if (key == "sample_count") value.get_to(c.sample_count);
        else if (key == "n_max") value.get_to(c.n_max);
        else if (key == "seed") value.get_to(c.seed);
        else if (key == "output_dir") value.get_to(c.output_dir);
        else throw ConfigError("config: unknown key \"" + key + "\"");
      } catch (const nlohmann::json::exception& e) {
        throw ConfigError("config: field \"" + key + "\": " + e.what());
      }
    }
    return c;
  }

  static ExperimentConfig load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open " + path);
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(std::string("config: parse error in ") + path + ": " +
                        e.what());
    }
    return from_json(j);
  }

  int resolved_grid_points() const {
    return grid_points > 0 ? grid_points : degree_cap + 17;
  }

  void validate() const {
    const auto& kinds = experiment_kinds();
    if (std::find(kinds.begin(), kinds.end(), kind) == kinds.end())
      throw ConfigError("config: unknown experiment kind \"" + kind + "\"");
    if (dim < 1 || dim > 8) throw ConfigError("config: dim must be in [1, 8]");
    if (matrix_size < 1) throw ConfigError("config: matrix_size must be >= 1");
    if (degree_cap < 0) throw ConfigError("config: degree_cap must be >= 0");
    if (grid_points < 0) throw ConfigError("config: grid_points must be >= 0");
    if (grid_points > 0 && grid_points < degree_cap + 1)
      throw ConfigError("config: grid_points must exceed degree_cap");
    if (sample_count < 1) throw ConfigError("config: sample_count must be >= 1");
    if (atoms_per_delta < 1)
      throw ConfigError("config: atoms_per_delta must be >= 1");
    if (multiplier != "power" && multiplier != "parity" &&
        multiplier != "inverse-power")
      throw ConfigError("config: multiplier must be power|parity|inverse-power");
    const auto nonempty = [](const std::vector<double>& v, const char* name) {
      if (v.empty())
        throw ConfigError(std::string("config: range \"") + name +
                          "\" must be nonempty");
    };
    if (kind == "riesz-convergence" || kind == "riesz-kernel-probe")
      nonempty(r_sweep, "r_sweep");
    if (kind == "riesz-convergence" || kind == "semigroup-gfunction" ||
        kind == "norm-equivalence")
      nonempty(p_values, "p_values");
    if (kind == "mehler-probe" || kind == "oscillating-probe" ||
        kind == "h1-atoms")
      nonempty(t_values, "t_values");
    if (kind == "mehler-probe" || kind == "riesz-kernel-probe" ||
        kind == "oscillating-probe")
      nonempty(x_values, "x_values");
    if (kind == "h1-atoms") nonempty(deltas, "deltas");
    if (kind == "marcinkiewicz" && n_max < 8)
      throw ConfigError("config: n_max must be >= 8");
    for (double p : p_values)
      if (p < 1.0) throw ConfigError("config: p_values entries must be >= 1");
    for (double t : t_values)
      if (t <= 0.0) throw ConfigError("config: t_values entries must be > 0");
  }
};

/// One long-format result row.
struct ResultRow {
  std::string parameters;  // "k=v;k=v" with %.17g values
  std::string metric;
  double value = 0.0;
};

struct RunResult {
  int exit_code = 0;  // 0 pass, 1 probe failure
  std::vector<ProbeReport> reports;
  std::vector<ResultRow> rows;
};

namespace detail {

inline std::string fmt_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string fmt_param(const char* key, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s=%.17g", key, v);
  return buf;
}

/// Runs fn(i) for i in [0, count) on up to `jobs` worker threads.
/// Callers write results into pre-sized slots, so scheduling order never
/// leaks into the output.
template <typename Fn>
void parallel_for(std::size_t count, int jobs, Fn&& fn) {
  const int workers = std::max(1, std::min<int>(jobs, static_cast<int>(count)));
  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < count; i += workers) fn(i);
    });
  for (auto& t : pool) t.join();
}

inline QuadratureGrid experiment_grid(const ExperimentConfig& cfg) {
  return QuadratureGrid::gauss_hermite(cfg.dim, cfg.resolved_grid_points());
}

inline void run_riesz_convergence(const ExperimentConfig& cfg, int jobs,
                                  RunResult& out) {
  const QuadratureGrid grid = experiment_grid(cfg);
  const HermiteTransform T(grid, cfg.degree_cap);
  // band-limited PSD bump so the sweep can converge all the way down
  std::vector<double> center(cfg.dim, 0.3);
  const MatrixField bump = gaussian_bump_field(
      grid, cfg.matrix_size, center, 0.5, reference_psd_matrix(cfg.matrix_size));
  const MatrixField f = T.synthesize(T.analyze(bump));
  struct Cell {
    double R, p, err;
  };
  std::vector<Cell> cells;
  for (double R : cfg.r_sweep)
    for (double p : cfg.p_values) cells.push_back({R, p, 0.0});
  parallel_for(cells.size(), jobs, [&](std::size_t i) {
    RieszParams rp{cells[i].R, cfg.alpha, cfg.dim};
    const MatrixField s = riesz_apply(T, f, rp);
    cells[i].err = nc_lp_norm(s - f, cells[i].p);
  });
  ProbeReport rep;
  rep.name = "riesz-convergence";
  rep.notes = "per-p trend: error must decrease monotonically along the R sweep";
  std::map<double, SvgSeries> curves;
  bool monotone = true;
  std::map<double, double> prev;
  for (const auto& c : cells) {
    out.rows.push_back({fmt_param("R", c.R) + ";" + fmt_param("alpha", cfg.alpha) +
                            ";" + fmt_param("p", c.p),
                        "riesz_lp_error", c.err});
    char label[32];
    std::snprintf(label, sizeof label, "p=%g", c.p);
    rep.record(label, c.err, {c.R, c.p});
    auto it = prev.find(c.p);
    if (it != prev.end() && c.err > it->second) monotone = false;
    prev[c.p] = c.err;
    auto& s = curves[c.p];
    s.label = label;
    s.x.push_back(c.R);
    s.y.push_back(c.err);
  }
  rep.stability_threshold = std::numeric_limits<double>::infinity();
  rep.finalize();
  rep.pass = monotone;
  if (!monotone) rep.notes += "; trend violated";
  out.reports.push_back(rep);
  std::vector<SvgSeries> series;
  for (auto& [p, s] : curves) series.push_back(std::move(s));
  std::filesystem::create_directories(cfg.output_dir);
  write_svg_chart(cfg.output_dir + "/plot_riesz_convergence.svg",
                  "Bochner-Riesz L_p error vs R", series);
}

inline void run_riesz_kernel_probe(const ExperimentConfig& cfg, RunResult& out) {
  RieszParams base{1.0, cfg.alpha, cfg.dim};
  DecayLattice lat;
  lat.R_values = cfg.r_sweep;
  lat.axis_values = cfg.x_values;
  lat.r_values = cfg.radii;
  lat.p = cfg.p_values.empty() ? 2.0 : cfg.p_values.front();
  if (cfg.dim >= 2)
    for (double x : cfg.x_values) lat.x_points.push_back(
        std::vector<double>(cfg.dim, x));
  const DecayMode mode = cfg.dim == 1 ? DecayMode::kD1 : DecayMode::kHd;
  out.reports.push_back(kernel_decay_report(base, lat, mode));
}

inline void run_semigroup_gfunction(const ExperimentConfig& cfg, RunResult& out) {
  const QuadratureGrid grid = experiment_grid(cfg);
  const HermiteTransform T(grid, cfg.degree_cap);
  const TimeGrid tg = TimeGrid::log_spaced();
  Rng rng(cfg.seed);
  ProbeReport rep;
  rep.name = "g-function-l2-identity";
  rep.stability_threshold = std::numeric_limits<double>::infinity();
  bool pass = true;
  std::vector<double> errors;
  for (int s = 0; s < cfg.sample_count; ++s) {
    const MatrixField f = T.synthesize(random_band_limited_coeffs(
        cfg.dim, cfg.degree_cap, cfg.matrix_size, rng));
    const double f2 = nc_lp_norm(f, 2.0);
    const double g2 = nc_lp_norm(g_function(T, f, tg), 2.0);
    const double err = std::abs(g2 - 0.5 * f2) / f2;
    errors.push_back(err);
    out.rows.push_back({fmt_param("sample", s), "g_identity_rel_error", err});
    rep.record("identity", err, {static_cast<double>(s)});
    if (err > 1e-3) pass = false;
    for (double p : cfg.p_values) {
      const double ep = ep_combined_norm(T, f, p, tg);
      out.rows.push_back({fmt_param("sample", s) + ";" + fmt_param("p", p),
                          "ep_norm", ep});
    }
  }
  rep.notes = "pass iff | ||g(f)||_2 - ||f||_2/2 | <= 1e-3 ||f||_2 on every draw";
  rep.finalize();
  rep.pass = pass;
  out.reports.push_back(rep);
  std::vector<SvgSeries> series(1);
  series[0].label = "identity error";
  for (std::size_t s = 0; s < errors.size(); ++s) {
    series[0].x.push_back(static_cast<double>(s + 1));
    series[0].y.push_back(errors[s]);
  }
  std::filesystem::create_directories(cfg.output_dir);
  write_svg_chart(cfg.output_dir + "/plot_g_identity.svg",
                  "g-function identity error per draw", series, false, true);
}

inline void run_mehler_probe(const ExperimentConfig& cfg, RunResult& out) {
  if (cfg.dim != 1)
    throw ConfigError("config: mehler-probe is implemented for dim = 1");
  constexpr int kTerms = 200;
  constexpr double kFloor = 1e-12;  // below this the spectral oracle is noise
  ProbeReport rep;
  rep.name = "mehler-spectral-match";
  rep.stability_threshold = std::numeric_limits<double>::infinity();
  bool pass = true;
  for (double t : cfg.t_values) {
    const MehlerParams mp = MehlerParams::create(t, 1);
    char label[32];
    std::snprintf(label, sizeof label, "t=%g", t);
    for (double x : cfg.x_values)
      for (double y : cfg.x_values) {
        const double xs[1] = {x}, ys[1] = {y};
        const double k = mehler_kernel(mp, xs, ys);
        if (k < kFloor) continue;
        double s = 0.0;
        const auto px = hermite_phi_values(x, kTerms);
        const auto py = hermite_phi_values(y, kTerms);
        for (int n = 0; n <= kTerms; ++n)
          s += std::exp(-(2.0 * n + 1.0) * t) * px[n] * py[n];
        const double err = std::abs(k - s) / std::abs(s);
        out.rows.push_back({fmt_param("t", t) + ";" + fmt_param("x", x) + ";" +
                                fmt_param("y", y),
                            "mehler_rel_error", err});
        rep.record(label, err, {t, x, y});
        if (err > 1e-6) pass = false;
      }
  }
  rep.notes = "pass iff kernel matches the truncated spectral sum to 1e-6 "
              "relative wherever the kernel exceeds the oracle noise floor";
  rep.finalize();
  rep.pass = pass;
  out.reports.push_back(rep);
}

inline MultiplierSpec multiplier_from_config(const ExperimentConfig& cfg) {
  if (cfg.multiplier == "power") return MultiplierSpec::unimodular_power(cfg.gamma);
  if (cfg.multiplier == "parity") return MultiplierSpec::parity();
  return MultiplierSpec::inverse_power(cfg.alpha);
}

inline void run_marcinkiewicz(const ExperimentConfig& cfg, RunResult& out) {
  const MultiplierSpec mu = multiplier_from_config(cfg);
  ProbeReport rep = marcinkiewicz_report(mu, std::max(1, cfg.dim), cfg.n_max);
  out.reports.push_back(rep);
}

inline void run_oscillating_probe(const ExperimentConfig& cfg, RunResult& out) {
  OscillatingParams p;
  p.alpha = cfg.alpha;
  p.kernel_exponent = cfg.kernel_exponent;
  p.t = cfg.t_values.front();
  OscLattice lat;
  lat.t_values = cfg.t_values;
  for (std::size_t i = 0; i < cfg.x_values.size(); ++i)
    for (std::size_t j = i + 1; j < cfg.x_values.size(); ++j)
      lat.xy_pairs.emplace_back(cfg.x_values[i], cfg.x_values[j]);
  if (lat.xy_pairs.empty())
    throw ConfigError("config: oscillating-probe needs >= 2 distinct x_values");
  for (auto& rep : lemma_battery(lat, p)) out.reports.push_back(std::move(rep));
}

inline void run_h1_atoms(const ExperimentConfig& cfg, RunResult& out) {
  for (double t : cfg.t_values) {
    OscillatingParams p;
    p.t = t;
    p.alpha = 0.5;
    H1AtomConfig acfg;
    acfg.deltas = cfg.deltas;
    acfg.atoms_per_delta = cfg.atoms_per_delta;
    acfg.matrix_size = cfg.matrix_size;
    acfg.seed = cfg.seed;
    ProbeReport rep = h1_atom_test(p, acfg);
    for (const auto& s : rep.slices)
      out.rows.push_back({fmt_param("t", t) + ";" + s.label, "h1_atom_sup_l1",
                          s.fitted_constant});
    out.reports.push_back(std::move(rep));
  }
}

inline void run_norm_equivalence(const ExperimentConfig& cfg, RunResult& out) {
  const TimeGrid tg = TimeGrid::log_spaced();
  ProbeReport hi, lo;
  hi.name = "norm-equivalence-upper";
  lo.name = "norm-equivalence-lower";
  hi.stability_threshold = lo.stability_threshold = 2.0;
  for (int cap : {cfg.degree_cap, 2 * cfg.degree_cap}) {
    const QuadratureGrid grid =
        QuadratureGrid::gauss_hermite(cfg.dim, cap + 17);
    const HermiteTransform T(grid, cap);
    for (double p : cfg.p_values) {
      char label[48];
      std::snprintf(label, sizeof label, "cap=%d,p=%g", cap, p);
      Rng rng(cfg.seed);
      for (int s = 0; s < cfg.sample_count; ++s) {
        const MatrixField f = T.synthesize(
            random_band_limited_coeffs(cfg.dim, cap, cfg.matrix_size, rng));
        const double ratio =
            ep_combined_norm(T, f, p, tg) / nc_lp_norm(f, p);
        out.rows.push_back(
            {fmt_param("cap", cap) + ";" + fmt_param("p", p) + ";" +
                 fmt_param("sample", s),
             "ep_over_lp_ratio", ratio});
        hi.record(label, ratio, {static_cast<double>(cap), p});
        lo.record(label, 1.0 / ratio, {static_cast<double>(cap), p});
      }
    }
  }
  hi.notes = "largest ||f||_Ep / ||f||_p ratio per (cap, p) slice";
  lo.notes = "largest inverse ratio per (cap, p) slice";
  hi.finalize();
  lo.finalize();
  out.reports.push_back(std::move(hi));
  out.reports.push_back(std::move(lo));
}

}  // namespace detail

/// Executes the configured experiment and writes results.csv, report.json
/// and any plots into the output directory. Deterministic for fixed seed.
inline RunResult run(const ExperimentConfig& cfg, int jobs = 1) {
  cfg.validate();
  if (jobs < 1) throw ConfigError("config: jobs must be >= 1");
  RunResult out;
  if (cfg.kind == "riesz-convergence")
    detail::run_riesz_convergence(cfg, jobs, out);
  else if (cfg.kind == "riesz-kernel-probe")
    detail::run_riesz_kernel_probe(cfg, out);
  else if (cfg.kind == "semigroup-gfunction")
    detail::run_semigroup_gfunction(cfg, out);
  else if (cfg.kind == "mehler-probe")
    detail::run_mehler_probe(cfg, out);
  else if (cfg.kind == "marcinkiewicz")
    detail::run_marcinkiewicz(cfg, out);
  else if (cfg.kind == "oscillating-probe")
    detail::run_oscillating_probe(cfg, out);
  else if (cfg.kind == "h1-atoms")
    detail::run_h1_atoms(cfg, out);
  else
    detail::run_norm_equivalence(cfg, out);

  std::sort(out.rows.begin(), out.rows.end(),
            [](const ResultRow& a, const ResultRow& b) {
              return std::tie(a.parameters, a.metric) <
                     std::tie(b.parameters, b.metric);
            });
  std::filesystem::create_directories(cfg.output_dir);
  {
    std::ofstream csv(cfg.output_dir + "/results.csv", std::ios::binary);
    if (!csv) throw std::runtime_error("run: cannot write results.csv");
    csv << "experiment,parameters,metric,value\n";
    for (const auto& r : out.rows)
      csv << cfg.kind << "," << r.parameters << "," << r.metric << ","
          << detail::fmt_g17(r.value) << "\n";
  }
  {
    nlohmann::json j;
    j["config"] = cfg.to_json();
    j["reports"] = nlohmann::json::array();
    for (const auto& r : out.reports) j["reports"].push_back(r.to_json());
    std::ofstream rj(cfg.output_dir + "/report.json", std::ios::binary);
    if (!rj) throw std::runtime_error("run: cannot write report.json");
    rj << j.dump(2) << "\n";
  }
  for (const auto& r : out.reports)
    if (!r.pass) out.exit_code = 1;
  return out;
}

/// Human-readable probe table; returns 1 if any probe failed.
inline int emit_summary(const std::vector<ProbeReport>& reports,
                        std::ostream& os) {
  if (reports.empty()) {
    os << "no probes\n";
    return 0;
  }
  int rc = 0;
  os << "probe                                    constant     stability  verdict\n";
  for (const auto& r : reports) {
    char line[160];
    std::snprintf(line, sizeof line, "%-40s %-12.5g %-10.4g %s\n",
                  r.name.c_str(), r.fitted_constant, r.stability_factor,
                  r.pass ? "PASS" : "FAIL");
    os << line;
    if (!r.pass) {
      rc = 1;
      if (!r.notes.empty()) os << "  ^ " << r.notes << "\n";
    }
  }
  return rc;
}

}  // namespace hermite_nc
