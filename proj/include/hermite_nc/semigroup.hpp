#pragma once

#include <cmath>
#include <complex>
#include <cstdio>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hermite_nc/fields.hpp"
#include "hermite_nc/nc_norms.hpp"
#include "hermite_nc/probe.hpp"
#include "hermite_nc/transform.hpp"

namespace hermite_nc {

/// Log-spaced time grid with trapezoid weights (in log t) for the
/// g-type integrals int h(t) t^p dt. The head truncation of
/// int_0^infty e^{-2Nt} N^2 t dt is bounded by (N t_min)^2 / 2.
struct TimeGrid {
  std::vector<double> times;
  std::vector<double> log_weights;  // trapezoid weights in s = log t

  static TimeGrid log_spaced(double t_min = 1e-4, double t_max = 16.0,
                             int count = 256) {
    if (count < 16) throw std::invalid_argument("TimeGrid: need >= 16 points");
    if (t_min <= 0.0 || t_max <= t_min)
      throw std::invalid_argument("TimeGrid: need 0 < t_min < t_max");
    TimeGrid g;
    const double s0 = std::log(t_min), s1 = std::log(t_max);
    const double h = (s1 - s0) / (count - 1);
    for (int j = 0; j < count; ++j) {
      g.times.push_back(std::exp(s0 + j * h));
      g.log_weights.push_back(j == 0 || j == count - 1 ? 0.5 * h : h);
    }
    return g;
  }

  int size() const { return static_cast<int>(times.size()); }

  /// Quadrature weight at node j for integrals of h(t) t^p dt.
  double weight(int j, double p) const {
    return log_weights[j] * std::pow(times[j], p + 1.0);
  }

  /// Head truncation of int_0^t_min e^{-2Nt} N^2 t dt <= (N t_min)^2 / 2.
  double head_truncation_bound(double big_n) const {
    const double u = big_n * times.front();
    return 0.5 * u * u;
  }
};

namespace detail {

/// One-time calibration of the d=1 Mehler constant against the
/// truncated spectral sum at (t, x, y) = (0.5, 0, 0).
inline double mehler_c1() {
  static const double c1 = [] {
    const double t = 0.5;
    const auto phi = hermite_phi_values(0.0, 200);
    double s = 0.0;
    for (int n = 0; n <= 200; ++n)
      s += std::exp(-(2.0 * n + 1.0) * t) * phi[n] * phi[n];
    return s * std::sqrt(std::sinh(2.0 * t));
  }();
  return c1;
}

}  // namespace detail

/// Mehler heat-kernel parameters; c_d is fixed once by spectral
/// calibration (it comes out as (2 pi)^{-d/2}) and then frozen.
struct MehlerParams {
  double t = 1.0;
  int dim = 1;
  double c_d = 0.0;

  static MehlerParams create(double t, int dim) {
    if (t <= 0.0) throw std::invalid_argument("MehlerParams: t must be > 0");
    if (dim < 1) throw std::invalid_argument("MehlerParams: dim must be >= 1");
    return MehlerParams{t, dim, std::pow(detail::mehler_c1(), dim)};
  }
};

namespace detail {

/// log k_t(x,y) up to additive log c_d; -inf signalled by the caller
/// clamping exponents below -745 to zero.
inline double mehler_log_body(double t, std::span<const double> x,
                              std::span<const double> y, int d) {
  const double sh = std::sinh(2.0 * t), ch = std::cosh(2.0 * t);
  double x2 = 0.0, y2 = 0.0, xy = 0.0;
  for (int j = 0; j < d; ++j) {
    x2 += x[j] * x[j];
    y2 += y[j] * y[j];
    xy += x[j] * y[j];
  }
  return -0.5 * d * std::log(sh) - 0.5 * (x2 + y2) * (ch / sh) + xy / sh;
}

}  // namespace detail

/// k_t(x,y) = c_d (sinh 2t)^{-d/2} exp(-(|x|^2+|y|^2) coth(2t)/2
///                                     + x.y / sinh(2t)),
/// with the exponent clamped (underflow to zero below -745).
inline double mehler_kernel(const MehlerParams& p, std::span<const double> x,
                            std::span<const double> y) {
  if (p.t <= 0.0) throw std::invalid_argument("mehler_kernel: t must be > 0");
  if (static_cast<int>(x.size()) != p.dim || x.size() != y.size())
    throw std::invalid_argument("mehler_kernel: point dimension mismatch");
  const double l = std::log(p.c_d) + detail::mehler_log_body(p.t, x, y, p.dim);
  return l < -745.0 ? 0.0 : std::exp(l);
}

/// d/dt log k_t = -d coth 2t + (|x|^2+|y|^2)/sinh^2 2t
///                - 2 (x.y) cosh 2t / sinh^2 2t.
inline double mehler_dt_log(double t, std::span<const double> x,
                            std::span<const double> y) {
  const int d = static_cast<int>(x.size());
  const double sh = std::sinh(2.0 * t), ch = std::cosh(2.0 * t);
  double x2 = 0.0, y2 = 0.0, xy = 0.0;
  for (int j = 0; j < d; ++j) {
    x2 += x[j] * x[j];
    y2 += y[j] * y[j];
    xy += x[j] * y[j];
  }
  return -d * (ch / sh) + (x2 + y2) / (sh * sh) - 2.0 * xy * ch / (sh * sh);
}

inline double dt_mehler_kernel(const MehlerParams& p, std::span<const double> x,
                               std::span<const double> y) {
  const double k = mehler_kernel(p, x, y);
  return k == 0.0 ? 0.0 : k * mehler_dt_log(p.t, x, y);
}

/// d/dy_j of dt_mehler_kernel, from the closed-form log-derivatives.
inline double dy_dt_mehler_kernel(const MehlerParams& p,
                                  std::span<const double> x,
                                  std::span<const double> y, int j) {
  const double k = mehler_kernel(p, x, y);
  if (k == 0.0) return 0.0;
  const double sh = std::sinh(2.0 * p.t), ch = std::cosh(2.0 * p.t);
  const double dy_log = -y[j] * (ch / sh) + x[j] / sh;
  const double dy_dt_log = 2.0 * (y[j] - x[j] * ch) / (sh * sh);
  return k * (dy_log * mehler_dt_log(p.t, x, y) + dy_dt_log);
}

inline double dx_dt_mehler_kernel(const MehlerParams& p,
                                  std::span<const double> x,
                                  std::span<const double> y, int j) {
  return dy_dt_mehler_kernel(p, y, x, j);  // kernel symmetric in (x, y)
}

enum class SemigroupMode { kSpectral, kKernel };

/// Per-level semigroup factors e^{-(2n+d)t}, n = 0..cap.
inline std::vector<std::complex<double>> semigroup_factors(int cap, int d,
                                                           double t, int k = 0) {
  std::vector<std::complex<double>> f(cap + 1);
  for (int n = 0; n <= cap; ++n) {
    const double big_n = 2.0 * n + d;
    f[n] = std::pow(-big_n, k) * std::exp(-big_n * t);
  }
  return f;
}

/// H^t f, either spectrally (multiply f^(nu) by e^{-Nt}) or by
/// quadrature against the Mehler kernel.
inline MatrixField semigroup_apply(const HermiteTransform& T, const MatrixField& f,
                                   double t, SemigroupMode mode) {
  if (t <= 0.0) throw std::invalid_argument("semigroup_apply: t must be > 0");
  if (mode == SemigroupMode::kSpectral)
    return T.apply_level_multiplier(T.analyze(f),
                                    semigroup_factors(T.degree_cap(), T.dim(), t));
  const MehlerParams p = MehlerParams::create(t, T.dim());
  MatrixField out(f.grid, f.matrix_size);
  out.hermitian = f.hermitian;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const auto xi = f.grid.point(i);
    for (std::size_t j = 0; j < f.size(); ++j)
      out.samples[i] += f.grid.weight(j) *
                        mehler_kernel(p, xi, f.grid.point(j)) * f.samples[j];
  }
  return out;
}

/// dH^t/dt f, spectral factor -N e^{-Nt} or the closed-form kernel
/// derivative.
inline MatrixField dt_semigroup_apply(const HermiteTransform& T,
                                      const MatrixField& f, double t,
                                      SemigroupMode mode) {
  if (t <= 0.0) throw std::invalid_argument("dt_semigroup_apply: t must be > 0");
  if (mode == SemigroupMode::kSpectral)
    return T.apply_level_multiplier(
        T.analyze(f), semigroup_factors(T.degree_cap(), T.dim(), t, 1));
  const MehlerParams p = MehlerParams::create(t, T.dim());
  MatrixField out(f.grid, f.matrix_size);
  out.hermitian = f.hermitian;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const auto xi = f.grid.point(i);
    for (std::size_t j = 0; j < f.size(); ++j)
      out.samples[i] += f.grid.weight(j) *
                        dt_mehler_kernel(p, xi, f.grid.point(j)) * f.samples[j];
  }
  return out;
}

/// g_k(f)(x) = (int t^{2k-1} |d^k/dt^k H^t f(x)|^2 dt)^{1/2} with
/// |A|^2 = A*A; time derivatives applied spectrally. Pointwise PSD by
/// construction.
inline MatrixField g_k_function(const HermiteTransform& T, const MatrixField& f,
                                int k, const TimeGrid& tg) {
  if (k < 1) throw std::invalid_argument("g_k_function: k must be >= 1");
  const SpectralCoeffs c = T.analyze(f);
  const int n = f.matrix_size;
  std::vector<Eigen::MatrixXcd> acc(f.size(), Eigen::MatrixXcd::Zero(n, n));
  for (int j = 0; j < tg.size(); ++j) {
    const MatrixField df = T.apply_level_multiplier(
        c, semigroup_factors(T.degree_cap(), T.dim(), tg.times[j], k));
    const double w = tg.weight(j, 2.0 * k - 1.0);
    for (std::size_t i = 0; i < f.size(); ++i)
      acc[i] += w * (df.samples[i].adjoint() * df.samples[i]);
  }
  MatrixField g(f.grid, n);
  g.hermitian = g.positive = true;
  for (std::size_t i = 0; i < f.size(); ++i) g.samples[i] = psd_sqrt(acc[i]);
  return g;
}

inline MatrixField g_function(const HermiteTransform& T, const MatrixField& f,
                              const TimeGrid& tg) {
  return g_k_function(T, f, 1, tg);
}

/// g*_k(f)(x) = (int int t^{(2-d)/2} (1 + |x-y|^2/t)^{-k}
///              |dH^t f(y)/dt|^2 dt dy)^{1/2} by double quadrature on
/// f's own grid.
inline MatrixField g_star_k(const HermiteTransform& T, const MatrixField& f,
                            int k, const TimeGrid& tg) {
  if (k < 1) throw std::invalid_argument("g_star_k: k must be >= 1");
  const int d = T.dim(), n = f.matrix_size;
  const SpectralCoeffs c = T.analyze(f);
  const std::size_t np = f.size();
  std::vector<std::vector<double>> pts(np);
  for (std::size_t i = 0; i < np; ++i) {
    const auto p = f.grid.point(i);
    pts[i].assign(p.begin(), p.end());
  }
  std::vector<Eigen::MatrixXcd> acc(np, Eigen::MatrixXcd::Zero(n, n));
  const double t_power = (2.0 - d) / 2.0 - 1.0;  // weight() adds the dt power
  for (int j = 0; j < tg.size(); ++j) {
    const double t = tg.times[j];
    const MatrixField df = T.apply_level_multiplier(
        c, semigroup_factors(T.degree_cap(), T.dim(), t, 1));
    const double wt = tg.weight(j, t_power);
    std::vector<Eigen::MatrixXcd> sq(np);
    for (std::size_t y = 0; y < np; ++y)
      sq[y] = f.grid.weight(y) * (df.samples[y].adjoint() * df.samples[y]);
    for (std::size_t i = 0; i < np; ++i)
      for (std::size_t y = 0; y < np; ++y) {
        double r2 = 0.0;
        for (int a = 0; a < d; ++a)
          r2 += (pts[i][a] - pts[y][a]) * (pts[i][a] - pts[y][a]);
        acc[i] += wt * std::pow(1.0 + r2 / t, -static_cast<double>(k)) * sq[y];
      }
  }
  MatrixField g(f.grid, n);
  g.hermitian = g.positive = true;
  for (std::size_t i = 0; i < np; ++i) g.samples[i] = psd_sqrt(acc[i]);
  return g;
}

enum class NormSide { kRow, kColumn };

/// ||g(f)||_p (column) or ||g(f*)||_p (row).
inline double ep_norm(const HermiteTransform& T, const MatrixField& f, double p,
                      NormSide side, const TimeGrid& tg) {
  if (p < 1.0) throw std::invalid_argument("ep_norm: p must be >= 1");
  if (side == NormSide::kColumn) return nc_lp_norm(g_function(T, f, tg), p);
  MatrixField fs(f.grid, f.matrix_size);
  fs.hermitian = f.hermitian;
  for (std::size_t i = 0; i < f.size(); ++i)
    fs.samples[i] = f.samples[i].adjoint();
  return nc_lp_norm(g_function(T, fs, tg), p);
}

/// Hardy-norm combination: max of the sides for p >= 2; for p < 2 the
/// true norm is an infimum over splittings, so min of the sides is the
/// computable upper bound used consistently in sweeps.
inline double ep_combined_norm(const HermiteTransform& T, const MatrixField& f,
                               double p, const TimeGrid& tg) {
  const double col = ep_norm(T, f, p, NormSide::kColumn, tg);
  const double row = ep_norm(T, f, p, NormSide::kRow, tg);
  return p >= 2.0 ? std::max(col, row) : std::min(col, row);
}

/// Lattice for the Gaussian kernel-bound probes. d = 1 only: the
/// kernel tensorizes, so the one-dimensional probe carries the content.
struct KernelBoundLattice {
  std::vector<double> t_values;           // must span t < 1 and t >= 1
  std::vector<double> axis_values;        // x and y drawn from this set
  std::vector<double> a_grid = {1.0 / 32.0, 1.0 / 16.0, 1.0 / 8.0, 1.0 / 4.0};
  std::vector<double> separations = {0.5, 1.0, 2.0};  // |x-y| for (iv)-(vi)
  TimeGrid time_grid = TimeGrid::log_spaced();
};

/// Six fitted-constant probes for the time/space derivative bounds of
/// the heat kernel:
///   (i)   |dk/dt|        <= C t^{-3/2}  e^{-a (x-y)^2 / t}
///   (ii)  |d2k/dydt|     <= C t^{-2}    e^{-a (x-y)^2 / t}
///   (iii) |d2k/dxdt|     <= C t^{-2}    e^{-a (x-y)^2 / t}
///   (iv)  ||dk/dt||_{L2(t dt)}      <= C / |x-y|
///   (v)   ||d2k/dydt||_{L2(t dt)}   <= C / |x-y|^2
///   (vi)  ||d2k/dxdt||_{L2(t dt)}   <= C / |x-y|^2
/// Items (i)-(iii) pick, per item, the largest Gaussian rate a on the
/// grid whose fit is stable across the t < 1 / t >= 1 regimes.
inline std::vector<ProbeReport> kernel_bound_report(const KernelBoundLattice& lat) {
  if (lat.t_values.empty() || lat.axis_values.empty())
    throw std::invalid_argument("kernel_bound_report: empty lattice");
  bool lo = false, hi = false;
  for (double t : lat.t_values) (t < 1.0 ? lo : hi) = true;
  if (!lo || !hi)
    throw std::invalid_argument(
        "kernel_bound_report: t_values must span both t < 1 and t >= 1");

  const auto deriv = [](int item, const MehlerParams& p, double x, double y) {
    const double xs[1] = {x}, ys[1] = {y};
    if (item == 0) return dt_mehler_kernel(p, xs, ys);
    if (item == 1) return dy_dt_mehler_kernel(p, xs, ys, 0);
    return dx_dt_mehler_kernel(p, xs, ys, 0);
  };
  const double power[3] = {1.5, 2.0, 2.0};  // t exponents for d = 1

  std::vector<ProbeReport> reports;
  for (int item = 0; item < 3; ++item) {
    ProbeReport best;
    double best_a = lat.a_grid.front();
    for (double a : lat.a_grid) {
      ProbeReport rep;
      rep.name = "heat-kernel-bound-" + std::to_string(item + 1);
      for (double t : lat.t_values) {
        const MehlerParams p = MehlerParams::create(t, 1);
        const std::string label = t < 1.0 ? "t<1" : "t>=1";
        for (double x : lat.axis_values)
          for (double y : lat.axis_values) {
            const double v = std::abs(deriv(item, p, x, y));
            const double lg = a * (x - y) * (x - y) / t;
            const double ratio =
                lg > 700.0 ? 0.0 : v * std::pow(t, power[item]) * std::exp(lg);
            rep.record(label, ratio, {t, x, y});
          }
      }
      rep.finalize();
      char note[48];
      std::snprintf(note, sizeof note, "a=%g", a);
      rep.notes = note;
      if (a == lat.a_grid.front() || rep.stable) {
        best = rep;
        best_a = a;
      }
    }
    (void)best_a;
    reports.push_back(best);
  }

  for (int item = 0; item < 3; ++item) {
    ProbeReport rep;
    rep.name = "heat-kernel-Rd-bound-" + std::to_string(item + 4);
    const double sep_power = item == 0 ? 1.0 : 2.0;  // d and d+1 for d = 1
    for (double sep : lat.separations) {
      char label[32];
      std::snprintf(label, sizeof label, "sep=%g", sep);
      for (double x : lat.axis_values) {
        const double y = x - sep;
        double norm_sq = 0.0;
        for (int j = 0; j < lat.time_grid.size(); ++j) {
          const MehlerParams p = MehlerParams::create(lat.time_grid.times[j], 1);
          const double v = deriv(item, p, x, y);
          norm_sq += lat.time_grid.weight(j, 1.0) * v * v;
        }
        rep.record(label, std::sqrt(norm_sq) * std::pow(sep, sep_power),
                   {sep, x, y});
      }
    }
    rep.finalize();
    reports.push_back(rep);
  }
  return reports;
}

}  // namespace hermite_nc
