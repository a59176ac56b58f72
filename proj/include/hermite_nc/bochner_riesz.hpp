#pragma once

#include <cmath>
#include <complex>
#include <cstdio>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hermite_nc/fields.hpp"
#include "hermite_nc/hermite.hpp"
#include "hermite_nc/nc_norms.hpp"
#include "hermite_nc/probe.hpp"
#include "hermite_nc/quadrature.hpp"
#include "hermite_nc/transform.hpp"

namespace hermite_nc {

/// Summability radius R and (possibly complex) order alpha for the
/// Riesz means sum_n (1 - (2n+d)/R)_+^alpha P_n.
struct RieszParams {
  double R = 1.0;
  std::complex<double> alpha = 1.0;
  int dim = 1;

  void validate() const {
    if (R <= 0.0) throw std::invalid_argument("RieszParams: R must be > 0");
    if (alpha.real() <= 0.0)
      throw std::invalid_argument("RieszParams: Re alpha must be > 0");
    if (dim < 1) throw std::invalid_argument("RieszParams: dim must be >= 1");
  }
};

namespace detail {

/// Principal-branch power of a clamped-positive base; zero base gives
/// zero for Re a > 0.
inline std::complex<double> pow_plus(double base, std::complex<double> a) {
  if (base <= 0.0) return 0.0;
  return std::exp(a * std::log(base));
}

/// Lanczos log-Gamma for complex argument (g = 7, 9 terms).
inline std::complex<double> log_gamma(std::complex<double> z) {
  static const double c[9] = {0.99999999999980993,     676.5203681218851,
                              -1259.1392167224028,     771.32342877765313,
                              -176.61502916214059,     12.507343278686905,
                              -0.13857109526572012,    9.9843695780195716e-6,
                              1.5056327351493116e-7};
  const double pi = std::numbers::pi;
  if (z.real() < 0.5)
    return std::log(pi) - std::log(std::sin(pi * z)) - log_gamma(1.0 - z);
  z -= 1.0;
  std::complex<double> x = c[0];
  for (int i = 1; i < 9; ++i) x += c[i] / (z + static_cast<double>(i));
  const std::complex<double> t = z + 7.5;
  return 0.5 * std::log(2.0 * pi) + (z + 0.5) * std::log(t) - t + std::log(x);
}

}  // namespace detail

/// Per-level factors (1 - (2n+d)/R)_+^alpha for n = 0..degree_cap.
inline std::vector<std::complex<double>> riesz_factors(const RieszParams& p,
                                                       int degree_cap) {
  p.validate();
  std::vector<std::complex<double>> f(degree_cap + 1);
  for (int n = 0; n <= degree_cap; ++n)
    f[n] = detail::pow_plus(1.0 - (2.0 * n + p.dim) / p.R, p.alpha);
  return f;
}

inline SpectralCoeffs riesz_apply(const HermiteTransform& T,
                                  const SpectralCoeffs& c, const RieszParams& p) {
  if (p.dim != T.dim())
    throw std::invalid_argument("riesz_apply: dimension mismatch");
  return T.scale_levels(c, riesz_factors(p, T.degree_cap()));
}

inline MatrixField riesz_apply(const HermiteTransform& T, const MatrixField& f,
                               const RieszParams& p) {
  return T.synthesize(riesz_apply(T, T.analyze(f), p));
}

/// Highest level with a nonvanishing factor: 2n + d < R.
inline int riesz_level_cap(const RieszParams& p) {
  const double top = (p.R - p.dim) / 2.0;
  if (top <= 0.0) return -1;
  int n = static_cast<int>(std::floor(top));
  if (2.0 * n + p.dim >= p.R) --n;  // exact boundary carries factor 0
  return n;
}

/// Level profile of the two-point kernel: Phi_n(x, y) for n = 0..n_max,
/// computed as the d-fold convolution of the per-axis arrays
/// phi_k(x_j) phi_k(y_j).
inline std::vector<double> kernel_level_profile(std::span<const double> x,
                                                std::span<const double> y,
                                                int n_max) {
  if (x.size() != y.size() || x.empty())
    throw std::invalid_argument("kernel_level_profile: point shape mismatch");
  if (n_max < 0) return {};
  const int d = static_cast<int>(x.size());
  std::vector<double> prof(n_max + 1, 0.0), axis(n_max + 1), next(n_max + 1);
  for (int j = 0; j < d; ++j) {
    const std::vector<double> px = eval_phi_1d(x[j], n_max);
    const std::vector<double> py = eval_phi_1d(y[j], n_max);
    for (int k = 0; k <= n_max; ++k) axis[k] = px[k] * py[k];
    if (j == 0) {
      prof = axis;
      continue;
    }
    for (int n = 0; n <= n_max; ++n) {
      double s = 0.0;
      for (int k = 0; k <= n; ++k) s += prof[n - k] * axis[k];
      next[n] = s;
    }
    std::swap(prof, next);
  }
  return prof;
}

/// S_R^alpha(x, y) = sum_n (1 - (2n+d)/R)_+^alpha Phi_n(x, y).
inline std::complex<double> riesz_kernel(std::span<const double> x,
                                         std::span<const double> y,
                                         const RieszParams& p) {
  p.validate();
  if (static_cast<int>(x.size()) != p.dim)
    throw std::invalid_argument("riesz_kernel: point dimension mismatch");
  const int n_max = riesz_level_cap(p);
  if (n_max < 0) return 0.0;
  const std::vector<double> prof = kernel_level_profile(x, y, n_max);
  std::complex<double> s = 0.0;
  for (int n = 0; n <= n_max; ++n)
    s += detail::pow_plus(1.0 - (2.0 * n + p.dim) / p.R, p.alpha) * prof[n];
  return s;
}

/// Relative L2 defect of the order-lifting identity
///   S_R^{a+b} f = [Gamma(a+b+1) / (Gamma(a+1) Gamma(b))]
///                 int_0^1 (1-t)^{b-1} t^a S_{Rt}^a f dt,
/// evaluated per level by Gauss-Legendre after the substitution
/// u = (1-t)^{Re b} that removes the endpoint singularity.
inline double order_lift_residual(const HermiteTransform& T, const MatrixField& f,
                                  double R, std::complex<double> alpha,
                                  std::complex<double> beta, int quad_count) {
  if (quad_count < 8)
    throw std::invalid_argument("order_lift_residual: need >= 8 quadrature points");
  if (alpha.real() <= 0.0 || beta.real() <= 0.0)
    throw std::invalid_argument("order_lift_residual: Re alpha, Re beta must be > 0");
  const int d = T.dim();
  const SpectralCoeffs c = T.analyze(f);
  const double mass = c.l2_norm_sq();
  if (mass <= 0.0) return 0.0;

  const std::complex<double> lgc = detail::log_gamma(alpha + beta + 1.0) -
                                   detail::log_gamma(alpha + 1.0) -
                                   detail::log_gamma(beta);
  const std::complex<double> cab = std::exp(lgc);
  const double br = beta.real();
  const GaussRule gl = gauss_legendre_rule(quad_count, 0.0, 1.0);

  double num = 0.0;
  for (std::size_t i = 0; i < c.size(); ++i) {
    const double big_n = 2.0 * c.indices[i].order() + d;
    // integrand vanishes for t <= N/R; integrate over the support only,
    // so the kink at the support edge never meets the quadrature
    const double t_lo = std::min(big_n / R, 1.0);
    const double u_max = std::pow(1.0 - t_lo, br);
    std::complex<double> integral = 0.0;
    for (int q = 0; q < quad_count; ++q) {
      const double u = u_max * gl.nodes[q];
      const double t = 1.0 - std::pow(u, 1.0 / br);
      if (t <= 0.0 || u <= 0.0) continue;
      // (1-t)^{b-1} dt = (1/Re b) u^{(b - Re b)/Re b} du
      const std::complex<double> jac =
          std::exp((beta - br) / br * std::log(u)) / br;
      integral += u_max * gl.weights[q] * jac * detail::pow_plus(t, alpha) *
                  detail::pow_plus(1.0 - big_n / (R * t), alpha);
    }
    const std::complex<double> lifted = cab * integral;
    const std::complex<double> target =
        detail::pow_plus(1.0 - big_n / R, alpha + beta);
    num += c.coeffs[i].squaredNorm() * std::norm(lifted - target);
  }
  return std::sqrt(num / mass);
}

/// G(t) = sum_{|k| <= k_range} (2^k t)^{d/2} (1 + 2^k t)^{-alpha-1/2};
/// invariant under t -> 2t up to range truncation.
inline double scale_function_G(double t, double alpha, int d, int k_range) {
  if (alpha <= (d - 1) / 2.0)
    throw std::invalid_argument("scale_function_G: requires alpha > (d-1)/2");
  if (k_range < 0)
    throw std::invalid_argument("scale_function_G: k_range must be >= 0");
  if (t <= 0.0) return 0.0;
  double s = 0.0;
  for (int k = -k_range; k <= k_range; ++k) {
    const double u = std::ldexp(t, k);
    s += std::pow(u, d / 2.0) * std::pow(1.0 + u, -alpha - 0.5);
  }
  return s;
}

enum class DecayMode { kD1, kHd };

/// Sample lattice for kernel-decay probes. d1 mode sweeps (x, y) over
/// axis_values^2; hd mode sweeps base points x_points and annulus radii
/// r_values with an L^p integral in y (Gauss-Hermite; 0 points per axis
/// means auto-size to the level cap).
struct DecayLattice {
  std::vector<double> R_values;
  std::vector<double> axis_values;
  std::vector<std::vector<double>> x_points;
  std::vector<double> r_values;
  double p = 2.0;
  int quad_points_per_axis = 0;
};

namespace detail {

inline std::string slice_label(double R) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "R=%g", R);
  return buf;
}

}  // namespace detail

/// Fits the constant in the pointwise (d1) or annulus-L^p (hd) kernel
/// decay envelope over the lattice; stability is judged across R-slices.
inline ProbeReport kernel_decay_report(const RieszParams& base,
                                       const DecayLattice& lat, DecayMode mode) {
  base.validate();
  const double a = base.alpha.real();
  ProbeReport rep;
  if (mode == DecayMode::kD1) {
    if (base.dim != 1 || a <= 1.0 / 6.0)
      throw std::invalid_argument(
          "kernel_decay_report: d1 mode requires d = 1 and alpha > 1/6");
    rep.name = "riesz-kernel-decay-d1";
    if (lat.R_values.empty() || lat.axis_values.empty())
      throw std::invalid_argument("kernel_decay_report: empty lattice");
    for (double R : lat.R_values) {
      RieszParams p = base;
      p.R = R;
      const std::string label = detail::slice_label(R);
      const double sR = std::sqrt(R);
      const int n_max = riesz_level_cap(p);
      for (double x : lat.axis_values)
        for (double y : lat.axis_values) {
          std::complex<double> s = 0.0;
          if (n_max >= 0) {
            const double xs[1] = {x}, ys[1] = {y};
            s = riesz_kernel(xs, ys, p);
          }
          const double env =
              sR * (std::pow(1.0 + sR * std::abs(x - y), -a - 5.0 / 6.0) +
                    std::pow(1.0 + sR * std::abs(x + y), -a - 5.0 / 6.0));
          rep.record(label, std::abs(s) / env, {R, x, y});
        }
    }
  } else {
    if (base.dim < 2)
      throw std::invalid_argument("kernel_decay_report: hd mode requires d >= 2");
    if (lat.p < 1.0 || lat.p > 2.0)
      throw std::invalid_argument("kernel_decay_report: hd mode requires 1 <= p <= 2");
    if (a <= (base.dim - 1) / 2.0)
      throw std::invalid_argument(
          "kernel_decay_report: hd mode requires alpha > (d-1)/2");
    rep.name = "riesz-kernel-decay-hd";
    if (lat.R_values.empty() || lat.x_points.empty() || lat.r_values.empty())
      throw std::invalid_argument("kernel_decay_report: empty lattice");
    const int d = base.dim;
    const double inv_q = 1.0 - 1.0 / lat.p;  // 1/q, conjugate exponent
    const double env_exp = -a - 0.5 + d * (1.0 / lat.p - 0.5);
    for (double R : lat.R_values) {
      RieszParams p = base;
      p.R = R;
      const std::string label = detail::slice_label(R);
      const int n_max = riesz_level_cap(p);
      const int m = lat.quad_points_per_axis > 0 ? lat.quad_points_per_axis
                                                 : std::max(n_max + 8, 16);
      const QuadratureGrid ygrid = QuadratureGrid::gauss_hermite(d, m);
      for (const auto& x : lat.x_points) {
        if (static_cast<int>(x.size()) != d)
          throw std::invalid_argument("kernel_decay_report: x point dimension");
        // |S(x, y)|^p at every y node, reused across radii
        std::vector<double> absp(ygrid.size(), 0.0);
        std::vector<double> dist(ygrid.size(), 0.0);
        std::vector<double> y(d);
        for (std::size_t i = 0; i < ygrid.size(); ++i) {
          const auto yi = ygrid.point(i);
          double r2 = 0.0;
          for (int j = 0; j < d; ++j) {
            y[j] = yi[j];
            r2 += (x[j] - y[j]) * (x[j] - y[j]);
          }
          dist[i] = std::sqrt(r2);
          if (n_max >= 0)
            absp[i] = std::pow(std::abs(riesz_kernel(x, y, p)), lat.p);
        }
        for (double r : lat.r_values) {
          double acc = 0.0;
          for (std::size_t i = 0; i < ygrid.size(); ++i)
            if (dist[i] >= r) acc += ygrid.weight(i) * absp[i];
          const double integral = std::pow(acc, 1.0 / lat.p);
          const double env = std::pow(R, d * inv_q / 2.0) *
                             std::pow(1.0 + std::sqrt(R) * r, env_exp);
          std::vector<double> coords = {R};
          coords.insert(coords.end(), x.begin(), x.end());
          coords.push_back(r);
          rep.record(label, integral / env, coords);
        }
      }
    }
  }
  rep.finalize();
  return rep;
}

/// Configuration for the two-sided majorant probes.
struct SandwichConfig {
  std::vector<double> R_values;
  std::vector<int> dyadic_k = {-3, -2, -1, 0, 1, 2, 3};  // hd ball scales 2^k
  int G_k_range = 40;                                    // hd scale-function range
};

namespace detail {

inline void require_psd_field(const MatrixField& f, const char* who) {
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double lo = min_eigenvalue(f.samples[i]);
    if (lo < -1e-10 * (1.0 + f.samples[i].norm()))
      throw std::invalid_argument(std::string(who) + ": f is not pointwise PSD");
  }
}

inline double unit_ball_volume(int d) {
  return std::pow(std::numbers::pi, d / 2.0) / std::tgamma(d / 2.0 + 1.0);
}

}  // namespace detail

/// Ball average A_r(g)(x_i) = |B_r|^{-1} int_{|y - x_i| <= r} g(y) dy by
/// node membership on g's own grid.
inline MatrixField ball_average(const MatrixField& g, double r) {
  if (r <= 0.0) throw std::invalid_argument("ball_average: radius must be > 0");
  const int d = g.grid.dim();
  const double vol = detail::unit_ball_volume(d) * std::pow(r, d);
  MatrixField out(g.grid, g.matrix_size);
  out.hermitian = g.hermitian;
  out.positive = g.positive;
  const std::size_t np = g.size();
  std::vector<std::vector<double>> pts(np);
  for (std::size_t i = 0; i < np; ++i) {
    const auto p = g.grid.point(i);
    pts[i].assign(p.begin(), p.end());
  }
  for (std::size_t i = 0; i < np; ++i) {
    for (std::size_t j = 0; j < np; ++j) {
      double r2 = 0.0;
      for (int k = 0; k < d; ++k)
        r2 += (pts[i][k] - pts[j][k]) * (pts[i][k] - pts[j][k]);
      if (r2 <= r * r) out.samples[i] += g.grid.weight(j) * g.samples[j];
    }
    out.samples[i] /= vol;
  }
  return out;
}

/// Dyadic-scale dominant F = sum_k A_{2^k}(f^2); PSD by construction and
/// termwise above every configured ball average.
inline MatrixField dyadic_dominant(const MatrixField& f,
                                   const std::vector<int>& dyadic_k) {
  MatrixField sq(f.grid, f.matrix_size);
  sq.hermitian = true;
  sq.positive = true;
  for (std::size_t i = 0; i < f.size(); ++i)
    sq.samples[i] = f.samples[i].adjoint() * f.samples[i];
  MatrixField out(f.grid, f.matrix_size);
  out.hermitian = true;
  out.positive = true;
  for (int k : dyadic_k) out += ball_average(sq, std::ldexp(1.0, k));
  out.hermitian = out.positive = true;
  return out;
}

/// Two-sided majorant probe. d1: convolves the scalar envelope
/// E_R(u) = R^{1/2}(1 + R^{1/2}|u|)^{-alpha-5/6} with f and its
/// reflection and fits the smallest C with
/// -C(E_R*f + E_R*f~) <= S_R^alpha f <= C(E_R*f + E_R*f~) pointwise in
/// the PSD order. hd: fits -C F^{1/2} <= S_R^alpha f <= C F^{1/2}
/// against the dyadic dominant, and logs G(R^{1/2}).
inline ProbeReport sandwich_check(const HermiteTransform& T, const MatrixField& f,
                                  double alpha, const SandwichConfig& cfg,
                                  DecayMode mode) {
  detail::require_psd_field(f, "sandwich_check");
  if (cfg.R_values.empty())
    throw std::invalid_argument("sandwich_check: empty R sweep");
  const int d = T.dim();
  ProbeReport rep;
  const std::size_t np = f.size();

  MatrixField dominant;  // hd only; R-independent
  if (mode == DecayMode::kHd) {
    if (d < 2 || alpha <= (d - 1) / 2.0)
      throw std::invalid_argument(
          "sandwich_check: hd mode requires d >= 2 and alpha > (d-1)/2");
    rep.name = "riesz-sandwich-hd";
    dominant = dyadic_dominant(f, cfg.dyadic_k);
  } else {
    if (d != 1 || alpha <= 1.0 / 6.0)
      throw std::invalid_argument(
          "sandwich_check: d1 mode requires d = 1 and alpha > 1/6");
    rep.name = "riesz-sandwich-d1";
  }

  const SpectralCoeffs coeffs = T.analyze(f);
  for (double R : cfg.R_values) {
    RieszParams p{R, alpha, d};
    MatrixField sf = T.synthesize(riesz_apply(T, coeffs, p));
    for (auto& s : sf.samples) s = 0.5 * (s + Eigen::MatrixXcd(s.adjoint()));
    const std::string label = detail::slice_label(R);
    if (mode == DecayMode::kD1) {
      const double sR = std::sqrt(R);
      for (std::size_t i = 0; i < np; ++i) {
        const double xi = f.grid.point(i)[0];
        Eigen::MatrixXcd dom =
            Eigen::MatrixXcd::Zero(f.matrix_size, f.matrix_size);
        for (std::size_t j = 0; j < np; ++j) {
          const double yj = f.grid.point(j)[0];
          const double e_minus =
              sR * std::pow(1.0 + sR * std::abs(xi - yj), -alpha - 5.0 / 6.0);
          const double e_plus =
              sR * std::pow(1.0 + sR * std::abs(xi + yj), -alpha - 5.0 / 6.0);
          dom += f.grid.weight(j) * (e_minus + e_plus) * f.samples[j];
        }
        dom = 0.5 * (dom + Eigen::MatrixXcd(dom.adjoint()));
        rep.record(label, sandwich_constant(sf.samples[i], dom), {R, xi});
      }
    } else {
      for (std::size_t i = 0; i < np; ++i) {
        const Eigen::MatrixXcd root = psd_sqrt(dominant.samples[i]);
        const auto x = f.grid.point(i);
        std::vector<double> coords = {R};
        coords.insert(coords.end(), x.begin(), x.end());
        rep.record(label, sandwich_constant(sf.samples[i], root), coords);
      }
      char note[64];
      std::snprintf(note, sizeof note, "G(sqrt(R))=%.6g at R=%g; ",
                    scale_function_G(std::sqrt(R), alpha, d, cfg.G_k_range), R);
      rep.notes += note;
    }
  }
  rep.finalize();
  return rep;
}

}  // namespace hermite_nc
