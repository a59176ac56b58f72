#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <numbers>

#include "hermite_nc/rng.hpp"
#include "hermite_nc/semigroup.hpp"
#include "hermite_nc/synthetic.hpp"
#include "hermite_nc/transform.hpp"

using namespace hermite_nc;
using std::complex;

namespace {

HermiteTransform make_transform(int dim, int cap) {
  return HermiteTransform(QuadratureGrid::gauss_hermite(dim, cap + 17), cap);
}

MatrixField random_band_limited_field(const HermiteTransform& T, int matrix_size,
                                      std::uint64_t seed) {
  Rng rng(seed);
  return T.synthesize(
      random_band_limited_coeffs(T.dim(), T.degree_cap(), matrix_size, rng, false));
}

double rel_l2_diff(const MatrixField& a, const MatrixField& b) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += (a.samples[i] - b.samples[i]).squaredNorm();
    den += b.samples[i].squaredNorm();
  }
  return std::sqrt(num / den);
}

/// 200-term spectral sum sum_n e^{-(2n+1)t} phi_n(x) phi_n(y), d = 1.
double spectral_kernel(double t, double x, double y) {
  const auto px = hermite_phi_values(x, 200);
  const auto py = hermite_phi_values(y, 200);
  double s = 0.0;
  for (int n = 200; n >= 0; --n)
    s += std::exp(-(2.0 * n + 1.0) * t) * px[n] * py[n];
  return s;
}

}  // namespace

TEST_CASE("time grid quadrature reproduces gamma integrals") {
  const TimeGrid tg = TimeGrid::log_spaced();
  // int_0^inf t^3 e^{-2t} dt = 3! / 2^4 = 0.375
  double s3 = 0.0, s1 = 0.0;
  for (int j = 0; j < tg.size(); ++j) {
    s3 += tg.weight(j, 3.0) * std::exp(-2.0 * tg.times[j]);
    s1 += tg.weight(j, 1.0) * std::exp(-2.0 * tg.times[j]);
  }
  CHECK(s3 == Catch::Approx(0.375).epsilon(1e-6));
  // int_0^inf t e^{-2t} dt = 1/4
  CHECK(s1 == Catch::Approx(0.25).epsilon(1e-6));
  CHECK(tg.head_truncation_bound(10.0) < 1e-5);
  CHECK_THROWS_AS(TimeGrid::log_spaced(0.0, 1.0, 64), std::invalid_argument);
  CHECK_THROWS_AS(TimeGrid::log_spaced(1e-3, 1.0, 4), std::invalid_argument);
}

TEST_CASE("heat kernel calibration constant is (2 pi)^{-d/2}") {
  for (int d : {1, 2, 3}) {
    const MehlerParams p = MehlerParams::create(0.7, d);
    CHECK(p.c_d ==
          Catch::Approx(std::pow(2.0 * std::numbers::pi, -d / 2.0)).epsilon(1e-10));
  }
  CHECK_THROWS_AS(MehlerParams::create(0.0, 1), std::invalid_argument);
}

TEST_CASE("heat kernel is symmetric and tensorizes") {
  const MehlerParams p1 = MehlerParams::create(0.3, 1);
  const MehlerParams p2 = MehlerParams::create(0.3, 2);
  const double pts[4] = {-1.2, 0.4, 0.9, 2.0};
  for (double a : pts)
    for (double b : pts) {
      const double xa[1] = {a}, xb[1] = {b};
      CHECK(mehler_kernel(p1, xa, xb) ==
            Catch::Approx(mehler_kernel(p1, xb, xa)).epsilon(1e-14));
    }
  const double x2[2] = {0.4, -1.2}, y2[2] = {0.9, 2.0};
  const double x0[1] = {0.4}, y0[1] = {0.9}, x1[1] = {-1.2}, y1[1] = {2.0};
  CHECK(mehler_kernel(p2, x2, y2) ==
        Catch::Approx(mehler_kernel(p1, x0, y0) * mehler_kernel(p1, x1, y1))
            .epsilon(1e-12));
}

TEST_CASE("heat kernel matches the spectral series") {
  Rng rng(31);
  for (double t : {0.1, 0.5, 1.0}) {
    const MehlerParams p = MehlerParams::create(t, 1);
    int checked = 0;
    while (checked < 50) {
      const double x = rng.uniform(-3.0, 3.0), y = rng.uniform(-3.0, 3.0);
      const double xs[1] = {x}, ys[1] = {y};
      const double k = mehler_kernel(p, xs, ys);
      if (k < 1e-10) continue;  // below the series roundoff floor
      ++checked;
      CHECK(k == Catch::Approx(spectral_kernel(t, x, y)).epsilon(1e-6));
    }
  }
}

TEST_CASE("kernel time derivative agrees with central differences") {
  // 2nd-order central differences: error drops 4x per halving
  const double x[1] = {0.7}, y[1] = {-0.4};
  const double t = 0.6;
  const double exact = dt_mehler_kernel(MehlerParams::create(t, 1), x, y);
  double prev_err = 0.0;
  for (int lev = 0; lev < 3; ++lev) {
    const double h = 1e-2 / (1 << lev);
    const double num = (mehler_kernel(MehlerParams::create(t + h, 1), x, y) -
                        mehler_kernel(MehlerParams::create(t - h, 1), x, y)) /
                       (2.0 * h);
    const double err = std::abs(num - exact);
    if (lev > 0) CHECK(prev_err / err == Catch::Approx(4.0).epsilon(0.05));
    prev_err = err;
  }
}

TEST_CASE("mixed space-time derivatives agree with finite differences") {
  const MehlerParams p = MehlerParams::create(0.4, 1);
  const double x[1] = {0.3};
  const double h = 1e-5;
  const double yc = -0.8;
  const double yp[1] = {yc + h}, ym[1] = {yc - h}, y0[1] = {yc};
  const double num_dy = (dt_mehler_kernel(p, x, yp) - dt_mehler_kernel(p, x, ym)) /
                        (2.0 * h);
  CHECK(dy_dt_mehler_kernel(p, x, y0, 0) == Catch::Approx(num_dy).epsilon(1e-7));
  const double xp[1] = {0.3 + h}, xm[1] = {0.3 - h};
  const double num_dx = (dt_mehler_kernel(p, xp, y0) - dt_mehler_kernel(p, xm, y0)) /
                        (2.0 * h);
  const double xc[1] = {0.3};
  CHECK(dx_dt_mehler_kernel(p, xc, y0, 0) == Catch::Approx(num_dx).epsilon(1e-7));
}

TEST_CASE("semigroup law and spectral-kernel agreement") {
  const HermiteTransform T = make_transform(1, 24);
  const MatrixField f = random_band_limited_field(T, 2, 8);
  // H^s H^t = H^{s+t}
  for (auto [s, t] : {std::pair{0.1, 0.3}, {0.5, 0.5}, {0.05, 1.0}}) {
    const MatrixField two = semigroup_apply(
        T, semigroup_apply(T, f, t, SemigroupMode::kSpectral), s,
        SemigroupMode::kSpectral);
    const MatrixField one =
        semigroup_apply(T, f, s + t, SemigroupMode::kSpectral);
    CHECK(rel_l2_diff(two, one) < 1e-8);
  }
  // kernel quadrature agrees with the spectral route once e^{-Nt}
  // suppresses the levels the grid cannot resolve; at t = 0.05 that
  // takes ~120 nodes (the rule must integrate phi_n up to n ~ 70)
  const HermiteTransform Td(QuadratureGrid::gauss_hermite(1, 120), 24);
  const MatrixField fd = random_band_limited_field(Td, 2, 8);
  for (double t : {0.05, 0.5, 1.0}) {
    const MatrixField ks = semigroup_apply(Td, fd, t, SemigroupMode::kKernel);
    const MatrixField sp = semigroup_apply(Td, fd, t, SemigroupMode::kSpectral);
    CHECK(rel_l2_diff(ks, sp) < 1e-6);
  }
  CHECK_THROWS_AS(semigroup_apply(T, f, -0.1, SemigroupMode::kSpectral),
                  std::invalid_argument);
}

TEST_CASE("semigroup contracts with the spectral gap rate") {
  const HermiteTransform T = make_transform(1, 16);
  const MatrixField f = random_band_limited_field(T, 2, 4);
  const double base = nc_lp_norm(f, 2.0);
  for (double t : {0.2, 1.0, 3.0}) {
    const double htn =
        nc_lp_norm(semigroup_apply(T, f, t, SemigroupMode::kSpectral), 2.0);
    CHECK(htn <= std::exp(-t) * base * (1.0 + 1e-12));  // gap N >= d = 1
  }
  // equality on the ground state
  MatrixField g0(T.grid(), 2);
  Rng rng(2);
  const Eigen::MatrixXcd c = rng.complex_gaussian_matrix(2);
  for (std::size_t i = 0; i < g0.size(); ++i)
    g0.samples[i] = eval_phi_1d(T.grid().point(i)[0], 0)[0] * c;
  CHECK(nc_lp_norm(semigroup_apply(T, g0, 0.7, SemigroupMode::kSpectral), 2.0) ==
        Catch::Approx(std::exp(-0.7) * nc_lp_norm(g0, 2.0)).epsilon(1e-12));
}

TEST_CASE("g-function closed form on a single mode") {
  // f = phi_3 C: |dH^t f/dt|^2 = N^2 e^{-2Nt} phi_3^2 C*C, and
  // int_0^inf t N^2 e^{-2Nt} dt = 1/4, so g(f) = |phi_3| (C*C)^{1/2} / 2
  const HermiteTransform T = make_transform(1, 8);
  const TimeGrid tg = TimeGrid::log_spaced();
  Rng rng(13);
  const Eigen::MatrixXcd c = rng.complex_gaussian_matrix(2);
  const Eigen::MatrixXcd root = psd_sqrt(c.adjoint() * c);
  MatrixField f(T.grid(), 2);
  for (std::size_t i = 0; i < f.size(); ++i)
    f.samples[i] = eval_phi_1d(T.grid().point(i)[0], 3)[3] * c;
  const MatrixField g = g_function(T, f, tg);
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double phi = std::abs(eval_phi_1d(T.grid().point(i)[0], 3)[3]);
    CHECK((g.samples[i] - 0.5 * phi * root).norm() < 1e-5 * root.norm());
  }
  // k = 2: int t^3 N^4 e^{-2Nt} dt = 6/16, so g_2 = sqrt(6)/4 |phi| root
  const MatrixField g2 = g_k_function(T, f, 2, tg);
  const double mid_phi = std::abs(eval_phi_1d(T.grid().point(8)[0], 3)[3]);
  CHECK((g2.samples[8] - std::sqrt(6.0) / 4.0 * mid_phi * root).norm() <
        1e-5 * root.norm());
}

TEST_CASE("g-function L2 identity") {
  // ||g(f)||_2 = ||f||_2 / 2 for every f
  const HermiteTransform T = make_transform(1, 16);
  const TimeGrid tg = TimeGrid::log_spaced();
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const MatrixField f = random_band_limited_field(T, 2, seed);
    CHECK(nc_lp_norm(g_function(T, f, tg), 2.0) ==
          Catch::Approx(0.5 * nc_lp_norm(f, 2.0)).epsilon(1e-3));
  }
}

TEST_CASE("g_star_k is finite, PSD and homogeneous") {
  const HermiteTransform T = make_transform(1, 10);
  const TimeGrid tg = TimeGrid::log_spaced(1e-4, 16.0, 64);
  const MatrixField f = random_band_limited_field(T, 2, 6);
  const MatrixField gs = g_star_k(T, f, 2, tg);
  for (std::size_t i = 0; i < gs.size(); ++i) {
    CHECK(gs.samples[i].allFinite());
    CHECK(min_eigenvalue(gs.samples[i]) > -1e-12);
  }
  MatrixField f3 = f;
  f3 *= complex<double>(3.0);
  const MatrixField gs3 = g_star_k(T, f3, 2, tg);
  CHECK(rel_l2_diff(gs3, [&] {
          MatrixField m = gs;
          m *= complex<double>(3.0);
          return m;
        }()) < 1e-10);
  CHECK_THROWS_AS(g_star_k(T, f, 0, tg), std::invalid_argument);
}

TEST_CASE("hardy norm sides coincide for hermitian fields") {
  const HermiteTransform T = make_transform(1, 12);
  const TimeGrid tg = TimeGrid::log_spaced(1e-4, 16.0, 128);
  Rng rng(19);
  const MatrixField f =
      T.synthesize(random_band_limited_coeffs(1, 12, 2, rng, true));
  for (double p : {1.5, 2.0, 4.0}) {
    const double row = ep_norm(T, f, p, NormSide::kRow, tg);
    const double col = ep_norm(T, f, p, NormSide::kColumn, tg);
    CHECK(row == Catch::Approx(col).epsilon(1e-10));
    CHECK(ep_combined_norm(T, f, p, tg) == Catch::Approx(row).epsilon(1e-10));
  }
}

TEST_CASE("gaussian kernel bound probes are stable") {
  KernelBoundLattice lat;
  lat.t_values = {0.25, 0.5, 2.0, 4.0};
  for (double v = -2.0; v <= 2.0; v += 0.4) lat.axis_values.push_back(v);
  lat.time_grid = TimeGrid::log_spaced(1e-4, 16.0, 128);
  const auto reports = kernel_bound_report(lat);
  REQUIRE(reports.size() == 6);
  for (const auto& rep : reports) {
    CHECK(std::isfinite(rep.fitted_constant));
    CHECK(rep.fitted_constant > 0.0);
    CHECK(rep.stability_factor < 4.0);
  }

  KernelBoundLattice bad = lat;
  bad.t_values = {0.1, 0.5};  // no t >= 1 regime
  CHECK_THROWS_AS(kernel_bound_report(bad), std::invalid_argument);
}
