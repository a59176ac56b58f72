#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <numbers>

#include "hermite_nc/bochner_riesz.hpp"
#include "hermite_nc/rng.hpp"
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

}  // namespace

TEST_CASE("analysis-synthesis round trip and Parseval") {
  for (int dim : {1, 2}) {
    const HermiteTransform T = make_transform(dim, 32);
    const MatrixField f = random_band_limited_field(T, 2, 5 + dim);
    const SpectralCoeffs c = T.analyze(f);
    const MatrixField back = T.synthesize(c);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
      num += (back.samples[i] - f.samples[i]).squaredNorm();
      den += f.samples[i].squaredNorm();
    }
    CHECK(std::sqrt(num / den) < 1e-8);
    // Parseval: grid L2 mass equals coefficient mass
    double grid_mass = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i)
      grid_mass += f.grid.weight(i) * f.samples[i].squaredNorm();
    CHECK(c.l2_norm_sq() == Catch::Approx(grid_mass).epsilon(1e-8));
  }
}

TEST_CASE("level projections are orthogonal idempotents") {
  const HermiteTransform T = make_transform(1, 20);
  const MatrixField f = random_band_limited_field(T, 2, 3);
  const MatrixField p5 = T.project(f, 5);
  const MatrixField p5p5 = T.project(p5, 5);
  const MatrixField p5p7 = T.project(p5, 7);
  double n55 = 0.0, n57 = 0.0, ref = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    n55 += (p5p5.samples[i] - p5.samples[i]).squaredNorm();
    n57 += p5p7.samples[i].squaredNorm();
    ref += p5.samples[i].squaredNorm();
  }
  CHECK(std::sqrt(n55 / ref) < 1e-10);
  CHECK(std::sqrt(n57 / ref) < 1e-10);
  // levels resolve the identity up to the cap
  MatrixField sum(f.grid, f.matrix_size);
  for (int n = 0; n <= 20; ++n) sum += T.project(f, n);
  double rec = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i)
    rec += (sum.samples[i] - f.samples[i]).squaredNorm();
  CHECK(std::sqrt(rec / ref) < 1e-9);
}

TEST_CASE("riesz factor support and level cap") {
  const RieszParams p{10.0, 1.0, 1};
  CHECK(riesz_level_cap(p) == 4);  // 2n+1 < 10
  const auto fac = riesz_factors(p, 12);
  for (int n = 0; n <= 12; ++n) {
    const double expect = std::max(0.0, 1.0 - (2.0 * n + 1.0) / 10.0);
    CHECK(std::abs(fac[n] - complex<double>(expect)) < 1e-15);
  }
  // R at the bottom eigenvalue yields the zero operator
  CHECK(riesz_level_cap(RieszParams{1.0, 1.0, 1}) == -1);
  CHECK(riesz_level_cap(RieszParams{0.5, 1.0, 2}) == -1);
  // exact boundary 2n+d = R carries factor zero
  CHECK(riesz_level_cap(RieszParams{9.0, 1.0, 1}) == 3);
  CHECK_THROWS_AS(riesz_factors(RieszParams{-1.0, 1.0, 1}, 4),
                  std::invalid_argument);
  CHECK_THROWS_AS(riesz_factors(RieszParams{4.0, complex<double>(-0.5, 1.0), 1}, 4),
                  std::invalid_argument);
}

TEST_CASE("riesz means are self-adjoint for real order") {
  const HermiteTransform T = make_transform(1, 16);
  const MatrixField f = random_band_limited_field(T, 2, 11);
  const MatrixField g = random_band_limited_field(T, 2, 12);
  const RieszParams p{12.0, 1.5, 1};
  const MatrixField sf = riesz_apply(T, f, p);
  const MatrixField sg = riesz_apply(T, g, p);
  const complex<double> lhs = hs_inner(sf, g);
  const complex<double> rhs = hs_inner(f, sg);
  CHECK(std::abs(lhs - rhs) < 1e-10 * std::abs(lhs));
}

TEST_CASE("two-point kernel closed form") {
  // d = 1, R = 4, alpha = 1: levels 0 and 1 contribute
  //   (1 - 1/4) phi_0(0)^2 + (1 - 3/4) phi_1(0)^2 = 0.75 / sqrt(pi)
  const double x[1] = {0.0}, y[1] = {0.0};
  const RieszParams p{4.0, 1.0, 1};
  const complex<double> k = riesz_kernel(x, y, p);
  CHECK(k.real() == Catch::Approx(0.75 / std::sqrt(std::numbers::pi)).epsilon(1e-14));
  CHECK(k.imag() == 0.0);
  CHECK(std::abs(riesz_kernel(x, y, RieszParams{1.0, 1.0, 1})) == 0.0);
}

TEST_CASE("kernel matches the operator applied to a delta-like profile") {
  // sum_nu Phi_nu(x) Phi_nu(y) grouped by level equals kernel_level_profile
  const int cap = 12;
  const double x[2] = {0.4, -0.9}, y[2] = {-0.2, 0.6};
  const auto prof = kernel_level_profile(x, y, cap);
  std::vector<double> direct(cap + 1, 0.0);
  for (const auto& nu : enumerate_multi_indices(2, cap))
    direct[nu.order()] += eval_phi_multi(nu, x) * eval_phi_multi(nu, y);
  for (int n = 0; n <= cap; ++n)
    CHECK(prof[n] == Catch::Approx(direct[n]).margin(1e-14));
}

TEST_CASE("order lift identity") {
  const HermiteTransform T = make_transform(1, 24);
  const MatrixField f = random_band_limited_field(T, 2, 7);
  CHECK(order_lift_residual(T, f, 30.0, 1.0, 1.0, 96) < 1e-6);
  CHECK(order_lift_residual(T, f, 30.0, 0.5, 2.0, 96) < 1e-6);
  CHECK(order_lift_residual(T, f, 30.0, complex<double>(1.0, 0.7), 1.5, 128) < 1e-6);
  CHECK_THROWS_AS(order_lift_residual(T, f, 30.0, 1.0, 1.0, 4),
                  std::invalid_argument);
}

TEST_CASE("scale function G") {
  // finite on the dyadic range; t -> 2t shifts the index so only the two
  // range-edge terms change. For d = 1 the lower edge decays like
  // (2^{-40} t)^{1/2} ~ 1e-6, so d = 1 invariance is truncation-limited.
  for (double alpha : {0.6, 1.0, 2.0}) {
    for (int e = -3; e <= 3; ++e) {
      const double t = std::ldexp(1.0, e);
      const double g1 = scale_function_G(t, alpha, 1, 40);
      CHECK(std::isfinite(g1));
      CHECK(g1 > 0.0);
      CHECK(std::abs(scale_function_G(2.0 * t, alpha, 1, 40) - g1) < 1e-5);
    }
  }
  // d = 2, alpha = 2: both edge terms sit below 1e-12, invariance is sharp
  for (int e = -3; e <= 2; ++e) {
    const double t = std::ldexp(1.0, e);
    CHECK(std::abs(scale_function_G(2.0 * t, 2.0, 2, 40) -
                   scale_function_G(t, 2.0, 2, 40)) < 1e-8);
  }
  // d = 2 needs alpha well above (d-1)/2 for the range truncation to
  // fall below the tolerance
  const double g2 = scale_function_G(1.3, 2.0, 2, 40);
  CHECK(std::abs(scale_function_G(2.6, 2.0, 2, 40) - g2) < 1e-8);
  CHECK(scale_function_G(0.0, 1.0, 1, 40) == 0.0);
  CHECK_THROWS_AS(scale_function_G(1.0, 0.5, 2, 40), std::invalid_argument);
}

TEST_CASE("riesz means converge along an R sweep") {
  const HermiteTransform T = make_transform(1, 24);
  const MatrixField f = random_band_limited_field(T, 2, 9);
  double prev = std::numeric_limits<double>::infinity();
  for (double R : {64.0, 256.0, 1024.0}) {
    MatrixField err = riesz_apply(T, f, RieszParams{R, 1.0, 1});
    err -= f;
    const double e = nc_lp_norm(err, 2.0);
    CHECK(e < prev);
    prev = e;
  }
  CHECK(prev < 0.1 * nc_lp_norm(f, 2.0));
}

TEST_CASE("kernel decay report is stable across R") {
  DecayLattice lat;
  lat.R_values = {64.0, 256.0};
  for (double v = -2.0; v <= 2.0; v += 0.5) lat.axis_values.push_back(v);
  const ProbeReport rep =
      kernel_decay_report(RieszParams{1.0, 0.5, 1}, lat, DecayMode::kD1);
  CHECK(rep.pass);
  CHECK(rep.stability_factor < 4.0);
  CHECK(std::isfinite(rep.fitted_constant));
  CHECK(rep.slices.size() == 2);

  CHECK_THROWS_AS(
      kernel_decay_report(RieszParams{1.0, 0.1, 1}, lat, DecayMode::kD1),
      std::invalid_argument);
}

TEST_CASE("ball average of a constant field is the constant") {
  const QuadratureGrid box = QuadratureGrid::uniform_box({0.0, 0.0}, 2.0, 24);
  MatrixField f(box, 2);
  const Eigen::MatrixXcd c = reference_psd_matrix(2);
  for (auto& s : f.samples) s = c;
  const MatrixField avg = ball_average(f, 0.5);
  // interior points: the discrete ball mass equals the true ball volume
  // up to the cell size, so the average returns the constant
  for (std::size_t i = 0; i < f.size(); ++i) {
    const auto x = box.point(i);
    if (std::abs(x[0]) > 1.0 || std::abs(x[1]) > 1.0) continue;
    CHECK((avg.samples[i] - c).norm() < 0.05 * c.norm());
  }
  CHECK_THROWS_AS(ball_average(f, 0.0), std::invalid_argument);
}

TEST_CASE("dyadic dominant majorizes each ball average of f^2") {
  const HermiteTransform T = make_transform(2, 8);
  MatrixField f = random_band_limited_field(T, 2, 15);
  const std::vector<int> ks = {-1, 0, 1};
  const MatrixField dom = dyadic_dominant(f, ks);
  MatrixField sq(f.grid, f.matrix_size);
  for (std::size_t i = 0; i < f.size(); ++i)
    sq.samples[i] = f.samples[i].adjoint() * f.samples[i];
  for (int k : ks) {
    const MatrixField avg = ball_average(sq, std::ldexp(1.0, k));
    for (std::size_t i = 0; i < f.size(); i += 7)
      CHECK(psd_leq(avg.samples[i], dom.samples[i], 1e-10));
  }
}

TEST_CASE("sandwich probe yields pointwise PSD envelopes") {
  const HermiteTransform T = make_transform(1, 16);
  const MatrixField f = gaussian_bump_field(T.grid(), 2, {0.3}, 0.7,
                                            reference_psd_matrix(2));
  SandwichConfig cfg;
  cfg.R_values = {16.0, 64.0};
  const ProbeReport rep = sandwich_check(T, f, 1.0, cfg, DecayMode::kD1);
  CHECK(std::isfinite(rep.fitted_constant));
  CHECK(rep.fitted_constant > 0.0);
  CHECK(rep.slices.size() == 2);

  // rejects non-PSD data
  MatrixField bad = f;
  bad.samples[bad.size() / 2] = -bad.samples[bad.size() / 2];
  CHECK_THROWS_AS(sandwich_check(T, bad, 1.0, cfg, DecayMode::kD1),
                  std::invalid_argument);
}
