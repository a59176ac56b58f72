#pragma once

#include <cmath>
#include <complex>

#include <Eigen/Dense>

#include "hermite_nc/fields.hpp"
#include "hermite_nc/rng.hpp"

namespace hermite_nc {

/// Random band-limited coefficients with a mild level decay so random
/// test fields are not dominated by the top level.
inline SpectralCoeffs random_band_limited_coeffs(int dim, int degree_cap,
                                                 int matrix_size, Rng& rng,
                                                 bool hermitian = true,
                                                 double level_decay = 0.1) {
  SpectralCoeffs c(dim, degree_cap, matrix_size);
  for (std::size_t i = 0; i < c.indices.size(); ++i) {
    const double scale = std::exp(-level_decay * c.indices[i].order());
    c.coeffs[i] = scale * (hermitian ? rng.hermitian_gaussian_matrix(matrix_size)
                                     : rng.complex_gaussian_matrix(matrix_size));
  }
  return c;
}

/// Gaussian bump exp(-s |x - x0|^2) times a fixed PSD matrix; pointwise
/// PSD test function that is not band-limited.
inline MatrixField gaussian_bump_field(const QuadratureGrid& grid, int matrix_size,
                                       const std::vector<double>& center,
                                       double sharpness,
                                       const Eigen::MatrixXcd& psd) {
  MatrixField f(grid, matrix_size);
  f.hermitian = true;
  f.positive = true;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto x = grid.point(i);
    double r2 = 0.0;
    for (int j = 0; j < grid.dim(); ++j) {
      const double d = x[j] - center[j];
      r2 += d * d;
    }
    f.samples[i] = std::exp(-sharpness * r2) * psd;
  }
  return f;
}

/// A deterministic PSD matrix with distinct eigenvalues, for bump tests.
inline Eigen::MatrixXcd reference_psd_matrix(int n) {
  Eigen::MatrixXcd a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      a(i, j) = std::complex<double>(1.0 / (1.0 + i + j), 0.1 * (i - j));
  Eigen::MatrixXcd g = a.adjoint() * a;
  g += Eigen::MatrixXcd::Identity(n, n) * 0.5;
  return g;
}

}  // namespace hermite_nc
