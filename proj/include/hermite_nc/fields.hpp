#pragma once

#include <complex>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "hermite_nc/hermite.hpp"
#include "hermite_nc/quadrature.hpp"

namespace hermite_nc {

/// Matrix-valued function sampled on a quadrature grid.
struct MatrixField {
  QuadratureGrid grid;
  int matrix_size = 1;
  std::vector<Eigen::MatrixXcd> samples;
  bool hermitian = false;
  bool positive = false;

  MatrixField() = default;
  MatrixField(QuadratureGrid g, int n)
      : grid(std::move(g)),
        matrix_size(n),
        samples(grid.size(), Eigen::MatrixXcd::Zero(n, n)) {
    if (n < 1) throw std::invalid_argument("MatrixField: matrix_size must be >= 1");
  }

  std::size_t size() const { return samples.size(); }

  void check_conforms(const MatrixField& o) const {
    if (matrix_size != o.matrix_size || !grid.same_layout(o.grid))
      throw std::invalid_argument("MatrixField: shape mismatch");
  }

  MatrixField& operator+=(const MatrixField& o) {
    check_conforms(o);
    for (std::size_t i = 0; i < samples.size(); ++i) samples[i] += o.samples[i];
    hermitian = hermitian && o.hermitian;
    positive = false;
    return *this;
  }
  MatrixField& operator-=(const MatrixField& o) {
    check_conforms(o);
    for (std::size_t i = 0; i < samples.size(); ++i) samples[i] -= o.samples[i];
    hermitian = hermitian && o.hermitian;
    positive = false;
    return *this;
  }
  MatrixField& operator*=(std::complex<double> c) {
    for (auto& s : samples) s *= c;
    if (c.imag() != 0.0) hermitian = positive = false;
    return *this;
  }

  friend MatrixField operator+(MatrixField a, const MatrixField& b) { return a += b; }
  friend MatrixField operator-(MatrixField a, const MatrixField& b) { return a -= b; }
  friend MatrixField operator*(std::complex<double> c, MatrixField a) { return a *= c; }
};

/// Fourier-Hermite coefficients f^(nu), one matrix per multi-index,
/// ordered as enumerate_multi_indices(dim, degree_cap).
struct SpectralCoeffs {
  int dim = 1;
  int degree_cap = 0;
  int matrix_size = 1;
  std::vector<MultiIndex> indices;
  std::vector<Eigen::MatrixXcd> coeffs;

  SpectralCoeffs() = default;
  SpectralCoeffs(int d, int cap, int n)
      : dim(d),
        degree_cap(cap),
        matrix_size(n),
        indices(enumerate_multi_indices(d, cap)),
        coeffs(indices.size(), Eigen::MatrixXcd::Zero(n, n)) {}

  std::size_t size() const { return coeffs.size(); }

  /// Parseval mass sum_nu ||c(nu)||_F^2.
  double l2_norm_sq() const {
    double s = 0.0;
    for (const auto& c : coeffs) s += c.squaredNorm();
    return s;
  }
};

}  // namespace hermite_nc
