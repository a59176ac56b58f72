#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hermite_nc/fields.hpp"
#include "hermite_nc/hermite.hpp"
#include "hermite_nc/quadrature.hpp"

namespace hermite_nc {

/// Hermite analysis/synthesis on a fixed grid up to a fixed degree cap.
/// Caches the full Phi_nu(x) value matrix so that sweeps reuse it.
class HermiteTransform {
 public:
  HermiteTransform(QuadratureGrid grid, int degree_cap)
      : grid_(std::move(grid)),
        degree_cap_(degree_cap),
        indices_(enumerate_multi_indices(grid_.dim(), degree_cap)) {
    for (int ax = 0; ax < grid_.dim(); ++ax) {
      if (grid_.axis_size(ax) < degree_cap + 1)
        throw std::invalid_argument(
            "HermiteTransform: axis " + std::to_string(ax) + " has " +
            std::to_string(grid_.axis_size(ax)) + " nodes, need at least " +
            std::to_string(degree_cap + 1));
    }
    const auto tables = axis_phi_tables(grid_, degree_cap);
    const std::size_t np = grid_.size(), ni = indices_.size();
    phi_.resize(ni, np);
    levels_.resize(ni);
    std::vector<int> idx(grid_.dim());
    for (std::size_t p = 0; p < np; ++p) {
      grid_.decompose(p, idx.data());
      for (std::size_t i = 0; i < ni; ++i) {
        double v = 1.0;
        for (int j = 0; j < grid_.dim(); ++j)
          v *= tables[j](indices_[i].components[j], idx[j]);
        phi_(i, p) = v;
      }
    }
    for (std::size_t i = 0; i < ni; ++i) levels_[i] = indices_[i].order();
    weights_.resize(np);
    for (std::size_t p = 0; p < np; ++p) weights_[p] = grid_.weight(p);
  }

  const QuadratureGrid& grid() const { return grid_; }
  int degree_cap() const { return degree_cap_; }
  int dim() const { return grid_.dim(); }
  const std::vector<MultiIndex>& indices() const { return indices_; }
  const std::vector<int>& levels() const { return levels_; }

  /// f^(nu) = sum_p w_p f(x_p) Phi_nu(x_p) for all |nu| <= degree_cap.
  SpectralCoeffs analyze(const MatrixField& f) const {
    if (!f.grid.same_layout(grid_))
      throw std::invalid_argument("analyze: field grid does not match transform grid");
    const int n = f.matrix_size;
    SpectralCoeffs c(grid_.dim(), degree_cap_, n);
    Eigen::MatrixXd Xr(grid_.size(), n * n), Xi(grid_.size(), n * n);
    for (std::size_t p = 0; p < grid_.size(); ++p)
      for (int e = 0; e < n * n; ++e) {
        const std::complex<double> v = f.samples[p](e % n, e / n) * weights_[p];
        Xr(p, e) = v.real();
        Xi(p, e) = v.imag();
      }
    const Eigen::MatrixXd Cr = phi_ * Xr, Ci = phi_ * Xi;
    for (std::size_t i = 0; i < indices_.size(); ++i)
      for (int e = 0; e < n * n; ++e)
        c.coeffs[i](e % n, e / n) = {Cr(i, e), Ci(i, e)};
    return c;
  }

  /// sum_nu c(nu) Phi_nu(x) at the grid points.
  MatrixField synthesize(const SpectralCoeffs& c) const {
    if (c.dim != grid_.dim() || c.degree_cap != degree_cap_)
      throw std::invalid_argument("synthesize: coefficient layout mismatch");
    const int n = c.matrix_size;
    MatrixField f(grid_, n);
    Eigen::MatrixXd Cr(indices_.size(), n * n), Ci(indices_.size(), n * n);
    for (std::size_t i = 0; i < indices_.size(); ++i)
      for (int e = 0; e < n * n; ++e) {
        Cr(i, e) = c.coeffs[i](e % n, e / n).real();
        Ci(i, e) = c.coeffs[i](e % n, e / n).imag();
      }
    const Eigen::MatrixXd Xr = phi_.transpose() * Cr, Xi = phi_.transpose() * Ci;
    for (std::size_t p = 0; p < grid_.size(); ++p)
      for (int e = 0; e < n * n; ++e)
        f.samples[p](e % n, e / n) = {Xr(p, e), Xi(p, e)};
    return f;
  }

  /// Hermite projection P_n f = sum_{|nu|=n} f^(nu) Phi_nu.
  MatrixField project(const MatrixField& f, int n) const {
    if (n > degree_cap_)
      throw std::invalid_argument("project: level exceeds degree cap");
    SpectralCoeffs c = analyze(f);
    for (std::size_t i = 0; i < c.coeffs.size(); ++i)
      if (levels_[i] != n) c.coeffs[i].setZero();
    return synthesize(c);
  }

  /// Multiplies each coefficient at level |nu| = k by factor[k].
  SpectralCoeffs scale_levels(const SpectralCoeffs& c,
                              const std::vector<std::complex<double>>& factor) const {
    if (static_cast<int>(factor.size()) < degree_cap_ + 1)
      throw std::invalid_argument("scale_levels: need one factor per level");
    SpectralCoeffs out = c;
    for (std::size_t i = 0; i < out.coeffs.size(); ++i)
      out.coeffs[i] *= factor[levels_[i]];
    return out;
  }

  MatrixField apply_level_multiplier(
      const SpectralCoeffs& c,
      const std::vector<std::complex<double>>& factor) const {
    return synthesize(scale_levels(c, factor));
  }

 private:
  QuadratureGrid grid_;
  int degree_cap_;
  std::vector<MultiIndex> indices_;
  std::vector<int> levels_;
  Eigen::MatrixXd phi_;          // indices x points
  std::vector<double> weights_;  // Lebesgue point weights
};

}  // namespace hermite_nc
