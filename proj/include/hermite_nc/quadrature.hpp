#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace hermite_nc {

/// One-dimensional quadrature rule. `weights` integrate against the
/// native weight of the rule (e^{-x^2} for Gauss-Hermite, dx for
/// Gauss-Legendre and uniform rules). `lebesgue_weights` always
/// integrate against plain dx.
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
  std::vector<double> lebesgue_weights;
};

namespace detail {

// Eigenvalues of a symmetric tridiagonal matrix by implicit-shift QL.
// diag/off are overwritten; off[i] couples i and i+1.
inline std::vector<double> tridiag_eigenvalues(std::vector<double> diag,
                                               std::vector<double> off) {
  const int n = static_cast<int>(diag.size());
  off.push_back(0.0);
  for (int l = 0; l < n; ++l) {
    int iter = 0;
    int m;
    do {
      for (m = l; m < n - 1; ++m) {
        const double dd = std::abs(diag[m]) + std::abs(diag[m + 1]);
        if (std::abs(off[m]) <= 1e-300 + 1e-16 * dd) break;
      }
      if (m != l) {
        if (iter++ == 60)
          throw std::runtime_error("tridiag_eigenvalues: no convergence");
        double g = (diag[l + 1] - diag[l]) / (2.0 * off[l]);
        double r = std::hypot(g, 1.0);
        g = diag[m] - diag[l] + off[l] / (g + std::copysign(r, g));
        double s = 1.0, c = 1.0, p = 0.0;
        bool underflow = false;
        for (int i = m - 1; i >= l; --i) {
          double f = s * off[i];
          const double b = c * off[i];
          r = std::hypot(f, g);
          off[i + 1] = r;
          if (r == 0.0) {
            diag[i + 1] -= p;
            off[m] = 0.0;
            underflow = true;
            break;
          }
          s = f / r;
          c = g / r;
          g = diag[i + 1] - p;
          r = (diag[i] - g) * s + 2.0 * c * b;
          p = s * r;
          diag[i + 1] = g + p;
          g = c * r - b;
        }
        if (underflow) continue;
        diag[l] -= p;
        off[l] = g;
        off[m] = 0.0;
      }
    } while (m != l);
  }
  std::sort(diag.begin(), diag.end());
  return diag;
}

}  // namespace detail

/// Evaluates the orthonormal Hermite polynomials p_0..p_nmax at x,
/// orthonormal with respect to e^{-x^2} dx. These equal
/// phi_n(x) e^{x^2/2} and satisfy the same three-term recurrence.
inline std::vector<double> hermite_orthonormal_poly(double x, int n_max) {
  std::vector<double> p(static_cast<std::size_t>(n_max) + 1);
  const double pi_m4 = 1.0 / std::pow(std::numbers::pi, 0.25);
  p[0] = pi_m4;
  if (n_max >= 1) p[1] = std::sqrt(2.0) * x * pi_m4;
  for (int n = 2; n <= n_max; ++n)
    p[n] = x * std::sqrt(2.0 / n) * p[n - 1] -
           std::sqrt((n - 1.0) / n) * p[n - 2];
  return p;
}

/// Normalized Hermite functions phi_0(x)..phi_nmax(x) by the three-term
/// recurrence with exponent tracking, usable far beyond the point where
/// e^{-x^2/2} alone underflows (|x| ~ 38); values below the double
/// range flush to zero.
inline std::vector<double> hermite_phi_values(double x, int n_max) {
  if (n_max < 0)
    throw std::invalid_argument("hermite_phi_values: n_max must be >= 0");
  std::vector<double> out(static_cast<std::size_t>(n_max) + 1);
  double log_scale = -0.5 * x * x;
  double scale_lin = log_scale > -700.0 ? std::exp(log_scale) : 0.0;
  const auto emit = [&](int n, double a) {
    if (log_scale > -700.0) {
      out[n] = a * scale_lin;
    } else if (a == 0.0) {
      out[n] = 0.0;
    } else {
      const double l = log_scale + std::log(std::abs(a));
      out[n] = l < -745.0 ? 0.0 : std::copysign(std::exp(l), a);
    }
  };
  double prev = 0.0, cur = 1.0 / std::pow(std::numbers::pi, 0.25);
  emit(0, cur);
  for (int n = 1; n <= n_max; ++n) {
    const double next = n == 1 ? std::sqrt(2.0) * x * cur
                               : x * std::sqrt(2.0 / n) * cur -
                                     std::sqrt((n - 1.0) / n) * prev;
    prev = cur;
    cur = next;
    if (std::abs(cur) > 1e100) {
      cur *= 1e-100;
      prev *= 1e-100;
      log_scale += std::log(1e100);
      scale_lin = log_scale > -700.0 ? std::exp(log_scale) : 0.0;
    }
    emit(n, cur);
  }
  return out;
}

/// m-point Gauss-Hermite rule for the weight e^{-x^2}, exact for
/// polynomials of degree <= 2m-1. Nodes come from the Jacobi matrix of
/// the Hermite recurrence, polished by Newton steps on phi_m, and the
/// Lebesgue-compensated weights use the Christoffel identity
/// w_j e^{x_j^2} = 1 / sum_{k<m} phi_k(x_j)^2, whose terms are O(1) for
/// any m, so the rule stays finite for thousands of nodes.
inline GaussRule gauss_hermite_rule(int m) {
  if (m < 1) throw std::invalid_argument("gauss_hermite_rule: m must be >= 1");
  std::vector<double> diag(m, 0.0), off(m > 1 ? m - 1 : 0);
  for (int k = 1; k < m; ++k) off[k - 1] = std::sqrt(k / 2.0);
  std::vector<double> x = detail::tridiag_eigenvalues(diag, off);

  // Newton polish on phi_m; phi_m'(x) = sqrt(2m) phi_{m-1}(x) at a root
  // of phi_m, and the recurrence's scale factor cancels in the ratio.
  for (int it = 0; it < 2; ++it) {
    for (int j = 0; j < m; ++j) {
      const auto phi = hermite_phi_values(x[j], m);
      const double dp = std::sqrt(2.0 * m) * phi[m - 1];
      if (dp != 0.0) x[j] -= phi[m] / dp;
    }
  }
  // Enforce the exact +/- symmetry of the rule.
  for (int j = 0; j < m / 2; ++j) {
    const double v = 0.5 * (x[m - 1 - j] - x[j]);
    x[j] = -v;
    x[m - 1 - j] = v;
  }
  if (m % 2 == 1) x[m / 2] = 0.0;

  GaussRule rule;
  rule.nodes = x;
  rule.weights.resize(m);
  rule.lebesgue_weights.resize(m);
  for (int j = 0; j < m; ++j) {
    const auto phi = hermite_phi_values(x[j], m - 1);
    double s = 0.0;
    for (double v : phi) s += v * v;
    rule.lebesgue_weights[j] = 1.0 / s;                    // w_j e^{x_j^2}
    rule.weights[j] = std::exp(-x[j] * x[j]) / s;          // w_j (may flush to 0)
  }
  return rule;
}

/// m-point Gauss-Legendre rule on [a, b].
inline GaussRule gauss_legendre_rule(int m, double a = -1.0, double b = 1.0) {
  if (m < 1) throw std::invalid_argument("gauss_legendre_rule: m must be >= 1");
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(m, m);
  for (int k = 1; k < m; ++k) {
    const double v = k / std::sqrt(4.0 * k * k - 1.0);
    J(k, k - 1) = J(k - 1, k) = v;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("gauss_legendre_rule: eigensolver failed");
  GaussRule rule;
  rule.nodes.resize(m);
  rule.weights.resize(m);
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  for (int j = 0; j < m; ++j) {
    rule.nodes[j] = mid + half * es.eigenvalues()[j];
    rule.weights[j] = 2.0 * half * es.eigenvectors()(0, j) * es.eigenvectors()(0, j);
  }
  rule.lebesgue_weights = rule.weights;
  return rule;
}

/// Tensor-product quadrature grid over R^d. Gauss-Hermite grids carry
/// both native (e^{-x^2}) and Lebesgue-compensated per-axis weights;
/// uniform box grids are midpoint rules.
class QuadratureGrid {
 public:
  QuadratureGrid() = default;

  static QuadratureGrid gauss_hermite(int dim, int points_per_axis) {
    if (dim < 1) throw std::invalid_argument("QuadratureGrid: dim must be >= 1");
    QuadratureGrid g;
    g.dim_ = dim;
    g.kind_ = Kind::kGaussHermite;
    const GaussRule rule = gauss_hermite_rule(points_per_axis);
    g.axes_.assign(dim, rule);
    g.finalize();
    return g;
  }

  /// Midpoint rule on the box prod_j [center_j - halfwidth, center_j + halfwidth].
  static QuadratureGrid uniform_box(const std::vector<double>& center,
                                    double halfwidth, int cells_per_axis) {
    if (center.empty() || halfwidth <= 0.0 || cells_per_axis < 1)
      throw std::invalid_argument("QuadratureGrid::uniform_box: bad arguments");
    QuadratureGrid g;
    g.dim_ = static_cast<int>(center.size());
    g.kind_ = Kind::kUniform;
    const double h = 2.0 * halfwidth / cells_per_axis;
    for (double c : center) {
      GaussRule ax;
      for (int i = 0; i < cells_per_axis; ++i) {
        ax.nodes.push_back(c - halfwidth + (i + 0.5) * h);
        ax.weights.push_back(h);
        ax.lebesgue_weights.push_back(h);
      }
      g.axes_.push_back(std::move(ax));
    }
    g.finalize();
    return g;
  }

  enum class Kind { kGaussHermite, kUniform };

  /// Rebuilds a grid from explicit per-axis rules (deserialization path).
  static QuadratureGrid from_axes(Kind kind, std::vector<GaussRule> axes) {
    if (axes.empty() || axes.size() > 8)
      throw std::invalid_argument("QuadratureGrid::from_axes: need 1..8 axes");
    for (const auto& ax : axes)
      if (ax.nodes.empty() || ax.nodes.size() != ax.weights.size() ||
          ax.nodes.size() != ax.lebesgue_weights.size())
        throw std::invalid_argument("QuadratureGrid::from_axes: ragged axis");
    QuadratureGrid g;
    g.dim_ = static_cast<int>(axes.size());
    g.kind_ = kind;
    g.axes_ = std::move(axes);
    g.finalize();
    return g;
  }

  int dim() const { return dim_; }
  Kind kind() const { return kind_; }
  std::size_t size() const { return total_; }
  int axis_size(int j) const { return static_cast<int>(axes_[j].nodes.size()); }
  const std::vector<double>& axis_nodes(int j) const { return axes_[j].nodes; }
  const std::vector<double>& axis_weights(int j) const { return axes_[j].weights; }
  const std::vector<double>& axis_lebesgue_weights(int j) const {
    return axes_[j].lebesgue_weights;
  }

  /// Half-width of the bounding box implied by the outermost node.
  double box_halfwidth() const {
    double r = 0.0;
    for (const auto& ax : axes_)
      for (double v : ax.nodes) r = std::max(r, std::abs(v));
    return r;
  }

  void decompose(std::size_t flat, int* idx) const {
    for (int j = dim_ - 1; j >= 0; --j) {
      const std::size_t n = axes_[j].nodes.size();
      idx[j] = static_cast<int>(flat % n);
      flat /= n;
    }
  }

  std::vector<double> point(std::size_t flat) const {
    std::vector<double> p(dim_);
    int idx[8];
    decompose(flat, idx);
    for (int j = 0; j < dim_; ++j) p[j] = axes_[j].nodes[idx[j]];
    return p;
  }

  /// Lebesgue (dx) weight of a grid point.
  double weight(std::size_t flat) const {
    double w = 1.0;
    int idx[8];
    decompose(flat, idx);
    for (int j = 0; j < dim_; ++j) w *= axes_[j].lebesgue_weights[idx[j]];
    return w;
  }

  bool same_layout(const QuadratureGrid& o) const {
    if (dim_ != o.dim_ || total_ != o.total_) return false;
    for (int j = 0; j < dim_; ++j)
      if (axes_[j].nodes != o.axes_[j].nodes) return false;
    return true;
  }

 private:
  void finalize() {
    if (dim_ > 8) throw std::invalid_argument("QuadratureGrid: dim > 8 unsupported");
    total_ = 1;
    for (const auto& ax : axes_) total_ *= ax.nodes.size();
  }

  int dim_ = 0;
  Kind kind_ = Kind::kGaussHermite;
  std::vector<GaussRule> axes_;
  std::size_t total_ = 0;
};

}  // namespace hermite_nc
