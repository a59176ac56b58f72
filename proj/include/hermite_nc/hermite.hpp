#pragma once

#include <cmath>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "hermite_nc/quadrature.hpp"

namespace hermite_nc {

/// Normalized Hermite functions phi_0(x)..phi_nmax(x), computed by the
/// three-term recurrence on the normalized functions themselves (never
/// on the raw polynomials H_n, which grow factorially):
///   phi_0(x)   = pi^{-1/4} e^{-x^2/2}
///   phi_n(x)   = x sqrt(2/n) phi_{n-1}(x) - sqrt((n-1)/n) phi_{n-2}(x)
/// (exponent-tracked, so large |x| grid tails evaluate correctly).
inline std::vector<double> eval_phi_1d(double x, int n_max) {
  if (!std::isfinite(x)) throw std::invalid_argument("eval_phi_1d: x not finite");
  if (n_max < 0) throw std::invalid_argument("eval_phi_1d: n_max must be >= 0");
  return hermite_phi_values(x, n_max);
}

/// Multi-index nu = (nu_1,...,nu_d) with |nu| = sum nu_j and Hermite
/// eigenvalue N = 2|nu| + d.
struct MultiIndex {
  std::vector<int> components;

  explicit MultiIndex(std::vector<int> c) : components(std::move(c)) {
    if (components.empty())
      throw std::invalid_argument("MultiIndex: dimension must be >= 1");
    for (int v : components)
      if (v < 0) throw std::invalid_argument("MultiIndex: negative component");
  }

  int dim() const { return static_cast<int>(components.size()); }
  int order() const {
    int s = 0;
    for (int v : components) s += v;
    return s;
  }
  int eigenvalue() const { return 2 * order() + dim(); }

  bool operator==(const MultiIndex& o) const { return components == o.components; }
};

/// All multi-indices with |nu| <= degree_cap, grouped by level |nu| and
/// lexicographic within a level. This ordering is shared by every
/// coefficient container.
inline std::vector<MultiIndex> enumerate_multi_indices(int dim, int degree_cap) {
  if (dim < 1 || degree_cap < 0)
    throw std::invalid_argument("enumerate_multi_indices: bad arguments");
  std::vector<MultiIndex> out;
  for (int level = 0; level <= degree_cap; ++level) {
    // compositions of `level` into dim parts
    std::vector<int> c(dim, 0);
    c[0] = level;
    while (true) {
      out.emplace_back(c);
      int j = dim - 2;
      while (j >= 0 && c[j] == 0) --j;
      if (j < 0) break;
      --c[j];
      int rest = 1;
      for (int i = j + 1; i < dim; ++i) {
        rest += c[i];
        c[i] = 0;
      }
      c[j + 1] = rest;
    }
  }
  return out;
}

/// Tensor-product Hermite function Phi_nu(x) = prod_j phi_{nu_j}(x_j).
inline double eval_phi_multi(const MultiIndex& nu, std::span<const double> x) {
  if (static_cast<int>(x.size()) != nu.dim())
    throw std::invalid_argument("eval_phi_multi: dimension mismatch");
  double v = 1.0;
  for (int j = 0; j < nu.dim(); ++j) {
    const auto phi = eval_phi_1d(x[j], nu.components[j]);
    v *= phi[nu.components[j]];
  }
  return v;
}

/// Precomputed 1-D basis table: nodes, weights and phi_n(x_j) values of
/// an m-point Gauss-Hermite rule, n <= degree_cap.
struct HermiteBasis {
  int degree_cap = 0;
  std::vector<double> nodes;
  std::vector<double> weights;           // native e^{-x^2} weights
  std::vector<double> lebesgue_weights;  // weights * e^{x^2}, built stably
  Eigen::MatrixXd phi_table;             // (degree_cap+1) x m

  static HermiteBasis build(int degree_cap, int node_count) {
    if (degree_cap < 0) throw std::invalid_argument("HermiteBasis: degree_cap < 0");
    if (node_count < 1) throw std::invalid_argument("HermiteBasis: node_count < 1");
    HermiteBasis b;
    b.degree_cap = degree_cap;
    GaussRule rule = gauss_hermite_rule(node_count);
    b.nodes = std::move(rule.nodes);
    b.weights = std::move(rule.weights);
    b.lebesgue_weights = std::move(rule.lebesgue_weights);
    b.phi_table.resize(degree_cap + 1, node_count);
    for (int j = 0; j < node_count; ++j) {
      const auto phi = eval_phi_1d(b.nodes[j], degree_cap);
      for (int n = 0; n <= degree_cap; ++n) b.phi_table(n, j) = phi[n];
    }
    return b;
  }
};

/// phi_n tables for each axis of a grid; column j of table d is
/// phi_n(node_j) for axis d.
inline std::vector<Eigen::MatrixXd> axis_phi_tables(const QuadratureGrid& grid,
                                                    int degree_cap) {
  std::vector<Eigen::MatrixXd> tables;
  tables.reserve(grid.dim());
  for (int ax = 0; ax < grid.dim(); ++ax) {
    const auto& nodes = grid.axis_nodes(ax);
    Eigen::MatrixXd t(degree_cap + 1, nodes.size());
    for (std::size_t j = 0; j < nodes.size(); ++j) {
      const auto phi = eval_phi_1d(nodes[j], degree_cap);
      for (int n = 0; n <= degree_cap; ++n) t(n, j) = phi[n];
    }
    tables.push_back(std::move(t));
  }
  return tables;
}

}  // namespace hermite_nc
