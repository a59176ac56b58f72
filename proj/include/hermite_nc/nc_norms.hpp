#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <iostream>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "hermite_nc/fields.hpp"
#include "hermite_nc/rng.hpp"

namespace hermite_nc {

/// |A| = (A* A)^{1/2}, Hermitian PSD, via eigendecomposition of A* A.
inline Eigen::MatrixXcd matrix_abs(const Eigen::MatrixXcd& a) {
  if (!a.allFinite()) throw std::invalid_argument("matrix_abs: non-finite input");
  const Eigen::MatrixXcd g = a.adjoint() * a;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(g);
  if (es.info() != Eigen::Success) {
    std::cerr << "matrix_abs: eigensolver failure on\n" << a << "\n";
    throw std::runtime_error("matrix_abs: eigensolver failed");
  }
  Eigen::VectorXd lam = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * lam.asDiagonal() * es.eigenvectors().adjoint();
}

/// Hermitian square root with eigenvalues clamped at zero.
inline Eigen::MatrixXcd psd_sqrt(const Eigen::MatrixXcd& a) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(a);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("psd_sqrt: eigensolver failed");
  Eigen::VectorXd lam = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * lam.asDiagonal() * es.eigenvectors().adjoint();
}

inline Eigen::VectorXd singular_values(const Eigen::MatrixXcd& a) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(a.adjoint() * a);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("singular_values: eigensolver failed");
  return es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
}

/// ||f||_p = (int Tr|f(x)|^p dx)^{1/p}; sup of operator norms for p = inf.
inline double nc_lp_norm(const MatrixField& f, double p) {
  if (p < 1.0) throw std::invalid_argument("nc_lp_norm: p must be >= 1");
  if (std::isinf(p)) {
    double m = 0.0;
    for (const auto& s : f.samples)
      m = std::max(m, singular_values(s).maxCoeff());
    return m;
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const Eigen::VectorXd sv = singular_values(f.samples[i]);
    double tr = 0.0;
    for (int k = 0; k < sv.size(); ++k) tr += std::pow(sv[k], p);
    acc += f.grid.weight(i) * tr;
  }
  return std::pow(acc, 1.0 / p);
}

/// Hilbert-Schmidt pairing int Tr(f(x)* g(x)) dx on a shared grid.
inline std::complex<double> hs_inner(const MatrixField& f, const MatrixField& g) {
  f.check_conforms(g);
  std::complex<double> acc = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i)
    acc += f.grid.weight(i) * (f.samples[i].adjoint() * g.samples[i]).trace();
  return acc;
}

/// Quadrature approximation of int f(x) g(x) dx for scalar sample
/// arrays on a grid (entrywise for matrix samples lives in analyze).
inline std::complex<double> inner_product(const std::vector<std::complex<double>>& f,
                                          const std::vector<std::complex<double>>& g,
                                          const QuadratureGrid& grid) {
  if (f.size() != grid.size() || g.size() != grid.size())
    throw std::invalid_argument("inner_product: shape mismatch");
  std::complex<double> acc = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i)
    acc += grid.weight(i) * f[i] * g[i];
  return acc;
}

/// Grid lower bound of the weak-L_p quasinorm:
/// max over lambda of lambda (int #{eig |f(x)| > lambda} dx)^{1/p}.
inline double weak_lp_quasinorm(const MatrixField& f, double p,
                                const std::vector<double>& lambda_grid) {
  if (p < 1.0) throw std::invalid_argument("weak_lp_quasinorm: p must be >= 1");
  if (lambda_grid.empty())
    throw std::invalid_argument("weak_lp_quasinorm: empty lambda grid");
  double best = 0.0;
  for (double lam : lambda_grid) {
    if (lam <= 0.0) throw std::invalid_argument("weak_lp_quasinorm: lambda <= 0");
    double mass = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
      const Eigen::VectorXd sv = singular_values(f.samples[i]);
      int count = 0;
      for (int k = 0; k < sv.size(); ++k)
        if (sv[k] > lam) ++count;
      mass += f.grid.weight(i) * count;
    }
    best = std::max(best, lam * std::pow(mass, 1.0 / p));
  }
  return best;
}

/// Default log-spaced lambda grid: `count` points over `decades` decades
/// below the sup norm of f.
inline std::vector<double> default_lambda_grid(const MatrixField& f,
                                               int count = 64, double decades = 6.0) {
  const double top = nc_lp_norm(f, std::numeric_limits<double>::infinity());
  std::vector<double> grid;
  if (top <= 0.0) {
    grid.push_back(1.0);
    return grid;
  }
  for (int i = 0; i < count; ++i)
    grid.push_back(top * std::pow(10.0, -decades * (count - i) / count));
  return grid;
}

inline void require_hermitian(const Eigen::MatrixXcd& a, const char* who) {
  if ((a - a.adjoint()).norm() > 1e-12 * (1.0 + a.norm()))
    throw std::invalid_argument(std::string(who) + ": matrix not Hermitian");
}

/// PSD order A <= B up to a relative tolerance:
/// min-eig(B - A) >= -tol (1 + ||B||).
inline bool psd_leq(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b,
                    double tol = 1e-12) {
  require_hermitian(a, "psd_leq");
  require_hermitian(b, "psd_leq");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(b - a);
  return es.eigenvalues().minCoeff() >= -tol * (1.0 + b.operatorNorm());
}

/// Smallest C >= 0 with -C D <= S <= C D in the PSD order, for
/// Hermitian S and PSD D: the spectral radius of D^{-1/2} S D^{-1/2}.
/// Near-null directions of D are floored; if S acts on a direction D
/// cannot dominate, the returned constant blows up accordingly.
inline double sandwich_constant(const Eigen::MatrixXcd& s,
                                const Eigen::MatrixXcd& d) {
  require_hermitian(s, "sandwich_constant");
  require_hermitian(d, "sandwich_constant");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(d);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("sandwich_constant: eigensolver failed");
  const double lam_max = std::max(es.eigenvalues().maxCoeff(), 0.0);
  const double floor = std::max(1e-14 * lam_max, 1e-300);
  Eigen::VectorXd inv_sqrt(es.eigenvalues().size());
  for (int i = 0; i < inv_sqrt.size(); ++i)
    inv_sqrt[i] = 1.0 / std::sqrt(std::max(es.eigenvalues()[i], floor));
  const Eigen::MatrixXcd w =
      es.eigenvectors() * inv_sqrt.asDiagonal() * es.eigenvectors().adjoint();
  Eigen::MatrixXcd m = w * s * w;
  m = 0.5 * (m + Eigen::MatrixXcd(m.adjoint()));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> em(m);
  return em.eigenvalues().cwiseAbs().maxCoeff();
}

inline double min_eigenvalue(const Eigen::MatrixXcd& a) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (a + a.adjoint()));
  return es.eigenvalues().minCoeff();
}

/// Minimum eigenvalue of
///   (int |phi|^2 dmu)(int f* f dmu) - (int phi f dmu)* (int phi f dmu),
/// the operator Cauchy-Schwarz gap; nonnegative up to roundoff.
inline double op_cauchy_schwarz_residual(const std::vector<std::complex<double>>& phi,
                                         const MatrixField& f) {
  if (phi.size() != f.size())
    throw std::invalid_argument("op_cauchy_schwarz_residual: shape mismatch");
  const int n = f.matrix_size;
  double phi2 = 0.0;
  Eigen::MatrixXcd ff = Eigen::MatrixXcd::Zero(n, n);
  Eigen::MatrixXcd pf = Eigen::MatrixXcd::Zero(n, n);
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double w = f.grid.weight(i);
    phi2 += w * std::norm(phi[i]);
    ff += w * (f.samples[i].adjoint() * f.samples[i]);
    pf += w * phi[i] * f.samples[i];
  }
  const Eigen::MatrixXcd m = phi2 * ff - pf.adjoint() * pf;
  return min_eigenvalue(m);
}

/// An axis-aligned cube.
struct Cube {
  std::vector<double> center;
  double side = 1.0;

  int dim() const { return static_cast<int>(center.size()); }
  double volume() const { return std::pow(side, dim()); }
  bool contains(const std::vector<double>& x) const {
    for (int j = 0; j < dim(); ++j)
      if (std::abs(x[j] - center[j]) > 0.5 * side) return false;
    return true;
  }
};

enum class BmoSide { kRow, kColumn, kMax };

inline double bmo_single_cube(const MatrixField& f,
                              const std::vector<std::size_t>& inside,
                              const Eigen::MatrixXcd& mean, double vol,
                              BmoSide side) {
  const int n = f.matrix_size;
  Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(n, n);
  for (std::size_t i : inside) {
    const Eigen::MatrixXcd dev = f.samples[i] - mean;
    const Eigen::MatrixXcd sq = side == BmoSide::kRow
                                    ? Eigen::MatrixXcd(dev * dev.adjoint())
                                    : Eigen::MatrixXcd(dev.adjoint() * dev);
    acc += f.grid.weight(i) * sq;
  }
  acc /= vol;
  return psd_sqrt(acc).operatorNorm();
}


/// Dyadic lower bound of the operator-valued BMO norm over the given
/// box: sup over dyadic subcubes Q of
///   || (avg_Q (f - f_Q)(f - f_Q)*)^{1/2} ||   (row)
/// or the starred-first variant (column). Cubes whose discretization
/// captures no grid point are skipped with a warning.
inline double bmo_norm(const MatrixField& f, BmoSide side, const Cube& box,
                       int levels) {
  if (levels < 1) throw std::invalid_argument("bmo_norm: levels must be >= 1");
  const int d = f.grid.dim();
  double sup = 0.0;
  for (int level = 0; level < levels; ++level) {
    const int splits = 1 << level;
    const double sub_side = box.side / splits;
    std::vector<int> cell(d, 0);
    while (true) {
      Cube q;
      q.side = sub_side;
      for (int j = 0; j < d; ++j)
        q.center.push_back(box.center[j] - 0.5 * box.side +
                           (cell[j] + 0.5) * sub_side);
      // averages over q by quadrature, normalized by captured volume
      double vol = 0.0;
      const int n = f.matrix_size;
      Eigen::MatrixXcd mean = Eigen::MatrixXcd::Zero(n, n);
      std::vector<std::size_t> inside;
      for (std::size_t i = 0; i < f.size(); ++i) {
        if (!q.contains(f.grid.point(i))) continue;
        inside.push_back(i);
        const double w = f.grid.weight(i);
        vol += w;
        mean += w * f.samples[i];
      }
      if (inside.empty() || vol <= 0.0) {
        std::cerr << "bmo_norm: empty cube at level " << level << ", skipped\n";
      } else {
        mean /= vol;
        if (side == BmoSide::kMax) {
          const double r = bmo_single_cube(f, inside, mean, vol, BmoSide::kRow);
          const double c = bmo_single_cube(f, inside, mean, vol, BmoSide::kColumn);
          sup = std::max({sup, r, c});
        } else {
          sup = std::max(sup, bmo_single_cube(f, inside, mean, vol, side));
        }
      }
      // advance cell counter
      int j = 0;
      while (j < d && ++cell[j] == splits) cell[j++] = 0;
      if (j == d) break;
    }
  }
  return sup;
}

/// Column atom: matrix field supported on a cube, mean zero, with
/// tau[(int_Q |a|^2)^{1/2}] = |Q|^{1/2} met with equality.
struct ColumnAtom {
  Cube cube;
  MatrixField field;  // on a uniform grid over the cube
};

/// tau[(int_Q |a|^2 dy)^{1/2}] for a field on its own cube grid.
inline double atom_size(const MatrixField& a) {
  const int n = a.matrix_size;
  Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(n, n);
  for (std::size_t i = 0; i < a.size(); ++i)
    acc += a.grid.weight(i) * (a.samples[i].adjoint() * a.samples[i]);
  return psd_sqrt(acc).trace().real();
}

inline Eigen::MatrixXcd atom_mean_integral(const MatrixField& a) {
  Eigen::MatrixXcd acc =
      Eigen::MatrixXcd::Zero(a.matrix_size, a.matrix_size);
  for (std::size_t i = 0; i < a.size(); ++i)
    acc += a.grid.weight(i) * a.samples[i];
  return acc;
}

/// Number of windowed sine modes in the column-atom construction.
inline constexpr int kColumnAtomModes = 4;

/// Scalar profiles spanning every column atom on this cube and grid:
/// entry 0 is the window prod_j sin^6(pi u_j), entries 1..kColumnAtomModes
/// are sin(2 pi k u_1) times the window, with u = (x - corner)/side.
inline std::vector<std::vector<double>> column_atom_profiles(
    const Cube& cube, const QuadratureGrid& grid) {
  const int d = cube.dim();
  std::vector<std::vector<double>> prof(kColumnAtomModes + 1,
                                        std::vector<double>(grid.size()));
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto x = grid.point(i);
    double window = 1.0;
    double u0 = 0.0;
    for (int j = 0; j < d; ++j) {
      const double u = (x[j] - cube.center[j]) / cube.side + 0.5;  // in (0,1)
      if (j == 0) u0 = u;
      const double s = std::sin(std::numbers::pi * u);
      window *= s * s * s * s * s * s;
    }
    prof[0][i] = window;
    for (int k = 1; k <= kColumnAtomModes; ++k)
      prof[k][i] = std::sin(2.0 * std::numbers::pi * k * u0) * window;
  }
  return prof;
}

/// Builds a smooth pseudo-random column atom on the cube. Samples are a
/// random combination of the windowed sine profiles above, mean-corrected
/// along the window, then rescaled so the size condition holds with
/// equality. Retries with the next substream on a degenerate draw.
inline ColumnAtom make_column_atom(std::uint64_t seed, const Cube& cube,
                                   int matrix_size, int cells_per_axis = 64) {
  for (std::uint64_t attempt = 0; attempt < 16; ++attempt) {
    Rng rng(seed * 0x51d3f1ull + attempt + 1);
    QuadratureGrid grid =
        QuadratureGrid::uniform_box(cube.center, 0.5 * cube.side, cells_per_axis);
    MatrixField a(grid, matrix_size);
    const auto prof = column_atom_profiles(cube, grid);
    std::vector<Eigen::MatrixXcd> amp;
    for (int k = 1; k <= kColumnAtomModes; ++k)
      amp.push_back(rng.complex_gaussian_matrix(matrix_size));
    for (std::size_t i = 0; i < a.size(); ++i) {
      Eigen::MatrixXcd v = Eigen::MatrixXcd::Zero(matrix_size, matrix_size);
      for (int k = 1; k <= kColumnAtomModes; ++k) v += amp[k - 1] * prof[k][i];
      a.samples[i] = v;
    }
    // remove any residual mean along the window profile
    const Eigen::MatrixXcd mean = atom_mean_integral(a);
    double wmass = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
      wmass += grid.weight(i) * prof[0][i];
    if (wmass > 0.0) {
      for (std::size_t i = 0; i < a.size(); ++i)
        a.samples[i] -= (prof[0][i] / wmass) * mean;
    }
    const double size = atom_size(a);
    if (size < 1e-14) continue;  // degenerate draw
    const double scale = std::sqrt(cube.volume()) / size;
    for (auto& s : a.samples) s *= scale;
    return ColumnAtom{cube, std::move(a)};
  }
  throw std::runtime_error("make_column_atom: repeated degenerate draws");
}

/// Checks the three atom conditions; returns true and fills `why` on
/// failure paths when provided.
inline bool validate_column_atom(const ColumnAtom& atom, std::string* why = nullptr) {
  const double mean_norm = atom_mean_integral(atom.field).norm();
  if (mean_norm > 1e-10) {
    if (why) *why = "mean not zero";
    return false;
  }
  const double size = atom_size(atom.field);
  if (size > std::sqrt(atom.cube.volume()) * (1.0 + 1e-10)) {
    if (why) *why = "size condition violated";
    return false;
  }
  return true;
}

}  // namespace hermite_nc
