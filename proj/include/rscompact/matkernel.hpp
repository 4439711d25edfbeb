#pragma once

// Complex matrix helpers for SU(n): eigendecomposition of unitary matrices,
// the diagonal torus parameterization by alcove points, and the reduction of
// a special-unitary matrix to alcove form C = eta^{-1} delta(xi) eta.

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "rscompact/errors.hpp"

namespace rscompact {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
inline constexpr Complex kI{0.0, 1.0};

struct Tolerances {
  double unitarity = 1e-9;
  double eig_reconstruction = 1e-10;
  double alcove_match = 1e-8;
  // imaginary part allowed in the square-root brackets of W_j
  double bracket_imag = 1e-10;
  // |delta_j - delta_k| and Lax denominators below this are singular
  double singular = 1e-12;
  // Lax evaluation refuses points closer than this to a polytope facet
  double facet_refusal = 1e-8;
};

inline double max_abs(const ComplexMatrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

inline double unitarity_defect(const ComplexMatrix& m) {
  return max_abs(m.adjoint() * m - ComplexMatrix::Identity(m.rows(), m.cols()));
}

/// A square complex matrix whose unitarity was checked at construction.
class UnitaryMatrix {
 public:
  explicit UnitaryMatrix(ComplexMatrix m, double tol = Tolerances{}.unitarity)
      : m_(std::move(m)) {
    if (m_.rows() != m_.cols() || m_.rows() == 0) {
      throw Error(ErrorKind::InvalidArgument, "unitary matrix must be square and non-empty");
    }
    const double defect = unitarity_defect(m_);
    if (!(defect < tol)) {
      throw Error(ErrorKind::NotUnitary, "|U^H U - I|_max = " + std::to_string(defect));
    }
  }

  const ComplexMatrix& matrix() const noexcept { return m_; }
  Eigen::Index dim() const noexcept { return m_.rows(); }
  ComplexMatrix inverse() const { return m_.adjoint(); }
  Complex determinant() const { return m_.determinant(); }

 private:
  ComplexMatrix m_;
};

/// Alcove coordinates: n non-negative reals summing to pi.
class AlcovePoint {
 public:
  explicit AlcovePoint(std::vector<double> xi, double tol = 1e-9) : xi_(std::move(xi)) {
    if (xi_.size() < 2) {
      throw Error(ErrorKind::InvalidArgument, "alcove point needs n >= 2 components");
    }
    double sum = 0.0;
    for (double v : xi_) {
      if (!(v >= -tol)) {
        throw Error(ErrorKind::InvalidArgument, "alcove coordinate is negative");
      }
      sum += v;
    }
    if (std::abs(sum - kPi) > tol) {
      throw Error(ErrorKind::InvalidArgument,
                  "alcove coordinates must sum to pi, got " + std::to_string(sum));
    }
  }

  std::span<const double> values() const noexcept { return xi_; }
  std::size_t size() const noexcept { return xi_.size(); }
  double operator[](std::size_t j) const { return xi_[j]; }

 private:
  std::vector<double> xi_;
};

/// Wraps a phase into [0, 2 pi).
inline double wrap_phase(double phi) {
  double r = std::fmod(phi, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  if (r >= kTwoPi) r = 0.0;
  return r;
}

/// Shortest distance between two points on the unit circle given by phases.
inline double circular_distance(double p, double q) {
  const double d = wrap_phase(p - q);
  return std::min(d, kTwoPi - d);
}

struct UnitaryEigen {
  std::vector<double> phases;  // ascending, in [0, 2 pi)
  ComplexMatrix vectors;       // column k belongs to phases[k]
};

/// Eigendecomposition of a unitary matrix. For a normal matrix the complex
/// Schur form is diagonal, so the Schur vectors form an orthonormal
/// eigenbasis even inside degenerate eigenspaces.
inline UnitaryEigen eig_unitary(const UnitaryMatrix& u) {
  const Eigen::Index n = u.dim();
  Eigen::ComplexSchur<ComplexMatrix> schur(n);
  schur.compute(u.matrix());
  if (schur.info() != Eigen::Success) {
    throw Error(ErrorKind::NoConvergence,
                "complex Schur iteration did not converge within " +
                    std::to_string(schur.getMaxIterations()) + " iterations");
  }
  const ComplexMatrix& t = schur.matrixT();
  const ComplexMatrix& q = schur.matrixU();

  std::vector<double> raw(static_cast<std::size_t>(n));
  for (Eigen::Index k = 0; k < n; ++k) raw[k] = wrap_phase(std::arg(t(k, k)));

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index l, Eigen::Index r) { return raw[l] < raw[r]; });

  UnitaryEigen out;
  out.phases.resize(static_cast<std::size_t>(n));
  out.vectors.resize(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    out.phases[k] = raw[order[k]];
    out.vectors.col(k) = q.col(order[k]);
  }
  return out;
}

/// Lambda_k = sum_{j<=k} E_jj - (k/n) 1, for 1 <= k <= n-1.
inline ComplexMatrix fundamental_weight(int n, int k) {
  if (n < 2 || k < 1 || k > n - 1) {
    throw Error(ErrorKind::InvalidArgument,
                "fundamental weight index k=" + std::to_string(k) + " outside 1.." +
                    std::to_string(n - 1));
  }
  ComplexMatrix w = ComplexMatrix::Zero(n, n);
  const double shift = static_cast<double>(k) / n;
  for (int j = 0; j < n; ++j) w(j, j) = (j < k ? 1.0 : 0.0) - shift;
  return w;
}

/// Diagonal of exp(-2i sum_k c_k Lambda_k), c has n-1 entries.
inline ComplexVector weight_exponential(std::span<const double> c) {
  const int n = static_cast<int>(c.size()) + 1;
  double weighted = 0.0;
  for (int k = 1; k < n; ++k) weighted += k * c[k - 1];
  ComplexVector d(n);
  // tail = sum_{k > m} c_k; row m of Lambda_k is 1 exactly when m < k
  double tail = std::accumulate(c.begin(), c.end(), 0.0);
  for (int m = 0; m < n; ++m) {
    const double phase = -2.0 * tail + 2.0 * weighted / n;
    d(m) = std::polar(1.0, phase);
    if (m < n - 1) tail -= c[m];
  }
  return d;
}

/// Diagonal entries of delta(xi) via the closed form
/// delta_11 = exp((2i/n) sum j xi_j), delta_kk = exp(2i sum_{j<k} xi_j) delta_11.
inline ComplexVector delta_diagonal(const AlcovePoint& xi) {
  const auto n = static_cast<Eigen::Index>(xi.size());
  double weighted = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) weighted += static_cast<double>(j + 1) * xi[j];
  const double base = 2.0 * weighted / static_cast<double>(n);
  ComplexVector d(n);
  double partial = 0.0;
  for (Eigen::Index k = 0; k < n; ++k) {
    d(k) = std::polar(1.0, base + 2.0 * partial);
    partial += xi[k];
  }
  return d;
}

inline UnitaryMatrix delta_of_xi(const AlcovePoint& xi) {
  return UnitaryMatrix(delta_diagonal(xi).asDiagonal().toDenseMatrix());
}

struct AlcoveForm {
  AlcovePoint xi;
  // rows are eigenvectors; eta * C * eta^H = delta(xi), det eta = 1
  ComplexMatrix eta;
};

namespace detail {

inline void require_special(const UnitaryMatrix& c, double tol) {
  const Complex det = c.determinant();
  if (std::abs(det - Complex{1.0, 0.0}) > tol) {
    throw Error(ErrorKind::NotSpecialUnitary,
                "|det C - 1| = " + std::to_string(std::abs(det - Complex{1.0, 0.0})));
  }
}

}  // namespace detail

/// Unique alcove point xi with C = eta^{-1} delta(xi) eta.
///
/// The sorted eigenphases p_1 <= ... <= p_n determine the circular half-gaps;
/// delta(xi) has its phases increasing along the diagonal with consecutive
/// gaps 2 xi_1, ..., 2 xi_{n-1} and wrap gap 2 xi_n, so xi is a cyclic
/// rotation of the half-gaps. The rotation is fixed by requiring delta_11 to
/// equal the eigenvalue the rotation starts at. For degenerate spectra more
/// than one rotation can match; the smallest index wins.
inline AlcoveForm alcove_reduce(const UnitaryMatrix& c, const Tolerances& tol = {}) {
  detail::require_special(c, tol.unitarity);
  const UnitaryEigen eig = eig_unitary(c);
  const auto n = static_cast<std::size_t>(c.dim());
  const auto& p = eig.phases;

  std::vector<double> half_gap(n);
  for (std::size_t j = 0; j + 1 < n; ++j) half_gap[j] = 0.5 * (p[j + 1] - p[j]);
  half_gap[n - 1] = 0.5 * (p[0] + kTwoPi - p[n - 1]);

  double best_mismatch = std::numeric_limits<double>::infinity();
  for (std::size_t s = 0; s < n; ++s) {
    std::vector<double> xi(n);
    double weighted = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      xi[k] = half_gap[(s + k) % n];
      weighted += static_cast<double>(k + 1) * xi[k];
    }
    const Complex d11 = std::polar(1.0, 2.0 * weighted / static_cast<double>(n));
    const double mismatch = std::abs(d11 - std::polar(1.0, p[s]));
    best_mismatch = std::min(best_mismatch, mismatch);
    if (mismatch < tol.alcove_match) {
      ComplexMatrix eta(c.dim(), c.dim());
      for (std::size_t k = 0; k < n; ++k) {
        eta.row(static_cast<Eigen::Index>(k)) =
            eig.vectors.col(static_cast<Eigen::Index>((s + k) % n)).adjoint();
      }
      // a phase on one row leaves eta C eta^H unchanged
      const Complex det = eta.determinant();
      eta.row(0) *= std::conj(det) / std::abs(det);
      return AlcoveForm{AlcovePoint(std::move(xi), 1e-9), std::move(eta)};
    }
  }
  throw Error(ErrorKind::AlcoveMismatch,
              "no cyclic shift reproduces the spectrum; best mismatch " +
                  std::to_string(best_mismatch));
}

/// Spectral function xi_j(C), with j in 1..n.
inline double spectral_function(const UnitaryMatrix& c, int j, const Tolerances& tol = {}) {
  if (j < 1 || j > c.dim()) {
    throw Error(ErrorKind::InvalidArgument, "spectral function index out of range");
  }
  return alcove_reduce(c, tol).xi[static_cast<std::size_t>(j - 1)];
}

/// True iff all eigenphases are pairwise separated by more than tol on the circle.
inline bool is_regular(const UnitaryMatrix& c, double tol) {
  const auto phases = eig_unitary(c).phases;
  for (std::size_t j = 0; j < phases.size(); ++j) {
    for (std::size_t k = j + 1; k < phases.size(); ++k) {
      if (!(circular_distance(phases[j], phases[k]) > tol)) return false;
    }
  }
  return true;
}

}  // namespace rscompact
