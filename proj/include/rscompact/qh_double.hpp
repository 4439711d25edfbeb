#pragma once

// The internally fused double SU(n) x SU(n): group-valued moment map,
// the invariant 2-form, the two torus actions generated by the spectral
// Hamiltonians, and the explicit lift of Darboux points onto the constraint
// surface mu^{-1}(mu_0).

#include <cmath>
#include <complex>
#include <span>
#include <string>
#include <vector>

#include "rscompact/errors.hpp"
#include "rscompact/matkernel.hpp"
#include "rscompact/rs_classical.hpp"

namespace rscompact {

class DoublePoint {
 public:
  DoublePoint(ComplexMatrix a, ComplexMatrix b, double tol = Tolerances{}.unitarity)
      : a_(std::move(a), tol), b_(std::move(b), tol) {
    if (a_.dim() != b_.dim()) {
      throw Error(ErrorKind::InvalidArgument, "double factors must have equal size");
    }
    detail::require_special(a_, tol);
    detail::require_special(b_, tol);
  }

  const ComplexMatrix& A() const noexcept { return a_.matrix(); }
  const ComplexMatrix& B() const noexcept { return b_.matrix(); }
  const UnitaryMatrix& unitary_A() const noexcept { return a_; }
  const UnitaryMatrix& unitary_B() const noexcept { return b_; }
  Eigen::Index dim() const noexcept { return a_.dim(); }

 private:
  UnitaryMatrix a_;
  UnitaryMatrix b_;
};

inline double distance(const DoublePoint& p, const DoublePoint& q) {
  return std::max(max_abs(p.A() - q.A()), max_abs(p.B() - q.B()));
}

/// Tangent (X_A, X_B) at a point of the double; A^{-1} X_A and B^{-1} X_B
/// must be anti-Hermitian and traceless.
class DoubleTangent {
 public:
  DoubleTangent(DoublePoint base, ComplexMatrix xa, ComplexMatrix xb, double tol = 1e-9)
      : base_(std::move(base)), xa_(std::move(xa)), xb_(std::move(xb)) {
    check(base_.A(), xa_, tol);
    check(base_.B(), xb_, tol);
  }

  const DoublePoint& base() const noexcept { return base_; }
  const ComplexMatrix& XA() const noexcept { return xa_; }
  const ComplexMatrix& XB() const noexcept { return xb_; }

 private:
  static void check(const ComplexMatrix& g, const ComplexMatrix& x, double tol) {
    if (x.rows() != g.rows() || x.cols() != g.cols()) {
      throw Error(ErrorKind::InvalidArgument, "tangent component has wrong shape");
    }
    const ComplexMatrix z = g.adjoint() * x;
    const double scale = std::max(1.0, max_abs(z));
    if (max_abs(z + z.adjoint()) > tol * scale || std::abs(z.trace()) > tol * scale) {
      throw Error(ErrorKind::InvalidArgument, "tangent is not in g * su(n)");
    }
  }

  DoublePoint base_;
  ComplexMatrix xa_;
  ComplexMatrix xb_;
};

/// mu(A, B) = A B A^{-1} B^{-1}.
inline UnitaryMatrix moment_map(const DoublePoint& p) {
  return UnitaryMatrix(p.A() * p.B() * p.A().adjoint() * p.B().adjoint());
}

/// diag(e^{2iy}, ..., e^{2iy}, e^{2(1-n)iy}).
struct Mu0 {
  int n;
  double y;
  UnitaryMatrix value;
};

inline Mu0 mu0(int n, double y) {
  if (n < 2 || !(std::abs(y) > 0.0) || !(std::abs(y) < kPi / n)) {
    throw Error(ErrorKind::InvalidArgument, "mu0 needs n >= 2 and 0 < |y| < pi/n");
  }
  ComplexVector d = ComplexVector::Constant(n, std::polar(1.0, 2.0 * y));
  d(n - 1) = std::polar(1.0, 2.0 * (1 - n) * y);
  return Mu0{n, y, UnitaryMatrix(d.asDiagonal().toDenseMatrix())};
}

/// Invariant scalar product <X, Y> = -(1/a) tr(X Y).
inline double scalar_product(const ComplexMatrix& x, const ComplexMatrix& y, double a) {
  return -(x * y).trace().real() / a;
}

/// The 2-form
///   (1/a) <A^{-1}dA ^ dB B^{-1}> + (1/a) <dA A^{-1} ^ B^{-1}dB>
///   - (1/a) <(AB)^{-1} d(AB) ^ (BA)^{-1} d(BA)>
/// with <alpha ^ beta>(X, Y) = <alpha(X), beta(Y)> - <alpha(Y), beta(X)>.
inline double omega_eval(const DoubleTangent& t1, const DoubleTangent& t2, double a,
                         double base_tol = 1e-12) {
  if (distance(t1.base(), t2.base()) > base_tol) {
    throw Error(ErrorKind::MismatchedBase, "tangents are attached to different points");
  }
  const ComplexMatrix& A = t1.base().A();
  const ComplexMatrix& B = t1.base().B();
  const ComplexMatrix Ai = A.adjoint();
  const ComplexMatrix Bi = B.adjoint();
  const ComplexMatrix ABi = (A * B).adjoint();
  const ComplexMatrix BAi = (B * A).adjoint();

  auto wedge = [&](auto&& alpha, auto&& beta) {
    return scalar_product(alpha(t1), beta(t2), a) - scalar_product(alpha(t2), beta(t1), a);
  };
  const double term1 = wedge([&](const DoubleTangent& t) { return ComplexMatrix(Ai * t.XA()); },
                             [&](const DoubleTangent& t) { return ComplexMatrix(t.XB() * Bi); });
  const double term2 = wedge([&](const DoubleTangent& t) { return ComplexMatrix(t.XA() * Ai); },
                             [&](const DoubleTangent& t) { return ComplexMatrix(Bi * t.XB()); });
  const double term3 = wedge(
      [&](const DoubleTangent& t) { return ComplexMatrix(ABi * (t.XA() * B + A * t.XB())); },
      [&](const DoubleTangent& t) { return ComplexMatrix(BAi * (t.XB() * A + B * t.XA())); });
  return (term1 + term2 - term3) / a;
}

/// Derivative of mu along (X_A, X_B) by the product rule.
inline ComplexMatrix moment_map_differential(const DoublePoint& p, const ComplexMatrix& xa,
                                             const ComplexMatrix& xb) {
  const ComplexMatrix& A = p.A();
  const ComplexMatrix& B = p.B();
  const ComplexMatrix Ai = A.adjoint();
  const ComplexMatrix Bi = B.adjoint();
  return xa * B * Ai * Bi + A * xb * Ai * Bi - A * B * Ai * xa * Ai * Bi -
         A * B * Ai * Bi * xb * Bi;
}

/// Infinitesimal conjugation action zeta_D(A, B) = ([zeta, A], [zeta, B]).
inline DoubleTangent generating_vector(const DoublePoint& p, const ComplexMatrix& zeta) {
  return DoubleTangent(p, zeta * p.A() - p.A() * zeta, zeta * p.B() - p.B() * zeta);
}

/// Simultaneous conjugation Psi_eta(A, B) = (eta A eta^{-1}, eta B eta^{-1}).
inline DoublePoint conjugate(const DoublePoint& p, const ComplexMatrix& eta) {
  const ComplexMatrix ei = eta.adjoint();
  return DoublePoint(eta * p.A() * ei, eta * p.B() * ei);
}

enum class Completion { GramSchmidt, Householder };

/// Unitary matrix whose last column is the unit vector v.
inline ComplexMatrix complete_to_unitary(const ComplexVector& v,
                                         Completion scheme = Completion::GramSchmidt) {
  const Eigen::Index n = v.size();
  ComplexMatrix eta(n, n);
  if (scheme == Completion::Householder) {
    // H = I - 2 w w^H / |w|^2 maps e_n to a phase times v
    ComplexVector en = ComplexVector::Zero(n);
    en(n - 1) = 1.0;
    const Complex vn = v(n - 1);
    const Complex phase = std::abs(vn) > 0.0 ? vn / std::abs(vn) : Complex{1.0, 0.0};
    const ComplexVector w = v - phase * en;
    if (w.norm() < 1e-14) {
      eta = ComplexMatrix::Identity(n, n);
    } else {
      eta = ComplexMatrix::Identity(n, n) - 2.0 * w * w.adjoint() / w.squaredNorm();
    }
    // H e_n = v / phase, so replacing that column by v keeps eta unitary
    eta.col(n - 1) = v;
    return eta;
  }
  // project the standard basis off v, drop the vector most parallel to v,
  // orthonormalize the rest in index order
  Eigen::Index drop = 0;
  v.cwiseAbs().maxCoeff(&drop);
  Eigen::Index col = 0;
  for (Eigen::Index k = 0; k < n; ++k) {
    if (k == drop) continue;
    ComplexVector e = ComplexVector::Zero(n);
    e(k) = 1.0;
    e -= v * v.dot(e);
    for (Eigen::Index c = 0; c < col; ++c) e -= eta.col(c) * eta.col(c).dot(e);
    eta.col(col++) = e.normalized();
  }
  eta.col(n - 1) = v;
  return eta;
}

struct DoubleLift {
  DoublePoint point;
  ComplexVector v_hat;
  ComplexMatrix eta;
};

/// v_j = [sin y / sin ny]^{1/2} W_j(delta(a gamma/2), y).
inline ComplexVector constraint_vector(const DarbouxPoint& p, const CouplingParams& params,
                                       const Tolerances& tol = {}) {
  const int n = params.n();
  const double y = params.y();
  const double ratio = std::sin(y) / std::sin(n * y);
  if (!(ratio > 0.0) || !std::isfinite(ratio)) {
    throw Error(ErrorKind::NonPositiveRatio,
                "sin y / sin ny = " + std::to_string(ratio) + " is not positive");
  }
  const ComplexVector delta = position_diagonal(p, params);
  ComplexVector v(n);
  const double prefactor = std::sqrt(ratio);
  for (int j = 0; j < n; ++j) v(j) = prefactor * w_factor(delta, y, j + 1, tol);
  return v;
}

/// (A, B) = (eta^{-1} L eta, eta^{-1} delta eta) where the last column of
/// eta is v / |v|.
inline DoubleLift lift_to_double(const DarbouxPoint& p, const CouplingParams& params,
                                 const Tolerances& tol = {},
                                 Completion scheme = Completion::GramSchmidt) {
  const UnitaryMatrix lax = lax_matrix(p, params, tol);
  const ComplexVector v = constraint_vector(p, params, tol);
  const ComplexVector v_hat = v / v.norm();
  ComplexMatrix eta = complete_to_unitary(v_hat, scheme);
  const ComplexMatrix delta = position_diagonal(p, params).asDiagonal().toDenseMatrix();
  const ComplexMatrix ei = eta.adjoint();
  DoublePoint point(ei * lax.matrix() * eta, ei * delta * eta, tol.unitarity);
  return DoubleLift{std::move(point), v_hat, std::move(eta)};
}

/// max |L delta L^{-1} delta^{-1} - e^{2iy}(I - (1 - e^{-2niy}) v v^H)|,
/// which only involves v_hat and so does not depend on how eta is completed.
inline double constraint_residual(const DarbouxPoint& p, const CouplingParams& params,
                                  const Tolerances& tol = {}) {
  const int n = params.n();
  const double y = params.y();
  const UnitaryMatrix lax = lax_matrix(p, params, tol);
  const ComplexVector v = constraint_vector(p, params, tol);
  const ComplexVector v_hat = v / v.norm();
  const ComplexMatrix delta = position_diagonal(p, params).asDiagonal().toDenseMatrix();
  const ComplexMatrix lhs = lax.matrix() * delta * lax.matrix().adjoint() * delta.adjoint();
  const ComplexMatrix rhs =
      std::polar(1.0, 2.0 * y) *
      (ComplexMatrix::Identity(n, n) -
       (Complex{1.0, 0.0} - std::polar(1.0, -2.0 * n * y)) * v_hat * v_hat.adjoint());
  return max_abs(lhs - rhs);
}

namespace detail {

// eta(C)^{-1} diag(1,..,e^{i s t},e^{-i s t},..,1) eta(C) with the phase pair at slots (j, j+1)
inline ComplexMatrix torus_factor(const UnitaryMatrix& c, int j, double t, double sign,
                                  double regular_tol, const Tolerances& tol) {
  const auto n = static_cast<int>(c.dim());
  if (j < 1 || j > n - 1) throw Error(ErrorKind::InvalidArgument, "torus index out of range");
  if (!is_regular(c, regular_tol)) {
    throw Error(ErrorKind::NonRegular, "torus flow needs distinct eigenvalues");
  }
  const AlcoveForm form = alcove_reduce(c, tol);
  ComplexVector d = ComplexVector::Ones(n);
  d(j - 1) = std::polar(1.0, sign * t);
  d(j) = std::polar(1.0, -sign * t);
  return form.eta.adjoint() * d.asDiagonal() * form.eta;
}

}  // namespace detail

/// (A, B eta(A)^{-1} diag(..., e^{it}, e^{-it}, ...) eta(A)), j in 1..n-1.
inline DoublePoint torus_flow_alpha(const DoublePoint& p, int j, double t,
                                    double regular_tol = 1e-8, const Tolerances& tol = {}) {
  const ComplexMatrix k = detail::torus_factor(p.unitary_A(), j, t, 1.0, regular_tol, tol);
  return DoublePoint(p.A(), p.B() * k);
}

/// (A eta(B)^{-1} diag(..., e^{-it}, e^{it}, ...) eta(B), B), j in 1..n-1.
inline DoublePoint torus_flow_beta(const DoublePoint& p, int j, double t,
                                   double regular_tol = 1e-8, const Tolerances& tol = {}) {
  const ComplexMatrix k = detail::torus_factor(p.unitary_B(), j, t, -1.0, regular_tol, tol);
  return DoublePoint(p.A() * k, p.B());
}

struct A2Sample {
  double lhs;       // omega(zeta_D, X)
  double rhs;       // (1/2) <mu^{-1} Dmu(X) + Dmu(X) mu^{-1}, zeta>
  double residual;  // |lhs - rhs|
  double ratio;     // lhs / rhs
};

/// Compares both sides of omega(zeta_D, .) = (1/2) mu^* <theta + theta_bar, zeta>
/// on the tangent X.
inline A2Sample axiom_a2_residual(const DoubleTangent& x, const ComplexMatrix& zeta, double a) {
  const DoublePoint& p = x.base();
  const DoubleTangent zeta_d = generating_vector(p, zeta);
  const double lhs = omega_eval(zeta_d, x, a);
  const ComplexMatrix mu = moment_map(p).matrix();
  const ComplexMatrix dmu = moment_map_differential(p, x.XA(), x.XB());
  const ComplexMatrix mui = mu.adjoint();
  const double rhs = 0.5 * scalar_product(mui * dmu + dmu * mui, zeta, a);
  return A2Sample{lhs, rhs, std::abs(lhs - rhs), rhs != 0.0 ? lhs / rhs : 0.0};
}

struct A2Fit {
  double ratio;          // least-squares c in lhs = c rhs
  double max_residual;   // max |lhs - c rhs|
  double ratio_spread;   // max |lhs/rhs - c| over samples with non-negligible rhs
};

inline A2Fit fit_a2_ratio(std::span<const A2Sample> samples) {
  double num = 0.0;
  double den = 0.0;
  for (const auto& s : samples) {
    num += s.lhs * s.rhs;
    den += s.rhs * s.rhs;
  }
  A2Fit fit{den > 0.0 ? num / den : 0.0, 0.0, 0.0};
  for (const auto& s : samples) {
    fit.max_residual = std::max(fit.max_residual, std::abs(s.lhs - fit.ratio * s.rhs));
    if (std::abs(s.rhs) > 1e-6) {
      fit.ratio_spread = std::max(fit.ratio_spread, std::abs(s.lhs / s.rhs - fit.ratio));
    }
  }
  return fit;
}

/// m(A, B) = (conj B, conj A).
inline DoublePoint involution_m(const DoublePoint& p) {
  return DoublePoint(p.B().conjugate(), p.A().conjugate());
}

/// Gamma(u_1, ..., u_{n-1}, u_n) = (conj u_{n-1}, ..., conj u_1, conj u_n).
inline SpherePoint involution_gamma(const SpherePoint& s) {
  SpherePoint out;
  const std::size_t n = s.u.size();
  out.u.resize(n);
  for (std::size_t k = 0; k + 1 < n; ++k) out.u[k] = std::conj(s.u[n - 2 - k]);
  if (n > 0) out.u[n - 1] = std::conj(s.u[n - 1]);
  return out;
}

}  // namespace rscompact
