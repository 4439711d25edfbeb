#pragma once

// The compactified III_b Ruijsenaars-Schneider system in Darboux coordinates
// (gamma, theta) on the interior of the scaled polytope: Lax matrix, local
// Hamiltonian, embedding into the level set of C^n, the action map, and
// finite-difference Poisson bracket / RK4 flow harnesses.

#include <cmath>
#include <complex>
#include <functional>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "rscompact/errors.hpp"
#include "rscompact/matkernel.hpp"

namespace rscompact {

/// Coupling data (n, a, y) together with the derived constants
/// g = 2|y|/a and M = (2/a)(pi - n|y|).
class CouplingParams {
 public:
  /// Raw classical constructor; requires a > 0 and 0 < |y| < pi/n.
  static CouplingParams from_raw(int n, double a, double y) {
    if (n < 2) throw Error(ErrorKind::InvalidArgument, "n must be at least 2");
    if (!(a > 0.0)) throw Error(ErrorKind::InvalidArgument, "a must be positive");
    if (!(std::abs(y) > 0.0) || !(std::abs(y) < kPi / n)) {
      throw Error(ErrorKind::InvalidArgument, "coupling must satisfy 0 < |y| < pi/n");
    }
    return CouplingParams(n, a, y);
  }

  int n() const noexcept { return n_; }
  double a() const noexcept { return a_; }
  double y() const noexcept { return y_; }
  double g() const noexcept { return 2.0 * std::abs(y_) / a_; }
  double M() const noexcept { return (2.0 / a_) * (kPi - n_ * std::abs(y_)); }

 private:
  CouplingParams(int n, double a, double y) : n_(n), a_(a), y_(y) {}
  int n_;
  double a_;
  double y_;
};

/// Inverts g = 2|y|/a, M = (2/a)(pi - n|y|): a = 2 pi/(M + n g), |y| = pi g/(M + n g).
inline CouplingParams derive_params(int n, int M, double g, bool negative_y = false) {
  if (n < 2) throw Error(ErrorKind::InvalidArgument, "n must be at least 2");
  if (M < 1) throw Error(ErrorKind::InvalidArgument, "M must be a positive integer");
  if (!(g > 0.0)) throw Error(ErrorKind::InvalidArgument, "g must be positive");
  const double denom = M + n * g;
  const double y = kPi * g / denom;
  return CouplingParams::from_raw(n, kTwoPi / denom, negative_y ? -y : y);
}

/// gamma_j >= g, sum gamma <= M + (n-1) g.
struct Polytope {
  int n;
  double g;
  double M;

  double cap() const noexcept { return M + (n - 1) * g; }
  bool nonempty() const noexcept { return M > 0.0; }
  std::vector<double> centroid() const {
    return std::vector<double>(static_cast<std::size_t>(n - 1), g + M / n);
  }
};

inline Polytope polytope_of(const CouplingParams& params) {
  return Polytope{params.n(), params.g(), params.M()};
}

enum class Membership { Interior, Boundary, Outside };

inline std::string_view to_string(Membership m) {
  switch (m) {
    case Membership::Interior: return "Interior";
    case Membership::Boundary: return "Boundary";
    case Membership::Outside: return "Outside";
  }
  return "Unknown";
}

inline Membership polytope_membership(std::span<const double> point, const Polytope& poly,
                                      double tol) {
  if (point.size() != static_cast<std::size_t>(poly.n - 1)) {
    throw Error(ErrorKind::InvalidArgument, "point dimension must be n-1");
  }
  bool boundary = false;
  double sum = 0.0;
  for (double v : point) {
    const double slack = v - poly.g;
    if (slack < -tol) return Membership::Outside;
    if (slack <= tol) boundary = true;
    sum += v;
  }
  const double slack = poly.cap() - sum;
  if (slack < -tol) return Membership::Outside;
  if (slack <= tol) boundary = true;
  return boundary ? Membership::Boundary : Membership::Interior;
}

/// Point (gamma, theta) of the Darboux chart; both have n-1 entries and
/// tau_j = exp(i theta_j).
struct DarbouxPoint {
  std::vector<double> gamma;
  std::vector<double> theta;

  std::size_t dim() const noexcept { return gamma.size(); }
};

namespace detail {

inline void require_shape(const DarbouxPoint& p, const CouplingParams& params) {
  const auto m = static_cast<std::size_t>(params.n() - 1);
  if (p.gamma.size() != m || p.theta.size() != m) {
    throw Error(ErrorKind::InvalidArgument, "Darboux point must have n-1 gamma and theta entries");
  }
}

// Distance of gamma to the nearest facet of the scaled polytope.
inline double facet_slack(const DarbouxPoint& p, const CouplingParams& params) {
  const double g = params.g();
  double slack = std::numeric_limits<double>::infinity();
  double sum = 0.0;
  for (double v : p.gamma) {
    slack = std::min(slack, v - g);
    sum += v;
  }
  return std::min(slack, params.M() + (params.n() - 1) * g - sum);
}

inline void require_strict_interior(const DarbouxPoint& p, const CouplingParams& params,
                                    double radius) {
  require_shape(p, params);
  const double slack = facet_slack(p, params);
  if (!(slack > radius)) {
    throw Error(ErrorKind::OutsideDomain,
                "point lies within " + std::to_string(radius) + " of a polytope facet (slack " +
                    std::to_string(slack) + ")");
  }
}

}  // namespace detail

/// Diagonal of the position matrix delta(a gamma/2) = exp(-i a sum gamma_k Lambda_k).
inline ComplexVector position_diagonal(const DarbouxPoint& p, const CouplingParams& params) {
  std::vector<double> half(p.gamma.size());
  for (std::size_t k = 0; k < half.size(); ++k) half[k] = 0.5 * params.a() * p.gamma[k];
  return weight_exponential(half);
}

/// Diagonal of Theta(tau) = exp(-i sum theta_k (E_kk - E_{k+1,k+1})).
inline ComplexVector momentum_diagonal(std::span<const double> theta) {
  const auto n = static_cast<Eigen::Index>(theta.size()) + 1;
  ComplexVector d(n);
  for (Eigen::Index l = 0; l < n; ++l) {
    const double cur = l < n - 1 ? theta[static_cast<std::size_t>(l)] : 0.0;
    const double prev = l > 0 ? theta[static_cast<std::size_t>(l - 1)] : 0.0;
    d(l) = std::polar(1.0, -(cur - prev));
  }
  return d;
}

/// W_j(delta, y) = prod_{k != j} [(e^{iy} delta_j - e^{-iy} delta_k) / (delta_j - delta_k)]^{1/2},
/// j in 1..n. Every bracket must be a positive real.
inline double w_factor(const ComplexVector& delta, double y, int j, const Tolerances& tol = {}) {
  const Eigen::Index n = delta.size();
  if (j < 1 || j > n) throw Error(ErrorKind::InvalidArgument, "W index out of range");
  const Eigen::Index jj = j - 1;
  const Complex ep = std::polar(1.0, y);
  const Complex em = std::polar(1.0, -y);
  double product = 1.0;
  for (Eigen::Index k = 0; k < n; ++k) {
    if (k == jj) continue;
    const Complex den = delta(jj) - delta(k);
    if (std::abs(den) < tol.singular) {
      throw Error(ErrorKind::SingularConfiguration,
                  "coinciding positions delta_" + std::to_string(j) + " and delta_" +
                      std::to_string(k + 1));
    }
    const Complex bracket = (ep * delta(jj) - em * delta(k)) / den;
    if (!(bracket.real() > 0.0) || std::abs(bracket.imag()) > tol.bracket_imag) {
      throw Error(ErrorKind::NonPositiveFactor,
                  "W bracket (" + std::to_string(bracket.real()) + ", " +
                      std::to_string(bracket.imag()) + ") is not a positive real");
    }
    product *= std::sqrt(bracket.real());
  }
  return product;
}

/// Lax matrix L_jl = (e^{iy} - e^{-iy}) / (e^{iy} delta_j/delta_l - e^{-iy})
///                   * W_j(delta, y) W_l(delta, -y) Theta_l.
inline UnitaryMatrix lax_matrix(const DarbouxPoint& p, const CouplingParams& params,
                                const Tolerances& tol = {}) {
  detail::require_strict_interior(p, params, tol.facet_refusal);
  const int n = params.n();
  const double y = params.y();
  const ComplexVector delta = position_diagonal(p, params);
  const ComplexVector theta = momentum_diagonal(p.theta);
  std::vector<double> w_plus(static_cast<std::size_t>(n));
  std::vector<double> w_minus(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) {
    w_plus[j] = w_factor(delta, y, j + 1, tol);
    w_minus[j] = w_factor(delta, -y, j + 1, tol);
  }
  const Complex ep = std::polar(1.0, y);
  const Complex em = std::polar(1.0, -y);
  ComplexMatrix lax(n, n);
  for (int j = 0; j < n; ++j) {
    for (int l = 0; l < n; ++l) {
      const Complex den = ep * delta(j) / delta(l) - em;
      if (std::abs(den) < tol.singular) {
        throw Error(ErrorKind::DenominatorSingular, "Lax denominator vanishes");
      }
      lax(j, l) = (ep - em) / den * w_plus[j] * w_minus[l] * theta(l);
    }
  }
  return UnitaryMatrix(std::move(lax), tol.unitarity);
}

/// H = sum_j cos p_j prod_{k != j} [1 - sin^2 y / sin^2(a(x_j - x_k)/2)]^{1/2},
/// evaluated in the real sum-product form with a x_j read off delta(a gamma/2)
/// and p_j = theta_j - theta_{j-1}.
inline double local_hamiltonian(const DarbouxPoint& p, const CouplingParams& params) {
  detail::require_shape(p, params);
  const int n = params.n();
  const double a = params.a();
  const double s2y = std::sin(params.y()) * std::sin(params.y());
  // a x_m = -a sum_k gamma_k (Lambda_k)_mm
  std::vector<double> ax(static_cast<std::size_t>(n), 0.0);
  for (int k = 1; k < n; ++k) {
    for (int m = 0; m < n; ++m) {
      const double weight = (m < k ? 1.0 : 0.0) - static_cast<double>(k) / n;
      ax[m] -= a * p.gamma[k - 1] * weight;
    }
  }
  double h = 0.0;
  for (int j = 0; j < n; ++j) {
    const double cur = j < n - 1 ? p.theta[j] : 0.0;
    const double prev = j > 0 ? p.theta[j - 1] : 0.0;
    double product = 1.0;
    for (int k = 0; k < n; ++k) {
      if (k == j) continue;
      const double s = std::sin(0.5 * (ax[j] - ax[k]));
      const double radicand = 1.0 - s2y / (s * s);
      if (radicand < 0.0) {
        throw Error(ErrorKind::NegativeRadicand,
                    "local Hamiltonian radicand " + std::to_string(radicand) + " < 0");
      }
      product *= std::sqrt(radicand);
    }
    h += std::cos(cur - prev) * product;
  }
  return h;
}

/// Point u of C^n on the level set sum |u_k|^2 = M.
struct SpherePoint {
  std::vector<Complex> u;

  double chi() const {
    return std::accumulate(u.begin(), u.end(), 0.0,
                           [](double acc, Complex z) { return acc + std::norm(z); });
  }
};

/// u_j = tau_j sqrt(gamma_j - g), u_n = sqrt(M + (n-1) g - sum gamma).
inline SpherePoint embed_sphere(const DarbouxPoint& p, const CouplingParams& params,
                                double tol = 1e-12) {
  detail::require_shape(p, params);
  const Polytope poly = polytope_of(params);
  if (polytope_membership(p.gamma, poly, tol) == Membership::Outside) {
    throw Error(ErrorKind::OutsideDomain, "gamma outside the closed polytope");
  }
  SpherePoint out;
  out.u.reserve(p.gamma.size() + 1);
  double sum = 0.0;
  for (std::size_t j = 0; j < p.gamma.size(); ++j) {
    out.u.push_back(std::polar(std::sqrt(std::max(0.0, p.gamma[j] - poly.g)), p.theta[j]));
    sum += p.gamma[j];
  }
  out.u.emplace_back(std::sqrt(std::max(0.0, poly.cap() - sum)), 0.0);
  return out;
}

/// Differential of embed_sphere at p applied to the tangent (d_gamma, d_theta).
inline std::vector<Complex> embed_sphere_differential(const DarbouxPoint& p,
                                                      const CouplingParams& params,
                                                      std::span<const double> d_gamma,
                                                      std::span<const double> d_theta) {
  detail::require_strict_interior(p, params, 0.0);
  const Polytope poly = polytope_of(params);
  std::vector<Complex> du;
  double sum = 0.0;
  double d_sum = 0.0;
  for (std::size_t j = 0; j < p.gamma.size(); ++j) {
    const double r = std::sqrt(p.gamma[j] - poly.g);
    const Complex tau = std::polar(1.0, p.theta[j]);
    du.push_back(tau * Complex(d_gamma[j] / (2.0 * r), r * d_theta[j]));
    sum += p.gamma[j];
    d_sum += d_gamma[j];
  }
  du.emplace_back(-d_sum / (2.0 * std::sqrt(poly.cap() - sum)), 0.0);
  return du;
}

/// Darboux form i sum d(conj u_k) ^ du_k on C^n evaluated on two tangents.
inline double sphere_form(std::span<const Complex> v, std::span<const Complex> w) {
  Complex acc{0.0, 0.0};
  for (std::size_t k = 0; k < v.size(); ++k) acc += std::conj(v[k]) * w[k];
  return -2.0 * acc.imag();
}

/// Action variables (2/a) xi_k(L(p)), k = 1..n-1.
inline std::vector<double> action_map(const DarbouxPoint& p, const CouplingParams& params,
                                      const Tolerances& tol = {}) {
  const UnitaryMatrix lax = lax_matrix(p, params, tol);
  const AlcoveForm form = alcove_reduce(lax, tol);
  std::vector<double> actions(static_cast<std::size_t>(params.n() - 1));
  for (std::size_t k = 0; k < actions.size(); ++k) actions[k] = 2.0 / params.a() * form.xi[k];
  return actions;
}

using ScalarField = std::function<double(const DarbouxPoint&)>;

inline ScalarField hamiltonian_field(const CouplingParams& params) {
  return [params](const DarbouxPoint& p) { return local_hamiltonian(p, params); };
}

/// alpha_k as a field, k in 1..n-1.
inline ScalarField action_field(const CouplingParams& params, int k, const Tolerances& tol = {}) {
  return [params, k, tol](const DarbouxPoint& p) {
    return action_map(p, params, tol)[static_cast<std::size_t>(k - 1)];
  };
}

inline ScalarField position_field(int k) {
  return [k](const DarbouxPoint& p) { return p.gamma[static_cast<std::size_t>(k - 1)]; };
}

inline ScalarField angle_field(int k) {
  return [k](const DarbouxPoint& p) { return p.theta[static_cast<std::size_t>(k - 1)]; };
}

enum class Stencil { Central2, Central4 };

struct Gradient {
  std::vector<double> d_gamma;
  std::vector<double> d_theta;
};

namespace detail {

inline double directional_fd(const ScalarField& f, const DarbouxPoint& p, bool angle,
                             std::size_t k, double step, Stencil stencil) {
  auto eval = [&](double offset) {
    DarbouxPoint q = p;
    (angle ? q.theta : q.gamma)[k] += offset;
    return f(q);
  };
  if (stencil == Stencil::Central2) {
    return (eval(step) - eval(-step)) / (2.0 * step);
  }
  return (-eval(2.0 * step) + 8.0 * eval(step) - 8.0 * eval(-step) + eval(-2.0 * step)) /
         (12.0 * step);
}

}  // namespace detail

inline Gradient gradient_fd(const ScalarField& f, const DarbouxPoint& p, double step,
                            Stencil stencil = Stencil::Central2) {
  Gradient grad;
  grad.d_gamma.resize(p.dim());
  grad.d_theta.resize(p.dim());
  for (std::size_t k = 0; k < p.dim(); ++k) {
    grad.d_gamma[k] = detail::directional_fd(f, p, false, k, step, stencil);
    grad.d_theta[k] = detail::directional_fd(f, p, true, k, step, stencil);
  }
  return grad;
}

/// {F, G} = sum_k (dF/dtheta_k dG/dgamma_k - dF/dgamma_k dG/dtheta_k), central differences.
inline double poisson_bracket_fd(const ScalarField& f, const ScalarField& g, const DarbouxPoint& p,
                                 double step) {
  const Gradient gf = gradient_fd(f, p, step);
  const Gradient gg = gradient_fd(g, p, step);
  double bracket = 0.0;
  for (std::size_t k = 0; k < p.dim(); ++k) {
    bracket += gf.d_theta[k] * gg.d_gamma[k] - gf.d_gamma[k] * gg.d_theta[k];
  }
  return bracket;
}

struct FlowOptions {
  double fd_step = 1e-4;
  Stencil stencil = Stencil::Central4;
  // points closer than this to a facet count as having left the interior
  double facet_margin = 1e-8;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<DarbouxPoint> points;
  bool exited = false;
};

/// Classical RK4 on dgamma/dt = dh/dtheta, dtheta/dt = -dh/dgamma with
/// finite-difference gradients. The trajectory is truncated at the last
/// point that stays in the strict interior.
inline Trajectory flow_rk4(const ScalarField& h, const DarbouxPoint& p0,
                           const CouplingParams& params, double t_final, double dt,
                           const FlowOptions& options = {}) {
  detail::require_shape(p0, params);
  if (!(dt > 0.0) || !(t_final >= 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "flow needs dt > 0 and t_final >= 0");
  }
  detail::require_strict_interior(p0, params, options.facet_margin);

  const std::size_t m = p0.dim();
  auto rhs = [&](const DarbouxPoint& p) {
    const Gradient grad = gradient_fd(h, p, options.fd_step, options.stencil);
    Gradient v;
    v.d_gamma = grad.d_theta;
    v.d_theta.resize(m);
    for (std::size_t k = 0; k < m; ++k) v.d_theta[k] = -grad.d_gamma[k];
    return v;
  };
  auto shifted = [&](const DarbouxPoint& p, const Gradient& v, double s) {
    DarbouxPoint q = p;
    for (std::size_t k = 0; k < m; ++k) {
      q.gamma[k] += s * v.d_gamma[k];
      q.theta[k] += s * v.d_theta[k];
    }
    return q;
  };

  Trajectory traj;
  traj.times.push_back(0.0);
  traj.points.push_back(p0);
  const auto steps = static_cast<long>(std::llround(t_final / dt));
  DarbouxPoint cur = p0;
  for (long step = 1; step <= steps; ++step) {
    DarbouxPoint next;
    try {
      const Gradient k1 = rhs(cur);
      const Gradient k2 = rhs(shifted(cur, k1, 0.5 * dt));
      const Gradient k3 = rhs(shifted(cur, k2, 0.5 * dt));
      const Gradient k4 = rhs(shifted(cur, k3, dt));
      next = cur;
      for (std::size_t k = 0; k < m; ++k) {
        next.gamma[k] += dt / 6.0 *
                         (k1.d_gamma[k] + 2.0 * k2.d_gamma[k] + 2.0 * k3.d_gamma[k] + k4.d_gamma[k]);
        next.theta[k] += dt / 6.0 *
                         (k1.d_theta[k] + 2.0 * k2.d_theta[k] + 2.0 * k3.d_theta[k] + k4.d_theta[k]);
      }
    } catch (const Error&) {
      traj.exited = true;
      break;
    }
    if (!(detail::facet_slack(next, params) > options.facet_margin)) {
      traj.exited = true;
      break;
    }
    cur = std::move(next);
    traj.times.push_back(static_cast<double>(step) * dt);
    traj.points.push_back(cur);
  }
  return traj;
}

}  // namespace rscompact
