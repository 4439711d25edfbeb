#pragma once

// Seeded invariant sweeps behind `rscompact verify`. Each suite returns a
// report with one entry per check: sample count, worst residual, tolerance.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rscompact/matkernel.hpp"
#include "rscompact/qh_double.hpp"
#include "rscompact/quantum.hpp"
#include "rscompact/rs_classical.hpp"
#include "rscompact/sampling.hpp"

namespace rscompact {

struct Check {
  std::string name;
  std::size_t samples = 0;
  double max_residual = 0.0;
  double tolerance = 0.0;
  bool asserted = true;
  bool pass = true;
  std::string note;
};

struct VerifyReport {
  std::string suite;
  std::vector<Check> checks;

  bool pass() const {
    return std::all_of(checks.begin(), checks.end(),
                       [](const Check& c) { return !c.asserted || c.pass; });
  }
};

struct VerifyConfig {
  CouplingParams params;
  std::optional<int> M;  // integer M, needed by the quantum suite
  std::uint64_t seed = kDefaultSeed;
  int samples = 100;
  Tolerances tol;
};

namespace detail {

// Accumulates the worst residual of one check across samples.
class CheckBuilder {
 public:
  CheckBuilder(std::string name, double tolerance, bool asserted = true) {
    check_.name = std::move(name);
    check_.tolerance = tolerance;
    check_.asserted = asserted;
  }

  void add(double residual) {
    ++check_.samples;
    if (!(residual <= check_.max_residual)) check_.max_residual = residual;
    if (std::isnan(residual)) check_.max_residual = residual;
  }
  void fail(const std::string& why) {
    ++check_.samples;
    failed_ = true;
    if (check_.note.empty()) check_.note = why;
  }
  void note(std::string text) { check_.note = std::move(text); }
  std::size_t samples() const noexcept { return check_.samples; }

  Check finish() {
    check_.pass = !failed_ && !std::isnan(check_.max_residual) &&
                  check_.max_residual < check_.tolerance;
    return check_;
  }

 private:
  Check check_;
  bool failed_ = false;
};

inline double polytope_violation(std::span<const double> point, const Polytope& poly) {
  double worst = 0.0;
  double sum = 0.0;
  for (double v : point) {
    worst = std::max(worst, poly.g - v);
    sum += v;
  }
  return std::max(worst, sum - poly.cap());
}

// Ascending eigenphases.
inline std::vector<double> sorted_phases(const UnitaryMatrix& u) { return eig_unitary(u).phases; }

inline double phase_set_distance(std::vector<double> p, std::vector<double> q) {
  std::sort(p.begin(), p.end());
  std::sort(q.begin(), q.end());
  double worst = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) {
    worst = std::max(worst, std::abs(std::polar(1.0, p[k]) - std::polar(1.0, q[k])));
  }
  return worst;
}

// mu along the straight line (A + t X_A, B + t X_B), with true inverses.
inline ComplexMatrix linear_path_mu(const DoublePoint& p, const ComplexMatrix& xa,
                                    const ComplexMatrix& xb, double t) {
  const ComplexMatrix a = p.A() + t * xa;
  const ComplexMatrix b = p.B() + t * xb;
  return a * b * a.inverse() * b.inverse();
}

}  // namespace detail

/// Brute-force e_r over all r-subsets, for cross-checking the recurrence.
inline std::vector<Complex> elementary_symmetric_subsets(std::span<const Complex> x) {
  const std::size_t n = x.size();
  std::vector<Complex> e(n + 1, Complex{0.0, 0.0});
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
    Complex prod{1.0, 0.0};
    int bits = 0;
    for (std::size_t k = 0; k < n; ++k) {
      if (mask & (std::uint64_t{1} << k)) {
        prod *= x[k];
        ++bits;
      }
    }
    e[static_cast<std::size_t>(bits)] += prod;
  }
  return e;
}

inline VerifyReport verify_classical(const VerifyConfig& cfg) {
  const CouplingParams& params = cfg.params;
  const Polytope poly = polytope_of(params);
  const int n = params.n();

  detail::CheckBuilder unitarity("lax_unitarity", 1e-9);
  detail::CheckBuilder trace("trace_identity", 1e-10);
  detail::CheckBuilder det("lax_determinant", 1e-9, false);
  detail::CheckBuilder containment("action_containment", 1e-10);
  detail::CheckBuilder brackets("action_brackets", 1e-5);
  detail::CheckBuilder pullback("darboux_pullback", 1e-8);
  detail::CheckBuilder level("sphere_level", 1e-12 * std::max(1.0, poly.M));

  for (int s = 0; s < cfg.samples; ++s) {
    Rng rng = sample_rng(cfg.seed, static_cast<std::uint64_t>(s));
    const DarbouxPoint p = random_interior_point(params, rng);
    try {
      const UnitaryMatrix lax = lax_matrix(p, params, cfg.tol);
      unitarity.add(unitarity_defect(lax.matrix()));
      trace.add(std::abs(lax.matrix().trace().real() - local_hamiltonian(p, params)));
      det.add(std::abs(lax.determinant() - Complex{1.0, 0.0}));
      containment.add(detail::polytope_violation(action_map(p, params, cfg.tol), poly));
      for (int j = 1; j < n; ++j) {
        for (int k = j + 1; k < n; ++k) {
          brackets.add(std::abs(poisson_bracket_fd(action_field(params, j, cfg.tol),
                                                   action_field(params, k, cfg.tol), p, 1e-4)));
        }
      }
      level.add(std::abs(embed_sphere(p, params).chi() - poly.M));

      std::uniform_real_distribution<double> unit(-1.0, 1.0);
      std::vector<double> xg(n - 1), xt(n - 1), yg(n - 1), yt(n - 1);
      for (int k = 0; k < n - 1; ++k) {
        xg[k] = unit(rng);
        xt[k] = unit(rng);
        yg[k] = unit(rng);
        yt[k] = unit(rng);
      }
      const auto du = embed_sphere_differential(p, params, xg, xt);
      const auto dv = embed_sphere_differential(p, params, yg, yt);
      double darboux = 0.0;  // sum dtheta ^ dgamma
      for (int k = 0; k < n - 1; ++k) darboux += xt[k] * yg[k] - yt[k] * xg[k];
      pullback.add(std::abs(sphere_form(du, dv) - darboux));
    } catch (const Error& e) {
      unitarity.fail(e.what());
    }
  }
  if (n == 2) brackets.note("n = 2 has a single action variable; no pairs");

  // conservation along a few RK4 flows of H started well inside the polytope
  detail::CheckBuilder flow_h("flow_energy", 1e-8);
  detail::CheckBuilder flow_alpha("flow_actions", 1e-6);
  const int flows = std::min(cfg.samples, 2);
  for (int s = 0; s < flows; ++s) {
    Rng rng = sample_rng(cfg.seed ^ 0xF10Full, static_cast<std::uint64_t>(s));
    const DarbouxPoint p0 = random_interior_point(params, rng, 0.8 / n);
    const Trajectory traj = flow_rk4(hamiltonian_field(params), p0, params, 1.0, 1e-3);
    const double h0 = local_hamiltonian(p0, params);
    const auto alpha0 = action_map(p0, params, cfg.tol);
    double dh = 0.0;
    double dalpha = 0.0;
    for (const auto& q : traj.points) {
      dh = std::max(dh, std::abs(local_hamiltonian(q, params) - h0));
      const auto alpha = action_map(q, params, cfg.tol);
      for (std::size_t k = 0; k < alpha.size(); ++k) {
        dalpha = std::max(dalpha, std::abs(alpha[k] - alpha0[k]));
      }
    }
    flow_h.add(dh);
    flow_alpha.add(dalpha);
    if (traj.exited) flow_h.note("a trajectory left the interior and was truncated");
  }

  VerifyReport report{"classical", {}};
  for (auto* b : {&unitarity, &trace, &det, &containment, &brackets, &pullback, &level, &flow_h,
                  &flow_alpha}) {
    report.checks.push_back(b->finish());
  }
  return report;
}

inline VerifyReport verify_double(const VerifyConfig& cfg) {
  const CouplingParams& params = cfg.params;
  const int n = params.n();
  const double a = params.a();
  const Mu0 target = mu0(n, params.y());
  const auto target_phases = detail::sorted_phases(target.value);

  detail::CheckBuilder constraint("constraint_residual", 1e-8);
  detail::CheckBuilder completion("completion_independence", 1e-10);
  detail::CheckBuilder spectrum("mu_spectrum", 1e-8);
  detail::CheckBuilder recovery("spectral_recovery", 1e-9);
  detail::CheckBuilder periodic("torus_periodicity", 1e-12);
  detail::CheckBuilder commute("torus_commutation", 1e-10);
  detail::CheckBuilder preserve("torus_mu_preservation", 1e-10);
  detail::CheckBuilder equivariance("mu_equivariance", 1e-12);
  detail::CheckBuilder antisym("omega_antisymmetry", 1e-12);
  detail::CheckBuilder invariance("omega_invariance", 1e-10);
  detail::CheckBuilder dmu("dmu_finite_difference", 1e-7);
  detail::CheckBuilder involutions("involutions", 1e-15);
  std::vector<A2Sample> a2_samples;

  for (int s = 0; s < cfg.samples; ++s) {
    Rng rng = sample_rng(cfg.seed, static_cast<std::uint64_t>(s));
    const DarbouxPoint p = random_interior_point(params, rng);
    try {
      constraint.add(constraint_residual(p, params, cfg.tol));
      const DoubleLift lift = lift_to_double(p, params, cfg.tol);
      const DoubleLift other = lift_to_double(p, params, cfg.tol, Completion::Householder);
      {
        const AlcoveForm xa_gs = alcove_reduce(lift.point.unitary_A(), cfg.tol);
        const AlcoveForm xa_hh = alcove_reduce(other.point.unitary_A(), cfg.tol);
        double diff = max_abs(moment_map(lift.point).matrix() - moment_map(other.point).matrix());
        for (int k = 0; k < n; ++k) diff = std::max(diff, std::abs(xa_gs.xi[k] - xa_hh.xi[k]));
        completion.add(diff);
      }
      const UnitaryMatrix mu = moment_map(lift.point);
      spectrum.add(std::max(detail::phase_set_distance(detail::sorted_phases(mu), target_phases),
                            max_abs(mu.matrix() - target.value.matrix())));

      const AlcoveForm xa = alcove_reduce(lift.point.unitary_A(), cfg.tol);
      const AlcoveForm xb = alcove_reduce(lift.point.unitary_B(), cfg.tol);
      const auto alpha = action_map(p, params, cfg.tol);
      double rec = 0.0;
      for (int k = 0; k < n - 1; ++k) {
        rec = std::max(rec, std::abs(2.0 / a * xa.xi[k] - alpha[k]));
        rec = std::max(rec, std::abs(2.0 / a * xb.xi[k] - p.gamma[k]));
      }
      recovery.add(rec);

      std::uniform_real_distribution<double> time(-kPi, kPi);
      for (int j = 1; j < n; ++j) {
        periodic.add(distance(torus_flow_alpha(lift.point, j, kTwoPi), lift.point));
        periodic.add(distance(torus_flow_beta(lift.point, j, kTwoPi), lift.point));
        const double t = time(rng);
        preserve.add(max_abs(moment_map(torus_flow_alpha(lift.point, j, t)).matrix() -
                             mu.matrix()));
        preserve.add(max_abs(moment_map(torus_flow_beta(lift.point, j, t)).matrix() -
                             mu.matrix()));
        for (int k = j + 1; k < n; ++k) {
          const double u = time(rng);
          commute.add(distance(torus_flow_alpha(torus_flow_alpha(lift.point, j, t), k, u),
                               torus_flow_alpha(torus_flow_alpha(lift.point, k, u), j, t)));
          commute.add(distance(torus_flow_beta(torus_flow_beta(lift.point, j, t), k, u),
                               torus_flow_beta(torus_flow_beta(lift.point, k, u), j, t)));
        }
      }
    } catch (const Error& e) {
      constraint.fail(e.what());
    }

    // generic points of the double for the structural identities
    const DoublePoint q(random_special_unitary(n, rng), random_special_unitary(n, rng));
    const ComplexMatrix eta = random_special_unitary(n, rng);
    const ComplexMatrix mu_q = moment_map(q).matrix();
    equivariance.add(max_abs(moment_map(conjugate(q, eta)).matrix() - eta * mu_q * eta.adjoint()));

    const DoubleTangent x(q, q.A() * random_su_algebra(n, rng), q.B() * random_su_algebra(n, rng));
    const DoubleTangent y(q, q.A() * random_su_algebra(n, rng), q.B() * random_su_algebra(n, rng));
    antisym.add(std::abs(omega_eval(x, y, a) + omega_eval(y, x, a)));
    const DoublePoint qe = conjugate(q, eta);
    const DoubleTangent xe(qe, eta * x.XA() * eta.adjoint(), eta * x.XB() * eta.adjoint());
    const DoubleTangent ye(qe, eta * y.XA() * eta.adjoint(), eta * y.XB() * eta.adjoint());
    invariance.add(std::abs(omega_eval(xe, ye, a) - omega_eval(x, y, a)));

    constexpr double h = 1e-6;
    const ComplexMatrix fd =
        (detail::linear_path_mu(q, x.XA(), x.XB(), h) - detail::linear_path_mu(q, x.XA(), x.XB(), -h)) /
        (2.0 * h);
    dmu.add(max_abs(fd - moment_map_differential(q, x.XA(), x.XB())));

    const ComplexMatrix zeta = random_su_algebra(n, rng);
    a2_samples.push_back(axiom_a2_residual(x, zeta, a));

    const DoublePoint mm = involution_m(involution_m(q));
    involutions.add(distance(mm, q));
  }

  VerifyReport report{"double", {}};
  for (auto* b : {&constraint, &completion, &spectrum, &recovery, &periodic, &commute, &preserve,
                  &equivariance, &antisym, &invariance, &dmu, &involutions}) {
    report.checks.push_back(b->finish());
  }

  const A2Fit fit = fit_a2_ratio(a2_samples);
  Check ratio{"a2_ratio_constancy", a2_samples.size(), fit.ratio_spread, 1e-6, true,
              fit.ratio_spread < 1e-6, "fitted ratio " + std::to_string(fit.ratio)};
  Check fitted{"a2_fitted_residual", a2_samples.size(), fit.max_residual, 1e-6, true,
               fit.max_residual < 1e-6, ""};
  report.checks.push_back(ratio);
  report.checks.push_back(fitted);
  return report;
}

inline VerifyReport verify_quantum(const QuantizationData& q, const Tolerances& = {}) {
  const Polytope poly = polytope_of(q.params);
  detail::CheckBuilder count("state_count", 0.5);
  detail::CheckBuilder actions("action_tuples", 1e-15);
  detail::CheckBuilder containment("lattice_containment", 0.5);
  detail::CheckBuilder interior("interior_lattice_points", 0.5);
  detail::CheckBuilder det("e_n_unit", 1e-12);
  detail::CheckBuilder oracle("symmetric_function_oracle", 1e-12);
  detail::CheckBuilder conjugate_sym("conjugation_symmetry", 1e-12);
  detail::CheckBuilder multiplicity("action_multiplicity", 0.5);

  const auto states = enumerate_states(q.n, q.M);
  count.add(std::abs(static_cast<double>(states.size()) -
                     static_cast<double>(state_count(q.n, q.M))));
  for (const auto& s : states) {
    const auto act = action_spectrum(s, q.g);
    double dev = 0.0;
    for (std::size_t k = 0; k < act.size(); ++k) dev = std::max(dev, std::abs(act[k] - (s.nu[k] + q.g)));
    actions.add(dev);

    // integer form of gamma_k >= g and sum gamma <= M + (n-1) g
    const bool inside = std::all_of(s.nu.begin(), s.nu.end(), [](int v) { return v >= 0; }) &&
                        s.total() <= q.M;
    const bool float_inside =
        polytope_membership(act, poly, 1e-9 * std::max(1.0, poly.cap())) != Membership::Outside;
    containment.add(inside && float_inside ? 0.0 : 1.0);

    const bool strictly = std::all_of(s.nu.begin(), s.nu.end(), [](int v) { return v >= 1; }) &&
                          s.total() <= q.M - 1;
    if (strictly) {
      interior.add(polytope_membership(act, poly, 1e-9) == Membership::Interior ? 0.0 : 1.0);
    }

    const auto h = hamiltonian_eigenvalues(s, q);
    det.add(std::abs(h.e_n - Complex{1.0, 0.0}));
    const ComplexVector d = quantum_position_diagonal(s, q);
    const std::vector<Complex> entries(d.data(), d.data() + d.size());
    const auto brute = elementary_symmetric_subsets(entries);
    double diff = 0.0;
    for (int r = 1; r < q.n; ++r) diff = std::max(diff, std::abs(brute[r] - h.e[r - 1]));
    oracle.add(diff);
    double sym = 0.0;
    for (int r = 1; r < q.n; ++r) {
      sym = std::max(sym, std::abs(h.e[q.n - r - 1] - std::conj(h.e[r - 1])));
    }
    conjugate_sym.add(sym);
  }
  if (interior.samples() == 0) interior.note("no lattice point off the facets");

  const SpectrumTable table = spectrum_table(q);
  multiplicity.add(std::abs(table.max_action_multiplicity - 1.0));
  Check hdist{"hamiltonian_min_distance", table.rows.size(),
              std::isfinite(table.min_hamiltonian_distance) ? table.min_hamiltonian_distance : 0.0,
              0.0, false, true,
              "reported, not asserted; complex tuples " +
                  (std::isfinite(table.min_complex_distance)
                       ? std::to_string(table.min_complex_distance)
                       : std::string("n/a"))};

  VerifyReport report{"quantum", {}};
  for (auto* b : {&count, &actions, &containment, &interior, &det, &oracle, &conjugate_sym,
                  &multiplicity}) {
    report.checks.push_back(b->finish());
  }
  report.checks.push_back(hdist);
  return report;
}

/// Runs "classical", "double", "quantum" or "all". The quantum suite needs
/// an integer M in the config.
inline std::vector<VerifyReport> run_suite(const std::string& suite, const VerifyConfig& cfg) {
  std::vector<VerifyReport> out;
  const bool all = suite == "all";
  if (!all && suite != "classical" && suite != "double" && suite != "quantum") {
    throw Error(ErrorKind::InvalidArgument, "unknown suite '" + suite + "'");
  }
  if ((all || suite == "quantum") && !cfg.M) {
    throw Error(ErrorKind::InvalidArgument, "the quantum suite needs an integer M");
  }
  if (all || suite == "classical") out.push_back(verify_classical(cfg));
  if (all || suite == "double") out.push_back(verify_double(cfg));
  if (all || suite == "quantum") {
    const double g = cfg.params.g();
    out.push_back(verify_quantum(QuantizationData{cfg.params.n(), *cfg.M, g, cfg.params}, cfg.tol));
  }
  return out;
}

}  // namespace rscompact
