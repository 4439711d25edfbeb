#pragma once

// State lattice of the Kahler-quantized phase space and the closed-form joint
// spectra of the quantized action variables and commuting Hamiltonians.

#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "rscompact/errors.hpp"
#include "rscompact/matkernel.hpp"
#include "rscompact/rs_classical.hpp"

namespace rscompact {

struct QuantizationData {
  int n;
  int M;
  double g;
  CouplingParams params;

  static QuantizationData make(int n, int M, double g) {
    return QuantizationData{n, M, g, derive_params(n, M, g)};
  }
};

/// Lattice point nu in Z_{>=0}^{n-1} with sum nu <= M.
struct StateIndex {
  std::vector<int> nu;

  int total() const {
    int s = 0;
    for (int v : nu) s += v;
    return s;
  }
  friend bool operator==(const StateIndex&, const StateIndex&) = default;
  friend auto operator<=>(const StateIndex&, const StateIndex&) = default;
};

namespace detail {

inline void fill_states(std::vector<int>& nu, std::size_t pos, int remaining,
                        std::vector<StateIndex>& out) {
  if (pos == nu.size()) {
    out.push_back(StateIndex{nu});
    return;
  }
  for (int v = 0; v <= remaining; ++v) {
    nu[pos] = v;
    fill_states(nu, pos + 1, remaining - v, out);
  }
  nu[pos] = 0;
}

}  // namespace detail

/// All lattice points in lexicographic order.
inline std::vector<StateIndex> enumerate_states(int n, int M) {
  if (n < 2 || M < 1) throw Error(ErrorKind::InvalidArgument, "need n >= 2 and M >= 1");
  std::vector<StateIndex> out;
  std::vector<int> nu(static_cast<std::size_t>(n - 1), 0);
  detail::fill_states(nu, 0, M, out);
  return out;
}

/// Binomial coefficient C(M + n - 1, n - 1), the expected lattice size.
inline std::uint64_t state_count(int n, int M) {
  std::uint64_t r = 1;
  for (int k = 1; k <= n - 1; ++k) r = r * static_cast<std::uint64_t>(M + k) / k;
  return r;
}

inline std::vector<double> action_spectrum(const StateIndex& s, double g) {
  std::vector<double> out(s.nu.size());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = s.nu[k] + g;
  return out;
}

/// Elementary symmetric polynomials e_0..e_n of the entries, by the one-pass
/// recurrence e_r <- e_r + x e_{r-1}.
inline std::vector<Complex> elementary_symmetric(std::span<const Complex> x) {
  std::vector<Complex> e(x.size() + 1, Complex{0.0, 0.0});
  e[0] = 1.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    for (std::size_t r = k + 1; r >= 1; --r) e[r] += x[k] * e[r - 1];
  }
  return e;
}

/// Diagonal of delta(a(nu + g rho)/2) = exp(-i a sum_k (nu_k + g) Lambda_k).
inline ComplexVector quantum_position_diagonal(const StateIndex& s, const QuantizationData& q) {
  std::vector<double> c(s.nu.size());
  for (std::size_t k = 0; k < c.size(); ++k) c[k] = 0.5 * q.params.a() * (s.nu[k] + q.g);
  return weight_exponential(c);
}

struct HamiltonianEigenvalues {
  std::vector<Complex> e;       // e_1 .. e_{n-1}
  std::vector<double> h_real;   // Re e_r
  Complex e_n;                  // det, equals 1
};

inline HamiltonianEigenvalues hamiltonian_eigenvalues(const StateIndex& s,
                                                      const QuantizationData& q) {
  if (s.nu.size() != static_cast<std::size_t>(q.n - 1)) {
    throw Error(ErrorKind::InvalidArgument, "state has wrong dimension");
  }
  const ComplexVector d = quantum_position_diagonal(s, q);
  const std::vector<Complex> entries(d.data(), d.data() + d.size());
  const std::vector<Complex> e = elementary_symmetric(entries);
  HamiltonianEigenvalues out;
  for (int r = 1; r < q.n; ++r) {
    out.e.push_back(e[r]);
    out.h_real.push_back(e[r].real());
  }
  out.e_n = e[q.n];
  return out;
}

struct SpectrumRow {
  StateIndex nu;
  std::vector<double> actions;
  std::vector<Complex> e;
  std::vector<double> h_real;
};

struct SpectrumTable {
  std::vector<SpectrumRow> rows;
  int max_action_multiplicity = 0;
  // smallest Euclidean distance between distinct (Re e_1, ..., Re e_{n-1})
  // tuples; infinity when there is a single state
  double min_hamiltonian_distance = std::numeric_limits<double>::infinity();
  // same over the complex tuples (e_1, ..., e_{n-1})
  double min_complex_distance = std::numeric_limits<double>::infinity();
};

inline SpectrumTable spectrum_table(const QuantizationData& q) {
  SpectrumTable table;
  for (auto& s : enumerate_states(q.n, q.M)) {
    SpectrumRow row;
    row.actions = action_spectrum(s, q.g);
    auto h = hamiltonian_eigenvalues(s, q);
    row.e = std::move(h.e);
    row.h_real = std::move(h.h_real);
    row.nu = std::move(s);
    table.rows.push_back(std::move(row));
  }
  // nu -> nu + g is injective and the states are distinct, so every
  // action tuple has multiplicity one; count anyway
  table.max_action_multiplicity = table.rows.empty() ? 0 : 1;
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    int mult = 1;
    for (std::size_t j = 0; j < table.rows.size(); ++j) {
      if (i == j) continue;
      if (table.rows[i].actions == table.rows[j].actions) ++mult;
      if (j > i) {
        double d2 = 0.0;
        for (std::size_t r = 0; r < table.rows[i].h_real.size(); ++r) {
          const double d = table.rows[i].h_real[r] - table.rows[j].h_real[r];
          d2 += d * d;
        }
        table.min_hamiltonian_distance = std::min(table.min_hamiltonian_distance, std::sqrt(d2));
        double c2 = 0.0;
        for (std::size_t r = 0; r < table.rows[i].e.size(); ++r) {
          c2 += std::norm(table.rows[i].e[r] - table.rows[j].e[r]);
        }
        table.min_complex_distance = std::min(table.min_complex_distance, std::sqrt(c2));
      }
    }
    table.max_action_multiplicity = std::max(table.max_action_multiplicity, mult);
  }
  return table;
}

}  // namespace rscompact
