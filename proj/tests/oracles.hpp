#pragma once

// Independent reference computations used only by the tests. None of these
// call into the code path they are compared against.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using Complex = std::complex<double>;

/// e_r by summing products over index combinations chosen with next_permutation.
inline std::vector<Complex> elementary_by_combinations(const std::vector<Complex>& x) {
  const std::size_t n = x.size();
  std::vector<Complex> e(n + 1, Complex{0.0, 0.0});
  e[0] = 1.0;
  for (std::size_t r = 1; r <= n; ++r) {
    std::vector<bool> pick(n, false);
    std::fill(pick.begin(), pick.begin() + static_cast<long>(r), true);
    do {
      Complex prod{1.0, 0.0};
      for (std::size_t k = 0; k < n; ++k) {
        if (pick[k]) prod *= x[k];
      }
      e[r] += prod;
    } while (std::prev_permutation(pick.begin(), pick.end()));
  }
  return e;
}

/// All tuples in {0..M}^m with sum <= M, by a base-(M+1) counter, sorted.
inline std::vector<std::vector<int>> brute_states(int m, int M) {
  std::vector<std::vector<int>> out;
  std::uint64_t total = 1;
  for (int k = 0; k < m; ++k) total *= static_cast<std::uint64_t>(M + 1);
  for (std::uint64_t code = 0; code < total; ++code) {
    std::vector<int> nu(static_cast<std::size_t>(m));
    std::uint64_t c = code;
    int sum = 0;
    for (int k = m - 1; k >= 0; --k) {
      nu[static_cast<std::size_t>(k)] = static_cast<int>(c % static_cast<std::uint64_t>(M + 1));
      c /= static_cast<std::uint64_t>(M + 1);
      sum += nu[static_cast<std::size_t>(k)];
    }
    if (sum <= M) out.push_back(nu);
  }
  std::sort(out.begin(), out.end());
  return out;
}

/// Binomial coefficient by Pascal's triangle.
inline std::uint64_t binomial(int n, int k) {
  std::vector<std::vector<std::uint64_t>> row(static_cast<std::size_t>(n + 1));
  for (int i = 0; i <= n; ++i) {
    row[i].assign(static_cast<std::size_t>(i + 1), 1);
    for (int j = 1; j < i; ++j) row[i][j] = row[i - 1][j - 1] + row[i - 1][j];
  }
  return row[n][k];
}

/// For C in SU(2) the alcove coordinate xi_1 is arccos(tr C / 2).
inline double su2_xi1(const Eigen::MatrixXcd& c) {
  return std::acos(std::clamp(c.trace().real() / 2.0, -1.0, 1.0));
}

/// Diagonal of exp(M) for a diagonal matrix M, entry by entry.
inline Eigen::VectorXcd exp_of_diagonal(const Eigen::MatrixXcd& m) {
  Eigen::VectorXcd d(m.rows());
  for (Eigen::Index k = 0; k < m.rows(); ++k) d(k) = std::exp(m(k, k));
  return d;
}

}  // namespace oracle
