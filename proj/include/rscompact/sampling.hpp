#pragma once

// Seed-reproducible random draws used by the verification sweeps: Haar-like
// unitaries, su(n) elements, and interior Darboux points.

#include <Eigen/QR>

#include <cmath>
#include <cstdint>
#include <random>

#include "rscompact/matkernel.hpp"
#include "rscompact/rs_classical.hpp"

namespace rscompact {

using Rng = std::mt19937_64;

inline constexpr std::uint64_t kDefaultSeed = 42;

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Independent stream for sample `index` of a sweep seeded with `master`.
inline Rng sample_rng(std::uint64_t master, std::uint64_t index) {
  return Rng(splitmix64(master ^ splitmix64(index)));
}

inline ComplexMatrix random_gaussian(Eigen::Index n, Rng& rng) {
  std::normal_distribution<double> normal;
  ComplexMatrix m(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index k = 0; k < n; ++k) m(j, k) = Complex(normal(rng), normal(rng));
  }
  return m;
}

/// Q factor of a Gaussian matrix with the phases of diag(R) absorbed.
inline ComplexMatrix random_unitary(Eigen::Index n, Rng& rng) {
  Eigen::HouseholderQR<ComplexMatrix> qr(random_gaussian(n, rng));
  ComplexMatrix q = qr.householderQ();
  const ComplexMatrix& r = qr.matrixQR();
  for (Eigen::Index k = 0; k < n; ++k) {
    const Complex d = r(k, k);
    if (std::abs(d) > 0.0) q.col(k) *= d / std::abs(d);
  }
  return q;
}

inline ComplexMatrix random_special_unitary(Eigen::Index n, Rng& rng) {
  ComplexMatrix u = random_unitary(n, rng);
  const Complex det = u.determinant();
  u *= std::polar(1.0, -std::arg(det) / static_cast<double>(n));
  return u;
}

/// Random anti-Hermitian traceless matrix.
inline ComplexMatrix random_su_algebra(Eigen::Index n, Rng& rng, double scale = 1.0) {
  const ComplexMatrix x = random_gaussian(n, rng);
  ComplexMatrix z = 0.5 * scale * (x - x.adjoint());
  z -= (z.trace() / static_cast<double>(n)) * ComplexMatrix::Identity(n, n);
  return z;
}

/// gamma uniform on the polytope shrunk toward its centroid by `margin`
/// (fraction of the simplex edge length kept clear of every facet), theta
/// uniform on [0, 2 pi).
inline DarbouxPoint random_interior_point(const CouplingParams& params, Rng& rng,
                                          double margin = 0.05) {
  const int n = params.n();
  std::exponential_distribution<double> expo(1.0);
  std::uniform_real_distribution<double> angle(0.0, kTwoPi);
  std::vector<double> w(static_cast<std::size_t>(n));
  double total = 0.0;
  for (auto& v : w) {
    v = expo(rng);
    total += v;
  }
  DarbouxPoint p;
  for (int k = 0; k < n - 1; ++k) {
    const double bary = margin + (1.0 - n * margin) * (w[k] / total);
    p.gamma.push_back(params.g() + params.M() * bary);
    p.theta.push_back(angle(rng));
  }
  return p;
}

}  // namespace rscompact
