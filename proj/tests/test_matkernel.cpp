#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "rscompact/matkernel.hpp"
#include "rscompact/sampling.hpp"

namespace rscompact {
namespace {

ComplexMatrix diag(std::initializer_list<Complex> entries) {
  ComplexVector d(static_cast<Eigen::Index>(entries.size()));
  Eigen::Index k = 0;
  for (const auto& e : entries) d(k++) = e;
  return d.asDiagonal().toDenseMatrix();
}

// Random interior alcove point: exponential weights scaled to sum pi.
AlcovePoint random_alcove(int n, Rng& rng) {
  std::exponential_distribution<double> expo(1.0);
  std::vector<double> w(static_cast<std::size_t>(n));
  double total = 0.0;
  for (auto& v : w) total += (v = 0.05 + expo(rng));
  for (auto& v : w) v *= kPi / total;
  return AlcovePoint(w);
}

TEST(EigUnitary, IdentityHasZeroPhases) {
  const auto eig = eig_unitary(UnitaryMatrix(ComplexMatrix::Identity(2, 2)));
  EXPECT_NEAR(eig.phases[0], 0.0, 1e-15);
  EXPECT_NEAR(eig.phases[1], 0.0, 1e-15);
  EXPECT_LT(unitarity_defect(eig.vectors), 1e-14);
}

TEST(EigUnitary, DiagonalInputGivesPermutation) {
  const auto eig = eig_unitary(UnitaryMatrix(diag({kI, -kI})));
  EXPECT_NEAR(eig.phases[0], kPi / 2, 1e-14);
  EXPECT_NEAR(eig.phases[1], 3 * kPi / 2, 1e-14);
  for (Eigen::Index j = 0; j < 2; ++j) {
    for (Eigen::Index k = 0; k < 2; ++k) {
      const double m = std::abs(eig.vectors(j, k));
      EXPECT_TRUE(std::abs(m) < 1e-14 || std::abs(m - 1.0) < 1e-14);
    }
  }
}

TEST(EigUnitary, ReconstructsRandomUnitaries) {
  for (int n = 2; n <= 6; ++n) {
    for (int s = 0; s < 20; ++s) {
      Rng rng = sample_rng(7, static_cast<std::uint64_t>(100 * n + s));
      const ComplexMatrix u = random_unitary(n, rng);
      const auto eig = eig_unitary(UnitaryMatrix(u));
      ComplexVector lambda(n);
      for (int k = 0; k < n; ++k) lambda(k) = std::polar(1.0, eig.phases[k]);
      const ComplexMatrix rebuilt = eig.vectors * lambda.asDiagonal() * eig.vectors.adjoint();
      EXPECT_LT(max_abs(rebuilt - u), 1e-10) << "n=" << n << " sample " << s;
      EXPECT_LT(unitarity_defect(eig.vectors), 1e-12);
      EXPECT_TRUE(std::is_sorted(eig.phases.begin(), eig.phases.end()));
      for (int k = 0; k < n; ++k) {
        EXPECT_LT((u * eig.vectors.col(k) - lambda(k) * eig.vectors.col(k)).cwiseAbs().maxCoeff(),
                  1e-10);
      }
    }
  }
}

TEST(EigUnitary, DegenerateBlockStaysOrthonormal) {
  Rng rng = sample_rng(11, 0);
  const ComplexMatrix q = random_unitary(4, rng);
  const ComplexMatrix u = q * diag({kI, kI, kI, -1.0}) * q.adjoint();
  const auto eig = eig_unitary(UnitaryMatrix(u));
  EXPECT_LT(unitarity_defect(eig.vectors), 1e-12);
  EXPECT_NEAR(eig.phases[0], kPi / 2, 1e-12);
  EXPECT_NEAR(eig.phases[2], kPi / 2, 1e-12);
  EXPECT_NEAR(eig.phases[3], kPi, 1e-12);
}

TEST(UnitaryMatrixType, RejectsNonUnitaryInput) {
  ComplexMatrix m = ComplexMatrix::Identity(2, 2);
  m(0, 1) = 0.5;
  try {
    UnitaryMatrix u(m);
    FAIL() << "expected NotUnitary";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NotUnitary);
  }
  EXPECT_THROW(UnitaryMatrix(ComplexMatrix::Identity(2, 3)), Error);
}

TEST(AlcovePointType, EnforcesSumAndSign) {
  EXPECT_NO_THROW(AlcovePoint({kPi / 2, kPi / 2}));
  EXPECT_THROW(AlcovePoint({kPi, 0.5}), Error);
  EXPECT_THROW(AlcovePoint({kPi + 0.5, -0.5}), Error);
  EXPECT_THROW(AlcovePoint({kPi}), Error);
}

TEST(DeltaOfXi, TwoByTwoExamples) {
  const ComplexMatrix d1 = delta_of_xi(AlcovePoint({kPi / 2, kPi / 2})).matrix();
  EXPECT_LT(max_abs(d1 - diag({-kI, kI})), 1e-15);
  const ComplexMatrix d2 = delta_of_xi(AlcovePoint({0.0, kPi})).matrix();
  EXPECT_LT(max_abs(d2 - ComplexMatrix::Identity(2, 2)), 1e-15);
}

TEST(DeltaOfXi, SpecialUnitaryAndMatchesWeightExponential) {
  for (int n = 2; n <= 6; ++n) {
    for (int s = 0; s < 20; ++s) {
      Rng rng = sample_rng(3, static_cast<std::uint64_t>(n * 50 + s));
      const AlcovePoint xi = random_alcove(n, rng);
      const UnitaryMatrix d = delta_of_xi(xi);
      EXPECT_LT(std::abs(d.determinant() - 1.0), 1e-12);

      // exp(-2i sum_{k<n} xi_k Lambda_k) assembled from the weight matrices
      ComplexMatrix generator = ComplexMatrix::Zero(n, n);
      for (int k = 1; k < n; ++k) generator += -2.0 * kI * xi[k - 1] * fundamental_weight(n, k);
      const ComplexVector expected = oracle::exp_of_diagonal(generator);
      EXPECT_LT((d.matrix().diagonal() - expected).cwiseAbs().maxCoeff(), 1e-12);

      const std::vector<double> c(xi.values().begin(), xi.values().end() - 1);
      EXPECT_LT((weight_exponential(c) - expected).cwiseAbs().maxCoeff(), 1e-12);
    }
  }
}

TEST(FundamentalWeight, Examples) {
  const ComplexMatrix w21 = fundamental_weight(2, 1);
  EXPECT_DOUBLE_EQ(w21(0, 0).real(), 0.5);
  EXPECT_DOUBLE_EQ(w21(1, 1).real(), -0.5);
  const ComplexMatrix w32 = fundamental_weight(3, 2);
  EXPECT_NEAR(w32(0, 0).real(), 1.0 / 3, 1e-15);
  EXPECT_NEAR(w32(1, 1).real(), 1.0 / 3, 1e-15);
  EXPECT_NEAR(w32(2, 2).real(), -2.0 / 3, 1e-15);
  EXPECT_NEAR(std::abs(w32(0, 1)), 0.0, 0.0);
}

TEST(FundamentalWeight, TracelessAndRangeChecked) {
  for (int n = 2; n <= 7; ++n) {
    for (int k = 1; k < n; ++k) EXPECT_NEAR(std::abs(fundamental_weight(n, k).trace()), 0.0, 1e-14);
  }
  EXPECT_THROW(fundamental_weight(3, 0), Error);
  EXPECT_THROW(fundamental_weight(3, 3), Error);
}

TEST(AlcoveReduce, AlreadyDiagonal) {
  const AlcovePoint xi0({kPi / 3, kPi / 3, kPi / 3});
  const AlcoveForm f = alcove_reduce(delta_of_xi(xi0));
  for (int k = 0; k < 3; ++k) EXPECT_NEAR(f.xi[k], kPi / 3, 1e-12);
}

TEST(AlcoveReduce, IdentityIsAlcoveVertex) {
  const AlcoveForm f = alcove_reduce(UnitaryMatrix(ComplexMatrix::Identity(2, 2)));
  EXPECT_NEAR(f.xi[0], 0.0, 1e-14);
  EXPECT_NEAR(f.xi[1], kPi, 1e-14);
}

TEST(AlcoveReduce, RecoversConjugatedAlcovePoints) {
  for (int n = 2; n <= 6; ++n) {
    for (int s = 0; s < 25; ++s) {
      Rng rng = sample_rng(5, static_cast<std::uint64_t>(n * 100 + s));
      const AlcovePoint xi0 = random_alcove(n, rng);
      const ComplexMatrix eta0 = random_special_unitary(n, rng);
      const ComplexMatrix c = eta0.adjoint() * delta_of_xi(xi0).matrix() * eta0;
      const AlcoveForm f = alcove_reduce(UnitaryMatrix(c));
      for (int k = 0; k < n; ++k) EXPECT_NEAR(f.xi[k], xi0[k], 1e-10) << "n=" << n;
      EXPECT_LT(max_abs(f.eta * c * f.eta.adjoint() - delta_of_xi(f.xi).matrix()), 1e-10);
      EXPECT_LT(unitarity_defect(f.eta), 1e-12);
      EXPECT_LT(std::abs(f.eta.determinant() - 1.0), 1e-12);
    }
  }
}

TEST(AlcoveReduce, RejectsDeterminantOtherThanOne) {
  try {
    alcove_reduce(UnitaryMatrix(diag({kI, kI})));
    FAIL() << "expected NotSpecialUnitary";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NotSpecialUnitary);
  }
}

TEST(AlcoveReduce, DegenerateSpectrumGivesBoundaryPoint) {
  // delta(xi) with xi_2 = 0 has a doubled eigenvalue
  const AlcovePoint xi0({1.0, 0.0, kPi - 1.0});
  Rng rng = sample_rng(9, 1);
  const ComplexMatrix eta0 = random_special_unitary(3, rng);
  const ComplexMatrix c = eta0.adjoint() * delta_of_xi(xi0).matrix() * eta0;
  const AlcoveForm f = alcove_reduce(UnitaryMatrix(c));
  for (int k = 0; k < 3; ++k) EXPECT_NEAR(f.xi[k], xi0[k], 1e-7);
  EXPECT_LT(max_abs(f.eta * c * f.eta.adjoint() - delta_of_xi(f.xi).matrix()), 1e-7);
}

TEST(SpectralFunction, InvariantsOnRandomSpecialUnitaries) {
  for (int n = 2; n <= 5; ++n) {
    for (int s = 0; s < 20; ++s) {
      Rng rng = sample_rng(13, static_cast<std::uint64_t>(n * 100 + s));
      const ComplexMatrix c = random_special_unitary(n, rng);
      const ComplexMatrix eta = random_unitary(n, rng);
      const UnitaryMatrix cu(c);
      const UnitaryMatrix conj(eta.adjoint() * c * eta);
      double sum = 0.0;
      for (int j = 1; j <= n; ++j) {
        const double v = spectral_function(cu, j);
        EXPECT_NEAR(spectral_function(conj, j), v, 1e-10);
        sum += v;
      }
      EXPECT_NEAR(sum, kPi, 1e-10);
    }
  }
  const AlcovePoint xi0({0.4, 1.1, kPi - 1.5});
  EXPECT_NEAR(spectral_function(delta_of_xi(xi0), 1), 0.4, 1e-12);
  EXPECT_THROW(spectral_function(delta_of_xi(xi0), 4), Error);
}

TEST(IsRegular, Examples) {
  EXPECT_FALSE(is_regular(UnitaryMatrix(ComplexMatrix::Identity(2, 2)), 1e-8));
  EXPECT_TRUE(is_regular(UnitaryMatrix(diag({kI, -kI})), 1e-8));
  // min xi = 0 collapses two eigenvalues
  EXPECT_FALSE(is_regular(delta_of_xi(AlcovePoint({0.0, 1.0, kPi - 1.0})), 1e-8));
  // min xi = 0.1 leaves a circular gap of 0.2
  const UnitaryMatrix c = delta_of_xi(AlcovePoint({0.1, 1.5, kPi - 1.6}));
  EXPECT_TRUE(is_regular(c, 0.19));
  EXPECT_FALSE(is_regular(c, 0.21));
}

TEST(CircularDistance, WrapsAroundTheCircle) {
  EXPECT_NEAR(circular_distance(0.1, kTwoPi - 0.1), 0.2, 1e-14);
  EXPECT_NEAR(circular_distance(1.0, 1.0 + kPi), kPi, 1e-14);
  EXPECT_NEAR(wrap_phase(-0.5), kTwoPi - 0.5, 1e-15);
}

}  // namespace
}  // namespace rscompact
