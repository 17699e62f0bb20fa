#include <gtest/gtest.h>

#include "qustat/ccr/basis.hpp"
#include "qustat/error.hpp"
#include "support.hpp"

using namespace qustat;
using namespace qustat::ccr;
using namespace qustat::testing;

TEST(CCRBasis, QubitExample) {
  const auto b = build_ccr_basis(diag_state({0.75, 0.25}));
  ASSERT_EQ(b.size(), 3);
  EXPECT_EQ(b.num_classical(), 1);
  EXPECT_EQ(b.num_oscillators(), 1);
  EXPECT_DOUBLE_EQ(b.oscillator_pairs[0].sigma_sq, 1.0);
  EXPECT_NEAR(b.variance(0), 0.1875, 1e-15);
  EXPECT_NEAR(b.variance(1), 1.0, 1e-14);
  EXPECT_NEAR(b.variance(2), 1.0, 1e-14);
  EXPECT_NEAR(b.symplectic(1, 2), 0.5, 1e-14);
  EXPECT_NEAR(b.symplectic(2, 1), -0.5, 1e-14);
  EXPECT_EQ(b.two_point(1, 2), Complex(0.0, 0.5));
  // q = sigma_x / sqrt(2 * 0.5), p = -sigma_y in the same normalization.
  EXPECT_LT((b.basis_list[1].matrix() - pauli::x().matrix()).norm(), 1e-14);
  EXPECT_LT((b.basis_list[2].matrix() + pauli::y().matrix()).norm(), 1e-14);
  EXPECT_EQ(b.mode(0), 0);
  EXPECT_EQ(b.mode(1), 1);
  EXPECT_EQ(b.mode(2), 1);
  EXPECT_THROW(b.check_symbol(3), ValidationError);
  EXPECT_THROW(b.mode(-1), ValidationError);
}

TEST(CCRBasis, VarianceDivergesNearDegeneracy) {
  double last = 0.0;
  for (double eps : {0.1, 0.01, 0.001, 1e-4}) {
    const auto b = build_ccr_basis(diag_state({0.5 + eps, 0.5 - eps}));
    const double s2 = b.oscillator_pairs[0].sigma_sq;
    EXPECT_NEAR(s2, 1.0 / (4.0 * eps), 1e-9 / eps);
    EXPECT_GT(s2, last);
    last = s2;
  }
  EXPECT_THROW(build_ccr_basis(diag_state({0.5, 0.5})), ValidationError);
  EXPECT_THROW(build_ccr_basis(diag_state({1.0, 0.0})), ValidationError);
}

TEST(CCRBasis, InvariantsOnRandomStates) {
  std::mt19937_64 rng(83);
  for (int d : {2, 3, 4}) {
    for (int trial = 0; trial < 5; ++trial) {
      const auto rho = random_state(d, rng);
      const auto b = build_ccr_basis(rho);
      EXPECT_EQ(b.size(), d * d - 1);
      EXPECT_EQ(b.num_classical(), d - 1);
      EXPECT_EQ(b.num_oscillators(), d * (d - 1) / 2);
      for (int a = 0; a < b.size(); ++a) {
        EXPECT_NEAR(rho.expectation(b.basis_list[a].matrix()), 0.0, 1e-13);
        for (int c = 0; c < b.size(); ++c) {
          EXPECT_NEAR(b.gram(a, c), b.gram(c, a), 1e-14);
          EXPECT_NEAR(b.symplectic(a, c), -b.symplectic(c, a), 1e-14);
        }
      }
      for (const auto& p : b.oscillator_pairs) {
        const double mj = b.mu(p.j), mk = b.mu(p.k);
        EXPECT_NEAR(p.sigma_sq, (mj + mk) / (2 * (mj - mk)), 1e-12);
        EXPECT_GT(p.sigma_sq, 0.5);
      }
      // Together with the identity the generators span all d x d matrices.
      Eigen::MatrixXcd span(d * d, d * d);
      span.col(0) = Matrix::Identity(d, d).reshaped();
      for (int a = 0; a < b.size(); ++a) span.col(a + 1) = b.basis_list[a].matrix().reshaped();
      Eigen::FullPivLU<Eigen::MatrixXcd> lu(span);
      EXPECT_EQ(lu.rank(), d * d);
    }
  }
}

TEST(CCRBasis, Qutrit) {
  const auto b = build_ccr_basis(diag_state({0.5, 0.3, 0.2}));
  ASSERT_EQ(b.size(), 8);
  EXPECT_NEAR(b.classical_cov(0, 0), 0.25, 1e-15);
  EXPECT_NEAR(b.classical_cov(0, 1), -0.15, 1e-15);
  EXPECT_NEAR(b.classical_cov(1, 1), 0.21, 1e-15);
  EXPECT_NEAR(b.oscillator_pairs[0].sigma_sq, 0.8 / 0.4, 1e-12);
  EXPECT_NEAR(b.oscillator_pairs[1].sigma_sq, 0.7 / 0.6, 1e-12);
  EXPECT_NEAR(b.oscillator_pairs[2].sigma_sq, 0.5 / 0.2, 1e-12);
  EXPECT_EQ(b.mode(2), 1);
  EXPECT_EQ(b.mode(4), 2);
  EXPECT_EQ(b.mode(7), 3);
}
