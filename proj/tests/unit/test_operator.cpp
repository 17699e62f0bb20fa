#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>

#include "qustat/error.hpp"
#include "qustat/json_io.hpp"
#include "qustat/operator.hpp"
#include "qustat/state.hpp"
#include "qustat/tensor.hpp"
#include "support.hpp"

using namespace qustat;
using namespace qustat::testing;

TEST(Embed, FullSubsetIsIdentityEmbedding) {
  const Kernel k = pauli_xy();
  const auto e = embed(k, SiteSubset::all(2), 2);
  EXPECT_LT((e.matrix() - k.matrix()).norm(), 1e-15);
}

TEST(Embed, SingleSiteAmpliation) {
  const Kernel z(2, 1, pauli::z());
  const auto e = embed(z, SiteSubset(2, {2}), 2);
  const Matrix expect = tensor::kron(Matrix::Identity(2, 2), pauli::z().matrix());
  EXPECT_LT((e.matrix() - expect).norm(), 1e-15);
  EXPECT_LT((ampliate(pauli::z(), 2, 2).matrix() - expect).norm(), 1e-15);
}

TEST(Embed, MatchesExplicitPermutationConjugation) {
  const Kernel k = pauli_xy();
  const auto e = embed(k, SiteSubset(3, {1, 3}), 3);
  // K ⊗ 1 on sites (1,2,3), then move site 2 -> 3 and 3 -> 2.
  const Matrix k1 = tensor::kron(k.matrix(), Matrix::Identity(2, 2));
  const std::vector<int> perm{0, 2, 1};
  EXPECT_LT((e.matrix() - tensor::permute_sites(k1, perm, 2)).norm(), 1e-14);
  // Tracing the middle site against any state gives K back on sites (1,3).
  std::mt19937_64 rng(3);
  const auto rho = random_state(2, rng);
  const std::vector<int> mid{1};
  const Matrix red = tensor::partial_expectation(e.matrix(), rho.matrix(), mid, 2, 3);
  EXPECT_LT((red - k.matrix()).norm(), 1e-14);
}

TEST(Embed, Errors) {
  const Kernel k = pauli_xy();
  EXPECT_THROW(embed(k, SiteSubset(3, {1}), 3), ValidationError);
  EXPECT_THROW(embed(k, SiteSubset(1, {1}), 1), ValidationError);
  EXPECT_THROW(SiteSubset(3, {0, 1}), ValidationError);
  EXPECT_THROW(SiteSubset(3, {2, 2}), ValidationError);
  EXPECT_THROW(SiteSubset(3, {4}), ValidationError);
}

TEST(Embed, FrobeniusIsometryAndDisjointCommutation) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 5; ++trial) {
    const Kernel k = random_kernel(2, 2, rng);
    for (unsigned mask = 0; mask < 32; ++mask) {
      if (std::popcount(mask) != 2) continue;
      const auto e = embed(k, SiteSubset::from_mask(5, mask), 5);
      EXPECT_NEAR(e.frobenius_norm(), std::pow(2.0, 1.5) * k.op().frobenius_norm(), 1e-10);
    }
  }
  const HermitianOperator a(random_hermitian(3, rng));
  const HermitianOperator b(random_hermitian(3, rng));
  const Matrix ea = ampliate(a, 1, 3).matrix();
  const Matrix eb = ampliate(b, 3, 3).matrix();
  EXPECT_LT((ea * eb - eb * ea).norm(), 1e-12);
}

TEST(Embed, StateInvarianceOfKernelMean) {
  std::mt19937_64 rng(5);
  const auto rho = random_state(2, rng);
  const Kernel k = random_kernel(2, 2, rng);
  const Complex base = tensor::product_expectation(k.matrix(), rho.matrix(), 2, 2);
  for (unsigned mask = 0; mask < 16; ++mask) {
    if (std::popcount(mask) != 2) continue;
    const auto e = embed(k, SiteSubset::from_mask(4, mask), 4);
    EXPECT_LT(std::abs(tensor::product_expectation(e.matrix(), rho.matrix(), 2, 4) - base), 1e-12);
  }
}

TEST(Symmetrize, Examples) {
  const std::vector<HermitianOperator> one{pauli::x()};
  EXPECT_LT((symmetrize(one).matrix() - pauli::x().matrix()).norm(), 1e-15);
  const std::vector<HermitianOperator> xy{pauli::x(), pauli::y()};
  EXPECT_LT(symmetrize(xy).matrix().norm(), 1e-15);
  std::mt19937_64 rng(1);
  const HermitianOperator q(random_hermitian(3, rng)), p(random_hermitian(3, rng));
  const std::vector<HermitianOperator> qp{q, p};
  const Matrix expect = (q.matrix() * p.matrix() + p.matrix() * q.matrix()) / 2.0;
  EXPECT_LT((symmetrize(qp).matrix() - expect).norm(), 1e-13);
  EXPECT_THROW(symmetrize(std::span<const HermitianOperator>{}), ValidationError);
  const std::vector<HermitianOperator> bad{pauli::x(), HermitianOperator(Matrix::Identity(3, 3))};
  EXPECT_THROW(symmetrize(bad), ValidationError);
}

TEST(Symmetrize, InvariantUnderInputPermutation) {
  std::mt19937_64 rng(2);
  std::vector<HermitianOperator> ops;
  for (int i = 0; i < 4; ++i) ops.emplace_back(random_hermitian(3, rng));
  const Matrix base = symmetrize(ops).matrix();
  std::vector<int> order{0, 1, 2, 3};
  while (std::next_permutation(order.begin(), order.end())) {
    std::vector<HermitianOperator> perm;
    for (int i : order) perm.push_back(ops[i]);
    EXPECT_LT((symmetrize(perm).matrix() - base).norm(), 1e-12);
  }
}

TEST(SymmetrizeKernel, Examples) {
  const Kernel k = pauli_xy();
  const Matrix expect = (tensor::kron(pauli::x().matrix(), pauli::y().matrix()) +
                         tensor::kron(pauli::y().matrix(), pauli::x().matrix())) / 2.0;
  EXPECT_LT((k.matrix() - expect).norm(), 1e-15);

  const std::vector<HermitianOperator> aa{pauli::z(), pauli::z()};
  const Matrix zz = tensor::kron(pauli::z().matrix(), pauli::z().matrix());
  EXPECT_LT((symmetrize_kernel(aa).matrix() - zz).norm(), 1e-15);

  const std::vector<HermitianOperator> xyz{pauli::x(), pauli::y(), pauli::z()};
  const Kernel k3 = symmetrize_kernel(xyz);
  std::vector<int> perm{0, 1, 2};
  do {
    EXPECT_LT((tensor::permute_sites(k3.matrix(), perm, 2) - k3.matrix()).norm(), 1e-14);
  } while (std::next_permutation(perm.begin(), perm.end()));
  // Explicit six-term sum.
  Matrix six = Matrix::Zero(8, 8);
  std::vector<int> o{0, 1, 2};
  do {
    six += tensor::kron(tensor::kron(xyz[o[0]].matrix(), xyz[o[1]].matrix()), xyz[o[2]].matrix());
  } while (std::next_permutation(o.begin(), o.end()));
  EXPECT_LT((k3.matrix() - six / 6.0).norm(), 1e-14);
}

TEST(Kernel, RejectsAsymmetricOperator) {
  const Matrix xy = tensor::kron(pauli::x().matrix(), pauli::z().matrix());
  EXPECT_THROW(Kernel(2, 2, HermitianOperator(xy)), ValidationError);
  EXPECT_THROW(Kernel(2, 3, HermitianOperator(Matrix::Identity(4, 4))), ValidationError);
}

TEST(HermitianOperator, Validation) {
  Matrix m(2, 2);
  m << 1, Complex(0, 1), Complex(0, 1), 0;
  EXPECT_THROW(HermitianOperator{m}, ValidationError);
  Matrix inf = Matrix::Identity(2, 2);
  inf(0, 0) = std::numeric_limits<double>::infinity();
  EXPECT_THROW(HermitianOperator{inf}, ValidationError);
}

TEST(StateCovariance, Examples) {
  const auto rho = diag_state({0.75, 0.25});
  auto [g, s] = state_covariance(pauli::x(), pauli::x(), rho);
  EXPECT_NEAR(g, 1.0, 1e-15);
  EXPECT_NEAR(s, 0.0, 1e-15);
  std::tie(g, s) = state_covariance(pauli::x(), pauli::y(), rho);
  EXPECT_NEAR(g, 0.0, 1e-15);
  EXPECT_NEAR(s, -0.5, 1e-15);
  std::tie(g, s) = state_covariance(pauli::z(), pauli::identity(), rho);
  EXPECT_NEAR(g, 0.5, 1e-15);
  EXPECT_NEAR(s, 0.0, 1e-15);
  EXPECT_THROW(state_covariance(HermitianOperator(Matrix::Identity(3, 3)), pauli::x(), rho),
               ValidationError);
}

TEST(StateCovariance, SymmetryAndPositivity) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    const auto rho = random_state(3, rng);
    const HermitianOperator a(random_hermitian(3, rng)), b(random_hermitian(3, rng));
    const auto [gab, sab] = state_covariance(a, b, rho);
    const auto [gba, sba] = state_covariance(b, a, rho);
    EXPECT_NEAR(gab, gba, 1e-12);
    EXPECT_NEAR(sab, -sba, 1e-12);
    EXPECT_GT(state_covariance(a, a, rho).first, 0.0);
    EXPECT_NEAR(state_covariance(a, a, rho).second, 0.0, 1e-12);
  }
}

TEST(DensityMatrix, Validation) {
  EXPECT_THROW(diag_state({0.6, 0.6}), ValidationError);
  EXPECT_THROW(diag_state({1.2, -0.2}), ValidationError);
  const auto rho = diag_state({0.25, 0.75});
  EXPECT_NEAR(rho.eigenvalues()(0), 0.75, 1e-15);
  EXPECT_THROW(diag_state({0.5, 0.5}).require_nondegenerate(1e-9), ValidationError);
  Vector plus(2);
  plus << 1 / std::sqrt(2.0), 1 / std::sqrt(2.0);
  EXPECT_TRUE(DensityMatrix::pure(plus).is_pure());
  EXPECT_FALSE(DensityMatrix::pure(plus).strictly_positive());
}

TEST(JsonIo, RoundTrip) {
  std::mt19937_64 rng(4);
  const Matrix m = random_hermitian(3, rng);
  const auto j = matrix_to_json(m);
  EXPECT_EQ(j["dim"], 3);
  const Matrix back = matrix_from_json(nlohmann::json::parse(j.dump()));
  EXPECT_EQ(back, m);
  EXPECT_THROW(matrix_from_json(nlohmann::json{{"dim", 2}, {"re", {{1, 0}}}}), ValidationError);
  EXPECT_THROW(matrix_from_json(nlohmann::json{{"dim", 1}, {"re", {{1}}}, {"extra", 0}}), ValidationError);
}

TEST(Tensor, PermuteSitesMovesDigits) {
  const Matrix a = pauli::x().matrix(), b = pauli::z().matrix(), c = pauli::y().matrix();
  const Matrix abc = tensor::kron(tensor::kron(a, b), c);
  const std::vector<int> perm{2, 0, 1};  // site 0 -> 2, 1 -> 0, 2 -> 1
  const Matrix expect = tensor::kron(tensor::kron(b, c), a);
  EXPECT_LT((tensor::permute_sites(abc, perm, 2) - expect).norm(), 1e-15);
}

TEST(Tensor, ProductExpectationGeneralMatchesDense) {
  std::mt19937_64 rng(6);
  const auto rho = random_state(2, rng);
  const Matrix a = random_hermitian(8, rng), b = random_hermitian(8, rng);
  const Matrix r3 = tensor::kron_power(rho.matrix(), 3);
  EXPECT_LT(std::abs(tensor::product_expectation(a, b, rho.matrix(), 2, 3) - (r3 * a * b).trace()), 1e-12);
  EXPECT_LT(std::abs(tensor::product_expectation(a, rho.matrix(), 2, 3) - (r3 * a).trace()), 1e-12);
}

TEST(Budget, ReportsRequiredBytes) {
  Budget b;
  b.max_dim = 64;
  try {
    b.check(2, 7);
    FAIL();
  } catch (const BudgetError& e) {
    EXPECT_EQ(e.required_dim(), 128u);
    EXPECT_EQ(e.required_bytes(), 128u * 128u * 16u);
    EXPECT_NE(std::string(e.what()).find("262144"), std::string::npos);
  }
}
