#include <gtest/gtest.h>

#include "qustat/ccr/fock.hpp"
#include "qustat/ccr/hermite.hpp"
#include "qustat/error.hpp"
#include "support.hpp"

using namespace qustat;
using namespace qustat::ccr;
using namespace qustat::testing;

TEST(FockRep, ThermalSecondMomentAndCommutator) {
  const FockRep f(64, 1);
  EXPECT_LT(f.commutator_defect(), 1e-12);
  for (double s2 : {0.5, 1.0, 2.0}) {
    const Matrix phi = f.thermal(s2);
    EXPECT_NEAR(phi.trace().real(), 1.0, 1e-14);
    EXPECT_NEAR((phi * f.Q() * f.Q()).trace().real(), s2, 1e-10);
    EXPECT_NEAR((phi * f.P() * f.P()).trace().real(), s2, 1e-10);
    EXPECT_NEAR(((phi * f.Nop()).trace().real()), s2 - 0.5, 1e-10);
  }
  EXPECT_LT((f.Nop() - (f.Q() * f.Q() + f.P() * f.P() - Matrix::Identity(65, 65)) / 2.0)
                .topLeftCorner(64, 64)
                .norm(),
            1e-12);
  EXPECT_THROW(FockRep(0), ValidationError);
  EXPECT_THROW(FockRep::beta(0.4), ValidationError);
}

TEST(FockRep, TailAndTruncation) {
  EXPECT_NEAR(FockRep::beta(1.0), std::log(3.0), 1e-14);
  EXPECT_NEAR(FockRep::tail(1.0, 10), std::pow(3.0, -10), 1e-18);
  const int t = FockRep::required_truncation(2.0, 1e-12);
  EXPECT_LT(FockRep::tail(2.0, t), 1e-12);
  EXPECT_GE(FockRep::tail(2.0, t - 1), 1e-12);
  EXPECT_EQ(FockRep::required_truncation(0.5), 1);
  const auto b = build_ccr_basis(diag_state({0.52, 0.48}));
  EXPECT_THROW(check_truncation(b, 64, 1e-12), ToleranceError);
  EXPECT_NO_THROW(check_truncation(b, FockRep::required_truncation(b.oscillator_pairs[0].sigma_sq), 1e-12));
}

TEST(Hermite, ValuesAndCoefficients) {
  EXPECT_EQ(hermite(0, 0.3), 1.0);
  EXPECT_EQ(hermite(1, 0.3), 0.6);
  EXPECT_NEAR(hermite(3, 0.5), -5.0, 1e-14);
  EXPECT_NEAR(hermite(4, 1.0), 16 - 48 + 12, 1e-12);
  EXPECT_EQ(hermite_coefficients(4), (std::vector<double>{12, 0, -48, 0, 16}));
  EXPECT_EQ(hermite_coefficients(3), (std::vector<double>{0, -12, 0, 8}));
  const Matrix x = Matrix::Identity(2, 2) * 0.5;
  EXPECT_NEAR(hermite_op(3, x)(0, 0).real(), -5.0, 1e-14);
  EXPECT_NEAR(hermite_op(3, x * 2.0, 2.0)(1, 1).real(), -5.0, 1e-14);
}

TEST(Hermite, VacuumNorms) {
  // Vacuum Q has density exp(-x^2)/sqrt(pi): E H_m(Q)^2 = 2^m m!.
  const FockRep f(8, 4);
  const Matrix vac = f.vacuum();
  double fact = 1.0;
  for (int m = 0; m <= 4; ++m) {
    if (m > 0) fact *= m;
    const Matrix h = hermite_op(m, f.Q());
    EXPECT_NEAR((vac * h * h).trace().real(), std::pow(2.0, m) * fact, 1e-9) << m;
  }
  const Matrix h2 = hermite_op(2, f.Q());
  EXPECT_NEAR((vac * h2 * h2).trace().real(), 8.0, 1e-12);
}

TEST(Hermite, OrthogonalityCheck) {
  for (double s2 : {0.5, 1.0, 2.0}) {
    for (auto [n, m] : std::vector<std::pair<int, int>>{{1, 0}, {2, 0}, {1, 1}, {2, 1}, {3, 0}, {2, 2}}) {
      const auto r = hermite_orthogonality_check(n, m, s2);
      EXPECT_LT(r.max_residual, 1e-8) << "s2=" << s2 << " n=" << n << " m=" << m;
    }
  }
  EXPECT_THROW(hermite_orthogonality_check(4, 4, 1.0, 64, 6), ValidationError);
}

TEST(NormalQuadrature, Moments) {
  const auto g = normal_quadrature(5);
  EXPECT_NEAR(g.weights.sum(), 1.0, 1e-14);
  auto moment = [&](int k) {
    double s = 0.0;
    for (int i = 0; i < 5; ++i) s += g.weights(i) * std::pow(g.nodes(i), k);
    return s;
  };
  EXPECT_NEAR(moment(1), 0.0, 1e-14);
  EXPECT_NEAR(moment(2), 1.0, 1e-13);
  EXPECT_NEAR(moment(4), 3.0, 1e-12);
  EXPECT_NEAR(moment(8), 105.0, 1e-9);
  EXPECT_THROW(normal_quadrature(0), ValidationError);
}

TEST(FockMoment, QubitExamples) {
  const auto b = build_ccr_basis(diag_state({0.75, 0.25}));
  EXPECT_NEAR(std::abs(fock_moment(Word{1, 1}, b) - 1.0), 0, 1e-10);
  EXPECT_NEAR(std::abs(fock_moment(Word{1, 2}, b) - Complex(0, 0.5)), 0, 1e-10);
  EXPECT_NEAR(std::abs(fock_moment(Word{0, 0}, b) - 0.1875), 0, 1e-14);
  EXPECT_NEAR(std::abs(fock_moment(Word{0, 0, 0, 0}, b) - 3 * 0.1875 * 0.1875), 0, 1e-13);
  EXPECT_NEAR(std::abs(fock_moment(Word{1, 2, 1, 2}, b) - 1.0), 0, 1e-9);
  FockOptions low;
  low.quad_points = 1;
  EXPECT_THROW(fock_moment(Word{0, 0, 0, 0}, b, low), ValidationError);
}

TEST(FockMoment, AgreesWithWickOnRandomWords) {
  std::mt19937_64 rng(89);
  for (int d : {2, 3}) {
    const auto b = build_ccr_basis(random_state(d, rng, d == 2 ? false : true));
    FockOptions opt;
    opt.trunc = 16;
    for (const auto& p : b.oscillator_pairs)
      opt.trunc = std::max(opt.trunc, FockRep::required_truncation(p.sigma_sq) + 1);
    for (int trial = 0; trial < 60; ++trial) {
      const int len = 2 * (1 + static_cast<int>(rng() % 3));
      Word w(len);
      for (int& a : w) a = static_cast<int>(rng() % b.size());
      const Complex wick = quasifree_moment_wick(w, b);
      const Complex fock = fock_moment(w, b, opt);
      EXPECT_LT(std::abs(wick - fock), 1e-8 * std::max(1.0, std::abs(wick))) << "d=" << d;
    }
  }
}
