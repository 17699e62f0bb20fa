#include "qustat/ccr/basis.hpp"

#include <cmath>
#include <string>

#include "qustat/error.hpp"

namespace qustat::ccr {

int CCRBasis::mode(int a) const {
  check_symbol(a);
  const auto& s = symbols[a];
  return s.kind == SymbolInfo::Kind::classical ? 0 : 1 + s.index;
}

void CCRBasis::check_symbol(int a) const {
  if (a < 0 || a >= size())
    throw ValidationError("unknown basis symbol " + std::to_string(a) + " (basis has " +
                          std::to_string(size()) + " elements)");
}

CCRBasis build_ccr_basis(const DensityMatrix& rho, double gap_tol) {
  rho.require_nondegenerate(gap_tol);
  const int d = rho.d();
  const Matrix& v = rho.eigenvectors();
  auto rotate = [&](const Matrix& f) { return HermitianOperator::from_arithmetic(v * f * v.adjoint()); };

  CCRBasis b;
  b.d = d;
  b.mu = rho.eigenvalues();
  const RealVector& mu = b.mu;

  for (int i = 0; i + 1 < d; ++i) {
    Matrix f = -mu(i) * Matrix::Identity(d, d);
    f(i, i) += 1.0;
    b.classical_gens.push_back(rotate(f));
    b.basis_list.push_back(b.classical_gens.back());
    b.symbols.push_back({SymbolInfo::Kind::classical, i});
  }
  b.classical_cov = RealMatrix::Zero(d - 1, d - 1);
  for (int i = 0; i + 1 < d; ++i)
    for (int j = 0; j + 1 < d; ++j) b.classical_cov(i, j) = (i == j ? mu(i) : 0.0) - mu(i) * mu(j);

  int osc = 0;
  for (int j = 0; j < d; ++j)
    for (int k = j + 1; k < d; ++k, ++osc) {
      const double gap = std::abs(mu(j) - mu(k));
      const double norm = std::sqrt(2.0 * gap);
      Matrix sym = Matrix::Zero(d, d), anti = Matrix::Zero(d, d);
      sym(j, k) = sym(k, j) = 1.0 / norm;
      anti(j, k) = Complex(0.0, 1.0 / norm);
      anti(k, j) = Complex(0.0, -1.0 / norm);
      OscillatorPair pair{j, k, rotate(sym), rotate(anti), (mu(j) + mu(k)) / (2.0 * gap)};
      b.basis_list.push_back(pair.q_gen);
      b.symbols.push_back({SymbolInfo::Kind::q, osc});
      b.basis_list.push_back(pair.p_gen);
      b.symbols.push_back({SymbolInfo::Kind::p, osc});
      b.oscillator_pairs.push_back(std::move(pair));
    }

  const int n = b.size();
  b.gram = RealMatrix::Zero(n, n);
  b.symplectic = RealMatrix::Zero(n, n);
  for (int a = 0; a < n; ++a)
    for (int c = 0; c < n; ++c) {
      const auto [g, s] = state_covariance(b.basis_list[a], b.basis_list[c], rho);
      b.gram(a, c) = g;
      b.symplectic(a, c) = s;
    }

  // Invariants: classical block equals V, oscillator blocks are diagonal with
  // sigma^2, sigma(q,p) = +1/2, everything else vanishes.
  const int nc = d - 1;
  auto fail = [](const std::string& what) { throw ToleranceError("CCR basis check failed: " + what); };
  const double tol = 1e-12 * std::max(1.0, b.gram.cwiseAbs().maxCoeff());
  for (int a = 0; a < n; ++a)
    for (int c = 0; c < n; ++c) {
      double g_expect = 0.0, s_expect = 0.0;
      if (a < nc && c < nc) {
        g_expect = b.classical_cov(a, c);
      } else if (a >= nc && c >= nc && (a - nc) / 2 == (c - nc) / 2) {
        const int o = (a - nc) / 2;
        if (a == c) g_expect = b.oscillator_pairs[o].sigma_sq;
        if (a != c) s_expect = (a < c) ? 0.5 : -0.5;
      }
      if (std::abs(b.gram(a, c) - g_expect) > tol) fail("inner product (" + std::to_string(a) + "," + std::to_string(c) + ")");
      if (std::abs(b.symplectic(a, c) - s_expect) > 1e-12) fail("symplectic form (" + std::to_string(a) + "," + std::to_string(c) + ")");
    }
  for (const auto& p : b.oscillator_pairs)
    if (!(p.sigma_sq > 0.5)) fail("thermal variance not above 1/2");
  return b;
}

}  // namespace qustat::ccr
