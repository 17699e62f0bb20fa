#pragma once

#include <vector>

#include "qustat/operator.hpp"
#include "qustat/state.hpp"
#include "qustat/types.hpp"

namespace qustat::ccr {

/// One oscillator of the limit: eigen-indices j < k (0-based, decreasing
/// eigenvalue order) and its canonical pair with sigma(q, p) = +1/2.
struct OscillatorPair {
  int j = 0;
  int k = 0;
  HermitianOperator q_gen;  // (E_jk + E_kj) / sqrt(2|mu_j - mu_k|)
  HermitianOperator p_gen;  // (iE_jk - iE_kj) / sqrt(2|mu_j - mu_k|)
  double sigma_sq = 0.0;    // (mu_j + mu_k) / (2|mu_j - mu_k|)
};

/// Role of basis element F_a in the limit algebra.
struct SymbolInfo {
  enum class Kind { classical, q, p };
  Kind kind = Kind::classical;
  int index = 0;  // classical generator index or oscillator index
};

/// Ortho-symplectic generators of the limit CCR structure of rho. All
/// matrices are in the computational basis (rotated by rho's eigenvectors).
struct CCRBasis {
  int d = 0;
  RealVector mu;  // eigenvalues, decreasing
  std::vector<HermitianOperator> classical_gens;  // d - 1 of them
  RealMatrix classical_cov;                       // V_ij = delta_ij mu_i - mu_i mu_j
  std::vector<OscillatorPair> oscillator_pairs;   // d(d-1)/2 of them
  std::vector<HermitianOperator> basis_list;      // classical, then (q, p) per pair
  std::vector<SymbolInfo> symbols;                // parallel to basis_list
  RealMatrix gram;        // (F_a, F_b)_rho
  RealMatrix symplectic;  // sigma(F_a, F_b)

  int size() const { return static_cast<int>(basis_list.size()); }
  int num_classical() const { return static_cast<int>(classical_gens.size()); }
  int num_oscillators() const { return static_cast<int>(oscillator_pairs.size()); }
  /// Ordered two-point function C(F_a, F_b) = (F_a,F_b)_rho + i sigma(F_a,F_b).
  Complex two_point(int a, int b) const { return {gram(a, b), symplectic(a, b)}; }
  /// Mode of a symbol: 0 for every classical generator, 1 + oscillator index otherwise.
  int mode(int a) const;
  /// Thermal variance of the symbol's oscillator, or its classical variance.
  double variance(int a) const { return gram(a, a); }
  /// Throws ValidationError for a symbol outside 0..size()-1.
  void check_symbol(int a) const;
};

/// Builds the basis and verifies orthogonality and symplectic normalization
/// (ToleranceError on failure). rho must be strictly positive with every
/// eigenvalue gap above gap_tol.
CCRBasis build_ccr_basis(const DensityMatrix& rho, double gap_tol = 1e-9);

}  // namespace qustat::ccr
