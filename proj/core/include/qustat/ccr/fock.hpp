#pragma once

#include "qustat/ccr/basis.hpp"
#include "qustat/ccr/polynomial.hpp"
#include "qustat/types.hpp"

namespace qustat::ccr {

/// Truncated single-oscillator representation on span{|0>,...,|dim-1>} with
/// dim = trunc + pad. States built here live on the first `trunc` levels, so
/// any word of length <= 2*pad is represented exactly on them.
class FockRep {
 public:
  explicit FockRep(int trunc, int pad = 0);

  int trunc() const { return trunc_; }
  int dim() const { return trunc_ + pad_; }
  const Matrix& Q() const { return q_; }
  const Matrix& P() const { return p_; }
  /// Number operator (Q^2 + P^2 - 1)/2 = a†a.
  const Matrix& Nop() const { return n_; }

  /// Thermal state with Tr(state Q^2) = sigma_sq, renormalized to unit trace
  /// on the first trunc levels. sigma_sq = 1/2 gives the vacuum.
  Matrix thermal(double sigma_sq) const;
  /// Diagonal of thermal(sigma_sq) (length dim).
  RealVector thermal_weights(double sigma_sq) const;
  Matrix vacuum() const;

  /// ||[Q,P] - i||_max on the leading (dim-1) block.
  double commutator_defect() const;

  /// beta = 2 artanh(1 / (2 sigma_sq)).
  static double beta(double sigma_sq);
  /// Thermal mass beyond level `trunc`: e^{-beta trunc}.
  static double tail(double sigma_sq, int trunc);
  /// Smallest trunc with tail(sigma_sq, trunc) < tail_tol.
  static int required_truncation(double sigma_sq, double tail_tol = 1e-12);

 private:
  int trunc_;
  int pad_;
  Matrix q_, p_, n_;
};

/// Gauss-Hermite rule for the standard normal: exact for polynomials of
/// degree <= 2 * points - 1.
struct GaussRule {
  RealVector nodes;
  RealVector weights;
};
GaussRule normal_quadrature(int points);

struct FockOptions {
  int trunc = 64;
  /// Gauss-Hermite points per classical dimension; 0 picks the minimum exact rule.
  int quad_points = 0;
  double tail_tol = 1e-12;
};

/// Throws ToleranceError when some oscillator's thermal tail at trunc
/// exceeds tail_tol.
void check_truncation(const CCRBasis& basis, int trunc, double tail_tol);

/// Expectation of a polynomial in the product of truncated thermal states
/// (one per oscillator) and the classical Gaussian N(0, V), the latter by
/// tensor Gauss-Hermite quadrature.
Complex fock_moment(const Poly& poly, const FockOptions& options = {});

/// Expectation of an ordered word (same oracle as above).
Complex fock_moment(const Word& word, const CCRBasis& basis, const FockOptions& options = {});

}  // namespace qustat::ccr
