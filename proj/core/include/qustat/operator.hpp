#pragma once

#include <span>
#include <string>
#include <vector>

#include "qustat/types.hpp"

namespace qustat {

/// Dense selfadjoint operator. Construction checks selfadjointness and
/// finiteness, then stores the exact Hermitian part (M + M†)/2.
class HermitianOperator {
 public:
  HermitianOperator() = default;

  /// Requires max |M - M†| <= tol (absolute, entrywise).
  explicit HermitianOperator(Matrix m, double tol = 1e-12);

  /// For results of arithmetic chains: tolerates drift up to 1e-10 relative
  /// to the largest entry before projecting onto the Hermitian part.
  static HermitianOperator from_arithmetic(Matrix m);

  static HermitianOperator identity(std::size_t dim);

  std::size_t dim() const { return static_cast<std::size_t>(m_.rows()); }
  const Matrix& matrix() const& { return m_; }
  Matrix&& take() && { return std::move(m_); }

  double frobenius_norm() const { return m_.norm(); }

 private:
  Matrix m_;
};

/// Largest entrywise |M - M†|.
double hermitian_defect(const Matrix& m);

/// Unordered subset of {1,...,n}; stored sorted, 1-based.
class SiteSubset {
 public:
  SiteSubset(int n, std::vector<int> indices);

  static SiteSubset all(int n);
  static SiteSubset empty(int n);
  /// Subset of {1..n} from a bit mask (bit k -> site k+1).
  static SiteSubset from_mask(int n, unsigned mask);

  int n() const { return n_; }
  int size() const { return static_cast<int>(indices_.size()); }
  const std::vector<int>& indices() const { return indices_; }
  std::vector<int> zero_based() const;
  /// Sites of {1..n} not in this subset.
  SiteSubset complement() const;
  unsigned mask() const;

  bool operator==(const SiteSubset&) const = default;

 private:
  int n_;
  std::vector<int> indices_;
};

/// Selfadjoint, permutation-symmetric operator on (C^d)^{⊗r}.
class Kernel {
 public:
  /// Validates selfadjointness and invariance under adjacent transpositions
  /// (Frobenius residual <= sym_tol).
  Kernel(int d, int r, HermitianOperator op, double sym_tol = 1e-10);

  int d() const { return d_; }
  int r() const { return r_; }
  const HermitianOperator& op() const { return op_; }
  const Matrix& matrix() const { return op_.matrix(); }

 private:
  int d_;
  int r_;
  HermitianOperator op_;
};

/// Frobenius norm of pi(tau) M pi(tau)* - M maximised over adjacent transpositions.
double permutation_asymmetry(const Matrix& m, int d, int sites);

/// K^{(beta)} on n sites: the l-th factor of K acts on beta_l, identity elsewhere.
HermitianOperator embed(const Kernel& k, const SiteSubset& beta, int n);

/// A^{(site)} for a 1-based site.
HermitianOperator ampliate(const HermitianOperator& a, int site, int n);

/// (1/k!) sum over orderings of the product of `ops`.
HermitianOperator symmetrize(std::span<const HermitianOperator> ops);

/// (1/r!) sum_tau A_tau(1) ⊗ ... ⊗ A_tau(r).
Kernel symmetrize_kernel(std::span<const HermitianOperator> ops);

/// Projects an arbitrary operator on r sites onto the permutation-symmetric
/// subspace by averaging over all r! site permutations.
Matrix site_symmetrize(const Matrix& m, int d, int r);

namespace pauli {
HermitianOperator identity();
HermitianOperator x();
HermitianOperator y();
HermitianOperator z();
}  // namespace pauli

}  // namespace qustat
