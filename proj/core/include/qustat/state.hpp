#pragma once

#include <utility>

#include "qustat/operator.hpp"
#include "qustat/types.hpp"

namespace qustat {

/// Single-site density matrix with its spectral decomposition. Eigenvalues
/// are sorted in decreasing order; they are the lambda_i (equivalently mu_i)
/// of the CCR construction.
class DensityMatrix {
 public:
  /// Validates positivity (smallest eigenvalue >= -1e-12) and unit trace.
  explicit DensityMatrix(const Matrix& entries);

  static DensityMatrix diagonal(const RealVector& probabilities);
  /// rotation * diag(eigenvalues) * rotation†; rotation must be unitary.
  static DensityMatrix from_spectrum(const RealVector& eigenvalues, const Matrix& rotation);
  static DensityMatrix pure(const Vector& psi);

  int d() const { return static_cast<int>(entries_.rows()); }
  const Matrix& matrix() const { return entries_; }
  const RealVector& eigenvalues() const { return eigenvalues_; }
  const Matrix& eigenvectors() const { return eigenvectors_; }

  bool strictly_positive(double tol = 1e-12) const;
  bool is_pure(double tol = 1e-10) const;
  /// Smallest gap between consecutive eigenvalues (infinity for d = 1).
  double min_gap() const;
  /// Throws ValidationError unless strictly positive with all gaps > gap_tol.
  void require_nondegenerate(double gap_tol) const;

  double expectation(const Matrix& a) const;

 private:
  Matrix entries_;
  RealVector eigenvalues_;
  Matrix eigenvectors_;
};

/// ((A,B)_rho, sigma(A,B)) = (Tr(rho A∘B), (i/2) Tr(rho [A,B])).
std::pair<double, double> state_covariance(const HermitianOperator& a,
                                           const HermitianOperator& b,
                                           const DensityMatrix& rho);

/// Haar-random unitary (QR of a complex Ginibre matrix with phase fix).
template <class Rng>
Matrix random_unitary(int d, Rng& rng);

}  // namespace qustat

#include <random>

namespace qustat {

template <class Rng>
Matrix random_unitary(int d, Rng& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Matrix z(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) z(i, j) = Complex(g(rng), g(rng));
  Eigen::HouseholderQR<Matrix> qr(z);
  Matrix q = qr.householderQ();
  Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < d; ++j) {
    const Complex diag = r(j, j);
    const double mag = std::abs(diag);
    if (mag > 0) q.col(j) *= diag / mag;
  }
  return q;
}

}  // namespace qustat
