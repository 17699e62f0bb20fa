#include "qustat/state.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "qustat/error.hpp"

namespace qustat {

DensityMatrix::DensityMatrix(const Matrix& entries) {
  if (entries.rows() != entries.cols() || entries.rows() == 0)
    throw ValidationError("density matrix must be square and nonempty");
  if (!entries.allFinite()) throw ValidationError("density matrix has non-finite entries");
  if (hermitian_defect(entries) > 1e-12)
    throw ValidationError("density matrix is not selfadjoint");
  entries_ = 0.5 * (entries + entries.adjoint());
  const double tr = entries_.trace().real();
  if (std::abs(tr - 1.0) > 1e-12)
    throw ValidationError("density matrix trace " + std::to_string(tr) + " != 1");
  Eigen::SelfAdjointEigenSolver<Matrix> es(entries_);
  if (es.info() != Eigen::Success) throw ValidationError("density matrix eigensolver failed");
  const int d = static_cast<int>(entries_.rows());
  // Eigen returns ascending order; store descending.
  eigenvalues_ = es.eigenvalues().reverse();
  eigenvectors_ = es.eigenvectors().rowwise().reverse();
  if (eigenvalues_(d - 1) < -1e-12)
    throw ValidationError("density matrix is not positive semidefinite");
}

DensityMatrix DensityMatrix::diagonal(const RealVector& probabilities) {
  Matrix m = Matrix::Zero(probabilities.size(), probabilities.size());
  for (Eigen::Index i = 0; i < probabilities.size(); ++i) m(i, i) = probabilities(i);
  DensityMatrix out(m);
  // Keep the computational basis as eigenbasis when the input is diagonal,
  // ordered by decreasing probability.
  std::vector<Eigen::Index> order(probabilities.size());
  for (Eigen::Index i = 0; i < probabilities.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](auto a, auto b) { return probabilities(a) > probabilities(b); });
  out.eigenvectors_ = Matrix::Zero(probabilities.size(), probabilities.size());
  for (Eigen::Index k = 0; k < probabilities.size(); ++k) {
    out.eigenvalues_(k) = probabilities(order[k]);
    out.eigenvectors_(order[k], k) = 1.0;
  }
  return out;
}

DensityMatrix DensityMatrix::from_spectrum(const RealVector& eigenvalues, const Matrix& rotation) {
  const Eigen::Index d = eigenvalues.size();
  if (rotation.rows() != d || rotation.cols() != d)
    throw ValidationError("rotation must be d x d");
  if ((rotation.adjoint() * rotation - Matrix::Identity(d, d)).cwiseAbs().maxCoeff() > 1e-10)
    throw ValidationError("rotation is not unitary");
  Matrix diag = Matrix::Zero(d, d);
  for (Eigen::Index i = 0; i < d; ++i) diag(i, i) = eigenvalues(i);
  Matrix m = rotation * diag * rotation.adjoint();
  m = 0.5 * (m + m.adjoint());
  return DensityMatrix(m);
}

DensityMatrix DensityMatrix::pure(const Vector& psi) {
  const double nrm = psi.norm();
  if (nrm == 0.0) throw ValidationError("pure state vector is zero");
  const Vector v = psi / nrm;
  Matrix m = v * v.adjoint();
  m = 0.5 * (m + m.adjoint());
  m /= m.trace().real();
  return DensityMatrix(m);
}

bool DensityMatrix::strictly_positive(double tol) const {
  return eigenvalues_(eigenvalues_.size() - 1) > tol;
}

bool DensityMatrix::is_pure(double tol) const {
  return std::abs((entries_ * entries_).trace().real() - 1.0) <= tol;
}

double DensityMatrix::min_gap() const {
  double gap = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i + 1 < eigenvalues_.size(); ++i)
    gap = std::min(gap, eigenvalues_(i) - eigenvalues_(i + 1));
  return gap;
}

void DensityMatrix::require_nondegenerate(double gap_tol) const {
  if (!strictly_positive())
    throw ValidationError("state must be strictly positive (faithful)");
  if (min_gap() <= gap_tol)
    throw ValidationError("state spectrum is degenerate: eigenvalue gap " +
                          std::to_string(min_gap()) + " <= " + std::to_string(gap_tol));
}

double DensityMatrix::expectation(const Matrix& a) const {
  if (a.rows() != entries_.rows()) throw ValidationError("expectation: dimension mismatch");
  return (entries_ * a).trace().real();
}

std::pair<double, double> state_covariance(const HermitianOperator& a, const HermitianOperator& b,
                                           const DensityMatrix& rho) {
  if (a.dim() != static_cast<std::size_t>(rho.d()) || b.dim() != static_cast<std::size_t>(rho.d()))
    throw ValidationError("state_covariance: dimension mismatch");
  const Matrix ab = a.matrix() * b.matrix();
  const Matrix ba = b.matrix() * a.matrix();
  const Complex sym = (rho.matrix() * (ab + ba)).trace() * 0.5;
  const Complex sympl = Complex(0.0, 0.5) * (rho.matrix() * (ab - ba)).trace();
  const double scale = std::max(1.0, a.matrix().norm() * b.matrix().norm());
  if (std::abs(sym.imag()) > 1e-12 * scale || std::abs(sympl.imag()) > 1e-12 * scale)
    throw ToleranceError("state_covariance: imaginary residue above 1e-12");
  return {sym.real(), sympl.real()};
}

}  // namespace qustat
