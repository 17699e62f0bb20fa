#pragma once

#include <random>
#include <vector>

#include "qustat/operator.hpp"
#include "qustat/state.hpp"
#include "qustat/tensor.hpp"

namespace qustat::testing {

inline DensityMatrix diag_state(std::initializer_list<double> p) {
  RealVector v(static_cast<Eigen::Index>(p.size()));
  Eigen::Index i = 0;
  for (double x : p) v(i++) = x;
  return DensityMatrix::diagonal(v);
}

inline Kernel pauli_xy() {
  const std::vector<HermitianOperator> f{pauli::x(), pauli::y()};
  return symmetrize_kernel(f);
}

inline Kernel pauli_xx_yy() {
  const Matrix m = tensor::kron(pauli::x().matrix(), pauli::x().matrix()) +
                   tensor::kron(pauli::y().matrix(), pauli::y().matrix());
  return Kernel(2, 2, HermitianOperator(m));
}

inline Kernel zz() {
  return Kernel(2, 2, HermitianOperator(tensor::kron(pauli::z().matrix(), pauli::z().matrix())));
}

inline Matrix random_hermitian(int dim, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Matrix m(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) m(i, j) = Complex(g(rng), g(rng));
  return (m + m.adjoint()) / 2.0;
}

/// Random full-rank state with spectrum spread away from degeneracy.
inline DensityMatrix random_state(int d, std::mt19937_64& rng, bool rotate = true) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  RealVector p(d);
  for (int i = 0; i < d; ++i) p(i) = (i + 1) + 0.8 * u(rng);
  p /= p.sum();
  if (!rotate) return DensityMatrix::diagonal(p);
  return DensityMatrix::from_spectrum(p, random_unitary(d, rng));
}

inline Kernel random_kernel(int d, int r, std::mt19937_64& rng) {
  const Matrix m = site_symmetrize(random_hermitian(static_cast<int>(ipow(d, r)), rng), d, r);
  return Kernel(d, r, HermitianOperator::from_arithmetic(m));
}

inline double rel_diff(const Matrix& a, const Matrix& b) {
  return (a - b).norm() / std::max(1e-300, std::max(a.norm(), b.norm()));
}

}  // namespace qustat::testing
