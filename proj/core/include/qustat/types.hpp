#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>

#include <Eigen/Dense>

namespace qustat {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

/// d^n with overflow detection; throws BudgetError past 2^62.
std::size_t ipow(std::size_t base, int exponent);

/// Largest total Hilbert-space dimension (d^n) any dense operation may allocate.
struct Budget {
  std::size_t max_dim = std::size_t{1} << 14;

  /// Throws BudgetError when d^n exceeds max_dim.
  void check(int d, int n) const;
  static std::size_t bytes_for(std::size_t dim) { return dim * dim * sizeof(Complex); }
};

}  // namespace qustat
