#pragma once

#include <cstdint>
#include <vector>

#include "qustat/operator.hpp"
#include "qustat/types.hpp"
#include "qustat/ustat.hpp"

namespace qustat {

/// Symmetric function h on {0..d-1}^r stored as a table of d^r values, first
/// argument most significant (the layout of a diagonal kernel).
struct ClassicalKernel {
  int d = 0;
  int r = 0;
  std::vector<double> values;

  double operator()(std::span<const int> args) const;
  /// Validates size and argument-permutation symmetry (1e-12).
  void validate() const;
};

/// The diagonal of a diagonal kernel, read as a classical kernel.
ClassicalKernel classical_from_diagonal(const Kernel& k);

/// E h(X_1..X_r) for i.i.d. X_i ~ lambda.
double classical_theta(const ClassicalKernel& h, const RealVector& lambda);

/// U_n from value counts of a sample (counts sums to n).
double classical_ustat_from_counts(const ClassicalKernel& h, std::span<const int> counts);

struct MonteCarloEstimate {
  double estimate = 0.0;
  double std_error = 0.0;
};

/// Monte-Carlo p-th moment of s(U_n - theta) for samples of size n drawn from
/// lambda. Replicate i uses the stream (seed, i); results do not depend on
/// the thread count.
MonteCarloEstimate classical_mc_oracle(const ClassicalKernel& h, const RealVector& lambda, int n,
                                       int p, Scaling scaling, std::int64_t replicates,
                                       std::uint64_t seed, int threads = 1);

/// Uniform double in [0,1) from the top 53 bits of one draw.
double uniform01(std::uint64_t bits);

}  // namespace qustat
