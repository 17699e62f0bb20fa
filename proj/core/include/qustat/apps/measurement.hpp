#pragma once

#include <cstdint>
#include <vector>

#include "qustat/operator.hpp"
#include "qustat/state.hpp"

namespace qustat::apps {

/// Distinct eigenvalues of an observable with their Born probabilities.
struct OutcomeDistribution {
  std::vector<double> values;  // increasing
  std::vector<double> probabilities;

  /// Inverse-CDF lookup for u in [0,1).
  double quantile_draw(double u) const;
};

/// Outcome law of O on (C^d)^{⊗n} in the product state rho^{⊗n}. Eigenvalues
/// closer than merge_tol are merged into one outcome. Throws ToleranceError
/// when the probabilities miss unit mass by more than 1e-8.
OutcomeDistribution outcome_distribution(const HermitianOperator& o, const DensityMatrix& rho,
                                         int n, double merge_tol = 1e-9);

/// Same for an arbitrary density matrix on the full space.
OutcomeDistribution outcome_distribution(const HermitianOperator& o, const Matrix& state,
                                         double merge_tol = 1e-9);

/// Born-rule samples; draw i uses the stream (seed, i).
std::vector<double> sample_outcomes(const OutcomeDistribution& dist, std::size_t replicates,
                                    std::uint64_t seed, int threads = 1);

/// Eigendecomposes O and samples `replicates` measurement results in rho^{⊗n}.
std::vector<double> simulate_measurement(const HermitianOperator& o, const DensityMatrix& rho,
                                         int n, std::size_t replicates, std::uint64_t seed,
                                         int threads = 1);

}  // namespace qustat::apps
