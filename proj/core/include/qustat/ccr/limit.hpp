#pragma once

#include <cstdint>
#include <vector>

#include <json.hpp>

#include "qustat/ccr/basis.hpp"
#include "qustat/ccr/fock.hpp"
#include "qustat/ccr/polynomial.hpp"
#include "qustat/hoeffding.hpp"
#include "qustat/operator.hpp"

namespace qustat::ccr {

struct LimitTerm {
  std::vector<int> m;  // multiplicity of each basis element, |m| = c
  double coeff = 0.0;  // k_m
};

/// U = binom(r,c) sum_m k_m W_m, where W_m is the Wick-ordered symmetric
/// product of the generators listed by m (see wick_ordered).
struct LimitPolynomial {
  int c = 0;
  int r = 0;
  double binom_factor = 1.0;
  std::vector<LimitTerm> terms;
};

/// Expands K_c over {1, F_1, ..., F_{d^2-1}}^{⊗c} and collects the
/// coefficients by multiplicity. Throws ValidationError for a fully
/// degenerate kernel.
LimitPolynomial kernel_to_limit(const Kernel& k, const DegeneracyReport& report,
                                const CCRBasis& basis);

/// The limit as a polynomial in the canonical variables.
Poly limit_poly(const LimitPolynomial& u, const CCRBasis& basis);

enum class MomentMethod { wick, fock };

struct LimitOptions {
  FockOptions fock{};
  std::size_t max_terms = std::size_t{1} << 20;
};

/// phi(U^p). The wick route expands U^p and sums pair partitions; the fock
/// route evaluates U as an operator on the truncated thermal representation
/// when there is at most one oscillator, and word by word otherwise.
double limit_moment(const LimitPolynomial& u, const CCRBasis& basis, int p, MomentMethod method,
                    const LimitOptions& options = {});

nlohmann::json to_json(const LimitPolynomial& u);

/// Draws from the law of U under phi: classical Gaussians mixed with
/// Born-rule samples of the truncated oscillator operators.
class LimitSampler {
 public:
  LimitSampler(const LimitPolynomial& u, const CCRBasis& basis, int trunc = 64);

  /// Draw i uses the stream (seed, i); the result does not depend on threads.
  std::vector<double> sample(std::size_t count, std::uint64_t seed, int threads = 1) const;

 private:
  struct Discrete {
    std::vector<double> values;
    std::vector<double> cdf;
  };
  struct MixedTerm {
    std::vector<int> classical_exponents;
    Complex coeff;
    Matrix op;  // on the joint oscillator space
  };

  double draw(std::uint64_t seed, std::size_t index) const;
  static Discrete spectrum(const Matrix& op, const RealVector& weights);

  int nc_ = 0;
  RealMatrix chol_;
  std::vector<std::pair<std::vector<int>, double>> classical_terms_;
  std::vector<Discrete> oscillators_;
  std::vector<MixedTerm> mixed_;
  RealVector joint_weights_;
};

}  // namespace qustat::ccr
