#pragma once

#include <vector>

#include "qustat/hoeffding.hpp"
#include "qustat/operator.hpp"
#include "qustat/state.hpp"
#include "qustat/types.hpp"

namespace qustat {

struct UStatistic {
  int n = 0;
  Kernel kernel;
  HermitianOperator op;  // on d^n
};

/// binom(n, k) as a double (exact for the sizes used here).
double binom(int n, int k);

/// U_n = binom(n,r)^{-1} sum_beta K^{(beta)}.
UStatistic assemble_direct(const Kernel& k, int n, const Budget& budget = {});

/// Tr(rho^{⊗n} U^2) - theta^2.
double variance_exact(const UStatistic& u, const DensityMatrix& rho);

/// sum_l binom(r,l)^2 binom(n,l)^{-1} E(K_l^2).
double variance_formula(const DegeneracyReport& report, int n);

/// Multiplier applied to U_n - theta before taking moments: base^{exponent/2},
/// with base n (the default) or n - 1 (the order-two convention).
struct Scaling {
  enum class Base { n, n_minus_1 };
  int exponent = 1;
  Base base = Base::n;

  double factor(int n) const;
};

/// Tr(rho^{⊗n} (s (U_n - theta))^p) for each p in ps. Uses dense products for
/// p <= 4 and an eigendecomposition when a larger p is requested.
std::vector<double> centered_moments(const Kernel& k, const DensityMatrix& rho, int n,
                                     const std::vector<int>& ps, Scaling scaling,
                                     const Budget& budget = {});

double centered_moment(const Kernel& k, const DensityMatrix& rho, int n, int p, Scaling scaling,
                       const Budget& budget = {});

/// Same as centered_moments for an already assembled U_n.
std::vector<double> centered_moments(const UStatistic& u, const DensityMatrix& rho,
                                     const std::vector<int>& ps, Scaling scaling);

}  // namespace qustat
