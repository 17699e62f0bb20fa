#pragma once

#include <memory>
#include <string>
#include <vector>

#include "qustat/operator.hpp"
#include "qustat/state.hpp"
#include "qustat/types.hpp"
#include "qustat/ustat.hpp"

namespace qustat {

/// Single-site operator built from the kernel factors A_1..A_l: either a
/// factor itself or the symmetrized product S(children) of sub-symbols.
struct SymbolTree {
  int leaf = -1;  // factor index (0-based) when this is a leaf
  std::vector<SymbolTree> children;

  bool is_leaf() const { return leaf >= 0; }
  /// Canonical text: "A1" or "S(A1,S(A2,A3))" with children sorted.
  std::string key() const;
};

/// coeff * n^{-t/2} * S(X_1, ..., X_m) where each X is F_n(A_i) for a leaf
/// and P_n(B) for a composite symbol B.
struct FluctuationTerm {
  int t = 0;
  double coeff = 0.0;
  std::vector<SymbolTree> symbols;

  std::string describe() const;
};

/// l! binom(n,l) n^{-l/2} U_n as a polynomial in fluctuation operators and
/// empirical averages.
struct FluctuationForm {
  int l = 0;
  std::vector<FluctuationTerm> terms;  // sorted by (t, description)

  std::string describe() const;
};

struct FluctuationResult {
  FluctuationForm form;
  /// Evaluation of the form on d^n, i.e. l! binom(n,l) n^{-l/2} U_n.
  HermitianOperator scaled;
  UStatistic ustat;
};

struct FluctuationOptions {
  int max_depth = 6;
  double center_tol = 1e-10;
  Budget budget{};
};

/// Symbolic expansion only (independent of n).
FluctuationForm fluctuation_form(int l, int max_depth = 6);

/// Expands and evaluates U_n for the kernel symmetrize_kernel(factors), with
/// every factor centered under rho.
FluctuationResult assemble_fluctuation(std::span<const HermitianOperator> factors,
                                       const DensityMatrix& rho, int n,
                                       const FluctuationOptions& options = {});

/// sum_k A^{(k)} applied from the left: out = Abar * m.
Matrix collective_apply(const Matrix& a, const Matrix& m, int d, int n);

}  // namespace qustat
