#pragma once

#include <vector>

#include "qustat/types.hpp"

namespace qustat::ccr {

/// Physicists' Hermite polynomial: H_0 = 1, H_1 = 2x,
/// H_{m+1} = 2x H_m - 2m H_{m-1}.
double hermite(int m, double x);

/// Monomial coefficients c_k of H_m(x) = sum_k c_k x^k.
std::vector<double> hermite_coefficients(int m);

/// H_m(X / scale) for a square matrix X, by the same recurrence.
Matrix hermite_op(int m, const Matrix& x, double scale = 1.0);

struct OrthogonalityCheck {
  double max_residual = 0.0;
  int worst_a = 0;  // Q power of the worst lower-order monomial
  int worst_b = 0;  // P power
};

/// Largest normalized |<S[H_n(Q/sqrt(2)s) H_m(P/sqrt(2)s)], S[Q^a P^b]>| over
/// all a + b < n + m, in the thermal state of variance sigma_sq on a Fock
/// space truncated at `trunc` levels. The inner product is
/// <X, Y> = Tr(state X Y), normalized by sqrt(<X,X><Y,Y>).
OrthogonalityCheck hermite_orthogonality_check(int n, int m, double sigma_sq, int trunc = 64,
                                               int max_order = 6, double tail_tol = 1e-12);

}  // namespace qustat::ccr
