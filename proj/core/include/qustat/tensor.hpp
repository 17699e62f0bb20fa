#pragma once

#include <span>
#include <vector>

#include "qustat/types.hpp"

// Index arithmetic on (C^d)^{⊗n}. Site 0 is the most significant tensor
// factor, so kron(A, B) puts A on site 0. All site indices here are 0-based.
namespace qustat::tensor {

Matrix kron(const Matrix& a, const Matrix& b);

/// a^{⊗n}; n = 0 gives the 1x1 identity.
Matrix kron_power(const Matrix& a, int n);

/// Places a d^r x d^r operator on the (distinct, any order) sites `sites` of an
/// n-site system and adds `scale` times it to `acc`. The l-th tensor factor of
/// `op` lands on sites[l]; identity elsewhere.
void embed_add(Matrix& acc, const Matrix& op, std::span<const int> sites, int d, int n,
               Complex scale = 1.0);

/// Conjugation by the site permutation that moves site k to perm[k].
Matrix permute_sites(const Matrix& m, std::span<const int> perm, int d);

/// (A acting on `site`) * m, without forming the ampliation.
void apply_site_left(Matrix& m, const Matrix& a, int site, int d, int n);

/// m * (A acting on `site`).
void apply_site_right(Matrix& m, const Matrix& a, int site, int d, int n);

/// Contracts the listed sites of an n-site operator against the single-site
/// state rho: returns Tr_{sites}[(rho^{⊗sites} ⊗ 1) m] on the remaining sites,
/// kept in increasing order.
Matrix partial_expectation(const Matrix& m, const Matrix& rho, std::span<const int> sites,
                           int d, int n);

/// Tr(rho^{⊗n} m).
Complex product_expectation(const Matrix& m, const Matrix& rho, int d, int n);

/// Tr(rho^{⊗n} a b) without forming the product a b.
Complex product_expectation(const Matrix& a, const Matrix& b, const Matrix& rho, int d, int n);

/// Diagonal of rho^{⊗n} (length d^n).
RealVector product_diagonal(const Matrix& rho, int n);

bool is_diagonal(const Matrix& m, double tol = 0.0);

}  // namespace qustat::tensor
