#pragma once

#include <map>
#include <vector>

#include "qustat/ccr/basis.hpp"
#include "qustat/types.hpp"

namespace qustat::ccr {

/// Ordered product G(F_{w_0}) G(F_{w_1}) ... of canonical variables.
using Word = std::vector<int>;

/// Stable-sorts a word by mode. Classical symbols commute with everything and
/// different oscillators commute, so this preserves the operator it denotes.
Word canonical(Word w, const CCRBasis& basis);

/// Noncommutative polynomial in the canonical variables G(F_a), stored on
/// canonical words.
class Poly {
 public:
  Poly() = default;
  explicit Poly(const CCRBasis* basis) : basis_(basis) {}

  static Poly constant(const CCRBasis& basis, Complex c);
  static Poly variable(const CCRBasis& basis, int a);

  const std::map<Word, Complex>& terms() const { return terms_; }
  const CCRBasis& basis() const { return *basis_; }
  std::size_t size() const { return terms_.size(); }
  int degree() const;

  void add(const Word& w, Complex c);
  Poly& operator+=(const Poly& o);
  Poly& operator-=(const Poly& o);
  Poly& operator*=(Complex c);
  friend Poly operator+(Poly a, const Poly& b) { return a += b; }
  friend Poly operator-(Poly a, const Poly& b) { return a -= b; }
  friend Poly operator*(Poly a, Complex c) { return a *= c; }
  friend Poly operator*(const Poly& a, const Poly& b);

  /// Drops coefficients with modulus <= tol.
  void prune(double tol = 0.0);
  /// Largest coefficient modulus of this - other.
  double distance(const Poly& other) const;

 private:
  const CCRBasis* basis_ = nullptr;
  std::map<Word, Complex> terms_;
};

/// (XY + YX) / 2.
Poly jordan(const Poly& x, const Poly& y);

/// p^k with a cap on the number of distinct words (BudgetError beyond it).
Poly power(const Poly& p, int k, std::size_t max_terms);

/// S[prod_a G(F_a)^{m_a}], built by nested Jordan products. Equal as an
/// operator to the average over all orderings; the word expansion may differ
/// by terms that vanish through the central commutators.
Poly symmetric_monomial(const CCRBasis& basis, const std::vector<int>& m);

/// Wick-ordered symmetric product of the listed generators: the sum over
/// partial pairings of (-1)^{#pairs} prod (F_a,F_b)_rho S[unpaired]. For a
/// single generator of variance s^2 this is (s/sqrt2)^m H_m(G/(sqrt2 s)).
Poly wick_ordered(const CCRBasis& basis, const std::vector<int>& m);

/// S[prod_a H_{m_a}(G(F_a) / sqrt(2 Var F_a))], Hermite in the physicists'
/// convention, expanded then symmetrically ordered monomial by monomial.
Poly hermite_product(const CCRBasis& basis, const std::vector<int>& m);

/// Quasifree expectation of the ordered word: zero for odd length, otherwise
/// the sum over pair partitions of prod C(F_a, F_b) with a before b.
Complex quasifree_moment_wick(const Word& vars, const CCRBasis& basis);

/// Linear extension of quasifree_moment_wick.
Complex quasifree_moment_wick(const Poly& p);

}  // namespace qustat::ccr
