#include "qustat/ccr/polynomial.hpp"

#include <algorithm>
#include <cmath>
#include <bit>
#include <unordered_map>

#include "qustat/ccr/hermite.hpp"
#include "qustat/error.hpp"

namespace qustat::ccr {

Word canonical(Word w, const CCRBasis& basis) {
  for (int a : w) basis.check_symbol(a);
  auto key = [&](int a) {
    const int m = basis.mode(a);
    return m == 0 ? std::pair{0, a} : std::pair{m, 0};
  };
  std::stable_sort(w.begin(), w.end(), [&](int x, int y) { return key(x) < key(y); });
  return w;
}

Poly Poly::constant(const CCRBasis& basis, Complex c) {
  Poly p(&basis);
  p.add({}, c);
  return p;
}

Poly Poly::variable(const CCRBasis& basis, int a) {
  basis.check_symbol(a);
  Poly p(&basis);
  p.add({a}, 1.0);
  return p;
}

int Poly::degree() const {
  int d = 0;
  for (const auto& [w, _] : terms_) d = std::max(d, static_cast<int>(w.size()));
  return d;
}

void Poly::add(const Word& w, Complex c) {
  if (c == Complex(0.0)) return;
  terms_[canonical(w, *basis_)] += c;
}

Poly& Poly::operator+=(const Poly& o) {
  if (!basis_) basis_ = o.basis_;
  for (const auto& [w, c] : o.terms_) terms_[w] += c;
  return *this;
}

Poly& Poly::operator-=(const Poly& o) {
  if (!basis_) basis_ = o.basis_;
  for (const auto& [w, c] : o.terms_) terms_[w] -= c;
  return *this;
}

Poly& Poly::operator*=(Complex c) {
  for (auto& [_, v] : terms_) v *= c;
  return *this;
}

Poly operator*(const Poly& a, const Poly& b) {
  Poly out(a.basis_ ? a.basis_ : b.basis_);
  Word w;
  for (const auto& [wa, ca] : a.terms_)
    for (const auto& [wb, cb] : b.terms_) {
      w = wa;
      w.insert(w.end(), wb.begin(), wb.end());
      out.add(w, ca * cb);
    }
  return out;
}

void Poly::prune(double tol) {
  for (auto it = terms_.begin(); it != terms_.end();)
    it = std::abs(it->second) <= tol ? terms_.erase(it) : std::next(it);
}

double Poly::distance(const Poly& other) const {
  double worst = 0.0;
  for (const auto& [w, c] : terms_) {
    auto it = other.terms_.find(w);
    worst = std::max(worst, std::abs(c - (it == other.terms_.end() ? Complex(0.0) : it->second)));
  }
  for (const auto& [w, c] : other.terms_)
    if (!terms_.count(w)) worst = std::max(worst, std::abs(c));
  return worst;
}

Poly jordan(const Poly& x, const Poly& y) {
  Poly out = x * y + y * x;
  out *= 0.5;
  return out;
}

Poly power(const Poly& p, int k, std::size_t max_terms) {
  if (k < 0) throw ValidationError("power: negative exponent");
  Poly out = Poly::constant(p.basis(), 1.0);
  for (int i = 0; i < k; ++i) {
    out = out * p;
    out.prune();
    if (out.size() > max_terms)
      throw BudgetError("polynomial expansion needs more than " + std::to_string(max_terms) +
                            " distinct words",
                        out.size(), max_terms);
  }
  return out;
}

Poly symmetric_monomial(const CCRBasis& basis, const std::vector<int>& m) {
  if (static_cast<int>(m.size()) != basis.size())
    throw ValidationError("multiplicity vector length differs from the basis size");
  Poly out = Poly::constant(basis, 1.0);
  for (int a = 0; a < basis.size(); ++a) {
    if (m[a] < 0) throw ValidationError("negative multiplicity");
    if (basis.symbols[a].kind != SymbolInfo::Kind::classical) continue;
    for (int i = 0; i < m[a]; ++i) out = out * Poly::variable(basis, a);
  }
  // Each oscillator: Weyl(q f) = (Q Weyl(f) + Weyl(f) Q) / 2, and q, p enter linearly.
  for (int o = 0; o < basis.num_oscillators(); ++o) {
    const int q = basis.num_classical() + 2 * o;
    const int p = q + 1;
    Poly s = Poly::constant(basis, 1.0);
    for (int i = 0; i < m[q]; ++i) s = jordan(Poly::variable(basis, q), s);
    for (int i = 0; i < m[p]; ++i) s = jordan(Poly::variable(basis, p), s);
    out = out * s;
  }
  out.prune();
  return out;
}

Poly wick_ordered(const CCRBasis& basis, const std::vector<int>& m) {
  if (static_cast<int>(m.size()) != basis.size())
    throw ValidationError("multiplicity vector length differs from the basis size");
  std::vector<int> list;
  for (int a = 0; a < basis.size(); ++a)
    for (int i = 0; i < m[a]; ++i) list.push_back(a);
  const int len = static_cast<int>(list.size());

  std::map<std::vector<int>, Poly> mono_cache;
  Poly out(&basis);
  std::vector<char> paired(len, 0);
  auto rec = [&](auto&& self, int pos, double weight, int pairs) -> void {
    if (pos == len) {
      std::vector<int> rest(basis.size(), 0);
      for (int i = 0; i < len; ++i)
        if (!paired[i]) ++rest[list[i]];
      auto it = mono_cache.find(rest);
      if (it == mono_cache.end()) it = mono_cache.emplace(rest, symmetric_monomial(basis, rest)).first;
      Poly term = it->second;
      term *= (pairs % 2 ? -weight : weight);
      out += term;
      return;
    }
    if (paired[pos]) {
      self(self, pos + 1, weight, pairs);
      return;
    }
    self(self, pos + 1, weight, pairs);
    for (int j = pos + 1; j < len; ++j) {
      if (paired[j]) continue;
      const double g = basis.gram(list[pos], list[j]);
      if (g == 0.0) continue;
      paired[pos] = paired[j] = 1;
      self(self, pos + 1, weight * g, pairs + 1);
      paired[pos] = paired[j] = 0;
    }
  };
  rec(rec, 0, 1.0, 0);
  out.prune();
  return out;
}

Poly hermite_product(const CCRBasis& basis, const std::vector<int>& m) {
  if (static_cast<int>(m.size()) != basis.size())
    throw ValidationError("multiplicity vector length differs from the basis size");
  // Commutative expansion: map from exponent vector to coefficient.
  std::map<std::vector<int>, double> comm{{std::vector<int>(basis.size(), 0), 1.0}};
  for (int a = 0; a < basis.size(); ++a) {
    if (m[a] == 0) continue;
    const auto h = hermite_coefficients(m[a]);
    const double scale = 1.0 / std::sqrt(2.0 * basis.variance(a));
    std::map<std::vector<int>, double> next;
    for (const auto& [e, c] : comm)
      for (int k = 0; k <= m[a]; ++k) {
        if (h[k] == 0.0) continue;
        auto e2 = e;
        e2[a] += k;
        next[e2] += c * h[k] * std::pow(scale, k);
      }
    comm = std::move(next);
  }
  Poly out(&basis);
  for (const auto& [e, c] : comm) {
    Poly t = symmetric_monomial(basis, e);
    t *= c;
    out += t;
  }
  out.prune();
  return out;
}

namespace {

// Pair-partition sum over the positions of one mode, memoized on the set of
// positions still to be paired.
Complex mode_moment(const std::vector<int>& w, const CCRBasis& basis) {
  const int len = static_cast<int>(w.size());
  if (len % 2) return 0.0;
  if (len == 0) return 1.0;
  if (len > 30) throw BudgetError("word too long for pair-partition expansion", len, 30);
  std::unordered_map<std::uint32_t, Complex> memo;
  auto rec = [&](auto&& self, std::uint32_t left) -> Complex {
    if (left == 0) return 1.0;
    if (auto it = memo.find(left); it != memo.end()) return it->second;
    const int first = std::countr_zero(left);
    const std::uint32_t rest = left & ~(1u << first);
    Complex acc = 0.0;
    for (int j = first + 1; j < len; ++j) {
      if (!(rest & (1u << j))) continue;
      const Complex c = basis.two_point(w[first], w[j]);
      if (c == Complex(0.0)) continue;
      acc += c * self(self, rest & ~(1u << j));
    }
    memo.emplace(left, acc);
    return acc;
  };
  return rec(rec, (len == 32 ? ~0u : ((1u << len) - 1)));
}

}  // namespace

Complex quasifree_moment_wick(const Word& vars, const CCRBasis& basis) {
  for (int a : vars) basis.check_symbol(a);
  if (vars.size() % 2) return 0.0;
  // Distinct modes have vanishing two-point functions, so the sum factorizes.
  std::map<int, std::vector<int>> by_mode;
  for (int a : vars) by_mode[basis.mode(a)].push_back(a);
  Complex out = 1.0;
  for (const auto& [_, w] : by_mode) {
    out *= mode_moment(w, basis);
    if (out == Complex(0.0)) break;
  }
  return out;
}

Complex quasifree_moment_wick(const Poly& p) {
  Complex out = 0.0;
  for (const auto& [w, c] : p.terms()) out += c * quasifree_moment_wick(w, p.basis());
  return out;
}

}  // namespace qustat::ccr
