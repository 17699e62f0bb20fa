#include "qustat/fluctuation.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "qustat/error.hpp"
#include "qustat/tensor.hpp"

namespace qustat {

std::string SymbolTree::key() const {
  if (is_leaf()) return "A" + std::to_string(leaf + 1);
  std::vector<std::string> parts;
  for (const auto& c : children) parts.push_back(c.key());
  std::sort(parts.begin(), parts.end());
  std::string out = "S(";
  for (std::size_t i = 0; i < parts.size(); ++i) out += (i ? "," : "") + parts[i];
  return out + ")";
}

std::string FluctuationTerm::describe() const {
  std::string out;
  const double mag = std::abs(coeff);
  out += coeff < 0 ? "- " : "+ ";
  if (mag != 1.0) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g*", mag);
    out += buf;
  }
  if (t > 0) out += "n^(-" + std::to_string(t) + "/2)*";
  std::vector<std::string> parts;
  for (const auto& s : symbols) parts.push_back(s.is_leaf() ? "F_n(" + s.key() + ")" : "P_n(" + s.key() + ")");
  std::sort(parts.begin(), parts.end());
  if (parts.size() > 1) out += "S(";
  for (std::size_t i = 0; i < parts.size(); ++i) out += (i ? "," : "") + parts[i];
  if (parts.size() > 1) out += ")";
  return out;
}

std::string FluctuationForm::describe() const {
  std::string out;
  for (const auto& t : terms) out += (out.empty() ? "" : " ") + t.describe();
  return out;
}

namespace {

using Term = std::vector<SymbolTree>;

std::string term_key(const Term& term) {
  std::vector<std::string> keys;
  for (const auto& s : term) keys.push_back(s.key());
  std::sort(keys.begin(), keys.end());
  std::string out;
  for (const auto& k : keys) out += k + "|";
  return out;
}

struct Expansion {
  std::map<std::string, std::pair<Term, double>> terms;

  void add(const Term& t, double c) {
    auto [it, fresh] = terms.try_emplace(term_key(t), t, 0.0);
    it->second.second += c;
  }
};

// Restricted growth strings: every set partition of {0..k-1}.
template <class F>
void for_each_partition(int k, F&& f) {
  std::vector<int> a(k, 0), mx(k, 0);
  while (true) {
    f(a);
    int i = k - 1;
    while (i > 0 && a[i] == mx[i - 1] + 1) --i;
    if (i <= 0) return;
    ++a[i];
    mx[i] = std::max(mx[i - 1], a[i]);
    for (int j = i + 1; j < k; ++j) {
      a[j] = 0;
      mx[j] = mx[i];
    }
  }
}

// D(X_1..X_k) = sum over distinct sites of prod X_i^{(k_i)}, expanded into
// symmetrized products of collective sums.
class Expander {
 public:
  const Expansion& expand(const Term& items) {
    const std::string key = term_key(items);
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    Expansion out;
    out.add(items, 1.0);
    const int k = static_cast<int>(items.size());
    if (k > 1) {
      for_each_partition(k, [&](const std::vector<int>& blocks_of) {
        const int nb = *std::max_element(blocks_of.begin(), blocks_of.end()) + 1;
        if (nb == k) return;  // the finest partition is D itself
        std::vector<Term> blocks(nb);
        for (int i = 0; i < k; ++i) blocks[blocks_of[i]].push_back(items[i]);
        Term merged;
        for (auto& b : blocks) {
          if (b.size() == 1) {
            merged.push_back(b.front());
          } else {
            SymbolTree node;
            node.children = std::move(b);
            merged.push_back(std::move(node));
          }
        }
        const Expansion& sub = expand(merged);
        for (const auto& [_, tc] : sub.terms) out.add(tc.first, -tc.second);
      });
    }
    return memo_.emplace(key, std::move(out)).first->second;
  }

 private:
  std::map<std::string, Expansion> memo_;
};

Matrix symbol_matrix(const SymbolTree& s, std::span<const HermitianOperator> factors) {
  if (s.is_leaf()) return factors[s.leaf].matrix();
  std::vector<HermitianOperator> parts;
  for (const auto& c : s.children) parts.push_back(HermitianOperator::from_arithmetic(symbol_matrix(c, factors)));
  return symmetrize(parts).matrix();
}

}  // namespace

FluctuationForm fluctuation_form(int l, int max_depth) {
  if (l < 1) throw ValidationError("fluctuation_form: need at least one factor");
  if (l > max_depth)
    throw ValidationError("fluctuation_form: order " + std::to_string(l) +
                          " exceeds the partition recursion depth " + std::to_string(max_depth));
  Term leaves(l);
  for (int i = 0; i < l; ++i) leaves[i].leaf = i;
  Expander ex;
  const Expansion& e = ex.expand(leaves);
  FluctuationForm form;
  form.l = l;
  for (const auto& [_, tc] : e.terms) {
    if (std::abs(tc.second) < 1e-12) continue;
    const int m = static_cast<int>(tc.first.size());
    int j = 0;
    for (const auto& s : tc.first) j += s.is_leaf() ? 1 : 0;
    form.terms.push_back({l + j - 2 * m, tc.second, tc.first});
  }
  std::stable_sort(form.terms.begin(), form.terms.end(), [](const auto& a, const auto& b) {
    if (a.t != b.t) return a.t < b.t;
    return a.describe() < b.describe();
  });
  return form;
}

Matrix collective_apply(const Matrix& a, const Matrix& m, int d, int n) {
  Matrix out = Matrix::Zero(m.rows(), m.cols());
  for (int s = 0; s < n; ++s) {
    Matrix tmp = m;
    tensor::apply_site_left(tmp, a, s, d, n);
    out += tmp;
  }
  return out;
}

FluctuationResult assemble_fluctuation(std::span<const HermitianOperator> factors,
                                       const DensityMatrix& rho, int n,
                                       const FluctuationOptions& options) {
  const int l = static_cast<int>(factors.size());
  if (l < 1) throw ValidationError("assemble_fluctuation: empty factor list");
  const int d = rho.d();
  for (const auto& a : factors) {
    if (static_cast<int>(a.dim()) != d) throw ValidationError("assemble_fluctuation: factor dimension mismatch");
    const double mean = rho.expectation(a.matrix());
    if (std::abs(mean) > options.center_tol * std::max(1.0, a.frobenius_norm()))
      throw ValidationError("assemble_fluctuation: factor is not centered (Tr(rho A) = " +
                            std::to_string(mean) + ")");
  }
  if (n < l) throw ValidationError("assemble_fluctuation: n < l");
  options.budget.check(d, n);

  FluctuationForm form = fluctuation_form(l, options.max_depth);
  const std::size_t dim = ipow(d, n);
  const double norm = std::pow(static_cast<double>(n), -0.5 * l);
  Matrix total = Matrix::Zero(dim, dim);
  for (const auto& term : form.terms) {
    std::vector<Matrix> ops;
    for (const auto& s : term.symbols) ops.push_back(symbol_matrix(s, factors));
    const int m = static_cast<int>(ops.size());
    std::vector<int> order(m);
    std::iota(order.begin(), order.end(), 0);
    Matrix sym = Matrix::Zero(dim, dim);
    double count = 0;
    do {
      Matrix prod = Matrix::Zero(dim, dim);
      const int first = order[m - 1];
      for (int s = 0; s < n; ++s) {
        const int site = s;
        tensor::embed_add(prod, ops[first], std::span<const int>(&site, 1), d, n);
      }
      for (int i = m - 2; i >= 0; --i) prod = collective_apply(ops[order[i]], prod, d, n);
      sym += prod;
      count += 1;
    } while (std::next_permutation(order.begin(), order.end()));
    total += (term.coeff * norm / count) * sym;
  }

  auto scaled = HermitianOperator::from_arithmetic(total);
  double lfact = 1.0;
  for (int i = 2; i <= l; ++i) lfact *= i;
  const double factor = lfact * binom(n, l) * norm;
  Matrix u = total / factor;
  Kernel k = symmetrize_kernel(factors);
  return {std::move(form), std::move(scaled),
          UStatistic{n, std::move(k), HermitianOperator::from_arithmetic(std::move(u))}};
}

}  // namespace qustat
