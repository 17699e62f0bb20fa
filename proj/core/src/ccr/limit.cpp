#include "qustat/ccr/limit.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

#include "qustat/classical.hpp"
#include "qustat/error.hpp"
#include "qustat/random.hpp"
#include "qustat/tensor.hpp"
#include "qustat/ustat.hpp"

namespace qustat::ccr {

LimitPolynomial kernel_to_limit(const Kernel& k, const DegeneracyReport& report,
                                const CCRBasis& basis) {
  const int c = report.order();
  const int d = basis.d;
  if (k.d() != d) throw ValidationError("kernel_to_limit: kernel and basis dimensions differ");
  if (report.r() != k.r()) throw ValidationError("kernel_to_limit: report does not match kernel");
  const Matrix& kc = report.components[c].kernel.matrix();

  // Columns of m are vec(B_a) for B_0 = 1, B_a = F_a; vec index i + d*j.
  const int d2 = d * d;
  Matrix m(d2, d2);
  for (int a = 0; a < d2; ++a) {
    const Matrix b = a == 0 ? Matrix::Identity(d, d) : basis.basis_list[a - 1].matrix();
    for (int j = 0; j < d; ++j)
      for (int i = 0; i < d; ++i) m(i + d * j, a) = b(i, j);
  }
  const Matrix minv = m.inverse();

  // Tensor of K_c entries indexed by (p_1..p_c), p_l = i_l + d j_l, then
  // contracted with minv on every mode.
  const std::size_t size = ipow(d2, c);
  Vector t(size);
  for (std::size_t idx = 0; idx < size; ++idx) {
    std::size_t rem = idx, row = 0, col = 0, stride = 1;
    for (int l = c - 1; l >= 0; --l) {
      const std::size_t p = rem % d2;
      rem /= d2;
      row += (p % d) * stride;
      col += (p / d) * stride;
      stride *= d;
    }
    t(idx) = kc(row, col);
  }
  for (int l = 0; l < c; ++l) {
    const std::size_t inner = ipow(d2, c - 1 - l);
    const std::size_t outer = size / (inner * d2);
    Vector next = Vector::Zero(size);
    for (std::size_t o = 0; o < outer; ++o)
      for (std::size_t in = 0; in < inner; ++in)
        for (int a = 0; a < d2; ++a) {
          Complex acc = 0.0;
          for (int p = 0; p < d2; ++p) acc += minv(a, p) * t(o * d2 * inner + p * inner + in);
          next(o * d2 * inner + a * inner + in) = acc;
        }
    t = std::move(next);
  }

  const double scale = std::max(1.0, kc.norm());
  std::map<std::vector<int>, double> grouped;
  for (std::size_t idx = 0; idx < size; ++idx) {
    const Complex v = t(idx);
    if (std::abs(v.imag()) > 1e-9 * scale)
      throw ToleranceError("kernel_to_limit: complex coefficient in the generator expansion");
    std::vector<int> mult(basis.size(), 0);
    bool has_identity = false;
    std::size_t rem = idx;
    for (int l = 0; l < c; ++l) {
      const int a = static_cast<int>(rem % d2);
      rem /= d2;
      if (a == 0)
        has_identity = true;
      else
        ++mult[a - 1];
    }
    if (has_identity) {
      if (std::abs(v) > 1e-9 * scale)
        throw ToleranceError("kernel_to_limit: K_c has a component along the identity");
      continue;
    }
    grouped[mult] += v.real();
  }

  LimitPolynomial u;
  u.c = c;
  u.r = k.r();
  u.binom_factor = binom(k.r(), c);
  for (auto it = grouped.rbegin(); it != grouped.rend(); ++it)
    if (std::abs(it->second) > 1e-12 * scale) u.terms.push_back({it->first, it->second});
  return u;
}

Poly limit_poly(const LimitPolynomial& u, const CCRBasis& basis) {
  Poly out(&basis);
  for (const auto& t : u.terms) {
    Poly w = wick_ordered(basis, t.m);
    w *= u.binom_factor * t.coeff;
    out += w;
  }
  out.prune(1e-15);
  return out;
}

namespace {

Matrix word_matrix(const std::vector<bool>& is_p, const FockRep& rep) {
  Matrix out = Matrix::Identity(rep.dim(), rep.dim());
  for (bool p : is_p) out = out * (p ? rep.P() : rep.Q());
  return out;
}

double fock_operator_moment(const Poly& u, const CCRBasis& basis, int p, const FockOptions& opt) {
  check_truncation(basis, opt.trunc, opt.tail_tol);
  const int nc = basis.num_classical();
  int cdeg = 0;
  for (const auto& [w, _] : u.terms()) {
    int k = 0;
    for (int a : w) k += basis.mode(a) == 0;
    cdeg = std::max(cdeg, k);
  }
  const int need = cdeg * p;
  int points = opt.quad_points ? opt.quad_points : need / 2 + 1;
  if (2 * points - 1 < need)
    throw ValidationError("Gauss-Hermite order " + std::to_string(points) +
                          " is not exact for classical degree " + std::to_string(need));

  const int pad = (u.degree() * p + 1) / 2;
  const FockRep rep(opt.trunc, pad);
  const double sigma_sq = basis.num_oscillators() ? basis.oscillator_pairs[0].sigma_sq : 0.5;
  const RealVector w = rep.thermal_weights(sigma_sq);

  struct Piece {
    std::vector<int> exps;
    Complex coeff;
    Matrix op;
  };
  std::vector<Piece> pieces;
  for (const auto& [word, coeff] : u.terms()) {
    std::vector<int> e(nc, 0);
    std::vector<bool> osc;
    for (int a : word) {
      const auto& s = basis.symbols[a];
      if (s.kind == SymbolInfo::Kind::classical)
        ++e[s.index];
      else
        osc.push_back(s.kind == SymbolInfo::Kind::p);
    }
    pieces.push_back({e, coeff, word_matrix(osc, rep)});
  }

  const GaussRule rule = normal_quadrature(points);
  RealMatrix chol;
  if (nc > 0) {
    Eigen::LLT<RealMatrix> llt(basis.classical_cov);
    if (llt.info() != Eigen::Success) throw ToleranceError("classical covariance is not positive definite");
    chol = llt.matrixL();
  }
  std::vector<int> idx(nc, 0);
  const int k = static_cast<int>(rule.nodes.size());
  double total = 0.0;
  while (true) {
    double weight = 1.0;
    RealVector z(nc);
    for (int i = 0; i < nc; ++i) {
      z(i) = rule.nodes(idx[i]);
      weight *= rule.weights(idx[i]);
    }
    const RealVector x = nc ? RealVector(chol * z) : RealVector();
    Matrix op = Matrix::Zero(rep.dim(), rep.dim());
    for (const auto& pc : pieces) {
      double mono = 1.0;
      for (int i = 0; i < nc; ++i) mono *= std::pow(x(i), pc.exps[i]);
      op += pc.coeff * mono * pc.op;
    }
    Matrix v = Matrix::Identity(rep.dim(), opt.trunc);
    for (int i = 0; i < p; ++i) v = op * v;
    Complex acc = 0.0;
    for (int s = 0; s < opt.trunc; ++s) acc += w(s) * v(s, s);
    total += weight * acc.real();

    if (nc == 0) break;
    int pos = nc - 1;
    while (pos >= 0 && ++idx[pos] == k) idx[pos--] = 0;
    if (pos < 0) break;
  }
  return total;
}

}  // namespace

double limit_moment(const LimitPolynomial& u, const CCRBasis& basis, int p, MomentMethod method,
                    const LimitOptions& options) {
  if (p < 0) throw ValidationError("limit_moment: p must be >= 0");
  const Poly up = limit_poly(u, basis);
  if (method == MomentMethod::fock && basis.num_oscillators() <= 1)
    return fock_operator_moment(up, basis, p, options.fock);
  const Poly pw = power(up, p, options.max_terms);
  if (method == MomentMethod::wick) return quasifree_moment_wick(pw).real();
  return fock_moment(pw, options.fock).real();
}

nlohmann::json to_json(const LimitPolynomial& u) {
  nlohmann::json terms = nlohmann::json::array();
  for (const auto& t : u.terms) terms.push_back({{"m", t.m}, {"coeff", t.coeff}});
  return {{"c", u.c}, {"binom_factor", u.binom_factor}, {"terms", std::move(terms)}};
}

LimitSampler::Discrete LimitSampler::spectrum(const Matrix& op, const RealVector& weights) {
  const Matrix h = 0.5 * (op + op.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> es(h);
  if (es.info() != Eigen::Success) throw ToleranceError("limit sampler: eigendecomposition failed");
  Discrete out;
  const Matrix& v = es.eigenvectors();
  double acc = 0.0;
  for (Eigen::Index k = 0; k < v.cols(); ++k) {
    double prob = 0.0;
    for (Eigen::Index i = 0; i < v.rows(); ++i) prob += weights(i) * std::norm(v(i, k));
    if (prob <= 0.0) continue;
    acc += prob;
    out.values.push_back(es.eigenvalues()(k));
    out.cdf.push_back(acc);
  }
  if (std::abs(acc - 1.0) > 1e-8) throw ToleranceError("limit sampler: probability mass deficit");
  for (auto& c : out.cdf) c /= acc;
  return out;
}

LimitSampler::LimitSampler(const LimitPolynomial& u, const CCRBasis& basis, int trunc) {
  check_truncation(basis, trunc, 1e-12);
  nc_ = basis.num_classical();
  if (nc_ > 0) {
    Eigen::LLT<RealMatrix> llt(basis.classical_cov);
    if (llt.info() != Eigen::Success) throw ToleranceError("classical covariance is not positive definite");
    chol_ = llt.matrixL();
  }
  const Poly up = limit_poly(u, basis);
  const int no = basis.num_oscillators();

  // Split words into classical-only, single-oscillator-only and mixed.
  std::vector<Poly> per_osc(no, Poly(&basis));
  Poly mixed(&basis);
  for (const auto& [w, coeff] : up.terms()) {
    std::vector<int> e(nc_, 0);
    std::vector<int> modes;
    for (int a : w) {
      const int m = basis.mode(a);
      if (m == 0)
        ++e[basis.symbols[a].index];
      else if (std::find(modes.begin(), modes.end(), m) == modes.end())
        modes.push_back(m);
    }
    const bool has_classical = std::any_of(e.begin(), e.end(), [](int x) { return x > 0; });
    if (modes.empty())
      classical_terms_.push_back({e, coeff.real()});
    else if (modes.size() == 1 && !has_classical)
      per_osc[modes[0] - 1].add(w, coeff);
    else
      mixed.add(w, coeff);
  }

  auto osc_word = [&](const Word& w, int o) {
    std::vector<bool> is_p;
    for (int a : w) {
      const auto& s = basis.symbols[a];
      if (s.kind != SymbolInfo::Kind::classical && s.index == o) is_p.push_back(s.kind == SymbolInfo::Kind::p);
    }
    return is_p;
  };

  if (mixed.terms().empty()) {
    const FockRep rep(trunc, trunc / 2);
    for (int o = 0; o < no; ++o) {
      if (per_osc[o].terms().empty()) continue;
      Matrix op = Matrix::Zero(rep.dim(), rep.dim());
      for (const auto& [w, coeff] : per_osc[o].terms()) op += coeff * word_matrix(osc_word(w, o), rep);
      oscillators_.push_back(spectrum(op, rep.thermal_weights(basis.oscillator_pairs[o].sigma_sq)));
    }
    return;
  }

  // Joint representation of all oscillators; every non-classical word is
  // rebuilt there and diagonalized per draw.
  const std::size_t joint = ipow(trunc, no);
  if (joint > 4096)
    throw BudgetError("limit sampler: joint oscillator space " + std::to_string(joint) +
                          " exceeds 4096 (lower the truncation)",
                      joint, 4096);
  const FockRep rep(trunc, 0);
  joint_weights_ = RealVector::Ones(1);
  for (int o = 0; o < no; ++o) {
    const RealVector w = rep.thermal_weights(basis.oscillator_pairs[o].sigma_sq);
    RealVector next(joint_weights_.size() * w.size());
    for (Eigen::Index i = 0; i < joint_weights_.size(); ++i)
      for (Eigen::Index j = 0; j < w.size(); ++j) next(i * w.size() + j) = joint_weights_(i) * w(j);
    joint_weights_ = std::move(next);
  }
  Poly rest = mixed;
  for (int o = 0; o < no; ++o) rest += per_osc[o];
  for (const auto& [w, coeff] : rest.terms()) {
    std::vector<int> e(nc_, 0);
    for (int a : w)
      if (basis.mode(a) == 0) ++e[basis.symbols[a].index];
    Matrix op = Matrix::Identity(1, 1);
    for (int o = 0; o < no; ++o) op = tensor::kron(op, word_matrix(osc_word(w, o), rep));
    mixed_.push_back({e, coeff, std::move(op)});
  }
}

double LimitSampler::draw(std::uint64_t seed, std::size_t index) const {
  auto rng = make_stream(seed, index);
  RealVector x(nc_);
  if (nc_ > 0) {
    RealVector z(nc_);
    for (int i = 0; i < nc_; ++i) {
      const double u1 = 1.0 - uniform01(rng());
      const double u2 = uniform01(rng());
      z(i) = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }
    x = chol_ * z;
  }
  auto mono = [&](const std::vector<int>& e) {
    double v = 1.0;
    for (int i = 0; i < nc_; ++i) v *= std::pow(x(i), e[i]);
    return v;
  };
  double out = 0.0;
  for (const auto& [e, c] : classical_terms_) out += c * mono(e);
  auto pick = [&](const Discrete& dist) {
    const double u = uniform01(rng());
    auto it = std::upper_bound(dist.cdf.begin(), dist.cdf.end(), u);
    if (it == dist.cdf.end()) --it;
    return dist.values[it - dist.cdf.begin()];
  };
  for (const auto& dist : oscillators_) out += pick(dist);
  if (!mixed_.empty()) {
    const Eigen::Index n = mixed_.front().op.rows();
    Matrix op = Matrix::Zero(n, n);
    for (const auto& t : mixed_) op += t.coeff * mono(t.classical_exponents) * t.op;
    out += pick(spectrum(op, joint_weights_));
  }
  return out;
}

std::vector<double> LimitSampler::sample(std::size_t count, std::uint64_t seed, int threads) const {
  std::vector<double> out(count);
  parallel_chunks(count, threads, [&](std::size_t begin, std::size_t end, std::size_t) {
    for (std::size_t i = begin; i < end; ++i) out[i] = draw(seed, i);
  });
  return out;
}

}  // namespace qustat::ccr
