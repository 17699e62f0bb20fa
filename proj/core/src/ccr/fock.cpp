#include "qustat/ccr/fock.hpp"

#include <cmath>
#include <map>

#include "qustat/error.hpp"

namespace qustat::ccr {

FockRep::FockRep(int trunc, int pad) : trunc_(trunc), pad_(pad) {
  if (trunc < 1 || pad < 0) throw ValidationError("FockRep: need trunc >= 1 and pad >= 0");
  const int n = dim();
  Matrix a = Matrix::Zero(n, n);
  for (int k = 1; k < n; ++k) a(k - 1, k) = std::sqrt(static_cast<double>(k));
  const double s = std::sqrt(2.0);
  q_ = (a + a.adjoint()) / s;
  p_ = (a - a.adjoint()) / Complex(0.0, s);
  n_ = Matrix::Zero(n, n);
  for (int k = 0; k < n; ++k) n_(k, k) = k;
}

double FockRep::beta(double sigma_sq) {
  if (!(sigma_sq >= 0.5)) throw ValidationError("thermal variance must be >= 1/2");
  if (sigma_sq == 0.5) return INFINITY;
  return 2.0 * std::atanh(1.0 / (2.0 * sigma_sq));
}

double FockRep::tail(double sigma_sq, int trunc) { return std::exp(-beta(sigma_sq) * trunc); }

int FockRep::required_truncation(double sigma_sq, double tail_tol) {
  const double b = beta(sigma_sq);
  if (std::isinf(b)) return 1;
  return static_cast<int>(std::floor(-std::log(tail_tol) / b)) + 1;
}

RealVector FockRep::thermal_weights(double sigma_sq) const {
  const double b = beta(sigma_sq);
  RealVector w = RealVector::Zero(dim());
  if (std::isinf(b)) {
    w(0) = 1.0;
    return w;
  }
  for (int k = 0; k < trunc_; ++k) w(k) = std::exp(-b * k);
  return w / w.sum();
}

Matrix FockRep::thermal(double sigma_sq) const {
  return thermal_weights(sigma_sq).cast<Complex>().asDiagonal();
}

Matrix FockRep::vacuum() const { return thermal(0.5); }

double FockRep::commutator_defect() const {
  const Matrix c = q_ * p_ - p_ * q_;
  const int m = dim() - 1;
  return (c.topLeftCorner(m, m) - Complex(0.0, 1.0) * Matrix::Identity(m, m)).cwiseAbs().maxCoeff();
}

GaussRule normal_quadrature(int points) {
  if (points < 1) throw ValidationError("normal_quadrature: need at least one point");
  RealMatrix j = RealMatrix::Zero(points, points);
  for (int k = 1; k < points; ++k) j(k - 1, k) = j(k, k - 1) = std::sqrt(static_cast<double>(k));
  Eigen::SelfAdjointEigenSolver<RealMatrix> es(j);
  GaussRule g;
  g.nodes = es.eigenvalues();
  g.weights = es.eigenvectors().row(0).transpose().array().square();
  return g;
}

void check_truncation(const CCRBasis& basis, int trunc, double tail_tol) {
  for (const auto& p : basis.oscillator_pairs) {
    const double t = FockRep::tail(p.sigma_sq, trunc);
    if (t >= tail_tol)
      throw ToleranceError("Fock truncation " + std::to_string(trunc) + " leaves thermal tail " +
                           std::to_string(t) + " (sigma^2 = " + std::to_string(p.sigma_sq) +
                           "); need trunc >= " +
                           std::to_string(FockRep::required_truncation(p.sigma_sq, tail_tol)));
  }
}

namespace {

// <k| W |k> summed against thermal weights, applying ladder factors to
// vectors (Q and P are tridiagonal).
class OscillatorOracle {
 public:
  OscillatorOracle(int trunc, int pad, double sigma_sq) : trunc_(trunc), dim_(trunc + pad) {
    FockRep rep(trunc, pad);
    w_ = rep.thermal_weights(sigma_sq);
  }

  // is_p[i] tells whether factor i is P (else Q); factors act right to left.
  Complex expectation(const std::vector<bool>& is_p) {
    if (is_p.size() % 2) return 0.0;  // parity: odd words have zero diagonal
    const Eigen::Index n = dim_;
    Matrix m = Matrix::Zero(n, trunc_);
    for (int k = 0; k < trunc_; ++k) m(k, k) = 1.0;
    Matrix next(n, trunc_);
    const double s = 1.0 / std::sqrt(2.0);
    for (std::size_t f = is_p.size(); f-- > 0;) {
      const bool p = is_p[f];
      // a|k> = sqrt(k)|k-1>, a†|k> = sqrt(k+1)|k+1>
      for (Eigen::Index i = 0; i < n; ++i) {
        const Complex up = i + 1 < n ? Complex(std::sqrt(double(i + 1))) : Complex(0.0);  // a row i
        const Complex down = i > 0 ? Complex(std::sqrt(double(i))) : Complex(0.0);       // a† row i
        // Q = (a + a†)/√2, P = (a - a†)/(i√2) = -i(a - a†)/√2
        const Complex ca = p ? Complex(0.0, -s) * up : s * up;
        const Complex cad = p ? Complex(0.0, s) * down : s * down;
        for (Eigen::Index c = 0; c < trunc_; ++c) {
          Complex v = 0.0;
          if (i + 1 < n) v += ca * m(i + 1, c);
          if (i > 0) v += cad * m(i - 1, c);
          next(i, c) = v;
        }
      }
      std::swap(m, next);
    }
    Complex acc = 0.0;
    for (int k = 0; k < trunc_; ++k) acc += w_(k) * m(k, k);
    return acc;
  }

 private:
  int trunc_;
  int dim_;
  RealVector w_;
};

class ClassicalOracle {
 public:
  ClassicalOracle(const CCRBasis& basis, int points) : nc_(basis.num_classical()), rule_(normal_quadrature(points)) {
    if (nc_ > 0) {
      Eigen::LLT<RealMatrix> llt(basis.classical_cov);
      if (llt.info() != Eigen::Success) throw ToleranceError("classical covariance is not positive definite");
      chol_ = llt.matrixL();
    }
  }

  // E[prod_a x_a^{e_a}] for x ~ N(0, V).
  double expectation(const std::vector<int>& e) {
    if (nc_ == 0) return 1.0;
    if (auto it = cache_.find(e); it != cache_.end()) return it->second;
    const int k = static_cast<int>(rule_.nodes.size());
    std::vector<int> idx(nc_, 0);
    RealVector z(nc_);
    double acc = 0.0;
    while (true) {
      double w = 1.0;
      for (int i = 0; i < nc_; ++i) {
        z(i) = rule_.nodes(idx[i]);
        w *= rule_.weights(idx[i]);
      }
      const RealVector x = chol_ * z;
      double v = w;
      for (int i = 0; i < nc_; ++i) v *= std::pow(x(i), e[i]);
      acc += v;
      int pos = nc_ - 1;
      while (pos >= 0 && ++idx[pos] == k) idx[pos--] = 0;
      if (pos < 0) break;
    }
    cache_.emplace(e, acc);
    return acc;
  }

 private:
  int nc_;
  GaussRule rule_;
  RealMatrix chol_;
  std::map<std::vector<int>, double> cache_;
};

int classical_degree(const Poly& poly) {
  int deg = 0;
  for (const auto& [w, _] : poly.terms()) {
    int k = 0;
    for (int a : w) k += poly.basis().mode(a) == 0 ? 1 : 0;
    deg = std::max(deg, k);
  }
  return deg;
}

}  // namespace

Complex fock_moment(const Poly& poly, const FockOptions& options) {
  if (poly.terms().empty()) return 0.0;
  const CCRBasis& basis = poly.basis();
  check_truncation(basis, options.trunc, options.tail_tol);
  const int cdeg = classical_degree(poly);
  const int min_points = cdeg / 2 + 1;
  int points = options.quad_points;
  if (points == 0) points = min_points;
  if (2 * points - 1 < cdeg)
    throw ValidationError("Gauss-Hermite order " + std::to_string(points) +
                          " is not exact for classical degree " + std::to_string(cdeg));

  const int pad = (poly.degree() + 1) / 2;
  ClassicalOracle classical(basis, points);
  std::vector<OscillatorOracle> osc;
  for (const auto& p : basis.oscillator_pairs) osc.emplace_back(options.trunc, pad, p.sigma_sq);
  std::map<std::pair<int, std::vector<bool>>, Complex> osc_cache;

  Complex total = 0.0;
  for (const auto& [w, coeff] : poly.terms()) {
    std::vector<int> e(basis.num_classical(), 0);
    std::vector<std::vector<bool>> sub(basis.num_oscillators());
    for (int a : w) {
      const auto& s = basis.symbols[a];
      if (s.kind == SymbolInfo::Kind::classical)
        ++e[s.index];
      else
        sub[s.index].push_back(s.kind == SymbolInfo::Kind::p);
    }
    Complex v = coeff * classical.expectation(e);
    for (int o = 0; o < basis.num_oscillators() && v != Complex(0.0); ++o) {
      if (sub[o].empty()) continue;
      auto key = std::make_pair(o, sub[o]);
      auto it = osc_cache.find(key);
      if (it == osc_cache.end()) it = osc_cache.emplace(key, osc[o].expectation(sub[o])).first;
      v *= it->second;
    }
    total += v;
  }
  return total;
}

Complex fock_moment(const Word& word, const CCRBasis& basis, const FockOptions& options) {
  for (int a : word) basis.check_symbol(a);
  Poly p(&basis);
  p.add(word, 1.0);
  return fock_moment(p, options);
}

}  // namespace qustat::ccr
