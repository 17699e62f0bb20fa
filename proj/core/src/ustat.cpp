#include "qustat/ustat.hpp"

#include <algorithm>
#include <cmath>

#include "qustat/error.hpp"
#include "qustat/tensor.hpp"

namespace qustat {

double binom(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double out = 1.0;
  for (int i = 1; i <= k; ++i) out = out * (n - k + i) / i;
  return std::round(out);
}

UStatistic assemble_direct(const Kernel& k, int n, const Budget& budget) {
  const int r = k.r();
  const int d = k.d();
  if (n < r) throw ValidationError("assemble_direct: n < r");
  budget.check(d, n);
  const std::size_t dim = ipow(d, n);
  Matrix acc = Matrix::Zero(dim, dim);
  std::vector<int> sites(r);
  for (int i = 0; i < r; ++i) sites[i] = i;
  const double w = 1.0 / binom(n, r);
  // Lexicographic walk over r-subsets of {0..n-1}.
  while (true) {
    tensor::embed_add(acc, k.matrix(), sites, d, n, w);
    int i = r - 1;
    while (i >= 0 && sites[i] == n - r + i) --i;
    if (i < 0) break;
    ++sites[i];
    for (int j = i + 1; j < r; ++j) sites[j] = sites[j - 1] + 1;
  }
  return {n, k, HermitianOperator::from_arithmetic(std::move(acc))};
}

double variance_exact(const UStatistic& u, const DensityMatrix& rho) {
  const int d = u.kernel.d();
  const Matrix& m = u.op.matrix();
  const double mean = tensor::product_expectation(m, rho.matrix(), d, u.n).real();
  const double second = tensor::product_expectation(m, m, rho.matrix(), d, u.n).real();
  return second - mean * mean;
}

double variance_formula(const DegeneracyReport& report, int n) {
  const int r = report.r();
  if (n < r) throw ValidationError("variance_formula: n < r");
  double v = 0.0;
  for (int l = 1; l <= r; ++l) {
    const double b = binom(r, l);
    v += b * b / binom(n, l) * report.components[l].norm_sq;
  }
  return v;
}

double Scaling::factor(int n) const {
  const double base_value = base == Base::n ? n : n - 1;
  return std::pow(base_value, 0.5 * exponent);
}

namespace {

void check_ps(const std::vector<int>& ps) {
  for (int p : ps)
    if (p < 1) throw ValidationError("moment order p must be >= 1");
}

}  // namespace

std::vector<double> centered_moments(const UStatistic& u, const DensityMatrix& rho,
                                     const std::vector<int>& ps, Scaling scaling) {
  check_ps(ps);
  const int d = u.kernel.d();
  const int n = u.n;
  const Matrix& R = rho.matrix();
  const double theta = tensor::product_expectation(u.kernel.matrix(), R, d, u.kernel.r()).real();
  const double s = scaling.factor(n);
  Matrix x = u.op.matrix();
  x.diagonal().array() -= theta;
  x *= s;

  std::vector<double> out(ps.size());
  const int pmax = ps.empty() ? 0 : *std::max_element(ps.begin(), ps.end());

  if (tensor::is_diagonal(R) && tensor::is_diagonal(x)) {
    const RealVector w = tensor::product_diagonal(R, n);
    const RealVector xd = x.diagonal().real();
    for (std::size_t i = 0; i < ps.size(); ++i)
      out[i] = (w.array() * xd.array().pow(ps[i])).sum();
    return out;
  }

  if (pmax > 4) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(x);
    if (es.info() != Eigen::Success) throw ToleranceError("eigendecomposition failed");
    Matrix rv = es.eigenvectors();
    for (int site = 0; site < n; ++site) tensor::apply_site_left(rv, R, site, d, n);
    // w_k = v_k† R v_k
    const RealVector w = (es.eigenvectors().conjugate().cwiseProduct(rv)).colwise().sum().real();
    const RealVector& ev = es.eigenvalues();
    for (std::size_t i = 0; i < ps.size(); ++i)
      out[i] = (w.array() * ev.array().pow(ps[i])).sum();
    return out;
  }

  Matrix x2;
  if (pmax >= 3) x2 = x * x;
  for (std::size_t i = 0; i < ps.size(); ++i) {
    Complex v;
    switch (ps[i]) {
      case 1: v = tensor::product_expectation(x, R, d, n); break;
      case 2: v = tensor::product_expectation(x, x, R, d, n); break;
      case 3: v = tensor::product_expectation(x2, x, R, d, n); break;
      default: v = tensor::product_expectation(x2, x2, R, d, n); break;
    }
    out[i] = v.real();
  }
  return out;
}

std::vector<double> centered_moments(const Kernel& k, const DensityMatrix& rho, int n,
                                     const std::vector<int>& ps, Scaling scaling,
                                     const Budget& budget) {
  if (k.d() != rho.d()) throw ValidationError("centered_moments: site dimension mismatch");
  return centered_moments(assemble_direct(k, n, budget), rho, ps, scaling);
}

double centered_moment(const Kernel& k, const DensityMatrix& rho, int n, int p, Scaling scaling,
                       const Budget& budget) {
  return centered_moments(k, rho, n, {p}, scaling, budget).front();
}

}  // namespace qustat
