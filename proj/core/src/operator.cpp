#include "qustat/operator.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "qustat/error.hpp"
#include "qustat/tensor.hpp"

namespace qustat {

double hermitian_defect(const Matrix& m) {
  if (m.rows() != m.cols()) return INFINITY;
  double worst = 0.0;
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i <= j; ++i)
      worst = std::max(worst, std::abs(m(i, j) - std::conj(m(j, i))));
  return worst;
}

namespace {

void check_finite_square(const Matrix& m) {
  if (m.rows() != m.cols() || m.rows() == 0)
    throw ValidationError("operator must be a nonempty square matrix");
  if (!m.allFinite()) throw ValidationError("operator has non-finite entries");
}

Matrix hermitian_part(Matrix m) {
  Matrix h = 0.5 * (m + m.adjoint());
  return h;
}

}  // namespace

HermitianOperator::HermitianOperator(Matrix m, double tol) {
  check_finite_square(m);
  const double defect = hermitian_defect(m);
  if (defect > tol)
    throw ValidationError("operator is not selfadjoint (defect " + std::to_string(defect) + ")");
  m_ = hermitian_part(std::move(m));
}

HermitianOperator HermitianOperator::from_arithmetic(Matrix m) {
  check_finite_square(m);
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  const double defect = hermitian_defect(m);
  if (defect > 1e-10 * scale)
    throw ToleranceError("selfadjointness drift " + std::to_string(defect) +
                         " exceeds 1e-10 relative");
  HermitianOperator out;
  out.m_ = hermitian_part(std::move(m));
  return out;
}

HermitianOperator HermitianOperator::identity(std::size_t dim) {
  return HermitianOperator(Matrix::Identity(dim, dim));
}

SiteSubset::SiteSubset(int n, std::vector<int> indices) : n_(n), indices_(std::move(indices)) {
  if (n < 0) throw ValidationError("SiteSubset: negative system count");
  std::sort(indices_.begin(), indices_.end());
  if (std::adjacent_find(indices_.begin(), indices_.end()) != indices_.end())
    throw ValidationError("SiteSubset: repeated index");
  for (int i : indices_)
    if (i < 1 || i > n) throw ValidationError("SiteSubset: index out of range 1..n");
}

SiteSubset SiteSubset::all(int n) {
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 1);
  return SiteSubset(n, std::move(idx));
}

SiteSubset SiteSubset::empty(int n) { return SiteSubset(n, {}); }

SiteSubset SiteSubset::from_mask(int n, unsigned mask) {
  std::vector<int> idx;
  for (int k = 0; k < n; ++k)
    if (mask & (1u << k)) idx.push_back(k + 1);
  return SiteSubset(n, std::move(idx));
}

std::vector<int> SiteSubset::zero_based() const {
  std::vector<int> out(indices_);
  for (int& i : out) --i;
  return out;
}

SiteSubset SiteSubset::complement() const {
  std::vector<int> out;
  for (int i = 1; i <= n_; ++i)
    if (!std::binary_search(indices_.begin(), indices_.end(), i)) out.push_back(i);
  return SiteSubset(n_, std::move(out));
}

unsigned SiteSubset::mask() const {
  unsigned m = 0;
  for (int i : indices_) m |= 1u << (i - 1);
  return m;
}

double permutation_asymmetry(const Matrix& m, int d, int sites) {
  double worst = 0.0;
  std::vector<int> perm(sites);
  for (int k = 0; k + 1 < sites; ++k) {
    std::iota(perm.begin(), perm.end(), 0);
    std::swap(perm[k], perm[k + 1]);
    worst = std::max(worst, (tensor::permute_sites(m, perm, d) - m).norm());
  }
  return worst;
}

Kernel::Kernel(int d, int r, HermitianOperator op, double sym_tol)
    : d_(d), r_(r), op_(std::move(op)) {
  if (d < 1 || r < 0) throw ValidationError("Kernel: need d >= 1 and r >= 0");
  if (op_.dim() != ipow(d, r)) throw ValidationError("Kernel: operator dimension is not d^r");
  const double asym = permutation_asymmetry(op_.matrix(), d, r);
  if (asym > sym_tol * std::max(1.0, op_.frobenius_norm()))
    throw ValidationError("Kernel: operator is not permutation symmetric (residual " +
                          std::to_string(asym) + ")");
}

HermitianOperator embed(const Kernel& k, const SiteSubset& beta, int n) {
  if (n < k.r()) throw ValidationError("embed: n < r");
  if (beta.n() != n) throw ValidationError("embed: subset ambient size differs from n");
  if (beta.size() != k.r()) throw ValidationError("embed: |beta| != r");
  const std::size_t dim = ipow(k.d(), n);
  Matrix out = Matrix::Zero(dim, dim);
  const auto sites = beta.zero_based();
  tensor::embed_add(out, k.matrix(), sites, k.d(), n);
  return HermitianOperator(std::move(out));
}

HermitianOperator ampliate(const HermitianOperator& a, int site, int n) {
  const int d = static_cast<int>(a.dim());
  if (site < 1 || site > n) throw ValidationError("ampliate: site out of range");
  const std::size_t dim = ipow(d, n);
  Matrix out = Matrix::Zero(dim, dim);
  const int s = site - 1;
  tensor::embed_add(out, a.matrix(), std::span<const int>(&s, 1), d, n);
  return HermitianOperator(std::move(out));
}

HermitianOperator symmetrize(std::span<const HermitianOperator> ops) {
  if (ops.empty()) throw ValidationError("symmetrize: empty operator list");
  const std::size_t dim = ops.front().dim();
  for (const auto& o : ops)
    if (o.dim() != dim) throw ValidationError("symmetrize: dimension mismatch");
  std::vector<int> order(ops.size());
  std::iota(order.begin(), order.end(), 0);
  Matrix acc = Matrix::Zero(dim, dim);
  double count = 0;
  do {
    Matrix prod = ops[order[0]].matrix();
    for (std::size_t i = 1; i < order.size(); ++i) prod = prod * ops[order[i]].matrix();
    acc += prod;
    count += 1;
  } while (std::next_permutation(order.begin(), order.end()));
  return HermitianOperator::from_arithmetic(acc / count);
}

Kernel symmetrize_kernel(std::span<const HermitianOperator> ops) {
  if (ops.empty()) throw ValidationError("symmetrize_kernel: empty factor list");
  const std::size_t d = ops.front().dim();
  for (const auto& o : ops)
    if (o.dim() != d) throw ValidationError("symmetrize_kernel: dimension mismatch");
  std::vector<int> order(ops.size());
  std::iota(order.begin(), order.end(), 0);
  const int r = static_cast<int>(ops.size());
  const std::size_t dim = ipow(d, r);
  Matrix acc = Matrix::Zero(dim, dim);
  double count = 0;
  do {
    Matrix prod = ops[order[0]].matrix();
    for (int i = 1; i < r; ++i) prod = tensor::kron(prod, ops[order[i]].matrix());
    acc += prod;
    count += 1;
  } while (std::next_permutation(order.begin(), order.end()));
  return Kernel(static_cast<int>(d), r, HermitianOperator::from_arithmetic(acc / count));
}

Matrix site_symmetrize(const Matrix& m, int d, int r) {
  std::vector<int> perm(r);
  std::iota(perm.begin(), perm.end(), 0);
  Matrix acc = Matrix::Zero(m.rows(), m.cols());
  double count = 0;
  do {
    acc += tensor::permute_sites(m, perm, d);
    count += 1;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return acc / count;
}

namespace pauli {
HermitianOperator identity() { return HermitianOperator(Matrix::Identity(2, 2)); }
HermitianOperator x() {
  Matrix m(2, 2);
  m << 0, 1, 1, 0;
  return HermitianOperator(m);
}
HermitianOperator y() {
  Matrix m(2, 2);
  m << 0, Complex(0, -1), Complex(0, 1), 0;
  return HermitianOperator(m);
}
HermitianOperator z() {
  Matrix m(2, 2);
  m << 1, 0, 0, -1;
  return HermitianOperator(m);
}
}  // namespace pauli

}  // namespace qustat
