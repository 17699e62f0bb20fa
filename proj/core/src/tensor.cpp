#include "qustat/tensor.hpp"

#include <algorithm>
#include <numeric>

#include "qustat/error.hpp"

namespace qustat {

std::size_t ipow(std::size_t base, int exponent) {
  if (exponent < 0) throw ValidationError("ipow: negative exponent");
  std::size_t out = 1;
  for (int i = 0; i < exponent; ++i) {
    if (base != 0 && out > (std::size_t{1} << 62) / base)
      throw BudgetError("dimension overflow", ~std::size_t{0}, std::size_t{1} << 62);
    out *= base;
  }
  return out;
}

void Budget::check(int d, int n) const {
  const std::size_t dim = ipow(static_cast<std::size_t>(d), n);
  if (dim > max_dim) {
    throw BudgetError("dimension " + std::to_string(d) + "^" + std::to_string(n) + " = " +
                          std::to_string(dim) + " exceeds budget " + std::to_string(max_dim) +
                          " (one dense matrix needs " + std::to_string(bytes_for(dim)) +
                          " bytes)",
                      dim, max_dim);
  }
}

namespace tensor {
namespace {

// Offsets of every digit pattern over `sites` (most significant digit first).
std::vector<std::size_t> site_offsets(std::span<const int> sites, int d, int n) {
  const std::size_t count = ipow(d, static_cast<int>(sites.size()));
  std::vector<std::size_t> strides(sites.size());
  for (std::size_t l = 0; l < sites.size(); ++l) strides[l] = ipow(d, n - 1 - sites[l]);
  std::vector<std::size_t> out(count);
  for (std::size_t a = 0; a < count; ++a) {
    std::size_t rem = a, off = 0;
    for (std::size_t l = sites.size(); l-- > 0;) {
      off += (rem % d) * strides[l];
      rem /= d;
    }
    out[a] = off;
  }
  return out;
}

void check_sites(std::span<const int> sites, int n) {
  std::vector<int> s(sites.begin(), sites.end());
  std::sort(s.begin(), s.end());
  if (std::adjacent_find(s.begin(), s.end()) != s.end())
    throw ValidationError("repeated site index");
  for (int x : s)
    if (x < 0 || x >= n) throw ValidationError("site index out of range");
}

}  // namespace

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

Matrix kron_power(const Matrix& a, int n) {
  Matrix out = Matrix::Identity(1, 1);
  for (int i = 0; i < n; ++i) out = kron(out, a);
  return out;
}

void embed_add(Matrix& acc, const Matrix& op, std::span<const int> sites, int d, int n,
               Complex scale) {
  const int r = static_cast<int>(sites.size());
  check_sites(sites, n);
  const std::size_t dim = ipow(d, n);
  if (static_cast<std::size_t>(acc.rows()) != dim || static_cast<std::size_t>(acc.cols()) != dim)
    throw ValidationError("embed_add: accumulator has wrong dimension");
  if (static_cast<std::size_t>(op.rows()) != ipow(d, r))
    throw ValidationError("embed_add: operator dimension does not match site count");

  std::vector<int> rest;
  for (int s = 0; s < n; ++s)
    if (std::find(sites.begin(), sites.end(), s) == sites.end()) rest.push_back(s);
  const auto in = site_offsets(sites, d, n);
  const auto out = site_offsets(rest, d, n);
  const Eigen::Index k = op.rows();
  for (std::size_t c : out) {
    for (Eigen::Index b = 0; b < k; ++b) {
      const std::size_t col = in[b] + c;
      for (Eigen::Index a = 0; a < k; ++a) {
        const Complex v = op(a, b);
        if (v != Complex(0.0)) acc(in[a] + c, col) += scale * v;
      }
    }
  }
}

Matrix permute_sites(const Matrix& m, std::span<const int> perm, int d) {
  const int n = static_cast<int>(perm.size());
  check_sites(perm, n);
  const std::size_t dim = ipow(d, n);
  if (static_cast<std::size_t>(m.rows()) != dim) throw ValidationError("permute_sites: bad dim");
  // Digit k of the source index becomes digit perm[k] of the target index.
  std::vector<std::size_t> map(dim);
  for (std::size_t i = 0; i < dim; ++i) {
    std::size_t rem = i, j = 0;
    for (int k = n - 1; k >= 0; --k) {
      j += (rem % d) * ipow(d, n - 1 - perm[k]);
      rem /= d;
    }
    map[i] = j;
  }
  Matrix out(dim, dim);
  for (std::size_t j = 0; j < dim; ++j)
    for (std::size_t i = 0; i < dim; ++i) out(map[i], map[j]) = m(i, j);
  return out;
}

void apply_site_left(Matrix& m, const Matrix& a, int site, int d, int n) {
  const std::size_t lo = ipow(d, n - 1 - site);
  const std::size_t hi = ipow(d, site);
  std::vector<Complex> buf(d);
  for (Eigen::Index col = 0; col < m.cols(); ++col) {
    Complex* v = m.col(col).data();
    for (std::size_t h = 0; h < hi; ++h) {
      Complex* base = v + h * d * lo;
      for (std::size_t l = 0; l < lo; ++l) {
        for (int s = 0; s < d; ++s) buf[s] = base[s * lo + l];
        for (int t = 0; t < d; ++t) {
          Complex acc = 0.0;
          for (int s = 0; s < d; ++s) acc += a(t, s) * buf[s];
          base[t * lo + l] = acc;
        }
      }
    }
  }
}

void apply_site_right(Matrix& m, const Matrix& a, int site, int d, int n) {
  const std::size_t lo = ipow(d, n - 1 - site);
  const std::size_t hi = ipow(d, site);
  const Eigen::Index rows = m.rows();
  Matrix buf(rows, d);
  for (std::size_t h = 0; h < hi; ++h) {
    for (std::size_t l = 0; l < lo; ++l) {
      for (int s = 0; s < d; ++s) buf.col(s) = m.col(h * d * lo + s * lo + l);
      for (int t = 0; t < d; ++t) {
        auto dst = m.col(h * d * lo + t * lo + l);
        dst.setZero();
        for (int s = 0; s < d; ++s) dst += a(s, t) * buf.col(s);
      }
    }
  }
}

Matrix partial_expectation(const Matrix& m, const Matrix& rho, std::span<const int> sites, int d,
                           int n) {
  check_sites(sites, n);
  std::vector<int> order(sites.begin(), sites.end());
  std::sort(order.rbegin(), order.rend());
  Matrix cur = m;
  int cur_n = n;
  for (int s : order) {
    const std::size_t lo = ipow(d, cur_n - 1 - s);
    const std::size_t hi = ipow(d, s);
    const std::size_t new_dim = hi * lo;
    Matrix next = Matrix::Zero(new_dim, new_dim);
    for (std::size_t hc = 0; hc < hi; ++hc)
      for (std::size_t lc = 0; lc < lo; ++lc)
        for (int b = 0; b < d; ++b) {
          const std::size_t src_col = hc * d * lo + b * lo + lc;
          const std::size_t dst_col = hc * lo + lc;
          for (int a = 0; a < d; ++a) {
            const Complex w = rho(b, a);
            if (w == Complex(0.0)) continue;
            for (std::size_t hr = 0; hr < hi; ++hr) {
              const Complex* src = cur.col(src_col).data() + hr * d * lo + a * lo;
              Complex* dst = next.col(dst_col).data() + hr * lo;
              for (std::size_t lr = 0; lr < lo; ++lr) dst[lr] += w * src[lr];
            }
          }
        }
    cur = std::move(next);
    --cur_n;
  }
  return cur;
}

RealVector product_diagonal(const Matrix& rho, int n) {
  const int d = static_cast<int>(rho.rows());
  RealVector out = RealVector::Ones(1);
  for (int k = 0; k < n; ++k) {
    RealVector next(out.size() * d);
    for (Eigen::Index i = 0; i < out.size(); ++i)
      for (int s = 0; s < d; ++s) next(i * d + s) = out(i) * rho(s, s).real();
    out = std::move(next);
  }
  return out;
}

bool is_diagonal(const Matrix& m, double tol) {
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      if (i != j && std::abs(m(i, j)) > tol) return false;
  return true;
}

Complex product_expectation(const Matrix& m, const Matrix& rho, int d, int n) {
  if (is_diagonal(rho)) {
    const RealVector w = product_diagonal(rho, n);
    Complex acc = 0.0;
    for (Eigen::Index i = 0; i < w.size(); ++i) acc += w(i) * m(i, i);
    return acc;
  }
  std::vector<int> all(n);
  std::iota(all.begin(), all.end(), 0);
  return partial_expectation(m, rho, all, d, n)(0, 0);
}

Complex product_expectation(const Matrix& a, const Matrix& b, const Matrix& rho, int d, int n) {
  if (is_diagonal(rho)) {
    const RealVector w = product_diagonal(rho, n);
    Complex acc = 0.0;
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      for (Eigen::Index i = 0; i < a.rows(); ++i) acc += w(i) * a(i, j) * b(j, i);
    return acc;
  }
  Matrix ra = a;
  for (int s = 0; s < n; ++s) apply_site_left(ra, rho, s, d, n);
  return ra.cwiseProduct(b.transpose()).sum();
}

}  // namespace tensor
}  // namespace qustat
