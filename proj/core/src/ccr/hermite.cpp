#include "qustat/ccr/hermite.hpp"

#include <cmath>
#include <vector>

#include "qustat/ccr/fock.hpp"
#include "qustat/error.hpp"

namespace qustat::ccr {

double hermite(int m, double x) {
  if (m < 0) throw ValidationError("hermite: negative order");
  double prev = 1.0, cur = 2.0 * x;
  if (m == 0) return prev;
  for (int k = 1; k < m; ++k) {
    const double next = 2.0 * x * cur - 2.0 * k * prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

std::vector<double> hermite_coefficients(int m) {
  if (m < 0) throw ValidationError("hermite: negative order");
  std::vector<double> prev{1.0}, cur{0.0, 2.0};
  if (m == 0) return prev;
  for (int k = 1; k < m; ++k) {
    std::vector<double> next(k + 2, 0.0);
    for (int i = 0; i <= k; ++i) next[i + 1] += 2.0 * cur[i];
    for (int i = 0; i < k; ++i) next[i] -= 2.0 * k * prev[i];
    prev = std::move(cur);
    cur = std::move(next);
  }
  return cur;
}

Matrix hermite_op(int m, const Matrix& x, double scale) {
  if (m < 0) throw ValidationError("hermite_op: negative order");
  if (x.rows() != x.cols()) throw ValidationError("hermite_op: matrix must be square");
  const Matrix y = x / scale;
  const Matrix id = Matrix::Identity(x.rows(), x.cols());
  Matrix prev = id, cur = 2.0 * y;
  if (m == 0) return prev;
  for (int k = 1; k < m; ++k) {
    Matrix next = 2.0 * y * cur - 2.0 * k * prev;
    prev = std::move(cur);
    cur = std::move(next);
  }
  return cur;
}

OrthogonalityCheck hermite_orthogonality_check(int n, int m, double sigma_sq, int trunc,
                                               int max_order, double tail_tol) {
  if (n < 0 || m < 0) throw ValidationError("hermite_orthogonality_check: negative order");
  if (n + m > max_order)
    throw ValidationError("hermite_orthogonality_check: n + m exceeds the configured maximum " +
                          std::to_string(max_order));
  const double t = FockRep::tail(sigma_sq, trunc);
  if (t >= tail_tol)
    throw ToleranceError("hermite_orthogonality_check: truncation " + std::to_string(trunc) +
                         " leaves thermal tail " + std::to_string(t));

  const int order = n + m;
  // Products below have length at most 2 * order.
  FockRep rep(trunc, order);
  const Matrix& Q = rep.Q();
  const Matrix& P = rep.P();
  const RealVector w = rep.thermal_weights(sigma_sq);

  // Weyl-ordered monomials S[Q^a P^b] for a + b <= order, by Jordan products.
  std::vector<std::vector<Matrix>> s(order + 1, std::vector<Matrix>(order + 1));
  s[0][0] = Matrix::Identity(rep.dim(), rep.dim());
  for (int a = 0; a <= order; ++a)
    for (int b = 0; a + b <= order; ++b) {
      if (a == 0 && b == 0) continue;
      if (b == 0)
        s[a][0] = 0.5 * (Q * s[a - 1][0] + s[a - 1][0] * Q);
      else
        s[a][b] = 0.5 * (P * s[a][b - 1] + s[a][b - 1] * P);
    }

  auto inner = [&](const Matrix& x, const Matrix& y) {
    Complex acc = 0.0;
    for (int k = 0; k < rep.dim(); ++k)
      if (w(k) != 0.0) acc += w(k) * (x.row(k) * y.col(k))(0, 0);
    return acc;
  };

  const auto hn = hermite_coefficients(n);
  const auto hm = hermite_coefficients(m);
  const double scale = 1.0 / std::sqrt(2.0 * sigma_sq);
  Matrix x = Matrix::Zero(rep.dim(), rep.dim());
  for (int i = 0; i <= n; ++i)
    for (int j = 0; j <= m; ++j)
      if (hn[i] != 0.0 && hm[j] != 0.0) x += hn[i] * hm[j] * std::pow(scale, i + j) * s[i][j];

  OrthogonalityCheck out;
  const double nx = std::sqrt(std::abs(inner(x, x)));
  for (int a = 0; a < order; ++a)
    for (int b = 0; a + b < order; ++b) {
      const double ny = std::sqrt(std::abs(inner(s[a][b], s[a][b])));
      const double r = std::abs(inner(x, s[a][b])) / (nx * ny);
      if (r > out.max_residual) out = {r, a, b};
    }
  return out;
}

}  // namespace qustat::ccr
