#include "qustat/apps/metrology.hpp"

#include <cmath>

#include "qustat/error.hpp"
#include "qustat/tensor.hpp"
#include "qustat/ustat.hpp"

namespace qustat::apps {

OverlapResult metrology_overlap(const Kernel& k, const DensityMatrix& rho0, double t, double g1,
                                double g2, int n, const Budget& budget, double tol) {
  const int d = k.d();
  const int r = k.r();
  if (rho0.d() != d) throw ValidationError("metrology: state and kernel dimensions differ");
  if (!rho0.is_pure()) throw ValidationError("metrology: reference state must be pure");
  const Matrix& R = rho0.matrix();
  const double scale = std::max(1.0, k.op().frobenius_norm());
  const double theta = tensor::product_expectation(k.matrix(), R, d, r).real();
  if (std::abs(theta) > tol * scale)
    throw ValidationError("metrology: kernel is not centered at the reference state (theta = " +
                          std::to_string(theta) + ")");

  // K_1 = E(K | {1}) - theta on one site; theta vanishes here.
  std::vector<int> rest;
  for (int s = 1; s < r; ++s) rest.push_back(s);
  const Matrix k1 = tensor::partial_expectation(k.matrix(), R, rest, d, r);
  const double xi1 = (R * k1 * k1).trace().real();
  if (xi1 <= tol * scale * scale)
    throw ValidationError("metrology: kernel is degenerate at the reference state (xi_1 = 0)");

  double fact = 1.0;
  for (int i = 2; i < r; ++i) fact *= i;
  const double dg = g1 - g2;

  OverlapResult out;
  out.n = n;
  out.xi1 = xi1;
  out.limit = std::exp(-t * t * dg * dg * xi1 / (2.0 * fact * fact));
  if (t * dg == 0.0) {
    out.overlap = 1.0;
    return out;
  }

  const auto u = assemble_direct(k, n, budget);
  const double phase = t * dg * std::pow(static_cast<double>(n), -r + 0.5) * binom(n, r);
  Eigen::SelfAdjointEigenSolver<Matrix> es(u.op.matrix());
  if (es.info() != Eigen::Success) throw ToleranceError("metrology: eigendecomposition failed");
  const Matrix& v = es.eigenvectors();
  // rho0^{⊗n} = |psi><psi| with psi the leading eigenvector, tensored n times.
  const Vector psi1 = rho0.eigenvectors().col(0);
  Vector psi = Vector::Ones(1);
  for (int s = 0; s < n; ++s) {
    Vector next(psi.size() * d);
    for (Eigen::Index i = 0; i < psi.size(); ++i) next.segment(i * d, d) = psi(i) * psi1;
    psi = std::move(next);
  }
  const Vector amp = v.adjoint() * psi;
  Complex acc = 0.0;
  for (Eigen::Index j = 0; j < amp.size(); ++j)
    acc += std::norm(amp(j)) * std::exp(Complex(0.0, phase * es.eigenvalues()(j)));
  out.overlap = acc;
  return out;
}

nlohmann::json to_json(const OverlapResult& r) {
  return {{"n", r.n}, {"overlap_re", r.overlap.real()}, {"overlap_im", r.overlap.imag()}, {"limit", r.limit}};
}

}  // namespace qustat::apps
