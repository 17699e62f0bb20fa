#include "qustat/hoeffding.hpp"

#include <cfloat>
#include <cmath>

#include "qustat/error.hpp"
#include "qustat/json_io.hpp"
#include "qustat/tensor.hpp"

namespace qustat {
namespace {

int site_count(std::size_t dim, int d) {
  int n = 0;
  std::size_t acc = 1;
  while (acc < dim) {
    acc *= static_cast<std::size_t>(d);
    ++n;
  }
  if (acc != dim) throw ValidationError("operator dimension is not a power of the site dimension");
  return n;
}

// E(H|A) restricted to the sites of A (as an operator on d^{|A|}).
Matrix reduced_expectation(const Matrix& h, const SiteSubset& a, const DensityMatrix& rho) {
  const auto traced = a.complement().zero_based();
  return tensor::partial_expectation(h, rho.matrix(), traced, rho.d(), a.n());
}

}  // namespace

HermitianOperator cond_expectation(const HermitianOperator& h, const SiteSubset& a,
                                   const DensityMatrix& rho) {
  const int d = rho.d();
  const int n = site_count(h.dim(), d);
  if (a.n() != n) throw ValidationError("cond_expectation: subset ambient size differs from n");
  const Matrix reduced = reduced_expectation(h.matrix(), a, rho);
  Matrix out = Matrix::Zero(h.dim(), h.dim());
  const auto sites = a.zero_based();
  tensor::embed_add(out, reduced, sites, d, n);
  return HermitianOperator::from_arithmetic(std::move(out));
}

HermitianOperator hoeffding_project(const HermitianOperator& h, const SiteSubset& a,
                                   const DensityMatrix& rho) {
  const int d = rho.d();
  const int n = site_count(h.dim(), d);
  if (a.n() != n) throw ValidationError("hoeffding_project: subset ambient size differs from n");
  const auto& idx = a.indices();
  const int k = a.size();
  Matrix out = Matrix::Zero(h.dim(), h.dim());
  for (unsigned sub = 0; sub < (1u << k); ++sub) {
    std::vector<int> b;
    for (int i = 0; i < k; ++i)
      if (sub & (1u << i)) b.push_back(idx[i]);
    const SiteSubset bs(n, b);
    const double sign = ((k - static_cast<int>(b.size())) % 2) ? -1.0 : 1.0;
    const Matrix reduced = reduced_expectation(h.matrix(), bs, rho);
    const auto sites = bs.zero_based();
    tensor::embed_add(out, reduced, sites, d, n, sign);
  }
  return HermitianOperator::from_arithmetic(std::move(out));
}

int DegeneracyReport::order() const {
  if (!c) throw ValidationError("kernel is fully degenerate (K = theta * 1); no order c");
  return *c;
}

DegeneracyReport kernel_components(const Kernel& k, const DensityMatrix& rho,
                                   std::optional<double> tol) {
  if (k.d() != rho.d()) throw ValidationError("kernel_components: site dimension mismatch");
  if (!rho.strictly_positive()) throw ValidationError("kernel_components: rho must be strictly positive");
  const double knorm = k.op().frobenius_norm();
  const double t = tol.value_or(std::max(1e-9 * knorm, DBL_MIN));
  if (!(t > 0.0)) throw ValidationError("kernel_components: tolerance must be positive");

  const int d = k.d();
  const int r = k.r();
  DegeneracyReport rep;
  rep.tol = t;
  rep.theta = tensor::product_expectation(k.matrix(), rho.matrix(), d, r).real();

  for (int l = 0; l <= r; ++l) {
    // P_{1..l}K acts only on sites 1..l; build that restriction directly.
    const std::size_t dim = ipow(d, l);
    Matrix kl = Matrix::Zero(dim, dim);
    for (unsigned sub = 0; sub < (1u << l); ++sub) {
      std::vector<int> keep, local;
      for (int i = 0; i < l; ++i)
        if (sub & (1u << i)) {
          keep.push_back(i + 1);
          local.push_back(i);
        }
      const double sign = ((l - static_cast<int>(keep.size())) % 2) ? -1.0 : 1.0;
      const Matrix reduced = reduced_expectation(k.matrix(), SiteSubset(r, keep), rho);
      tensor::embed_add(kl, reduced, local, d, l, sign);
    }
    auto op = HermitianOperator::from_arithmetic(std::move(kl));
    const double norm_sq =
        tensor::product_expectation(op.matrix(), op.matrix(), rho.matrix(), d, l).real();
    const double fro = op.frobenius_norm();
    rep.components.push_back({l, Kernel(d, l, std::move(op)), norm_sq});
    if (l >= 1 && !rep.c && fro >= t) rep.c = l;
  }
  return rep;
}

nlohmann::json to_json(const DegeneracyReport& report) {
  nlohmann::json comps = nlohmann::json::array();
  for (const auto& c : report.components)
    comps.push_back({{"l", c.l}, {"norm_sq", c.norm_sq}, {"kernel", matrix_to_json(c.kernel.matrix())}});
  nlohmann::json j = {{"theta", report.theta}, {"components", std::move(comps)}};
  j["c"] = report.c ? nlohmann::json(*report.c) : nlohmann::json(nullptr);
  return j;
}

}  // namespace qustat
