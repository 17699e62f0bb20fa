#include "qustat/apps/testing.hpp"

#include <algorithm>
#include <cmath>

#include "qustat/apps/measurement.hpp"
#include "qustat/ccr/basis.hpp"
#include "qustat/ccr/limit.hpp"
#include "qustat/error.hpp"
#include "qustat/hoeffding.hpp"
#include "qustat/random.hpp"
#include "qustat/tensor.hpp"

namespace qustat::apps {

Kernel goodness_kernel(const DensityMatrix& rho, double gap_tol) {
  rho.require_nondegenerate(gap_tol);
  const int d = rho.d();
  const RealVector& lam = rho.eigenvalues();
  Matrix k = Matrix::Zero(d * d, d * d);
  for (int i = 0; i < d; ++i) {
    Matrix c = lam(i) * Matrix::Identity(d, d);
    c(i, i) -= 1.0;
    k += tensor::kron(c, c);
  }
  for (int j = 0; j < d; ++j)
    for (int l = j + 1; l < d; ++l) {
      Matrix t_jl = Matrix::Zero(d, d), t_lj = Matrix::Zero(d, d);
      t_jl(j, l) = Complex(0.0, 1.0);
      t_jl(l, j) = Complex(0.0, -1.0);
      t_lj(j, l) = t_lj(l, j) = 1.0;
      // 1/2 sum over ordered pairs j != l, i.e. once per unordered pair.
      k += 0.5 * (tensor::kron(t_jl, t_jl) + tensor::kron(t_lj, t_lj));
    }
  const Matrix v = tensor::kron(rho.eigenvectors(), rho.eigenvectors());
  return Kernel(d, 2, HermitianOperator::from_arithmetic(v * k * v.adjoint()));
}

Kernel homogeneity_kernel(int d) {
  if (d < 2) throw ValidationError("homogeneity_kernel: need d >= 2");
  // Sites are C^d ⊗ C^d = (x, y); factors ordered x1 y1 x2 y2. The swap of two
  // factors turns Tr(s ⊗ t swap) into Tr(s t).
  const int dim = d * d * d * d;
  auto swap = [&](int f1, int f2) {
    Matrix s = Matrix::Zero(dim, dim);
    for (int idx = 0; idx < dim; ++idx) {
      int digits[4];
      int rem = idx;
      for (int f = 3; f >= 0; --f) {
        digits[f] = rem % d;
        rem /= d;
      }
      std::swap(digits[f1], digits[f2]);
      int out = 0;
      for (int f = 0; f < 4; ++f) out = out * d + digits[f];
      s(out, idx) = 1.0;
    }
    return s;
  };
  const Matrix k = swap(0, 2) + swap(1, 3) - swap(0, 3) - swap(1, 2);
  return Kernel(d * d, 2, HermitianOperator::from_arithmetic(k));
}

void TestSpec::validate() const {
  if (!(alpha > 0.0 && alpha < 1.0)) throw ValidationError("test: alpha must lie in (0,1)");
  if (interval && !(interval->first < interval->second))
    throw ValidationError("test: interval needs a < b");
  if (mc_replicates < 2) throw ValidationError("test: need at least 2 replicates");
  if (limit_draws < 2) throw ValidationError("test: need at least 2 limit draws");
  if (n < 2) throw ValidationError("test: n must be >= 2");
}

std::pair<double, double> limit_interval(const DensityMatrix& rho, double alpha, IntervalKind kind,
                                         std::int64_t draws, std::uint64_t seed, int threads,
                                         int trunc) {
  const Kernel k = goodness_kernel(rho);
  const auto report = kernel_components(k, rho);
  const auto basis = ccr::build_ccr_basis(rho);
  const auto u = ccr::kernel_to_limit(k, report, basis);
  const ccr::LimitSampler sampler(u, basis, trunc);
  auto x = sampler.sample(static_cast<std::size_t>(draws), seed, threads);
  std::sort(x.begin(), x.end());
  auto quantile = [&](double q) {
    const auto m = static_cast<double>(x.size());
    const auto idx = static_cast<std::size_t>(std::max(1.0, std::ceil(q * m))) - 1;
    return x[std::min(idx, x.size() - 1)];
  };
  if (kind == IntervalKind::upper) return {-std::numeric_limits<double>::infinity(), quantile(1.0 - alpha)};
  return {quantile(alpha / 2), quantile(1.0 - alpha / 2)};
}

TestResult run_test(const TestSpec& spec, const std::optional<DensityMatrix>& alternative) {
  spec.validate();
  const DensityMatrix& rho = spec.null_state;
  const int d = rho.d();
  spec.budget.check(d, spec.n);
  if (alternative && alternative->d() != d) throw ValidationError("test: alternative has the wrong dimension");

  TestResult res;
  res.n = spec.n;
  const auto interval = spec.interval ? *spec.interval
                                      : limit_interval(rho, spec.alpha, spec.interval_kind,
                                                       spec.limit_draws, spec.seed, spec.threads, spec.trunc);
  res.a = interval.first;
  res.b = interval.second;

  const Kernel k = goodness_kernel(rho);
  const auto u = assemble_direct(k, spec.n, spec.budget);
  const double scale = spec.base == Scaling::Base::n ? spec.n : spec.n - 1;
  const auto stat = HermitianOperator::from_arithmetic(scale * u.op.matrix());
  const auto reps = static_cast<std::size_t>(spec.mc_replicates);

  auto rejection_rate = [&](const DensityMatrix& state, std::uint64_t stream_seed) {
    const auto dist = outcome_distribution(stat, state, spec.n);
    const auto draws = sample_outcomes(dist, reps, stream_seed, spec.threads);
    std::size_t outside = 0;
    for (double v : draws) outside += (v < res.a || v > res.b) ? 1 : 0;
    return static_cast<double>(outside) / static_cast<double>(reps);
  };
  auto se = [&](double p) { return std::sqrt(p * (1.0 - p) / static_cast<double>(reps)); };

  // Separate streams for the null and alternative simulations.
  res.alpha_hat = rejection_rate(rho, stream_seed(spec.seed, 1));
  res.alpha_se = se(res.alpha_hat);
  if (alternative) {
    const double accept = 1.0 - rejection_rate(*alternative, stream_seed(spec.seed, 2));
    res.beta_hat = accept;
    res.beta_se = se(accept);
    res.theta_true = (alternative->matrix() - rho.matrix()).squaredNorm();
  }
  return res;
}

nlohmann::json to_json(const TestResult& r) {
  auto opt = [](const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); };
  auto finite = [](double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); };
  return {{"n", r.n},
          {"alpha_hat", r.alpha_hat},
          {"alpha_se", r.alpha_se},
          {"beta_hat", opt(r.beta_hat)},
          {"beta_se", opt(r.beta_se)},
          {"theta_true", opt(r.theta_true)},
          {"interval", {finite(r.a), finite(r.b)}}};
}

}  // namespace qustat::apps
