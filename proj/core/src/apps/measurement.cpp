#include "qustat/apps/measurement.hpp"

#include <algorithm>
#include <cmath>

#include "qustat/classical.hpp"
#include "qustat/error.hpp"
#include "qustat/random.hpp"
#include "qustat/tensor.hpp"

namespace qustat::apps {
namespace {

OutcomeDistribution collect(const RealVector& eig, const RealVector& weight, double merge_tol) {
  OutcomeDistribution out;
  double total = 0.0;
  for (Eigen::Index k = 0; k < eig.size(); ++k) {
    const double w = std::max(0.0, weight(k));
    total += weight(k);
    if (!out.values.empty() && eig(k) - out.values.back() <= merge_tol) {
      out.probabilities.back() += w;
    } else {
      out.values.push_back(eig(k));
      out.probabilities.push_back(w);
    }
  }
  if (std::abs(total - 1.0) > 1e-8)
    throw ToleranceError("measurement: probability mass deficit " + std::to_string(1.0 - total));
  for (auto& p : out.probabilities) p /= total;
  return out;
}

Eigen::SelfAdjointEigenSolver<Matrix> decompose(const HermitianOperator& o) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(o.matrix());
  if (es.info() != Eigen::Success) throw ToleranceError("measurement: eigendecomposition failed");
  return es;
}

}  // namespace

double OutcomeDistribution::quantile_draw(double u) const {
  double acc = 0.0;
  for (std::size_t k = 0; k < values.size(); ++k) {
    acc += probabilities[k];
    if (u < acc) return values[k];
  }
  return values.back();
}

OutcomeDistribution outcome_distribution(const HermitianOperator& o, const DensityMatrix& rho,
                                         int n, double merge_tol) {
  const int d = rho.d();
  if (o.dim() != ipow(d, n)) throw ValidationError("measurement: observable is not on d^n");
  const auto es = decompose(o);
  const Matrix& v = es.eigenvectors();
  RealVector w(v.cols());
  if (tensor::is_diagonal(rho.matrix())) {
    const RealVector diag = tensor::product_diagonal(rho.matrix(), n);
    w = (v.cwiseAbs2().transpose() * diag);
  } else {
    Matrix rv = v;
    for (int s = 0; s < n; ++s) tensor::apply_site_left(rv, rho.matrix(), s, d, n);
    w = v.conjugate().cwiseProduct(rv).colwise().sum().real().transpose();
  }
  return collect(es.eigenvalues(), w, merge_tol);
}

OutcomeDistribution outcome_distribution(const HermitianOperator& o, const Matrix& state,
                                         double merge_tol) {
  if (static_cast<std::size_t>(state.rows()) != o.dim())
    throw ValidationError("measurement: state and observable dimensions differ");
  const auto es = decompose(o);
  const Matrix& v = es.eigenvectors();
  const Matrix rv = state * v;
  const RealVector w = v.conjugate().cwiseProduct(rv).colwise().sum().real().transpose();
  return collect(es.eigenvalues(), w, merge_tol);
}

std::vector<double> sample_outcomes(const OutcomeDistribution& dist, std::size_t replicates,
                                    std::uint64_t seed, int threads) {
  std::vector<double> out(replicates);
  parallel_chunks(replicates, threads, [&](std::size_t begin, std::size_t end, std::size_t) {
    for (std::size_t i = begin; i < end; ++i) {
      auto rng = make_stream(seed, i);
      out[i] = dist.quantile_draw(uniform01(rng()));
    }
  });
  return out;
}

std::vector<double> simulate_measurement(const HermitianOperator& o, const DensityMatrix& rho,
                                         int n, std::size_t replicates, std::uint64_t seed,
                                         int threads) {
  return sample_outcomes(outcome_distribution(o, rho, n), replicates, seed, threads);
}

}  // namespace qustat::apps
