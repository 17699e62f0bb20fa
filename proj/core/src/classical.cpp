#include "qustat/classical.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "qustat/error.hpp"
#include "qustat/random.hpp"
#include "qustat/tensor.hpp"

namespace qustat {
namespace {

std::size_t flat_index(std::span<const int> args, int d) {
  std::size_t idx = 0;
  for (int a : args) idx = idx * d + a;
  return idx;
}

// Calls f(m) for every multiplicity vector m over d values with |m| = r.
template <class F>
void for_each_multiset(int d, int r, F&& f) {
  std::vector<int> m(d, 0);
  auto rec = [&](auto&& self, int pos, int left) -> void {
    if (pos == d - 1) {
      m[pos] = left;
      f(m);
      return;
    }
    for (int k = left; k >= 0; --k) {
      m[pos] = k;
      self(self, pos + 1, left - k);
    }
  };
  rec(rec, 0, r);
}

}  // namespace

double ClassicalKernel::operator()(std::span<const int> args) const {
  return values[flat_index(args, d)];
}

void ClassicalKernel::validate() const {
  if (d < 1 || r < 0) throw ValidationError("classical kernel: need d >= 1 and r >= 0");
  if (values.size() != ipow(d, r)) throw ValidationError("classical kernel: table size is not d^r");
  std::vector<int> args(r);
  for (std::size_t i = 0; i < values.size(); ++i) {
    std::size_t rem = i;
    for (int k = r - 1; k >= 0; --k) {
      args[k] = static_cast<int>(rem % d);
      rem /= d;
    }
    std::vector<int> sorted = args;
    std::sort(sorted.begin(), sorted.end());
    if (std::abs(values[i] - values[flat_index(sorted, d)]) > 1e-12)
      throw ValidationError("classical kernel: h is not symmetric");
  }
}

ClassicalKernel classical_from_diagonal(const Kernel& k) {
  if (!tensor::is_diagonal(k.matrix(), 1e-12))
    throw ValidationError("classical_from_diagonal: kernel is not diagonal");
  ClassicalKernel h{k.d(), k.r(), {}};
  h.values.resize(k.matrix().rows());
  for (Eigen::Index i = 0; i < k.matrix().rows(); ++i) h.values[i] = k.matrix()(i, i).real();
  return h;
}

double classical_theta(const ClassicalKernel& h, const RealVector& lambda) {
  double out = 0.0;
  std::vector<int> args(h.r);
  for (std::size_t i = 0; i < h.values.size(); ++i) {
    std::size_t rem = i;
    double w = 1.0;
    for (int k = h.r - 1; k >= 0; --k) {
      w *= lambda(static_cast<Eigen::Index>(rem % h.d));
      rem /= h.d;
    }
    out += w * h.values[i];
  }
  return out;
}

double classical_ustat_from_counts(const ClassicalKernel& h, std::span<const int> counts) {
  const int n = std::accumulate(counts.begin(), counts.end(), 0);
  double sum = 0.0;
  std::vector<int> args;
  for_each_multiset(h.d, h.r, [&](const std::vector<int>& m) {
    double ways = 1.0;
    args.clear();
    for (int v = 0; v < h.d; ++v) {
      ways *= binom(counts[v], m[v]);
      for (int k = 0; k < m[v]; ++k) args.push_back(v);
    }
    if (ways != 0.0) sum += ways * h(args);
  });
  return sum / binom(n, h.r);
}

double uniform01(std::uint64_t bits) { return static_cast<double>(bits >> 11) * 0x1.0p-53; }

MonteCarloEstimate classical_mc_oracle(const ClassicalKernel& h, const RealVector& lambda, int n,
                                       int p, Scaling scaling, std::int64_t replicates,
                                       std::uint64_t seed, int threads) {
  h.validate();
  if (replicates < 2) throw ValidationError("classical_mc_oracle: need at least 2 replicates");
  if (p < 1) throw ValidationError("classical_mc_oracle: p must be >= 1");
  if (n < h.r) throw ValidationError("classical_mc_oracle: n < r");
  if (lambda.size() != h.d || std::abs(lambda.sum() - 1.0) > 1e-12 || (lambda.array() < 0).any())
    throw ValidationError("classical_mc_oracle: lambda is not a probability vector on d points");

  const double theta = classical_theta(h, lambda);
  const double s = scaling.factor(n);
  std::vector<double> cdf(h.d);
  std::partial_sum(lambda.data(), lambda.data() + h.d, cdf.begin());

  const auto reps = static_cast<std::size_t>(replicates);
  const std::size_t chunks = (reps + kChunkSize - 1) / kChunkSize;
  std::vector<double> sums(chunks, 0.0), sq(chunks, 0.0);
  parallel_chunks(reps, threads, [&](std::size_t begin, std::size_t end, std::size_t chunk) {
    std::vector<int> counts(h.d);
    double a = 0.0, b = 0.0;
    for (std::size_t i = begin; i < end; ++i) {
      auto rng = make_stream(seed, i);
      std::fill(counts.begin(), counts.end(), 0);
      for (int k = 0; k < n; ++k) {
        const double u = uniform01(rng());
        const auto it = std::upper_bound(cdf.begin(), cdf.end() - 1, u);
        ++counts[it - cdf.begin()];
      }
      const double v = std::pow(s * (classical_ustat_from_counts(h, counts) - theta), p);
      a += v;
      b += v * v;
    }
    sums[chunk] = a;
    sq[chunk] = b;
  });
  double a = 0.0, b = 0.0;
  for (std::size_t c = 0; c < chunks; ++c) {
    a += sums[c];
    b += sq[c];
  }
  const double m = static_cast<double>(reps);
  const double mean = a / m;
  const double var = std::max(0.0, (b - m * mean * mean) / (m - 1));
  return {mean, std::sqrt(var / m)};
}

}  // namespace qustat
