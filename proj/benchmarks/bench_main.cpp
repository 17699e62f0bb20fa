#include <benchmark/benchmark.h>

#include "qustat/apps/testing.hpp"
#include "qustat/ccr/fock.hpp"
#include "qustat/ccr/limit.hpp"
#include "qustat/hoeffding.hpp"
#include "qustat/ustat.hpp"

using namespace qustat;

namespace {

DensityMatrix qubit() {
  RealVector p(2);
  p << 0.75, 0.25;
  return DensityMatrix::diagonal(p);
}

Kernel xy() {
  const std::vector<HermitianOperator> f{pauli::x(), pauli::y()};
  return symmetrize_kernel(f);
}

void BM_AssembleDirect(benchmark::State& state) {
  const Kernel k = xy();
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(assemble_direct(k, n));
}
BENCHMARK(BM_AssembleDirect)->DenseRange(4, 10, 2)->Unit(benchmark::kMillisecond);

void BM_CenteredMoments(benchmark::State& state) {
  const Kernel k = xy();
  const auto rho = qubit();
  const auto u = assemble_direct(k, static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(centered_moments(u, rho, {2, 4}, Scaling{2, Scaling::Base::n_minus_1}));
}
BENCHMARK(BM_CenteredMoments)->DenseRange(4, 10, 2)->Unit(benchmark::kMillisecond);

void BM_KernelComponents(benchmark::State& state) {
  const Kernel k = apps::goodness_kernel(qubit());
  const auto rho = qubit();
  for (auto _ : state) benchmark::DoNotOptimize(kernel_components(k, rho));
}
BENCHMARK(BM_KernelComponents);

void BM_LimitMoment(benchmark::State& state) {
  const auto rho = qubit();
  const Kernel k = xy();
  const auto basis = ccr::build_ccr_basis(rho);
  const auto u = ccr::kernel_to_limit(k, kernel_components(k, rho), basis);
  const auto method = state.range(1) == 0 ? ccr::MomentMethod::wick : ccr::MomentMethod::fock;
  for (auto _ : state) benchmark::DoNotOptimize(ccr::limit_moment(u, basis, static_cast<int>(state.range(0)), method));
}
BENCHMARK(BM_LimitMoment)->ArgsProduct({{2, 4, 6}, {0, 1}});

void BM_LimitSampler(benchmark::State& state) {
  const auto rho = qubit();
  const Kernel k = apps::goodness_kernel(rho);
  const auto basis = ccr::build_ccr_basis(rho);
  const ccr::LimitSampler sampler(ccr::kernel_to_limit(k, kernel_components(k, rho), basis), basis);
  const auto count = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(sampler.sample(count, 7));
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * count));
}
BENCHMARK(BM_LimitSampler)->Arg(1 << 16);

}  // namespace

BENCHMARK_MAIN();
