#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <utility>

#include <json.hpp>

#include "qustat/operator.hpp"
#include "qustat/state.hpp"
#include "qustat/types.hpp"
#include "qustat/ustat.hpp"

namespace qustat::apps {

/// Order-two kernel with Tr(sigma^{⊗2} K) = ||sigma - rho||_2^2 for every
/// density matrix sigma. Built in rho's eigenbasis and rotated back.
Kernel goodness_kernel(const DensityMatrix& rho, double gap_tol = 1e-9);

/// Order-two kernel on C^d ⊗ C^d sites with
/// Tr((s1 ⊗ s2)^{⊗2} K) = ||s1 - s2||_2^2.
Kernel homogeneity_kernel(int d);

enum class IntervalKind { upper, equal_tail };

struct TestSpec {
  DensityMatrix null_state;
  double alpha = 0.05;
  int n = 10;
  /// Acceptance interval for the scaled statistic; derived from the limit
  /// law when empty.
  std::optional<std::pair<double, double>> interval;
  IntervalKind interval_kind = IntervalKind::upper;
  /// The statistic is base * U_n with base n (default) or n - 1.
  Scaling::Base base = Scaling::Base::n;
  std::int64_t mc_replicates = 10000;
  std::int64_t limit_draws = 1000000;
  int trunc = 64;
  std::uint64_t seed = 0;
  int threads = 1;
  Budget budget{};

  /// Throws ValidationError unless 0 < alpha < 1, a < b, replicates >= 2.
  void validate() const;
};

struct TestResult {
  int n = 0;
  double a = -std::numeric_limits<double>::infinity();
  double b = std::numeric_limits<double>::infinity();
  double alpha_hat = 0.0;
  double alpha_se = 0.0;
  std::optional<double> beta_hat;
  std::optional<double> beta_se;
  std::optional<double> theta_true;  // ||sigma - rho||_2^2
};

/// Quantile interval of the limit law of n U_n under the null: [-inf, q_{1-alpha}]
/// or [q_{alpha/2}, q_{1-alpha/2}] from sampled draws.
std::pair<double, double> limit_interval(const DensityMatrix& rho, double alpha, IntervalKind kind,
                                         std::int64_t draws, std::uint64_t seed, int threads = 1,
                                         int trunc = 64);

/// Simulates the goodness-of-fit test: measures the scaled U_n in rho^{⊗n}
/// (type I error) and, when given, in sigma^{⊗n} (type II error).
TestResult run_test(const TestSpec& spec, const std::optional<DensityMatrix>& alternative = std::nullopt);

nlohmann::json to_json(const TestResult& r);

}  // namespace qustat::apps
