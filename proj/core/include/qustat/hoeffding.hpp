#pragma once

#include <optional>
#include <vector>

#include <json.hpp>

#include "qustat/operator.hpp"
#include "qustat/state.hpp"

namespace qustat {

/// E(H|A): traces the sites outside A against rho and acts as identity there.
HermitianOperator cond_expectation(const HermitianOperator& h, const SiteSubset& a,
                                   const DensityMatrix& rho);

/// P_A(H) = sum_{B subset A} (-1)^{|A|-|B|} E(H|B).
HermitianOperator hoeffding_project(const HermitianOperator& h, const SiteSubset& a,
                                   const DensityMatrix& rho);

struct HoeffdingComponent {
  int l = 0;
  /// K_l on its own l sites. K_0 is the 1x1 operator theta.
  Kernel kernel;
  /// Tr(rho^{⊗l} K_l^2).
  double norm_sq = 0.0;
};

struct DegeneracyReport {
  double theta = 0.0;
  /// First order l >= 1 with ||K_l||_F >= tol; empty when K = theta * 1.
  std::optional<int> c;
  double tol = 0.0;
  std::vector<HoeffdingComponent> components;  // l = 0..r

  int r() const { return static_cast<int>(components.size()) - 1; }
  bool fully_degenerate() const { return !c.has_value(); }
  /// Throws ValidationError when no order is assigned.
  int order() const;
};

/// Hoeffding components of K under rho. tol <= 0 is rejected; when omitted
/// it defaults to 1e-9 * ||K||_F.
DegeneracyReport kernel_components(const Kernel& k, const DensityMatrix& rho,
                                   std::optional<double> tol = std::nullopt);

nlohmann::json to_json(const DegeneracyReport& report);

}  // namespace qustat
