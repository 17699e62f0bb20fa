#pragma once

#include <json.hpp>

#include "qustat/operator.hpp"
#include "qustat/state.hpp"
#include "qustat/types.hpp"

namespace qustat::apps {

struct OverlapResult {
  int n = 0;
  Complex overlap;     // Tr(rho0^{⊗n} exp(i t (g1 - g2) n^{-r+1/2} H_n))
  double limit = 0.0;  // exp(-t^2 (g1 - g2)^2 xi_1 / (2 ((r-1)!)^2))
  double xi1 = 0.0;    // Tr(rho0 K_1^2)
};

/// Overlap of the states evolved under g1 H_n and g2 H_n, with
/// H_n = sum_beta K^{(beta)}, and its coherent-state limit. rho0 must be
/// pure, K centered at rho0 and non-degenerate there.
OverlapResult metrology_overlap(const Kernel& k, const DensityMatrix& rho0, double t, double g1,
                                double g2, int n, const Budget& budget = {},
                                double tol = 1e-10);

nlohmann::json to_json(const OverlapResult& r);

}  // namespace qustat::apps
