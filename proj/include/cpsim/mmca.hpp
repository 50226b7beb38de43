#pragma once

#include <vector>

#include "cpsim/kernels.hpp"
#include "cpsim/network.hpp"

namespace cpsim {

/// Per-node probabilities of the three admissible states.
struct MmcaState {
  std::vector<double> p_us;
  std::vector<double> p_as;
  std::vector<double> p_ai;

  std::size_t size() const { return p_ai.size(); }

  /// Every node at (1 - infected, 0, infected).
  static MmcaState uniform(NodeId n, double infected_fraction);
};

struct SteadyDensities {
  double rho_a = 0.0;
  double rho_i = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// rho_A = mean of p_as + p_ai, rho_I = mean of p_ai.
SteadyDensities densities(const MmcaState& state);

/// One synchronous update; every kernel reads `state`.
MmcaState mmca_step(const MmcaState& state, const MultiplexNetwork& net,
                    const ModelParams& params);

struct MmcaOptions {
  double tol = 1e-6;
  int max_iter = 10'000;
};

struct MmcaSolution {
  MmcaState state;
  SteadyDensities densities;
};

/// Iterates mmca_step until the max-norm change of all three components
/// drops below tol. Hitting max_iter is reported through
/// densities.converged, not thrown.
MmcaSolution mmca_solve(const MultiplexNetwork& net, const ModelParams& params,
                        MmcaState init, const MmcaOptions& options = {});

}  // namespace cpsim
