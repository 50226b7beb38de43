#pragma once

#include <cstdint>
#include <vector>

#include "cpsim/kernels.hpp"
#include "cpsim/network.hpp"
#include "cpsim/rng.hpp"

namespace cpsim {

/// The three admissible node states; unaware-infected cannot be expressed.
enum class NodeState : std::uint8_t { US, AS, AI };

inline bool is_aware(NodeState s) { return s != NodeState::US; }
inline bool is_infected(NodeState s) { return s == NodeState::AI; }

struct McState {
  std::vector<NodeState> states;
  int t = 0;

  std::size_t count(NodeState s) const;
  std::size_t aware_count() const;
  double rho_a() const;
  double rho_i() const;
};

/// Which awareness selects beta_A vs beta_U for a susceptible node.
enum class InfectionAwareness {
  PostAwareness,  ///< outcome of this step's awareness phase (default)
  PreAwareness,   ///< state at the start of the step
};

/// ceil(frac * N) distinct nodes, chosen uniformly, start AI; the rest US.
McState init_state(const MultiplexNetwork& net, double frac_infected,
                   std::uint64_t seed);

/// Synchronous two-phase step over reusable buffers. Each step draws
/// exactly two uniforms per node, in node order, before any node is
/// updated, so the stream position is independent of the states.
class McEngine {
 public:
  McEngine(const MultiplexNetwork& net, const ModelParams& params,
           InfectionAwareness mode = InfectionAwareness::PostAwareness);

  void step(McState& state, Rng& rng);

 private:
  const MultiplexNetwork& net_;
  ModelParams params_;
  InfectionAwareness mode_;
  std::vector<double> p_a_;
  std::vector<double> p_ai_;
  std::vector<double> u_aware_;
  std::vector<double> u_epi_;
};

McState mc_step(const McState& state, const MultiplexNetwork& net,
                const ModelParams& params, Rng& rng,
                InfectionAwareness mode = InfectionAwareness::PostAwareness);

/// Ensemble and stopping configuration for the stochastic engine.
struct RunConfig {
  std::uint64_t seed = 20240601;
  int n_runs = 100;
  int burn_in = 500;
  int window = 100;
  int max_steps = 5000;
  double stop_tol = 1e-3;
  double init_infected = 0.01;
  InfectionAwareness mode = InfectionAwareness::PostAwareness;
  int jobs = 1;

  void validate() const;
};

struct RunDensities {
  double rho_a = 0.0;
  double rho_i = 0.0;
  int steps = 0;
};

/// One trajectory on substream derive_seed(cfg.seed, run_index). After
/// burn_in steps, stops once the mean of rho_I over the last `window`
/// steps moves by less than stop_tol between consecutive steps, or at
/// max_steps; returns the last-window means.
RunDensities run_to_steady(const MultiplexNetwork& net,
                           const ModelParams& params, const RunConfig& cfg,
                           std::uint64_t run_index);

struct EnsembleResult {
  double rho_a_mean = 0.0;
  double rho_i_mean = 0.0;
  double rho_a_sd = 0.0;  ///< sample SD over runs; 0 for a single run
  double rho_i_sd = 0.0;
  int runs_used = 0;
};

/// cfg.n_runs independent trajectories (runs 0..n-1) on cfg.jobs threads.
/// Results are assembled in run order, so they do not depend on jobs.
EnsembleResult run_ensemble(const MultiplexNetwork& net,
                            const ModelParams& params, const RunConfig& cfg);

EnsembleResult summarize(const std::vector<RunDensities>& runs);

}  // namespace cpsim
