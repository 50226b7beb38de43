#include "cpsim/mc.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "cpsim/parallel.hpp"

namespace cpsim {

std::size_t McState::count(NodeState s) const {
  return static_cast<std::size_t>(std::count(states.begin(), states.end(), s));
}

std::size_t McState::aware_count() const {
  return states.size() - count(NodeState::US);
}

double McState::rho_a() const {
  return states.empty() ? 0.0
                        : static_cast<double>(aware_count()) / states.size();
}

double McState::rho_i() const {
  return states.empty()
             ? 0.0
             : static_cast<double>(count(NodeState::AI)) / states.size();
}

McState init_state(const MultiplexNetwork& net, double frac_infected,
                   std::uint64_t seed) {
  if (!(frac_infected > 0.0 && frac_infected < 1.0)) {
    throw std::invalid_argument("init_state: infected fraction outside (0, 1)");
  }
  const auto n = static_cast<std::size_t>(net.size());
  McState s;
  s.states.assign(n, NodeState::US);
  if (n == 0) return s;
  // The epsilon keeps 0.01 * 1000 from rounding up to 11.
  auto k = static_cast<std::size_t>(std::ceil(frac_infected * n - 1e-9));
  k = std::clamp<std::size_t>(k, 1, n);

  Rng rng(seed);
  std::vector<NodeId> order(n);
  std::iota(order.begin(), order.end(), 0);
  for (std::size_t m = 0; m < k; ++m) {
    const auto pick = m + uniform_below(rng, n - m);
    std::swap(order[m], order[pick]);
    s.states[order[m]] = NodeState::AI;
  }
  return s;
}

McEngine::McEngine(const MultiplexNetwork& net, const ModelParams& params,
                   InfectionAwareness mode)
    : net_(net),
      params_(params),
      mode_(mode),
      p_a_(static_cast<std::size_t>(net.size())),
      p_ai_(static_cast<std::size_t>(net.size())),
      u_aware_(static_cast<std::size_t>(net.size())),
      u_epi_(static_cast<std::size_t>(net.size())) {}

void McEngine::step(McState& state, Rng& rng) {
  const auto n = state.states.size();
  assert(n == p_a_.size());
  for (std::size_t i = 0; i < n; ++i) {
    p_a_[i] = is_aware(state.states[i]) ? 1.0 : 0.0;
    p_ai_[i] = is_infected(state.states[i]) ? 1.0 : 0.0;
  }
  for (std::size_t i = 0; i < n; ++i) {
    u_aware_[i] = uniform01(rng);
    u_epi_[i] = uniform01(rng);
  }
  const NeighborField field{p_a_, p_ai_};
  const bool post = mode_ == InfectionAwareness::PostAwareness;

  // In-place is safe: every neighbour read goes through the time-t
  // snapshot in p_a_ / p_ai_.
  for (std::size_t idx = 0; idx < n; ++idx) {
    const auto i = static_cast<NodeId>(idx);
    NodeState& s = state.states[idx];
    switch (s) {
      case NodeState::US: {
        const bool aware = u_aware_[idx] < 1.0 - r_total(i, net_, field, params_);
        const double esc =
            q(i, net_.physical(), field, params_, post ? aware : false);
        if (u_epi_[idx] < 1.0 - esc) {
          s = NodeState::AI;
        } else {
          s = aware ? NodeState::AS : NodeState::US;
        }
        break;
      }
      case NodeState::AS: {
        const bool aware = !(u_aware_[idx] < params_.delta);
        const double esc =
            q(i, net_.physical(), field, params_, post ? aware : true);
        if (u_epi_[idx] < 1.0 - esc) {
          s = NodeState::AI;
        } else {
          s = aware ? NodeState::AS : NodeState::US;
        }
        break;
      }
      case NodeState::AI: {
        const bool forgot = u_aware_[idx] < params_.delta;
        if (u_epi_[idx] < params_.mu) {
          s = forgot ? NodeState::US : NodeState::AS;
        }
        break;
      }
    }
  }
  ++state.t;
}

McState mc_step(const McState& state, const MultiplexNetwork& net,
                const ModelParams& params, Rng& rng, InfectionAwareness mode) {
  McState next = state;
  McEngine engine(net, params, mode);
  engine.step(next, rng);
  return next;
}

void RunConfig::validate() const {
  if (n_runs < 1) throw std::invalid_argument("n_runs must be >= 1");
  if (window < 1) throw std::invalid_argument("window must be >= 1");
  if (burn_in < 0) throw std::invalid_argument("burn_in must be >= 0");
  if (burn_in + window > max_steps) {
    throw std::invalid_argument("burn_in + window must not exceed max_steps");
  }
  if (!(stop_tol >= 0.0)) throw std::invalid_argument("stop_tol must be >= 0");
  if (!(init_infected > 0.0 && init_infected < 1.0)) {
    throw std::invalid_argument("init_infected outside (0, 1)");
  }
}

RunDensities run_to_steady(const MultiplexNetwork& net,
                           const ModelParams& params, const RunConfig& cfg,
                           std::uint64_t run_index) {
  const auto run_seed = derive_seed(cfg.seed, run_index);
  McState state =
      init_state(net, cfg.init_infected, derive_seed(run_seed, "init"));
  Rng rng(derive_seed(run_seed, "dynamics"));
  McEngine engine(net, params, cfg.mode);

  // Nothing can create awareness or infection from an all-US state unless
  // the sensing channel has a spontaneous baseline.
  const bool spontaneous =
      params.enable_r3 && params.sensing_baseline == SensingBaseline::Literal;

  // Window sums are kept in node counts so that they stay exact.
  const auto w = static_cast<std::size_t>(cfg.window);
  const double n = static_cast<double>(state.states.size());
  const double denom = n * static_cast<double>(w);
  std::vector<std::int64_t> hist_i(w + 1, 0);
  std::vector<std::int64_t> hist_a(w + 1, 0);
  std::int64_t sum_i = 0;  // over the last w steps
  std::int64_t sum_a = 0;
  double prev_mean = 0.0;

  RunDensities out;
  for (int t = 1; t <= cfg.max_steps; ++t) {
    engine.step(state, rng);
    const auto infected = static_cast<std::int64_t>(state.count(NodeState::AI));
    const auto aware = static_cast<std::int64_t>(state.aware_count());
    assert(infected <= aware);

    const auto slot = static_cast<std::size_t>(t) % (w + 1);
    const auto old = static_cast<std::size_t>(t + 1) % (w + 1);  // t - w
    hist_i[slot] = infected;
    hist_a[slot] = aware;
    sum_i += infected;
    sum_a += aware;
    if (t > cfg.window) {
      sum_i -= hist_i[old];
      sum_a -= hist_a[old];
    }
    out.steps = t;

    if (!spontaneous && aware == 0) {
      out.rho_a = 0.0;
      out.rho_i = 0.0;
      return out;  // absorbing
    }
    const double mean_i = static_cast<double>(sum_i) / denom;
    if (t >= cfg.burn_in + cfg.window && t > cfg.window &&
        std::abs(mean_i - prev_mean) < cfg.stop_tol) {
      break;
    }
    prev_mean = mean_i;
  }
  out.rho_i = static_cast<double>(sum_i) / denom;
  out.rho_a = static_cast<double>(sum_a) / denom;
  return out;
}

EnsembleResult summarize(const std::vector<RunDensities>& runs) {
  EnsembleResult r;
  r.runs_used = static_cast<int>(runs.size());
  if (runs.empty()) return r;
  for (const auto& d : runs) {
    r.rho_a_mean += d.rho_a;
    r.rho_i_mean += d.rho_i;
  }
  r.rho_a_mean /= runs.size();
  r.rho_i_mean /= runs.size();
  if (runs.size() > 1) {
    double va = 0.0;
    double vi = 0.0;
    for (const auto& d : runs) {
      va += (d.rho_a - r.rho_a_mean) * (d.rho_a - r.rho_a_mean);
      vi += (d.rho_i - r.rho_i_mean) * (d.rho_i - r.rho_i_mean);
    }
    r.rho_a_sd = std::sqrt(va / (runs.size() - 1));
    r.rho_i_sd = std::sqrt(vi / (runs.size() - 1));
  }
  return r;
}

EnsembleResult run_ensemble(const MultiplexNetwork& net,
                            const ModelParams& params, const RunConfig& cfg) {
  cfg.validate();
  std::vector<RunDensities> runs(static_cast<std::size_t>(cfg.n_runs));
  parallel_for(runs.size(), cfg.jobs, [&](std::size_t r) {
    runs[r] = run_to_steady(net, params, cfg, r);
  });
  return summarize(runs);
}

}  // namespace cpsim
