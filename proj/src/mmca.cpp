#include "cpsim/mmca.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cpsim {

MmcaState MmcaState::uniform(NodeId n, double infected_fraction) {
  if (!(infected_fraction >= 0.0 && infected_fraction <= 1.0)) {
    throw std::invalid_argument("initial infected fraction outside [0, 1]");
  }
  const auto sz = static_cast<std::size_t>(n);
  return {std::vector<double>(sz, 1.0 - infected_fraction),
          std::vector<double>(sz, 0.0),
          std::vector<double>(sz, infected_fraction)};
}

SteadyDensities densities(const MmcaState& state) {
  SteadyDensities d;
  const auto n = state.size();
  if (n == 0) return d;
  double a = 0.0;
  double inf = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    a += state.p_as[i] + state.p_ai[i];
    inf += state.p_ai[i];
  }
  d.rho_a = a / n;
  d.rho_i = inf / n;
  return d;
}

namespace {

void step_into(const MmcaState& cur, std::vector<double>& p_a,
               const MultiplexNetwork& net, const ModelParams& params,
               MmcaState& next) {
  const auto n = cur.size();
  for (std::size_t i = 0; i < n; ++i) p_a[i] = cur.p_as[i] + cur.p_ai[i];
  const NeighborField field{p_a, cur.p_ai};
  const double d = params.delta;
  const double mu = params.mu;

  for (std::size_t idx = 0; idx < n; ++idx) {
    const auto i = static_cast<NodeId>(idx);
    const double r = r_total(i, net, field, params);
    const double qa = q(i, net.physical(), field, params, true);
    const double qu = q(i, net.physical(), field, params, false);
    const double us = cur.p_us[idx];
    const double as = cur.p_as[idx];
    const double ai = cur.p_ai[idx];

    next.p_us[idx] = us * r * qu + as * d * qu + ai * d * mu;
    next.p_as[idx] =
        us * (1.0 - r) * qa + as * (1.0 - d) * qa + ai * (1.0 - d) * mu;
    next.p_ai[idx] = us * (1.0 - r) * (1.0 - qa) + us * r * (1.0 - qu) +
                     as * d * (1.0 - qu) + as * (1.0 - d) * (1.0 - qa) +
                     ai * (d * (1.0 - mu) + (1.0 - d) * (1.0 - mu));
  }
}

void check_shape(const MmcaState& s, const MultiplexNetwork& net) {
  const auto n = static_cast<std::size_t>(net.size());
  if (s.p_us.size() != n || s.p_as.size() != n || s.p_ai.size() != n) {
    throw std::invalid_argument("mmca: state size does not match network");
  }
}

}  // namespace

MmcaState mmca_step(const MmcaState& state, const MultiplexNetwork& net,
                    const ModelParams& params) {
  check_shape(state, net);
  MmcaState next = state;
  std::vector<double> p_a(state.size());
  step_into(state, p_a, net, params, next);
  return next;
}

MmcaSolution mmca_solve(const MultiplexNetwork& net, const ModelParams& params,
                        MmcaState init, const MmcaOptions& options) {
  check_shape(init, net);
  MmcaState cur = std::move(init);
  MmcaState next = cur;
  std::vector<double> p_a(cur.size());
  int iter = 0;
  bool converged = false;
  while (iter < options.max_iter) {
    step_into(cur, p_a, net, params, next);
    ++iter;
    double change = 0.0;
    for (std::size_t i = 0; i < cur.size(); ++i) {
      change = std::max({change, std::abs(next.p_us[i] - cur.p_us[i]),
                         std::abs(next.p_as[i] - cur.p_as[i]),
                         std::abs(next.p_ai[i] - cur.p_ai[i])});
    }
    std::swap(cur, next);
    if (change < options.tol) {
      converged = true;
      break;
    }
  }
  MmcaSolution out{std::move(cur), {}};
  out.densities = densities(out.state);
  out.densities.iterations = iter;
  out.densities.converged = converged;
  return out;
}

}  // namespace cpsim
