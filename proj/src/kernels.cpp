#include "cpsim/kernels.hpp"

#include <cmath>
#include <string>

namespace cpsim {

namespace {

void require_unit(double v, const char* name) {
  if (!(v >= 0.0 && v <= 1.0)) {
    throw std::invalid_argument(std::string(name) + " = " +
                                std::to_string(v) + " outside [0, 1]");
  }
}

}  // namespace

void ModelParams::validate() const {
  require_unit(lambda, "lambda");
  require_unit(lambda_star, "lambda_star");
  require_unit(delta, "delta");
  require_unit(beta_u, "beta_u");
  require_unit(mu, "mu");
  if (!(gamma >= 0.0 && gamma < 1.0)) {
    throw std::invalid_argument("gamma = " + std::to_string(gamma) +
                                " outside [0, 1)");
  }
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    throw std::invalid_argument("alpha = " + std::to_string(alpha) +
                                " must be positive");
  }
  if (!(theta > 0.0 && theta < 1.0)) {
    throw std::invalid_argument("theta = " + std::to_string(theta) +
                                " outside (0, 1)");
  }
}

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double r1(NodeId i, const CyberLayer& net, const NeighborField& field,
          const ModelParams& params) {
  if (!params.enable_r1) return 1.0;
  double prod = 1.0;
  for (NodeId j : net.adjacency().neighbors(i)) {
    prod *= 1.0 - field.p_a[j] * params.lambda;
  }
  return prod;
}

double r2(NodeId i, const CyberLayer& net, const NeighborField& field,
          const ModelParams& params) {
  if (!params.enable_r2) return 1.0;
  double prod = 1.0;
  for (auto [j, k] : net.simplex_partners(i)) {
    prod *= 1.0 - field.p_a[j] * field.p_a[k] * params.lambda_star;
  }
  return prod;
}

double r3(NodeId i, const PhysicalLayer& net, const NeighborField& field,
          const ModelParams& params) {
  if (!params.enable_r3) return 1.0;
  const auto nb = net.adj.neighbors(i);
  double infected = 0.0;
  for (NodeId j : nb) infected += field.p_ai[j];
  if (params.sensing_baseline == SensingBaseline::ClampZero &&
      infected == 0.0) {
    return 1.0;
  }
  const double frac = nb.empty() ? 0.0 : infected / nb.size();
  return sigmoid(-params.alpha * (frac - params.theta));
}

double r_total(NodeId i, const MultiplexNetwork& net,
               const NeighborField& field, const ModelParams& params) {
  return r1(i, net.cyber(), field, params) * r2(i, net.cyber(), field, params) *
         r3(i, net.physical(), field, params);
}

double q(NodeId i, const PhysicalLayer& net, const NeighborField& field,
         const ModelParams& params, bool aware) {
  const double beta = aware ? params.beta_a() : params.beta_u;
  double prod = 1.0;
  for (NodeId j : net.adj.neighbors(i)) prod *= 1.0 - field.p_ai[j] * beta;
  return prod;
}

}  // namespace cpsim
