#pragma once

#include <span>
#include <stdexcept>

#include "cpsim/network.hpp"

namespace cpsim {

/// How 1 - r3 behaves when no physical neighbour is infected.
enum class SensingBaseline {
  Literal,    ///< sigmoid(-alpha*theta) > 0: a small spontaneous channel
  ClampZero,  ///< no infected neighbours, no sensing
};

/// Dynamical rates and channel switches. A disabled channel contributes a
/// factor of exactly 1 to r_total.
struct ModelParams {
  double lambda = 0.0;       ///< pairwise information rate
  double lambda_star = 0.0;  ///< 2-simplex information rate
  double delta = 0.0;        ///< forgetting rate
  double beta_u = 0.0;       ///< infection rate of unaware nodes
  double gamma = 0.0;        ///< beta_A = gamma * beta_U, gamma < 1
  double mu = 0.0;           ///< recovery rate
  double alpha = 10.0;       ///< response intensity (> 0)
  double theta = 0.5;        ///< vigilance threshold, in (0, 1)
  bool enable_r1 = true;
  bool enable_r2 = true;
  bool enable_r3 = true;
  SensingBaseline sensing_baseline = SensingBaseline::Literal;

  double beta_a() const { return gamma * beta_u; }

  /// Throws std::invalid_argument naming the first violated bound.
  void validate() const;
};

/// Per-node P^A and P^AI, either probabilities (MMCA) or 0/1 indicators
/// (Monte Carlo). Requires 0 <= p_ai[j] <= p_a[j] <= 1.
struct NeighborField {
  std::span<const double> p_a;
  std::span<const double> p_ai;
};

/// Probability of not being informed over pairwise cyber links.
double r1(NodeId i, const CyberLayer& net, const NeighborField& field,
          const ModelParams& params);

/// Probability of not being informed through any 2-simplex; a simplex
/// contributes only through the joint awareness of both other members.
double r2(NodeId i, const CyberLayer& net, const NeighborField& field,
          const ModelParams& params);

/// Probability of not sensing the outbreak from physical neighbours: one
/// minus a sigmoid of the infected neighbour fraction. Isolated nodes see
/// a fraction of 0.
double r3(NodeId i, const PhysicalLayer& net, const NeighborField& field,
          const ModelParams& params);

/// r1 * r2 * r3.
double r_total(NodeId i, const MultiplexNetwork& net,
               const NeighborField& field, const ModelParams& params);

/// Probability of escaping infection from every physical neighbour, using
/// beta_A when `aware` and beta_U otherwise.
double q(NodeId i, const PhysicalLayer& net, const NeighborField& field,
         const ModelParams& params, bool aware);

/// Logistic function 1 / (1 + e^-x), evaluated without overflow.
double sigmoid(double x);

}  // namespace cpsim
