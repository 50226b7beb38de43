#pragma once

#include <string>
#include <vector>

#include "cpsim/kernels.hpp"
#include "cpsim/network.hpp"

namespace cpsim {

/// Awareness probabilities at the epidemic critical point (P^AI -> 0,
/// physical sensing neglected).
struct CriticalAwareness {
  std::vector<double> p_a;
  bool converged = false;
  int iterations = 0;
};

/// Row-compressed non-negative square matrix.
struct SparseMatrix {
  std::size_t n = 0;
  std::vector<std::size_t> row_offsets{0};
  std::vector<std::size_t> cols;
  std::vector<double> values;

  static SparseMatrix from_dense(const std::vector<std::vector<double>>& rows);
  std::vector<std::vector<double>> to_dense() const;
  /// y = A x
  void multiply(const std::vector<double>& x, std::vector<double>& y) const;
};

struct EigenEstimate {
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
  bool degenerate = false;  ///< matrix annihilated the iterate
};

struct ThresholdResult {
  double beta_c = 0.0;  ///< +inf when lambda_max == 0
  double lambda_max = 0.0;
  int power_iters = 0;
  bool awareness_converged = false;
  bool eigen_converged = false;
  std::string note;
};

struct ThresholdOptions {
  double tol = 1e-8;
  int max_iter = 50'000;
};

/// Fixed point of P = (1 - delta) P + (1 - r1 r2)(1 - P), started at 0.5.
CriticalAwareness solve_critical_awareness(const MultiplexNetwork& net,
                                           const ModelParams& params,
                                           const ThresholdOptions& options = {});

/// m_ji = [1 - (1 - gamma) P_i^A] b_ji: entry (j, i) of B scaled by the
/// awareness factor of the column node i.
SparseMatrix build_m_matrix(const PhysicalLayer& net,
                            const CriticalAwareness& awareness, double gamma);

/// Perron root by power iteration on A + I (the shift removes the
/// periodicity of bipartite blocks), normalising in the max norm and
/// stopping when successive Rayleigh quotients agree to tol.
EigenEstimate dominant_eigenvalue(const SparseMatrix& m,
                                  const ThresholdOptions& options = {});

/// beta_c = mu / lambda_max(M).
ThresholdResult epidemic_threshold(const MultiplexNetwork& net,
                                   const ModelParams& params,
                                   const ThresholdOptions& options = {});

}  // namespace cpsim
