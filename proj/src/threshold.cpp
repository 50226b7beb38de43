#include "cpsim/threshold.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace cpsim {

SparseMatrix SparseMatrix::from_dense(
    const std::vector<std::vector<double>>& rows) {
  SparseMatrix m;
  m.n = rows.size();
  for (const auto& row : rows) {
    if (row.size() != m.n) throw std::invalid_argument("matrix not square");
    for (std::size_t c = 0; c < m.n; ++c) {
      if (row[c] != 0.0) {
        m.cols.push_back(c);
        m.values.push_back(row[c]);
      }
    }
    m.row_offsets.push_back(m.cols.size());
  }
  return m;
}

std::vector<std::vector<double>> SparseMatrix::to_dense() const {
  std::vector<std::vector<double>> out(n, std::vector<double>(n, 0.0));
  for (std::size_t r = 0; r < n; ++r) {
    for (auto k = row_offsets[r]; k < row_offsets[r + 1]; ++k) {
      out[r][cols[k]] = values[k];
    }
  }
  return out;
}

void SparseMatrix::multiply(const std::vector<double>& x,
                            std::vector<double>& y) const {
  y.assign(n, 0.0);
  for (std::size_t r = 0; r < n; ++r) {
    double acc = 0.0;
    for (auto k = row_offsets[r]; k < row_offsets[r + 1]; ++k) {
      acc += values[k] * x[cols[k]];
    }
    y[r] = acc;
  }
}

CriticalAwareness solve_critical_awareness(const MultiplexNetwork& net,
                                           const ModelParams& params,
                                           const ThresholdOptions& options) {
  const auto n = static_cast<std::size_t>(net.size());
  CriticalAwareness out;
  out.p_a.assign(n, 0.5);
  std::vector<double> next(n);
  const std::vector<double> no_infection(n, 0.0);

  for (int it = 0; it < options.max_iter; ++it) {
    const NeighborField field{out.p_a, no_infection};
    double change = 0.0;
    for (std::size_t idx = 0; idx < n; ++idx) {
      const auto i = static_cast<NodeId>(idx);
      const double r = r1(i, net.cyber(), field, params) *
                       r2(i, net.cyber(), field, params);
      const double p = out.p_a[idx];
      next[idx] = (1.0 - params.delta) * p + (1.0 - r) * (1.0 - p);
      change = std::max(change, std::abs(next[idx] - p));
    }
    out.p_a.swap(next);
    out.iterations = it + 1;
    if (change < options.tol) {
      out.converged = true;
      break;
    }
  }
  return out;
}

SparseMatrix build_m_matrix(const PhysicalLayer& net,
                            const CriticalAwareness& awareness, double gamma) {
  const auto n = static_cast<std::size_t>(net.size());
  if (awareness.p_a.size() != n) {
    throw std::invalid_argument("build_m_matrix: awareness size mismatch");
  }
  SparseMatrix m;
  m.n = n;
  m.row_offsets.reserve(n + 1);
  m.cols.reserve(net.adj.edge_count() * 2);
  m.values.reserve(net.adj.edge_count() * 2);
  for (std::size_t j = 0; j < n; ++j) {
    for (NodeId i : net.adj.neighbors(static_cast<NodeId>(j))) {
      m.cols.push_back(static_cast<std::size_t>(i));
      m.values.push_back(1.0 - (1.0 - gamma) * awareness.p_a[i]);
    }
    m.row_offsets.push_back(m.cols.size());
  }
  return m;
}

EigenEstimate dominant_eigenvalue(const SparseMatrix& m,
                                  const ThresholdOptions& options) {
  EigenEstimate est;
  if (m.n == 0) {
    est.degenerate = true;
    est.converged = true;
    return est;
  }
  if (std::all_of(m.values.begin(), m.values.end(),
                  [](double v) { return v == 0.0; })) {
    est.degenerate = true;
    est.converged = true;
    return est;
  }

  std::vector<double> x(m.n, 1.0);
  std::vector<double> ax;
  double prev = std::numeric_limits<double>::quiet_NaN();
  for (int it = 1; it <= options.max_iter; ++it) {
    m.multiply(x, ax);
    double xax = 0.0;
    double xx = 0.0;
    double norm = 0.0;
    for (std::size_t k = 0; k < m.n; ++k) {
      xax += x[k] * ax[k];
      xx += x[k] * x[k];
      ax[k] += x[k];  // (A + I) x
      norm = std::max(norm, std::abs(ax[k]));
    }
    const double rayleigh = xax / xx;
    est.value = rayleigh;
    est.iterations = it;
    for (std::size_t k = 0; k < m.n; ++k) x[k] = ax[k] / norm;
    if (std::abs(rayleigh - prev) < options.tol) {
      est.converged = true;
      break;
    }
    prev = rayleigh;
  }
  if (est.value <= options.tol) {
    est.degenerate = true;
    est.value = std::max(est.value, 0.0);
  }
  return est;
}

ThresholdResult epidemic_threshold(const MultiplexNetwork& net,
                                   const ModelParams& params,
                                   const ThresholdOptions& options) {
  if (!(params.mu > 0.0)) {
    throw std::invalid_argument("epidemic_threshold: mu must be positive");
  }
  const auto awareness = solve_critical_awareness(net, params, options);
  const auto m = build_m_matrix(net.physical(), awareness, params.gamma);
  const auto eig = dominant_eigenvalue(m, options);

  ThresholdResult out;
  out.lambda_max = eig.value;
  out.power_iters = eig.iterations;
  out.awareness_converged = awareness.converged;
  out.eigen_converged = eig.converged;
  if (eig.degenerate || eig.value <= 0.0) {
    out.beta_c = std::numeric_limits<double>::infinity();
    out.note =
        "lambda_max(M) = 0: no transmission path survives the awareness "
        "scaling, so no finite beta_U triggers an outbreak";
  } else {
    out.beta_c = params.mu / eig.value;
  }
  if (!awareness.converged) out.note += "critical awareness did not converge; ";
  if (!eig.converged) out.note += "power iteration did not converge; ";
  return out;
}

}  // namespace cpsim
