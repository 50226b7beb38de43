#include "cpsim/experiments.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "cpsim/parallel.hpp"

#ifndef CPSIM_VERSION
#define CPSIM_VERSION "unknown"
#endif

namespace cpsim {

using nlohmann::json;

const char* version_string() { return CPSIM_VERSION; }

namespace {

std::filesystem::path resolve(const Scenario& s, const std::filesystem::path& p) {
  if (p.empty() || p.is_absolute() || s.base_dir.empty()) return p;
  return s.base_dir / p;
}

struct Point {
  double beta = 0.0;
  std::optional<double> axis2;
  ModelParams params;
  std::size_t network_index = 0;  // point index used when regenerating
  std::size_t threshold_key = 0;
};

// Evaluates every point with the requested solvers. Rows come back in
// point order whatever the worker count.
std::vector<SweepRow> evaluate(const Scenario& s, const std::vector<Point>& points,
                               std::size_t threshold_keys) {
  std::optional<MultiplexNetwork> shared;
  if (!s.network.regenerate_per_point) shared.emplace(build_network(s, s.run.seed));

  // beta_c does not depend on beta, so it is computed once per key on the
  // shared network.
  std::vector<std::optional<ThresholdResult>> thresholds(threshold_keys);
  if (s.solvers.threshold && shared) {
    std::vector<const Point*> first(threshold_keys, nullptr);
    for (const auto& pt : points) {
      if (!first[pt.threshold_key]) first[pt.threshold_key] = &pt;
    }
    parallel_for(threshold_keys, s.run.jobs, [&](std::size_t k) {
      if (first[k]) {
        thresholds[k] = epidemic_threshold(*shared, first[k]->params,
                                           s.solvers.threshold_options);
      }
    });
  }

  RunConfig run = s.run;
  run.jobs = 1;  // parallelism is over grid points
  std::vector<SweepRow> rows(points.size());
  parallel_for(points.size(), s.run.jobs, [&](std::size_t idx) {
    const Point& pt = points[idx];
    std::optional<MultiplexNetwork> own;
    if (!shared) {
      own.emplace(build_network(s, derive_seed(s.run.seed, pt.network_index)));
    }
    const MultiplexNetwork& net = shared ? *shared : *own;
    SweepRow row;
    row.beta = pt.beta;
    row.axis2 = pt.axis2;
    if (s.solvers.mmca) {
      row.mmca = mmca_solve(net, pt.params,
                            MmcaState::uniform(net.size(), s.run.init_infected),
                            s.solvers.mmca_options)
                     .densities;
    }
    if (s.solvers.mc) row.mc = run_ensemble(net, pt.params, run);
    if (s.solvers.threshold) {
      row.threshold = shared ? thresholds[pt.threshold_key]
                             : epidemic_threshold(net, pt.params,
                                                  s.solvers.threshold_options);
    }
    rows[idx] = std::move(row);
  });
  return rows;
}

std::vector<Point> beta_points(const Scenario& s, const ModelParams& base) {
  std::vector<Point> pts;
  const auto betas = s.axes.at(0).values();
  for (std::size_t k = 0; k < betas.size(); ++k) {
    Point pt;
    pt.beta = betas[k];
    pt.params = base;
    pt.params.beta_u = betas[k];
    pt.network_index = k;
    pts.push_back(pt);
  }
  return pts;
}

std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    if (!cell.empty() && cell.back() == '\r') cell.pop_back();
    out.push_back(cell);
  }
  return out;
}

}  // namespace

MultiplexNetwork build_network(const Scenario& s, std::uint64_t seed) {
  const auto& n = s.network;
  PhysicalLayer physical;
  if (n.physical == "ws") {
    physical = generate_ws(n.n, n.ws_k, n.ws_p, derive_seed(seed, "physical"));
  } else if (n.physical == "edge_list") {
    const auto path = resolve(s, n.edge_list);
    if (!std::filesystem::exists(path)) {
      throw MissingInputError(
          "edge list not found: " + path.string() +
          " (for the power-grid case download the KONECT 'opsahl-powergrid' "
          "network, 4941 nodes and 6594 edges, and place its out.* edge list "
          "at this path)");
    }
    physical = load_edge_list(path, n.format);
  } else {
    throw ScenarioError("unknown physical generator '" + n.physical + "'");
  }

  if (n.cyber == "simplicial_er") {
    return MultiplexNetwork(
        generate_simplicial_er(physical.size(), n.k1, n.k2, derive_seed(seed, "cyber")),
        std::move(physical));
  }
  if (n.cyber == "mirror") {
    auto cyber = mirror_layer(physical, n.k2, derive_seed(seed, "cyber"));
    return MultiplexNetwork(std::move(cyber), std::move(physical));
  }
  throw ScenarioError("unknown cyber generator '" + n.cyber + "'");
}

SweepResult run_beta_sweep(const Scenario& s) {
  s.validate();
  SweepResult r;
  r.name = s.name;
  r.rows = evaluate(s, beta_points(s, s.params), 1);
  return r;
}

SweepResult run_heatmap(const Scenario& s) {
  s.validate();
  if (s.axes.size() != 2) throw ScenarioError("heatmap needs two axes");
  const auto betas = s.axes[0].values();
  const auto seconds = s.axes[1].values();
  std::vector<Point> pts;
  for (std::size_t b = 0; b < betas.size(); ++b) {
    for (std::size_t k = 0; k < seconds.size(); ++k) {
      Point pt;
      pt.beta = betas[b];
      pt.axis2 = seconds[k];
      pt.params = s.params;
      pt.params.beta_u = betas[b];
      set_param(pt.params, s.axes[1].name, seconds[k]);
      pt.network_index = pts.size();
      pt.threshold_key = k;
      pts.push_back(pt);
    }
  }
  SweepResult r;
  r.name = s.name;
  r.axis2_name = s.axes[1].name;
  r.rows = evaluate(s, pts, seconds.size());
  return r;
}

const char* channel_label(Channels c) {
  switch (c) {
    case Channels::Pairwise: return "pwi";
    case Channels::Simplex: return "simplex";
    case Channels::Physical: return "phy";
    case Channels::Integrated: return "integrated";
    case Channels::None: return "none";
  }
  return "?";
}

ModelParams with_channels(ModelParams p, Channels c) {
  p.enable_r1 = c == Channels::Pairwise || c == Channels::Integrated;
  p.enable_r2 = c == Channels::Simplex || c == Channels::Integrated;
  p.enable_r3 = c == Channels::Physical || c == Channels::Integrated;
  return p;
}

std::vector<AblationCurve> run_ablation(const Scenario& s) {
  s.validate();
  constexpr Channels all[] = {Channels::Pairwise, Channels::Simplex,
                              Channels::Physical, Channels::Integrated,
                              Channels::None};
  std::vector<Point> pts;
  std::size_t per_curve = 0;
  for (std::size_t c = 0; c < std::size(all); ++c) {
    auto curve = beta_points(s, with_channels(s.params, all[c]));
    per_curve = curve.size();
    for (auto& pt : curve) {
      pt.threshold_key = c;
      pts.push_back(pt);
    }
  }
  const auto rows = evaluate(s, pts, std::size(all));
  std::vector<AblationCurve> out;
  for (std::size_t c = 0; c < std::size(all); ++c) {
    AblationCurve curve;
    curve.channels = all[c];
    curve.sweep.name = s.name + "_" + channel_label(all[c]);
    curve.sweep.rows.assign(rows.begin() + c * per_curve,
                            rows.begin() + (c + 1) * per_curve);
    out.push_back(std::move(curve));
  }
  return out;
}

std::vector<AblationCurve> run_powergrid_case(const Scenario& s) {
  if (s.network.physical != "edge_list") {
    throw ScenarioError("power-grid case needs an edge_list physical layer");
  }
  const auto path = resolve(s, s.network.edge_list);
  if (!std::filesystem::exists(path)) {
    throw MissingInputError(
        "power-grid edge list not found: " + path.string() +
        " (download the KONECT 'opsahl-powergrid' network, 4941 nodes and "
        "6594 edges, and place its out.* edge list at this path)");
  }
  return run_ablation(s);
}

std::optional<double> mc_onset(const SweepResult& sweep, double onset_eps) {
  std::optional<double> best;
  for (const auto& row : sweep.rows) {
    if (row.mc && row.mc->rho_i_mean > onset_eps) {
      if (!best || row.beta < *best) best = row.beta;
    }
  }
  return best;
}

Comparison compare_mmca_mc(const SweepResult& sweep, double onset_eps) {
  Comparison c;
  std::size_t n = 0;
  for (const auto& row : sweep.rows) {
    if (row.threshold && !c.beta_c_theory) c.beta_c_theory = row.threshold->beta_c;
    if (!row.mc || !row.mmca) continue;
    c.mad_rho_i += std::abs(row.mc->rho_i_mean - row.mmca->rho_i);
    c.mad_rho_a += std::abs(row.mc->rho_a_mean - row.mmca->rho_a);
    ++n;
  }
  if (n > 0) {
    c.mad_rho_i /= static_cast<double>(n);
    c.mad_rho_a /= static_cast<double>(n);
  }
  c.beta_onset_mc = mc_onset(sweep, onset_eps);
  return c;
}

void write_csv(const SweepResult& r, const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  bool any_mmca = false;
  for (const auto& row : r.rows) any_mmca = any_mmca || row.mmca.has_value();

  out << "beta";
  if (!r.axis2_name.empty()) out << ',' << r.axis2_name;
  out << ",rho_i_mc,rho_i_sd,rho_a_mc,rho_a_sd";
  if (any_mmca) out << ",rho_i_mmca,rho_a_mmca";
  out << '\n';
  const double nan = std::nan("");
  for (const auto& row : r.rows) {
    out << fmt(row.beta);
    if (!r.axis2_name.empty()) out << ',' << fmt(row.axis2.value_or(nan));
    if (row.mc) {
      out << ',' << fmt(row.mc->rho_i_mean) << ',' << fmt(row.mc->rho_i_sd) << ','
          << fmt(row.mc->rho_a_mean) << ',' << fmt(row.mc->rho_a_sd);
    } else {
      out << ",nan,nan,nan,nan";
    }
    if (any_mmca) {
      out << ',' << fmt(row.mmca ? row.mmca->rho_i : nan) << ','
          << fmt(row.mmca ? row.mmca->rho_a : nan);
    }
    out << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

SweepResult read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw MissingInputError("CSV not found: " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error(path.string() + ": empty CSV");
  const auto header = split_csv(line);
  if (header.empty() || header[0] != "beta") {
    throw std::runtime_error(path.string() + ": first column must be beta");
  }
  SweepResult r;
  r.name = path.stem().string();
  std::size_t col = 1;
  if (header.size() == 4 + 2 || header.size() == 4 + 2 + 2) {
    r.axis2_name = header[1];
    col = 2;
  }
  const std::vector<std::string> mc_cols = {"rho_i_mc", "rho_i_sd", "rho_a_mc", "rho_a_sd"};
  for (std::size_t k = 0; k < mc_cols.size(); ++k) {
    if (col + k >= header.size() || header[col + k] != mc_cols[k]) {
      throw std::runtime_error(path.string() + ": expected column " + mc_cols[k]);
    }
  }
  const bool has_mmca = header.size() == col + 6;
  if (has_mmca && (header[col + 4] != "rho_i_mmca" || header[col + 5] != "rho_a_mmca")) {
    throw std::runtime_error(path.string() + ": expected rho_i_mmca,rho_a_mmca");
  }
  if (!has_mmca && header.size() != col + 4) {
    throw std::runtime_error(path.string() + ": unexpected column count");
  }

  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto cells = split_csv(line);
    if (cells.size() != header.size()) {
      throw std::runtime_error(path.string() + ":" + std::to_string(lineno) +
                               ": wrong number of cells");
    }
    std::vector<double> v;
    for (const auto& c : cells) {
      try {
        v.push_back(std::stod(c));
      } catch (const std::exception&) {
        throw std::runtime_error(path.string() + ":" + std::to_string(lineno) +
                                 ": bad number '" + c + "'");
      }
    }
    SweepRow row;
    row.beta = v[0];
    if (col == 2) row.axis2 = v[1];
    if (!std::isnan(v[col])) {
      EnsembleResult e;
      e.rho_i_mean = v[col];
      e.rho_i_sd = v[col + 1];
      e.rho_a_mean = v[col + 2];
      e.rho_a_sd = v[col + 3];
      row.mc = e;
    }
    if (has_mmca && !std::isnan(v[col + 4])) {
      SteadyDensities d;
      d.rho_i = v[col + 4];
      d.rho_a = v[col + 5];
      d.converged = true;
      row.mmca = d;
    }
    r.rows.push_back(row);
  }
  return r;
}

json make_manifest(const Scenario& s) {
  Scenario resolved = s;
  if (!s.network.edge_list.empty()) {
    resolved.network.edge_list =
        std::filesystem::absolute(resolve(s, s.network.edge_list)).lexically_normal();
  }
  return {
      {"version", version_string()},
      {"seed", s.run.seed},
      {"scenario", scenario_to_json(resolved)},
  };
}

}  // namespace cpsim
