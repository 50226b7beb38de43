// cpsim command-line driver.
//
// Exit codes:
//   0  success
//   2  usage error (unknown flag, bad flag value, missing subcommand)
//   3  missing input file (scenario, edge list, CSV)
//   4  invalid parameters or scenario contents
//   5  runtime or I/O failure

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cpsim/experiments.hpp"
#include "cpsim/parallel.hpp"

#ifndef CPSIM_SCENARIO_DIR
#define CPSIM_SCENARIO_DIR "scenarios"
#endif

namespace fs = std::filesystem;
using nlohmann::json;
using namespace cpsim;

namespace {

enum Exit { kOk = 0, kUsage = 2, kMissing = 3, kInvalid = 4, kRuntime = 5 };

int fail(Exit code, const char* kind, const std::string& message) {
  const json err = {{"error", kind}, {"exit", static_cast<int>(code)}, {"message", message}};
  std::cerr << err.dump() << '\n';
  return code;
}

// Flags shared by every subcommand that builds a scenario. Anything left
// unset keeps the scenario (or built-in) value.
struct Overrides {
  std::string scenario;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<int> jobs;
  std::optional<int> runs;
  std::optional<int> steps;
  std::optional<double> beta, lambda, lambda_star, delta, gamma, mu, alpha, theta;
  std::optional<double> init_infected;
  std::optional<int> n;
  std::optional<int> ws_k;
  std::optional<double> ws_p, k1, k2;
  std::optional<std::string> channels;
  bool verbose = false;
};

void add_run_flags(CLI::App* app, Overrides& o) {
  app->add_option("--seed", o.seed, "Master seed for all randomness (default 20240601)");
  app->add_option("--jobs", o.jobs,
                  "Worker threads; 0 = all cores (default: scenario value, else 0)");
  app->add_option("--out", o.out,
                  "Output directory (default: $CPSIM_OUT_DIR, else ./out)");
  app->add_flag("-v,--verbose", o.verbose, "Timing and diagnostics on stderr");
}

void add_model_flags(CLI::App* app, Overrides& o) {
  app->add_option("--scenario", o.scenario, "Scenario JSON file; flags override its values");
  app->add_option("--beta", o.beta, "Infection rate of unaware nodes, probability/step (default 0)");
  app->add_option("--lambda", o.lambda, "Pairwise information rate, probability/step (default 0.1)");
  app->add_option("--lambda-star", o.lambda_star,
                  "2-simplex information rate, probability/step (default 0.1)");
  app->add_option("--delta", o.delta, "Forgetting rate, probability/step (default 0.8)");
  app->add_option("--gamma", o.gamma,
                  "Aware/unaware infection-rate ratio, dimensionless in [0,1) (default 0)");
  app->add_option("--mu", o.mu, "Recovery rate, probability/step (default 0.4)");
  app->add_option("--alpha", o.alpha, "Sensing response intensity, dimensionless > 0 (default 10)");
  app->add_option("--theta", o.theta,
                  "Vigilance threshold, infected-neighbour fraction in (0,1) (default 0.8)");
  app->add_option("--channels", o.channels,
                  "Enabled information channels: comma list of r1,r2,r3 or 'none' "
                  "(default r1,r2,r3)");
  app->add_option("--init-infected", o.init_infected,
                  "Initially infected fraction in (0,1) (default 0.01)");
  app->add_option("--n", o.n, "Number of nodes for generated networks (default 1000)");
  app->add_option("--ws-k", o.ws_k, "Watts-Strogatz ring degree, even integer (default 4)");
  app->add_option("--ws-p", o.ws_p, "Watts-Strogatz rewiring probability (default 0.5)");
  app->add_option("--k1", o.k1, "Target mean cyber degree (default 10)");
  app->add_option("--k2", o.k2, "Target mean 2-simplices per node (default 2)");
  app->add_option("--runs", o.runs, "Monte Carlo runs per grid point (default 100)");
  add_run_flags(app, o);
}

Scenario default_scenario() {
  Scenario s;
  s.name = "cpsim";
  s.params.lambda = 0.1;
  s.params.lambda_star = 0.1;
  s.params.delta = 0.8;
  s.params.mu = 0.4;
  s.params.alpha = 10.0;
  s.params.theta = 0.8;
  s.axes = {SweepAxis{"beta", 0.0, 1.0, 51}};
  s.run.jobs = 0;
  s.solvers.mc = true;
  s.solvers.mmca = true;
  s.solvers.threshold = true;
  return s;
}

void apply_channels(ModelParams& p, const std::string& spec) {
  p.enable_r1 = p.enable_r2 = p.enable_r3 = false;
  if (spec == "none") return;
  std::stringstream ss(spec);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok == "r1") p.enable_r1 = true;
    else if (tok == "r2") p.enable_r2 = true;
    else if (tok == "r3") p.enable_r3 = true;
    else throw ScenarioError("--channels: unknown channel '" + tok + "'");
  }
}

void apply(const Overrides& o, Scenario& s) {
  if (o.seed) s.run.seed = *o.seed;
  if (o.jobs) s.run.jobs = *o.jobs;
  if (o.runs) s.run.n_runs = *o.runs;
  if (o.steps) {
    for (auto& a : s.axes) a.steps = *o.steps;
  }
  auto& p = s.params;
  if (o.beta) p.beta_u = *o.beta;
  if (o.lambda) p.lambda = *o.lambda;
  if (o.lambda_star) p.lambda_star = *o.lambda_star;
  if (o.delta) p.delta = *o.delta;
  if (o.gamma) p.gamma = *o.gamma;
  if (o.mu) p.mu = *o.mu;
  if (o.alpha) p.alpha = *o.alpha;
  if (o.theta) p.theta = *o.theta;
  if (o.channels) apply_channels(p, *o.channels);
  if (o.init_infected) s.run.init_infected = *o.init_infected;
  if (o.n) s.network.n = *o.n;
  if (o.ws_k) s.network.ws_k = *o.ws_k;
  if (o.ws_p) s.network.ws_p = *o.ws_p;
  if (o.k1) s.network.k1 = *o.k1;
  if (o.k2) s.network.k2 = *o.k2;
}

Scenario make_scenario(const Overrides& o) {
  Scenario s = o.scenario.empty() ? default_scenario() : load_scenario(o.scenario);
  apply(o, s);
  return s;
}

fs::path out_dir(const Overrides& o) {
  if (!o.out.empty()) return o.out;
  if (const char* env = std::getenv("CPSIM_OUT_DIR"); env && *env) return env;
  return "out";
}

fs::path scenario_dir(const std::string& flag) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv("CPSIM_SCENARIO_DIR"); env && *env) return env;
  return CPSIM_SCENARIO_DIR;
}

void write_manifest(const fs::path& dir, const Scenario& s,
                    const std::vector<fs::path>& outputs, const json& summary,
                    const std::string& command) {
  fs::create_directories(dir);
  json m = make_manifest(s);
  m["command"] = command;
  m["outputs"] = json::array();
  for (const auto& p : outputs) m["outputs"].push_back(p.filename().string());
  m["summary"] = summary;
  const auto path = dir / (s.name + ".manifest.json");
  std::ofstream f(path);
  f << m.dump(2) << '\n';
  if (!f) throw std::runtime_error("cannot write " + path.string());
}

json threshold_json(const ThresholdResult& t) {
  return {{"beta_c", std::isfinite(t.beta_c) ? json(t.beta_c) : json("inf")},
          {"lambda_max", t.lambda_max},
          {"power_iterations", t.power_iters},
          {"awareness_converged", t.awareness_converged},
          {"eigen_converged", t.eigen_converged},
          {"note", t.note}};
}

json sweep_summary(const Scenario& s, const SweepResult& r) {
  json j;
  const auto c = compare_mmca_mc(r, s.solvers.onset_eps);
  j["rows"] = r.rows.size();
  if (s.solvers.mc && s.solvers.mmca) {
    j["mad_rho_i"] = c.mad_rho_i;
    j["mad_rho_a"] = c.mad_rho_a;
  }
  if (c.beta_onset_mc) j["beta_onset_mc"] = *c.beta_onset_mc;
  if (c.beta_c_theory) {
    j["beta_c_theory"] = std::isfinite(*c.beta_c_theory) ? json(*c.beta_c_theory) : json("inf");
  }
  json unconverged = json::array();
  for (const auto& row : r.rows) {
    if (row.mmca && !row.mmca->converged) {
      json pt = {{"beta", row.beta}};
      if (row.axis2) pt[r.axis2_name] = *row.axis2;
      unconverged.push_back(pt);
    }
  }
  if (!unconverged.empty()) j["mmca_unconverged"] = unconverged;
  if (!r.rows.empty() && r.rows.front().threshold && !r.axis2_name.empty()) {
    json per = json::array();
    for (const auto& row : r.rows) {
      if (row.beta == r.rows.front().beta && row.threshold) {
        per.push_back({{r.axis2_name, row.axis2.value_or(0.0)},
                       {"beta_c", threshold_json(*row.threshold)["beta_c"]}});
      }
    }
    j["beta_c_by_axis2"] = per;
  }
  return j;
}

// Runs one scenario according to its kind and writes CSV(s) plus manifest.
json run_scenario(Scenario s, const fs::path& dir, const std::string& command) {
  fs::create_directories(dir);
  const std::string stem = s.output.empty() ? s.name : s.output.stem().string();
  std::vector<fs::path> outputs;
  json summary;
  if (s.kind == "beta" || s.kind == "heatmap") {
    const auto r = s.kind == "beta" ? run_beta_sweep(s) : run_heatmap(s);
    const auto path = dir / (stem + ".csv");
    write_csv(r, path);
    outputs.push_back(path);
    summary = sweep_summary(s, r);
  } else {
    const auto curves = s.network.physical == "edge_list" ? run_powergrid_case(s)
                                                          : run_ablation(s);
    for (const auto& c : curves) {
      const auto path = dir / (stem + "_" + channel_label(c.channels) + ".csv");
      write_csv(c.sweep, path);
      outputs.push_back(path);
      summary[channel_label(c.channels)] = sweep_summary(s, c.sweep);
    }
  }
  write_manifest(dir, s, outputs, summary, command);
  return summary;
}

std::vector<fs::path> find_presets(const fs::path& dir, const std::string& name) {
  const auto exact = dir / (name + ".json");
  if (fs::exists(exact)) return {exact};
  std::vector<fs::path> out;
  if (fs::is_directory(dir)) {
    for (const auto& e : fs::directory_iterator(dir)) {
      const auto stem = e.path().stem().string();
      if (e.path().extension() == ".json" && stem.size() > name.size() &&
          stem.compare(0, name.size(), name) == 0) {
        out.push_back(e.path());
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::string join_args(int argc, char** argv) {
  std::string s;
  for (int i = 0; i < argc; ++i) {
    if (i) s += ' ';
    s += argv[i];
  }
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Coupled awareness-epidemic spreading on cyber-physical multiplex networks"};
  app.set_version_flag("--version", std::string(version_string()));
  app.require_subcommand(1);

  Overrides o;
  std::string csv_path;
  std::string scen_dir;
  std::vector<std::string> figures;
  double onset_eps = 0.005;

  auto* gen = app.add_subcommand("generate", "Generate a multiplex network and write its edge lists");
  add_model_flags(gen, o);

  auto* mmca = app.add_subcommand("mmca", "Solve the deterministic MMCA steady state at one beta");
  add_model_flags(mmca, o);

  auto* mc = app.add_subcommand("mc", "Monte Carlo ensemble steady state at one beta");
  add_model_flags(mc, o);

  auto* thr = app.add_subcommand("threshold", "Print the theoretical epidemic threshold beta_c");
  add_model_flags(thr, o);

  auto* sweep = app.add_subcommand("sweep", "Density curves over a beta grid");
  add_model_flags(sweep, o);
  sweep->add_option("--steps", o.steps, "Grid points per axis (default: scenario value, else 51)");

  auto* heat = app.add_subcommand("heatmap", "Two-axis density grid (scenario required)");
  add_model_flags(heat, o);
  heat->add_option("--steps", o.steps, "Grid points per axis (default: scenario value)");

  auto* abl = app.add_subcommand("ablation", "Five channel configurations over a beta grid");
  add_model_flags(abl, o);
  abl->add_option("--steps", o.steps, "Beta grid points (default: scenario value, else 51)");

  auto* rep = app.add_subcommand("reproduce", "Run figure presets by name (fig4 ... fig9)");
  rep->add_option("figure", figures, "Preset names; a prefix such as fig5 runs fig5a..fig5c")
      ->required();
  rep->add_option("--scenario-dir", scen_dir,
                  "Preset directory (default: $CPSIM_SCENARIO_DIR, else the bundled scenarios)");
  rep->add_option("--runs", o.runs, "Monte Carlo runs per grid point (default: preset value)");
  rep->add_option("--steps", o.steps, "Grid points per axis (default: preset value)");
  add_run_flags(rep, o);

  auto* cmp = app.add_subcommand("compare", "MMCA-vs-MC deviation and onset from a sweep CSV");
  cmp->add_option("csv", csv_path, "Sweep CSV")->required();
  cmp->add_option("--scenario", o.scenario,
                  "Scenario used to produce the CSV; adds the theoretical beta_c");
  cmp->add_option("--onset-eps", onset_eps, "rho_I level defining the MC onset")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail(kUsage, "usage", e.what());
  }

  const std::string command = join_args(argc, argv);
  const auto t0 = std::chrono::steady_clock::now();
  try {
    if (gen->parsed()) {
      Scenario s = make_scenario(o);
      s.validate();
      const auto net = build_network(s, s.run.seed);
      const auto dir = out_dir(o);
      fs::create_directories(dir);
      const auto phys = dir / (s.name + "_physical.edges");
      const auto cyb = dir / (s.name + "_cyber.edges");
      const auto simp = dir / (s.name + "_simplices.txt");
      write_edge_list(net.physical().adj, phys);
      write_edge_list(net.cyber().adjacency(), cyb);
      write_simplices(net.cyber(), simp);
      const json summary = {
          {"n", net.size()},
          {"physical_edges", net.physical().adj.edge_count()},
          {"physical_mean_degree", net.physical().adj.mean_degree()},
          {"cyber_edges", net.cyber().adjacency().edge_count()},
          {"cyber_mean_degree", net.cyber().adjacency().mean_degree()},
          {"simplices", net.cyber().simplices().size()},
          {"mean_simplex_membership", net.cyber().mean_simplex_membership()}};
      write_manifest(dir, s, {phys, cyb, simp}, summary, command);
      std::cout << summary.dump() << '\n';
    } else if (mmca->parsed() || mc->parsed()) {
      Scenario s = make_scenario(o);
      s.solvers.mmca = mmca->parsed();
      s.solvers.mc = mc->parsed();
      s.solvers.threshold = false;
      s.kind = "beta";
      s.axes = {SweepAxis{"beta", s.params.beta_u, s.params.beta_u, 1}};
      s.network.regenerate_per_point = false;
      s.run.jobs = o.jobs.value_or(s.run.jobs);
      s.validate();
      const auto net = build_network(s, s.run.seed);
      SweepResult r;
      r.name = s.name;
      SweepRow row;
      row.beta = s.params.beta_u;
      json out = {{"beta", row.beta}};
      if (s.solvers.mmca) {
        row.mmca = mmca_solve(net, s.params,
                              MmcaState::uniform(net.size(), s.run.init_infected),
                              s.solvers.mmca_options)
                       .densities;
        out["rho_i"] = row.mmca->rho_i;
        out["rho_a"] = row.mmca->rho_a;
        out["iterations"] = row.mmca->iterations;
        out["converged"] = row.mmca->converged;
      } else {
        row.mc = run_ensemble(net, s.params, s.run);
        out["rho_i"] = row.mc->rho_i_mean;
        out["rho_i_sd"] = row.mc->rho_i_sd;
        out["rho_a"] = row.mc->rho_a_mean;
        out["rho_a_sd"] = row.mc->rho_a_sd;
        out["runs"] = row.mc->runs_used;
      }
      r.rows.push_back(row);
      const auto dir = out_dir(o);
      const auto path = dir / (s.name + (s.solvers.mc ? "_mc.csv" : "_mmca.csv"));
      write_csv(r, path);
      write_manifest(dir, s, {path}, out, command);
      std::cout << out.dump() << '\n';
    } else if (thr->parsed()) {
      Scenario s = make_scenario(o);
      s.solvers.threshold = true;
      s.validate();
      const auto net = build_network(s, s.run.seed);
      const auto t = epidemic_threshold(net, s.params, s.solvers.threshold_options);
      const auto summary = threshold_json(t);
      write_manifest(out_dir(o), s, {}, summary, command);
      std::cout.precision(10);
      std::cout << t.beta_c << '\n';
      if (o.verbose) std::cerr << summary.dump() << '\n';
    } else if (sweep->parsed() || heat->parsed() || abl->parsed()) {
      Scenario s = make_scenario(o);
      const std::string want = sweep->parsed() ? "beta" : heat->parsed() ? "heatmap" : "ablation";
      if (o.scenario.empty()) {
        if (want == "heatmap") throw ScenarioError("heatmap needs --scenario");
        s.kind = want;
      }
      if (s.kind != want) {
        throw ScenarioError("scenario kind '" + s.kind + "' does not match subcommand");
      }
      const auto summary = run_scenario(s, out_dir(o), command);
      std::cout << summary.dump() << '\n';
    } else if (rep->parsed()) {
      const auto dir = scenario_dir(scen_dir);
      for (const auto& fig : figures) {
        const auto presets = find_presets(dir, fig);
        if (presets.empty()) {
          throw MissingInputError("no preset named '" + fig + "' in " + dir.string());
        }
        for (const auto& path : presets) {
          Scenario s = load_scenario(path);
          apply(o, s);
          const auto t1 = std::chrono::steady_clock::now();
          const auto summary = run_scenario(s, out_dir(o), command);
          std::cout << json{{"preset", s.name}, {"summary", summary}}.dump() << '\n';
          if (o.verbose) {
            std::cerr << s.name << ": "
                      << std::chrono::duration<double>(std::chrono::steady_clock::now() - t1).count()
                      << " s\n";
          }
        }
      }
    } else if (cmp->parsed()) {
      const auto r = read_csv(csv_path);
      auto c = compare_mmca_mc(r, onset_eps);
      if (!o.scenario.empty()) {
        Scenario s = load_scenario(o.scenario);
        s.solvers.threshold = true;
        s.validate();
        const auto net = build_network(s, s.run.seed);
        c.beta_c_theory = epidemic_threshold(net, s.params, s.solvers.threshold_options).beta_c;
      }
      json out = {{"mad_rho_i", c.mad_rho_i}, {"mad_rho_a", c.mad_rho_a}};
      out["beta_onset_mc"] = c.beta_onset_mc ? json(*c.beta_onset_mc) : json(nullptr);
      out["beta_c_theory"] = c.beta_c_theory ? json(*c.beta_c_theory) : json(nullptr);
      std::cout << out.dump() << '\n';
    }
  } catch (const MissingInputError& e) {
    return fail(kMissing, "missing_input", e.what());
  } catch (const ScenarioError& e) {
    return fail(kInvalid, "invalid_input", e.what());
  } catch (const NetworkError& e) {
    return fail(kInvalid, "invalid_input", e.what());
  } catch (const std::invalid_argument& e) {
    return fail(kInvalid, "invalid_input", e.what());
  } catch (const std::exception& e) {
    return fail(kRuntime, "runtime", e.what());
  }
  if (o.verbose) {
    std::cerr << "elapsed "
              << std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count()
              << " s\n";
  }
  return kOk;
}
