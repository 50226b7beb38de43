#include <algorithm>
#include <fstream>
#include <set>

#include "cpsim/experiments.hpp"

namespace cpsim {

using nlohmann::json;

namespace {

void check_keys(const json& obj, std::initializer_list<const char*> allowed,
                const std::string& where) {
  if (!obj.is_object()) throw ScenarioError(where + ": expected an object");
  for (const auto& [key, _] : obj.items()) {
    if (std::none_of(allowed.begin(), allowed.end(),
                     [&](const char* a) { return key == a; })) {
      throw ScenarioError(where + ": unknown key '" + key + "'");
    }
  }
}

template <typename T>
void read(const json& obj, const char* key, T& out, const std::string& where) {
  if (!obj.contains(key)) return;
  try {
    out = obj.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ScenarioError(where + "." + key + ": " + e.what());
  }
}

const char* format_name(EdgeListFormat f) {
  switch (f) {
    case EdgeListFormat::Whitespace: return "whitespace";
    case EdgeListFormat::Comma: return "comma";
    case EdgeListFormat::Auto: break;
  }
  return "auto";
}

EdgeListFormat parse_format(const std::string& s) {
  if (s == "auto") return EdgeListFormat::Auto;
  if (s == "whitespace") return EdgeListFormat::Whitespace;
  if (s == "comma") return EdgeListFormat::Comma;
  throw ScenarioError("network.physical.format: unknown format '" + s + "'");
}

}  // namespace

std::vector<double> SweepAxis::values() const {
  std::vector<double> v;
  if (steps == 1) return {start};
  v.reserve(static_cast<std::size_t>(steps));
  for (int k = 0; k < steps; ++k) {
    v.push_back(start + (stop - start) * k / (steps - 1));
  }
  return v;
}

bool is_param_name(const std::string& name) {
  static const std::set<std::string> names = {
      "beta", "beta_u", "lambda", "lambda_star", "delta",
      "gamma", "mu", "alpha", "theta"};
  return names.count(name) > 0;
}

void set_param(ModelParams& p, const std::string& name, double value) {
  if (name == "beta" || name == "beta_u") p.beta_u = value;
  else if (name == "lambda") p.lambda = value;
  else if (name == "lambda_star") p.lambda_star = value;
  else if (name == "delta") p.delta = value;
  else if (name == "gamma") p.gamma = value;
  else if (name == "mu") p.mu = value;
  else if (name == "alpha") p.alpha = value;
  else if (name == "theta") p.theta = value;
  else throw ScenarioError("unknown parameter '" + name + "'");
}

double get_param(const ModelParams& p, const std::string& name) {
  if (name == "beta" || name == "beta_u") return p.beta_u;
  if (name == "lambda") return p.lambda;
  if (name == "lambda_star") return p.lambda_star;
  if (name == "delta") return p.delta;
  if (name == "gamma") return p.gamma;
  if (name == "mu") return p.mu;
  if (name == "alpha") return p.alpha;
  if (name == "theta") return p.theta;
  throw ScenarioError("unknown parameter '" + name + "'");
}

void Scenario::validate() const {
  auto fail = [this](const std::string& msg) {
    throw ScenarioError("scenario '" + name + "': " + msg);
  };
  if (network.physical != "ws" && network.physical != "edge_list") {
    fail("network.physical.generator must be 'ws' or 'edge_list'");
  }
  if (network.cyber != "simplicial_er" && network.cyber != "mirror") {
    fail("network.cyber.generator must be 'simplicial_er' or 'mirror'");
  }
  if (network.physical == "edge_list" && network.edge_list.empty()) {
    fail("network.physical.path is required for edge_list");
  }
  if (network.cyber == "simplicial_er" && network.physical == "edge_list") {
    fail("simplicial_er cyber layer needs a generated physical layer; use "
         "'mirror' with edge_list");
  }
  try {
    params.validate();
    run.validate();
  } catch (const std::invalid_argument& e) {
    fail(e.what());
  }
  if (axes.empty()) fail("sweep.axes must not be empty");
  for (const auto& a : axes) {
    if (!is_param_name(a.name)) fail("sweep axis '" + a.name + "' is not a parameter");
    if (a.steps < 1) fail("sweep axis '" + a.name + "' needs steps >= 1");
    for (double v : a.values()) {
      ModelParams probe = params;
      set_param(probe, a.name, v);
      try {
        probe.validate();
      } catch (const std::invalid_argument& e) {
        fail("sweep axis '" + a.name + "': " + e.what());
      }
    }
  }
  const bool first_is_beta = axes[0].name == "beta" || axes[0].name == "beta_u";
  if (kind == "beta" || kind == "ablation") {
    if (axes.size() != 1 || !first_is_beta) fail(kind + " sweep needs exactly one beta axis");
  } else if (kind == "heatmap") {
    if (axes.size() != 2 || !first_is_beta) fail("heatmap needs axes [beta, second]");
    const auto& second = axes[1].name;
    if (second != "lambda" && second != "lambda_star" && second != "theta") {
      fail("heatmap second axis must be lambda, lambda_star or theta");
    }
  } else {
    fail("sweep.kind must be beta, heatmap or ablation");
  }
  if (solvers.threshold && !(params.mu > 0.0)) fail("threshold needs mu > 0");
  if (!solvers.mc && !solvers.mmca) fail("enable at least one of mc, mmca");
}

Scenario scenario_from_json(const json& j, const std::filesystem::path& base_dir) {
  Scenario s;
  s.base_dir = base_dir;
  check_keys(j, {"name", "network", "params", "channels", "sweep", "run",
                 "solvers", "output"},
             "scenario");
  read(j, "name", s.name, "scenario");

  if (j.contains("network")) {
    const auto& n = j["network"];
    check_keys(n, {"physical", "cyber", "regenerate_per_point"}, "network");
    read(n, "regenerate_per_point", s.network.regenerate_per_point, "network");
    if (n.contains("physical")) {
      const auto& p = n["physical"];
      check_keys(p, {"generator", "n", "k", "p", "path", "format"},
                 "network.physical");
      read(p, "generator", s.network.physical, "network.physical");
      read(p, "n", s.network.n, "network.physical");
      read(p, "k", s.network.ws_k, "network.physical");
      read(p, "p", s.network.ws_p, "network.physical");
      std::string path;
      read(p, "path", path, "network.physical");
      s.network.edge_list = path;
      std::string fmt = "auto";
      read(p, "format", fmt, "network.physical");
      s.network.format = parse_format(fmt);
    }
    if (n.contains("cyber")) {
      const auto& c = n["cyber"];
      check_keys(c, {"generator", "k1", "k2"}, "network.cyber");
      read(c, "generator", s.network.cyber, "network.cyber");
      read(c, "k1", s.network.k1, "network.cyber");
      read(c, "k2", s.network.k2, "network.cyber");
    }
  }

  if (j.contains("params")) {
    const auto& p = j["params"];
    check_keys(p, {"lambda", "lambda_star", "delta", "beta_u", "gamma", "mu",
                   "alpha", "theta"},
               "params");
    read(p, "lambda", s.params.lambda, "params");
    read(p, "lambda_star", s.params.lambda_star, "params");
    read(p, "delta", s.params.delta, "params");
    read(p, "beta_u", s.params.beta_u, "params");
    read(p, "gamma", s.params.gamma, "params");
    read(p, "mu", s.params.mu, "params");
    read(p, "alpha", s.params.alpha, "params");
    read(p, "theta", s.params.theta, "params");
  }

  if (j.contains("channels")) {
    const auto& c = j["channels"];
    check_keys(c, {"r1", "r2", "r3", "sensing_baseline"}, "channels");
    read(c, "r1", s.params.enable_r1, "channels");
    read(c, "r2", s.params.enable_r2, "channels");
    read(c, "r3", s.params.enable_r3, "channels");
    std::string baseline = "literal";
    read(c, "sensing_baseline", baseline, "channels");
    if (baseline == "literal") {
      s.params.sensing_baseline = SensingBaseline::Literal;
    } else if (baseline == "clamp_zero") {
      s.params.sensing_baseline = SensingBaseline::ClampZero;
    } else {
      throw ScenarioError("channels.sensing_baseline: expected literal or clamp_zero");
    }
  }

  if (j.contains("sweep")) {
    const auto& w = j["sweep"];
    check_keys(w, {"kind", "axes"}, "sweep");
    read(w, "kind", s.kind, "sweep");
    if (w.contains("axes")) {
      if (!w["axes"].is_array()) throw ScenarioError("sweep.axes: expected an array");
      for (const auto& a : w["axes"]) {
        check_keys(a, {"name", "start", "stop", "steps"}, "sweep.axes[]");
        SweepAxis axis;
        read(a, "name", axis.name, "sweep.axes[]");
        read(a, "start", axis.start, "sweep.axes[]");
        read(a, "stop", axis.stop, "sweep.axes[]");
        read(a, "steps", axis.steps, "sweep.axes[]");
        s.axes.push_back(axis);
      }
    }
  }

  if (j.contains("run")) {
    const auto& r = j["run"];
    check_keys(r, {"seed", "n_runs", "burn_in", "window", "max_steps",
                   "stop_tol", "init_infected", "infection_awareness", "jobs"},
               "run");
    read(r, "seed", s.run.seed, "run");
    read(r, "n_runs", s.run.n_runs, "run");
    read(r, "burn_in", s.run.burn_in, "run");
    read(r, "window", s.run.window, "run");
    read(r, "max_steps", s.run.max_steps, "run");
    read(r, "stop_tol", s.run.stop_tol, "run");
    read(r, "init_infected", s.run.init_infected, "run");
    read(r, "jobs", s.run.jobs, "run");
    std::string mode = "post";
    read(r, "infection_awareness", mode, "run");
    if (mode == "post") {
      s.run.mode = InfectionAwareness::PostAwareness;
    } else if (mode == "pre") {
      s.run.mode = InfectionAwareness::PreAwareness;
    } else {
      throw ScenarioError("run.infection_awareness: expected post or pre");
    }
  }

  if (j.contains("solvers")) {
    const auto& v = j["solvers"];
    check_keys(v, {"mc", "mmca", "threshold", "mmca_tol", "mmca_max_iter",
                   "threshold_tol", "threshold_max_iter", "onset_eps"},
               "solvers");
    read(v, "mc", s.solvers.mc, "solvers");
    read(v, "mmca", s.solvers.mmca, "solvers");
    read(v, "threshold", s.solvers.threshold, "solvers");
    read(v, "mmca_tol", s.solvers.mmca_options.tol, "solvers");
    read(v, "mmca_max_iter", s.solvers.mmca_options.max_iter, "solvers");
    read(v, "threshold_tol", s.solvers.threshold_options.tol, "solvers");
    read(v, "threshold_max_iter", s.solvers.threshold_options.max_iter, "solvers");
    read(v, "onset_eps", s.solvers.onset_eps, "solvers");
  }

  std::string out;
  read(j, "output", out, "scenario");
  s.output = out;
  return s;
}

json scenario_to_json(const Scenario& s) {
  json physical = {{"generator", s.network.physical}};
  if (s.network.physical == "ws") {
    physical["n"] = s.network.n;
    physical["k"] = s.network.ws_k;
    physical["p"] = s.network.ws_p;
  } else {
    physical["path"] = s.network.edge_list.string();
    physical["format"] = format_name(s.network.format);
  }
  json cyber = {{"generator", s.network.cyber}, {"k2", s.network.k2}};
  if (s.network.cyber == "simplicial_er") cyber["k1"] = s.network.k1;

  json axes = json::array();
  for (const auto& a : s.axes) {
    axes.push_back({{"name", a.name}, {"start", a.start}, {"stop", a.stop},
                    {"steps", a.steps}});
  }
  return {
      {"name", s.name},
      {"network",
       {{"physical", physical},
        {"cyber", cyber},
        {"regenerate_per_point", s.network.regenerate_per_point}}},
      {"params",
       {{"lambda", s.params.lambda},
        {"lambda_star", s.params.lambda_star},
        {"delta", s.params.delta},
        {"beta_u", s.params.beta_u},
        {"gamma", s.params.gamma},
        {"mu", s.params.mu},
        {"alpha", s.params.alpha},
        {"theta", s.params.theta}}},
      {"channels",
       {{"r1", s.params.enable_r1},
        {"r2", s.params.enable_r2},
        {"r3", s.params.enable_r3},
        {"sensing_baseline",
         s.params.sensing_baseline == SensingBaseline::Literal ? "literal"
                                                               : "clamp_zero"}}},
      {"sweep", {{"kind", s.kind}, {"axes", axes}}},
      {"run",
       {{"seed", s.run.seed},
        {"n_runs", s.run.n_runs},
        {"burn_in", s.run.burn_in},
        {"window", s.run.window},
        {"max_steps", s.run.max_steps},
        {"stop_tol", s.run.stop_tol},
        {"init_infected", s.run.init_infected},
        {"infection_awareness",
         s.run.mode == InfectionAwareness::PostAwareness ? "post" : "pre"},
        {"jobs", s.run.jobs}}},
      {"solvers",
       {{"mc", s.solvers.mc},
        {"mmca", s.solvers.mmca},
        {"threshold", s.solvers.threshold},
        {"mmca_tol", s.solvers.mmca_options.tol},
        {"mmca_max_iter", s.solvers.mmca_options.max_iter},
        {"threshold_tol", s.solvers.threshold_options.tol},
        {"threshold_max_iter", s.solvers.threshold_options.max_iter},
        {"onset_eps", s.solvers.onset_eps}}},
      {"output", s.output.string()},
  };
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw MissingInputError("scenario file not found: " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ScenarioError(path.string() + ": " + e.what());
  }
  auto s = scenario_from_json(j, path.parent_path());
  if (s.name.empty()) s.name = path.stem().string();
  return s;
}

}  // namespace cpsim
