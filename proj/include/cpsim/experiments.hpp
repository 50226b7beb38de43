#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "cpsim/mc.hpp"
#include "cpsim/mmca.hpp"
#include "cpsim/network.hpp"
#include "cpsim/threshold.hpp"

#include "json.hpp"

namespace cpsim {

/// Raised for scenario files that do not match the schema.
class ScenarioError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A required input file (e.g. a real topology) is absent.
class MissingInputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct NetworkSpec {
  // physical: "ws" or "edge_list"
  std::string physical = "ws";
  NodeId n = 1000;
  NodeId ws_k = 4;
  double ws_p = 0.5;
  std::filesystem::path edge_list;  // relative paths resolve against base_dir
  EdgeListFormat format = EdgeListFormat::Auto;
  // cyber: "simplicial_er" or "mirror"
  std::string cyber = "simplicial_er";
  double k1 = 10.0;
  double k2 = 2.0;
  bool regenerate_per_point = false;
};

struct SweepAxis {
  std::string name;  // "beta" or a ModelParams field name
  double start = 0.0;
  double stop = 1.0;
  int steps = 51;

  /// start + k (stop - start) / (steps - 1); a single step yields start.
  std::vector<double> values() const;
};

struct SolverSpec {
  bool mc = true;
  bool mmca = false;
  bool threshold = false;
  MmcaOptions mmca_options;
  ThresholdOptions threshold_options;
  double onset_eps = 0.005;
};

/// One experiment: network, dynamics, grid and solvers.
struct Scenario {
  std::string name;
  NetworkSpec network;
  ModelParams params;
  std::string kind = "beta";  // beta | heatmap | ablation
  std::vector<SweepAxis> axes;
  RunConfig run;
  SolverSpec solvers;
  std::filesystem::path output;
  std::filesystem::path base_dir;  // directory of the scenario file

  void validate() const;
};

Scenario scenario_from_json(const nlohmann::json& j,
                            const std::filesystem::path& base_dir = {});
nlohmann::json scenario_to_json(const Scenario& s);
Scenario load_scenario(const std::filesystem::path& path);

/// Sets a sweepable parameter by name ("beta" aliases beta_u).
void set_param(ModelParams& p, const std::string& name, double value);
double get_param(const ModelParams& p, const std::string& name);
bool is_param_name(const std::string& name);

/// Builds the multiplex network described by the scenario. Layers draw from
/// independent substreams of `seed`, so scenarios sharing a seed share the
/// physical layer.
MultiplexNetwork build_network(const Scenario& s, std::uint64_t seed);

struct SweepRow {
  double beta = 0.0;
  std::optional<double> axis2;
  std::optional<EnsembleResult> mc;
  std::optional<SteadyDensities> mmca;
  std::optional<ThresholdResult> threshold;
};

struct SweepResult {
  std::string name;
  std::string axis2_name;  // empty for one-dimensional sweeps
  std::vector<SweepRow> rows;
};

/// Density curves over the beta axis, MMCA and/or MC on one network
/// realisation (or one per point when regenerate_per_point is set).
SweepResult run_beta_sweep(const Scenario& s);

/// beta x {lambda | lambda_star | theta} grid, beta-major.
SweepResult run_heatmap(const Scenario& s);

/// The five channel configurations evaluated by run_ablation.
enum class Channels { Pairwise, Simplex, Physical, Integrated, None };
const char* channel_label(Channels c);
ModelParams with_channels(ModelParams p, Channels c);

struct AblationCurve {
  Channels channels;
  SweepResult sweep;
};

/// Beta sweep for each channel configuration on the same network and
/// seeds.
std::vector<AblationCurve> run_ablation(const Scenario& s);

/// run_ablation on a loaded real topology; a missing file raises
/// MissingInputError with a download hint.
std::vector<AblationCurve> run_powergrid_case(const Scenario& s);

struct Comparison {
  double mad_rho_i = 0.0;
  double mad_rho_a = 0.0;
  std::optional<double> beta_onset_mc;
  std::optional<double> beta_c_theory;
};

/// Smallest grid beta whose MC mean rho_I exceeds onset_eps.
std::optional<double> mc_onset(const SweepResult& sweep,
                               double onset_eps = 0.005);

/// Mean absolute MMCA-MC deviation over rows carrying both solvers.
Comparison compare_mmca_mc(const SweepResult& sweep, double onset_eps = 0.005);

/// CSV with header beta[,<axis2>],rho_i_mc,rho_i_sd,rho_a_mc,rho_a_sd
/// [,rho_i_mmca,rho_a_mmca]; 6 significant digits; "nan" for MC columns
/// of an MMCA-only sweep.
void write_csv(const SweepResult& r, const std::filesystem::path& path);
SweepResult read_csv(const std::filesystem::path& path);

/// Run-manifest JSON shared by the CLI outputs.
nlohmann::json make_manifest(const Scenario& s);

const char* version_string();

}  // namespace cpsim
