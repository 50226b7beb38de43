#include <cmath>
#include <filesystem>

#include "cpsim/experiments.hpp"
#include "doctest.h"
#include "helpers.hpp"

using namespace cpsim;
using nlohmann::json;

namespace {

Scenario tiny(const std::string& kind = "beta") {
  Scenario s;
  s.name = "tiny";
  s.kind = kind;
  s.network.n = 200;
  s.params.lambda = 0.2;
  s.params.lambda_star = 0.2;
  s.params.delta = 0.6;
  s.params.mu = 0.4;
  s.params.alpha = 10;
  s.params.theta = 0.5;
  s.axes = {{"beta", 0.0, 0.8, 3}};
  if (kind == "heatmap") s.axes.push_back({"lambda", 0.1, 0.5, 2});
  s.run.n_runs = 4;
  s.run.burn_in = 50;
  s.run.window = 10;
  s.run.max_steps = 300;
  s.run.seed = 42;
  s.solvers.mmca = true;
  s.solvers.threshold = true;
  return s;
}

json tiny_json() {
  return json::parse(R"({
    "name": "t",
    "network": {"physical": {"generator": "ws", "n": 100, "k": 4, "p": 0.3},
                "cyber": {"generator": "simplicial_er", "k1": 8, "k2": 1}},
    "params": {"lambda": 0.2, "lambda_star": 0.3, "delta": 0.5, "mu": 0.4,
               "alpha": 10, "theta": 0.5, "gamma": 0.1},
    "sweep": {"kind": "beta", "axes": [{"name": "beta", "start": 0, "stop": 1, "steps": 5}]},
    "run": {"seed": 7, "n_runs": 3}
  })");
}

}  // namespace

TEST_CASE("axis values") {
  CHECK(SweepAxis{"beta", 0.0, 1.0, 5}.values() == std::vector<double>{0, 0.25, 0.5, 0.75, 1.0});
  CHECK(SweepAxis{"beta", 0.3, 1.0, 1}.values() == std::vector<double>{0.3});
  const auto v = SweepAxis{"beta", 0.0, 1.0, 51}.values();
  CHECK(v.size() == 51);
  CHECK(v.back() == 1.0);
}

TEST_CASE("parameter names") {
  ModelParams p;
  set_param(p, "beta", 0.3);
  CHECK(p.beta_u == 0.3);
  CHECK(get_param(p, "beta_u") == 0.3);
  for (const char* name : {"lambda", "lambda_star", "delta", "gamma", "mu", "alpha", "theta"}) {
    CHECK(is_param_name(name));
    set_param(p, name, 0.25);
    CHECK(get_param(p, name) == 0.25);
  }
  CHECK_FALSE(is_param_name("kappa"));
  CHECK_THROWS_AS(set_param(p, "kappa", 1.0), ScenarioError);
}

TEST_CASE("scenario parsing") {
  const auto s = scenario_from_json(tiny_json());
  CHECK(s.network.n == 100);
  CHECK(s.network.k2 == 1.0);
  CHECK(s.params.gamma == 0.1);
  CHECK(s.run.seed == 7);
  CHECK(s.run.burn_in == 500);  // default
  CHECK(s.axes.size() == 1);

  SUBCASE("round trip") {
    const auto again = scenario_from_json(scenario_to_json(s));
    CHECK(scenario_to_json(again) == scenario_to_json(s));
  }
  SUBCASE("unknown keys are rejected") {
    auto j = tiny_json();
    j["params"]["lamda"] = 0.1;
    CHECK_THROWS_AS(scenario_from_json(j), ScenarioError);
    j = tiny_json();
    j["extra"] = 1;
    CHECK_THROWS_AS(scenario_from_json(j), ScenarioError);
  }
  SUBCASE("wrong types are rejected") {
    auto j = tiny_json();
    j["run"]["n_runs"] = "many";
    CHECK_THROWS_AS(scenario_from_json(j), ScenarioError);
  }
  SUBCASE("invalid values") {
    auto bad = [](auto edit) {
      auto j = tiny_json();
      edit(j);
      return j;
    };
    CHECK_THROWS(scenario_from_json(bad([](json& j) { j["params"]["mu"] = 1.5; })).validate());
    CHECK_THROWS(scenario_from_json(bad([](json& j) { j["params"]["theta"] = 1.0; })).validate());
    CHECK_THROWS(scenario_from_json(bad([](json& j) {
                   j["sweep"]["axes"][0]["name"] = "lambda";
                 })).validate());
    CHECK_THROWS(scenario_from_json(bad([](json& j) {
                   j["sweep"]["axes"][0]["steps"] = 0;
                 })).validate());
    CHECK_THROWS(scenario_from_json(bad([](json& j) {
                   j["sweep"]["axes"][0]["stop"] = 1.5;
                 })).validate());
    CHECK_THROWS(scenario_from_json(bad([](json& j) { j["sweep"]["kind"] = "heatmap"; }))
                     .validate());
    CHECK_THROWS(scenario_from_json(bad([](json& j) {
                   j["network"]["physical"] = {{"generator", "edge_list"}};
                 })).validate());
    CHECK_THROWS(scenario_from_json(bad([](json& j) {
                   j["solvers"] = {{"mc", false}, {"mmca", false}};
                 })).validate());
  }
}

TEST_CASE("scenario files") {
  testutil::TempDir dir("scn");
  const auto path = dir.write("mine.json", R"({"params": {"mu": 0.3}})");
  const auto s = load_scenario(path);
  CHECK(s.name == "mine");
  CHECK(s.base_dir == dir.path);
  CHECK(s.params.mu == 0.3);
  CHECK_THROWS_AS(load_scenario(dir.path / "absent.json"), MissingInputError);
  CHECK_THROWS_AS(load_scenario(dir.write("broken.json", "{")), ScenarioError);
}

TEST_CASE("all shipped presets load and validate") {
  int count = 0;
  for (const auto& e : std::filesystem::directory_iterator(CPSIM_SCENARIO_DIR)) {
    if (e.path().extension() != ".json") continue;
    INFO(e.path().string());
    Scenario s;
    CHECK_NOTHROW(s = load_scenario(e.path()));
    CHECK_NOTHROW(s.validate());
    CHECK(s.name == e.path().stem().string());
    ++count;
  }
  CHECK(count >= 15);
}

TEST_CASE("network construction") {
  auto s = tiny();
  const auto a = build_network(s, 1);
  CHECK(a.size() == 200);
  CHECK(a.physical() == build_network(s, 1).physical());
  CHECK(a.cyber().simplices() == build_network(s, 1).cyber().simplices());
  // Changing the cyber layer leaves the physical layer untouched.
  s.network.k2 = 3;
  CHECK(build_network(s, 1).physical() == a.physical());

  SUBCASE("mirrored cyber layer") {
    s.network.cyber = "mirror";
    s.network.k2 = 0;
    const auto m = build_network(s, 1);
    CHECK(m.cyber().adjacency() == m.physical().adj);
  }
  SUBCASE("edge list") {
    testutil::TempDir dir("net");
    dir.write("g.txt", "1 2\n2 3\n3 1\n3 4\n");
    s.network.physical = "edge_list";
    s.network.edge_list = "g.txt";
    s.network.cyber = "mirror";
    s.network.k2 = 0;
    s.base_dir = dir.path;
    const auto g = build_network(s, 1);
    CHECK(g.size() == 4);
    CHECK(g.physical().adj.edge_count() == 4);
  }
  SUBCASE("missing topology names the source") {
    s.network.physical = "edge_list";
    s.network.edge_list = "/nonexistent/out.opsahl-powergrid";
    s.network.cyber = "mirror";
    try {
      build_network(s, 1);
      FAIL("expected MissingInputError");
    } catch (const MissingInputError& e) {
      CHECK(std::string(e.what()).find("KONECT") != std::string::npos);
    }
    s.kind = "ablation";
    CHECK_THROWS_AS(run_powergrid_case(s), MissingInputError);
  }
}

TEST_CASE("beta sweep") {
  const auto s = tiny();
  const auto r = run_beta_sweep(s);
  REQUIRE(r.rows.size() == 3);
  CHECK(r.axis2_name.empty());
  CHECK(r.rows[0].beta == 0.0);
  CHECK(r.rows[0].mc->rho_i_mean == 0.0);
  CHECK(r.rows[0].mmca->rho_i < 1e-6);
  for (const auto& row : r.rows) {
    REQUIRE(row.mc);
    REQUIRE(row.mmca);
    REQUIRE(row.threshold);
    CHECK(row.threshold->beta_c == r.rows[0].threshold->beta_c);
    CHECK(row.mc->rho_i_mean <= row.mc->rho_a_mean);
  }
  CHECK(r.rows[2].mc->rho_i_mean > 0.1);

  SUBCASE("deterministic and independent of jobs") {
    auto s2 = s;
    s2.run.jobs = 3;
    const auto again = run_beta_sweep(s2);
    for (std::size_t k = 0; k < r.rows.size(); ++k) {
      CHECK(again.rows[k].mc->rho_i_mean == r.rows[k].mc->rho_i_mean);
      CHECK(again.rows[k].mc->rho_a_sd == r.rows[k].mc->rho_a_sd);
      CHECK(again.rows[k].mmca->rho_a == r.rows[k].mmca->rho_a);
    }
  }
  SUBCASE("single point") {
    auto s2 = s;
    s2.axes = {{"beta", 0.0, 0.0, 1}};
    const auto one = run_beta_sweep(s2);
    REQUIRE(one.rows.size() == 1);
    CHECK(one.rows[0].mc->rho_i_mean == 0.0);
  }
  SUBCASE("regenerated networks differ per point") {
    auto s2 = s;
    s2.network.regenerate_per_point = true;
    s2.solvers.threshold = true;
    const auto regen = run_beta_sweep(s2);
    CHECK(regen.rows[0].threshold->beta_c != regen.rows[1].threshold->beta_c);
  }
}

TEST_CASE("heatmap") {
  auto s = tiny("heatmap");
  s.solvers.threshold = false;
  const auto r = run_heatmap(s);
  CHECK(r.axis2_name == "lambda");
  REQUIRE(r.rows.size() == 6);
  // beta-major
  CHECK(r.rows[0].beta == 0.0);
  CHECK(*r.rows[0].axis2 == doctest::Approx(0.1));
  CHECK(*r.rows[1].axis2 == doctest::Approx(0.5));
  CHECK(r.rows[2].beta == doctest::Approx(0.4));
  const auto again = run_heatmap(s);
  for (std::size_t k = 0; k < 6; ++k) CHECK(again.rows[k].mc->rho_i_mean == r.rows[k].mc->rho_i_mean);
  // More information lowers or keeps the infection density (MMCA is exact
  // for the fixed network, so this holds pointwise).
  CHECK(r.rows[5].mmca->rho_i <= r.rows[4].mmca->rho_i + 1e-9);
}

TEST_CASE("ablation") {
  auto s = tiny("ablation");
  s.solvers.threshold = false;
  const auto curves = run_ablation(s);
  REQUIRE(curves.size() == 5);
  CHECK(std::string(channel_label(curves[0].channels)) == "pwi");
  CHECK(std::string(channel_label(Channels::None)) == "none");
  CHECK(curves[0].sweep.name == "tiny_pwi");

  const auto plain = with_channels(s.params, Channels::None);
  CHECK_FALSE(plain.enable_r1);
  CHECK_FALSE(plain.enable_r2);
  CHECK_FALSE(plain.enable_r3);
  const auto all = with_channels(plain, Channels::Integrated);
  CHECK((all.enable_r1 && all.enable_r2 && all.enable_r3));
  const auto simplex = with_channels(all, Channels::Simplex);
  CHECK((!simplex.enable_r1 && simplex.enable_r2 && !simplex.enable_r3));

  // The none curve sees the most infection at every beta.
  const auto& none = curves[4].sweep.rows;
  for (const auto& c : curves) {
    for (std::size_t k = 0; k < none.size(); ++k) {
      CHECK(c.sweep.rows[k].mmca->rho_i <= none[k].mmca->rho_i + 1e-9);
    }
  }
}

TEST_CASE("comparison and onset") {
  SweepResult r;
  for (int k = 0; k < 4; ++k) {
    SweepRow row;
    row.beta = 0.1 * k;
    const double v = k < 2 ? 0.0 : 0.1 * k;
    row.mc = EnsembleResult{v + 0.1, v, 0.0, 0.0, 5};
    row.mmca = SteadyDensities{v + 0.1, v + (k == 3 ? 0.04 : 0.0), 0, false};
    r.rows.push_back(row);
  }
  CHECK(*mc_onset(r) == doctest::Approx(0.2));
  CHECK_FALSE(mc_onset(r, 0.5).has_value());
  const auto c = compare_mmca_mc(r);
  CHECK(c.mad_rho_i == doctest::Approx(0.01));
  CHECK(c.mad_rho_a == doctest::Approx(0.0));
  CHECK(*c.beta_onset_mc == doctest::Approx(0.2));
  CHECK_FALSE(c.beta_c_theory.has_value());
}

TEST_CASE("CSV contract") {
  testutil::TempDir dir("csv");
  SUBCASE("round trip of a full beta sweep") {
    const auto r = run_beta_sweep(tiny());
    write_csv(r, dir.path / "a.csv");
    std::ifstream in(dir.path / "a.csv");
    std::string header;
    std::getline(in, header);
    CHECK(header == "beta,rho_i_mc,rho_i_sd,rho_a_mc,rho_a_sd,rho_i_mmca,rho_a_mmca");
    const auto back = read_csv(dir.path / "a.csv");
    REQUIRE(back.rows.size() == r.rows.size());
    for (std::size_t k = 0; k < r.rows.size(); ++k) {
      CHECK(back.rows[k].beta == doctest::Approx(r.rows[k].beta).epsilon(1e-5));
      CHECK(back.rows[k].mc->rho_i_mean ==
            doctest::Approx(r.rows[k].mc->rho_i_mean).epsilon(1e-5));
      CHECK(back.rows[k].mmca->rho_a == doctest::Approx(r.rows[k].mmca->rho_a).epsilon(1e-5));
    }
  }
  SUBCASE("heatmap column and MMCA-only rows") {
    SweepResult r;
    r.axis2_name = "theta";
    SweepRow row;
    row.beta = 0.5;
    row.axis2 = 0.25;
    row.mmca = SteadyDensities{0.4, 0.2, 0, false};
    r.rows.push_back(row);
    write_csv(r, dir.path / "h.csv");
    std::ifstream in(dir.path / "h.csv");
    std::string header, line;
    std::getline(in, header);
    std::getline(in, line);
    CHECK(header == "beta,theta,rho_i_mc,rho_i_sd,rho_a_mc,rho_a_sd,rho_i_mmca,rho_a_mmca");
    CHECK(line == "0.5,0.25,nan,nan,nan,nan,0.2,0.4");
    const auto back = read_csv(dir.path / "h.csv");
    CHECK(back.axis2_name == "theta");
    CHECK(*back.rows[0].axis2 == 0.25);
    CHECK_FALSE(back.rows[0].mc.has_value());
  }
  SUBCASE("malformed files") {
    CHECK_THROWS(read_csv(dir.write("e.csv", "")));
    CHECK_THROWS(read_csv(dir.write("h.csv", "b,rho_i_mc,rho_i_sd,rho_a_mc,rho_a_sd\n")));
    CHECK_THROWS(read_csv(dir.write("n.csv", "beta,rho_i_mc,rho_i_sd,rho_a_mc,rho_a_sd\n0.1,x,0,0,0\n")));
    CHECK_THROWS(read_csv(dir.write("c.csv", "beta,rho_i_mc,rho_i_sd,rho_a_mc,rho_a_sd\n0.1,0,0\n")));
    CHECK_THROWS(read_csv(dir.path / "absent.csv"));
  }
}

TEST_CASE("manifest") {
  auto s = tiny();
  const auto m = make_manifest(s);
  CHECK(m["seed"] == 42);
  CHECK(m["version"].get<std::string>() == version_string());
  CHECK(m["scenario"]["name"] == "tiny");
}
