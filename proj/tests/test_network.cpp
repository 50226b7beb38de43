#include <cmath>
#include <numeric>
#include <set>

#include "doctest.h"
#include "helpers.hpp"

using namespace cpsim;
using testutil::TempDir;

namespace {

void check_closure(const CyberLayer& c) {
  std::set<std::array<NodeId, 3>> seen;
  for (auto s : c.simplices()) {
    CHECK(s[0] != s[1]);
    CHECK(s[1] != s[2]);
    CHECK(s[0] != s[2]);
    CHECK(c.adjacency().has_edge(s[0], s[1]));
    CHECK(c.adjacency().has_edge(s[1], s[2]));
    CHECK(c.adjacency().has_edge(s[0], s[2]));
    std::sort(s.begin(), s.end());
    CHECK(seen.insert(s).second);
  }
}

void check_simple(const Graph& g) {
  std::size_t deg_sum = 0;
  for (NodeId i = 0; i < g.size(); ++i) {
    const auto nb = g.neighbors(i);
    CHECK(static_cast<NodeId>(nb.size()) == g.degree(i));
    deg_sum += nb.size();
    for (std::size_t k = 0; k < nb.size(); ++k) {
      CHECK(nb[k] != i);
      if (k > 0) CHECK(nb[k - 1] < nb[k]);
      CHECK(g.has_edge(nb[k], i));
    }
  }
  CHECK(deg_sum == 2 * g.edge_count());
}

double mean(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / v.size();
}

double sd(const std::vector<double>& v) {
  const double m = mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / (v.size() - 1));
}

// G(n, m) drawn independently of the library generators.
Graph gnm(NodeId n, std::size_t m, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<NodeId> pick(0, n - 1);
  std::set<Edge> edges;
  while (edges.size() < m) {
    NodeId a = pick(rng), b = pick(rng);
    if (a == b) continue;
    if (a > b) std::swap(a, b);
    edges.insert({a, b});
  }
  std::vector<Edge> v(edges.begin(), edges.end());
  return Graph::from_edges(n, v);
}


}  // namespace

TEST_CASE("graph construction collapses duplicates and rejects self-loops") {
  const std::vector<Edge> e = {{0, 1}, {1, 0}, {1, 2}};
  const auto g = Graph::from_edges(3, e);
  CHECK(g.edge_count() == 2);
  CHECK(g.degree(1) == 2);
  CHECK(g.has_edge(2, 1));
  CHECK_FALSE(g.has_edge(0, 2));
  check_simple(g);
  const std::vector<Edge> loop = {{1, 1}};
  CHECK_THROWS_AS(Graph::from_edges(3, loop), NetworkError);
  const std::vector<Edge> out_of_range = {{0, 3}};
  CHECK_THROWS_AS(Graph::from_edges(3, out_of_range), NetworkError);
}

TEST_CASE("cyber layer validates simplices") {
  const auto g = testutil::graph(4, {{0, 1}, {1, 2}, {0, 2}, {2, 3}});
  CHECK_NOTHROW(CyberLayer(g, {{0, 1, 2}}));
  CHECK_THROWS_AS(CyberLayer(g, {{1, 2, 3}}), NetworkError);        // open
  CHECK_THROWS_AS(CyberLayer(g, {{0, 1, 2}, {2, 0, 1}}), NetworkError);  // duplicate
  CHECK_THROWS_AS(CyberLayer(g, {{0, 0, 1}}), NetworkError);
  const CyberLayer c(g, {{0, 1, 2}});
  CHECK(c.simplex_index(0).size() == 1);
  CHECK(c.simplex_index(3).empty());
  CHECK(c.mean_simplex_membership() == doctest::Approx(0.75));
  const auto partners = c.simplex_partners(1);
  REQUIRE(partners.size() == 1);
  CHECK(std::set<NodeId>{partners[0].first, partners[0].second} == std::set<NodeId>{0, 2});
}

TEST_CASE("multiplex requires matching sizes") {
  const auto g3 = testutil::graph(3, {{0, 1}});
  const auto g4 = testutil::graph(4, {{0, 1}});
  CHECK_THROWS_AS(MultiplexNetwork(CyberLayer(g3, {}), PhysicalLayer{g4, {}}), NetworkError);
}

TEST_CASE("connection probabilities") {
  SUBCASE("calibrated values") {
    const auto p = compute_connection_probs(1000, 10, 2);
    CHECK(p.p1 == doctest::Approx(6.0 / 995.0).epsilon(1e-15));
    CHECK(p.p2 == doctest::Approx(4.0 / 997002.0).epsilon(1e-15));
    CHECK(p.p1 == doctest::Approx(0.006030150753768844).epsilon(1e-14));
    CHECK(p.p2 == doctest::Approx(4.0120280601242526e-06).epsilon(1e-14));
  }
  SUBCASE("no simplices reduces to ER") {
    const auto p = compute_connection_probs(1000, 10, 0);
    CHECK(p.p1 == doctest::Approx(10.0 / 999.0).epsilon(1e-15));
    CHECK(p.p2 == 0.0);
  }
  SUBCASE("violated bounds") {
    CHECK_THROWS_AS(compute_connection_probs(100, 4, 2.5), NetworkError);
    CHECK_THROWS_AS(compute_connection_probs(2, 0.5, 0), NetworkError);
    CHECK_THROWS_AS(compute_connection_probs(100, 0, 0), NetworkError);
    CHECK_THROWS_AS(compute_connection_probs(100, 99, 0), NetworkError);
    CHECK_THROWS_AS(compute_connection_probs(100, 4, -1), NetworkError);
  }
}

TEST_CASE("simplicial ER generator") {
  SUBCASE("closure and simple graph") {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      const auto c = generate_simplicial_er(1000, 10, 2, seed);
      check_closure(c);
      check_simple(c.adjacency());
    }
  }
  SUBCASE("simplex count matches the binomial expectation over 100 seeds") {
    const NodeId n = 1000;
    const double triples = n * (n - 1.0) * (n - 2.0) / 6.0;
    const double p2 = compute_connection_probs(n, 10, 2).p2;
    const double expect = triples * p2;
    CHECK(expect == doctest::Approx(n * 2.0 / 3.0));
    std::vector<double> counts;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
      counts.push_back(static_cast<double>(generate_simplicial_er(n, 10, 2, seed).simplices().size()));
    }
    const double se = std::sqrt(triples * p2 * (1 - p2) / counts.size());
    CHECK(std::abs(mean(counts) - expect) < 3 * se);
  }
  SUBCASE("k2 = 0 gives plain ER") {
    const NodeId n = 1000;
    const auto c = generate_simplicial_er(n, 10, 0, 7);
    CHECK(c.simplices().empty());
    const double p1 = compute_connection_probs(n, 10, 0).p1;
    const double pairs = n * (n - 1.0) / 2.0;
    const double sigma = 2.0 * std::sqrt(pairs * p1 * (1 - p1)) / n;
    CHECK(std::abs(c.adjacency().mean_degree() - (n - 1.0) * p1) < 3 * sigma);
  }
  SUBCASE("degree calibration over 50 seeds") {
    std::vector<double> degs;
    for (std::uint64_t seed = 100; seed < 150; ++seed) {
      degs.push_back(generate_simplicial_er(1000, 10, 2, seed).adjacency().mean_degree());
    }
    CHECK(mean(degs) >= 9.7);
    CHECK(mean(degs) <= 10.3);
  }
  SUBCASE("determinism") {
    CHECK(generate_simplicial_er(300, 8, 1, 42) == generate_simplicial_er(300, 8, 1, 42));
    CHECK_FALSE(generate_simplicial_er(300, 8, 1, 42) == generate_simplicial_er(300, 8, 1, 43));
  }
}

TEST_CASE("Watts-Strogatz generator") {
  SUBCASE("unrewired ring") {
    const auto g = generate_ws(1000, 4, 0.0, 1).adj;
    CHECK(g.edge_count() == 2000);
    for (NodeId i = 0; i < g.size(); ++i) CHECK(g.degree(i) == 4);
    CHECK(clustering_coefficient(g) == doctest::Approx(0.5).epsilon(1e-15));
  }
  SUBCASE("edge count preserved for every seed and P") {
    for (double p : {0.0, 0.1, 0.5, 0.9, 1.0}) {
      for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto g = generate_ws(1000, 4, p, seed).adj;
        CHECK(g.edge_count() == 2000);
        if (seed == 0) check_simple(g);
      }
    }
  }
  SUBCASE("invalid arguments") {
    CHECK_THROWS_AS(generate_ws(100, 3, 0.5, 1), NetworkError);
    CHECK_THROWS_AS(generate_ws(4, 4, 0.5, 1), NetworkError);
    CHECK_THROWS_AS(generate_ws(100, 4, 1.5, 1), NetworkError);
  }
  SUBCASE("determinism") {
    CHECK(generate_ws(500, 4, 0.5, 9) == generate_ws(500, 4, 0.5, 9));
    CHECK_FALSE(generate_ws(500, 4, 0.5, 9) == generate_ws(500, 4, 0.5, 10));
  }
}

TEST_CASE("graph statistics") {
  const auto triangle = testutil::graph(3, {{0, 1}, {1, 2}, {0, 2}});
  CHECK(clustering_coefficient(triangle) == 1.0);
  CHECK(mean_shortest_path(triangle) == 1.0);
  const auto path = testutil::graph(3, {{0, 1}, {1, 2}});
  CHECK(clustering_coefficient(path) == 0.0);
  CHECK(mean_shortest_path(path) == doctest::Approx(4.0 / 3.0));
}

TEST_CASE("edge list loading") {
  TempDir dir("edges");
  SUBCASE("reversed duplicate collapsed") {
    LoadReport rep;
    const auto p = load_edge_list(dir.write("a.txt", "0 1\n1 0\n"), EdgeListFormat::Auto, &rep);
    CHECK(p.size() == 2);
    CHECK(p.adj.edge_count() == 1);
    CHECK(rep.duplicates_collapsed == 1);
  }
  SUBCASE("self-loop dropped") {
    LoadReport rep;
    const auto p = load_edge_list(dir.write("b.txt", "0 0\n0 1\n"), EdgeListFormat::Auto, &rep);
    CHECK(p.adj.edge_count() == 1);
    CHECK(rep.self_loops_dropped == 1);
  }
  SUBCASE("comments, extra columns and label compaction") {
    const auto p = load_edge_list(
        dir.write("c.txt", "% sym unweighted\n# comment\n10 20 1 999\n\n20 30\n"));
    CHECK(p.size() == 3);
    CHECK(p.adj.edge_count() == 2);
    CHECK(p.original_ids == std::vector<std::int64_t>{10, 20, 30});
    CHECK(p.adj.has_edge(0, 1));
    CHECK(p.adj.has_edge(1, 2));
  }
  SUBCASE("comma separated") {
    const auto p = load_edge_list(dir.write("d.csv", "1,2\n2,3\n"), EdgeListFormat::Comma);
    CHECK(p.adj.edge_count() == 2);
  }
  SUBCASE("malformed line reports its number") {
    const auto path = dir.write("e.txt", "0 1\n# ok\n2 x\n");
    try {
      load_edge_list(path);
      FAIL("expected an error");
    } catch (const NetworkError& e) {
      CHECK(std::string(e.what()).find(":3:") != std::string::npos);
    }
  }
  SUBCASE("empty file") {
    CHECK_THROWS_AS(load_edge_list(dir.write("f.txt", "")), NetworkError);
    CHECK_THROWS_AS(load_edge_list(dir.write("g.txt", "% only a header\n")), NetworkError);
  }
  SUBCASE("missing file") {
    CHECK_THROWS_AS(load_edge_list(dir.path / "nope.txt"), NetworkError);
  }
}

TEST_CASE("edge list and simplex round trip") {
  TempDir dir("roundtrip");
  const auto c = generate_simplicial_er(200, 6, 1, 5);
  write_edge_list(c.adjacency(), dir.path / "cyber.edges");
  write_simplices(c, dir.path / "simplices.txt");
  const auto loaded = load_edge_list(dir.path / "cyber.edges");
  const auto simplices = read_simplices(dir.path / "simplices.txt");
  CHECK(simplices == c.simplices());
  if (loaded.size() == c.size()) {
    CHECK(loaded.adj == c.adjacency());
  } else {
    CHECK(loaded.adj.edge_count() == c.adjacency().edge_count());
  }
}

TEST_CASE("mirror layer") {
  const auto phys = generate_ws(1000, 4, 0.5, 3);
  SUBCASE("k2 = 0 copies the physical adjacency") {
    const auto c = mirror_layer(phys, 0.0, 1);
    CHECK(c.adjacency() == phys.adj);
    CHECK(c.simplices().empty());
  }
  SUBCASE("lattice grid, k2 = 2") {
    const NodeId side = 70;
    std::vector<Edge> e;
    for (NodeId r = 0; r < side; ++r) {
      for (NodeId col = 0; col < side; ++col) {
        const NodeId v = r * side + col;
        if (col + 1 < side) e.emplace_back(v, v + 1);
        if (r + 1 < side) e.emplace_back(v, v + side);
      }
    }
    const PhysicalLayer grid{Graph::from_edges(side * side, e), {}};
    const double n = side * side;
    const double triples = n * (n - 1) * (n - 2) / 6;
    const double p2 = 2.0 * 2.0 / ((n - 1) * (n - 2));
    const auto c = mirror_layer(grid, 2.0, 11);
    check_closure(c);
    CHECK(std::abs(c.simplices().size() - n * 2.0 / 3.0) < 3 * std::sqrt(triples * p2 * (1 - p2)));
    for (const auto& [a, b] : grid.adj.edges()) CHECK(c.adjacency().has_edge(a, b));
  }
}

TEST_CASE("fully rewired Watts-Strogatz path length matches a random graph") {
  // Same n and edge count; sigma is the spread of the random-graph ensemble.
  std::vector<double> ws, rg;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    ws.push_back(mean_shortest_path(generate_ws(1000, 4, 1.0, seed).adj));
    rg.push_back(mean_shortest_path(gnm(1000, 2000, 1000 + seed)));
  }
  INFO("ws " << mean(ws) << " +- " << sd(ws) << ", G(n,m) " << mean(rg) << " +- " << sd(rg));
  CHECK(std::abs(mean(ws) - mean(rg)) < 3 * sd(rg));
}

TEST_CASE("fully rewired Watts-Strogatz path length matches a reference generator") {
  // networkx.watts_strogatz_graph(1000, 4, 1.0, seed=0..7):
  // mean 5.32114, sd 0.01544 over the 8 graphs.
  std::vector<double> ws;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    ws.push_back(mean_shortest_path(generate_ws(1000, 4, 1.0, seed).adj));
  }
  const double se = std::sqrt(0.01544 * 0.01544 / 8 + sd(ws) * sd(ws) / 50);
  CHECK(std::abs(mean(ws) - 5.32114) < 3 * se);
}
