#include "cpsim/network.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <queue>
#include <random>
#include <sstream>
#include <unordered_set>

#include "cpsim/rng.hpp"

namespace cpsim {

// ---------------------------------------------------------------------------
// Graph

Graph Graph::from_edges(NodeId n, std::span<const Edge> edges) {
  if (n < 0) throw NetworkError("graph: negative node count");
  std::vector<Edge> directed;
  directed.reserve(edges.size() * 2);
  for (auto [u, v] : edges) {
    if (u < 0 || v < 0 || u >= n || v >= n) {
      throw NetworkError("graph: edge (" + std::to_string(u) + ", " +
                         std::to_string(v) + ") out of range for n=" +
                         std::to_string(n));
    }
    if (u == v) {
      throw NetworkError("graph: self-loop at node " + std::to_string(u));
    }
    directed.emplace_back(u, v);
    directed.emplace_back(v, u);
  }
  std::sort(directed.begin(), directed.end());
  directed.erase(std::unique(directed.begin(), directed.end()), directed.end());

  Graph g;
  g.n_ = n;
  g.offsets_.assign(static_cast<std::size_t>(n) + 1, 0);
  g.nbrs_.reserve(directed.size());
  for (auto [u, v] : directed) {
    ++g.offsets_[u + 1];
    g.nbrs_.push_back(v);
  }
  for (NodeId i = 0; i < n; ++i) g.offsets_[i + 1] += g.offsets_[i];
  return g;
}

bool Graph::has_edge(NodeId i, NodeId j) const {
  auto nb = neighbors(i);
  return std::binary_search(nb.begin(), nb.end(), j);
}

double Graph::mean_degree() const {
  return n_ == 0 ? 0.0 : static_cast<double>(nbrs_.size()) / n_;
}

std::vector<Edge> Graph::edges() const {
  std::vector<Edge> out;
  out.reserve(edge_count());
  for (NodeId i = 0; i < n_; ++i) {
    for (NodeId j : neighbors(i)) {
      if (i < j) out.emplace_back(i, j);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Layers

CyberLayer::CyberLayer(Graph adjacency, std::vector<Simplex> simplices)
    : adj_(std::move(adjacency)), simplices_(std::move(simplices)) {
  const NodeId n = adj_.size();
  for (auto& s : simplices_) {
    std::sort(s.begin(), s.end());
    if (s[0] < 0 || s[2] >= n) {
      throw NetworkError("cyber layer: simplex node out of range");
    }
    if (s[0] == s[1] || s[1] == s[2]) {
      throw NetworkError("cyber layer: simplex {" + std::to_string(s[0]) +
                         "," + std::to_string(s[1]) + "," +
                         std::to_string(s[2]) +
                         "} has repeated nodes");
    }
    if (!adj_.has_edge(s[0], s[1]) || !adj_.has_edge(s[1], s[2]) ||
        !adj_.has_edge(s[0], s[2])) {
      throw NetworkError("cyber layer: simplex {" + std::to_string(s[0]) +
                         "," + std::to_string(s[1]) + "," +
                         std::to_string(s[2]) + "} is not closed");
    }
  }
  {
    auto sorted = simplices_;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
      throw NetworkError("cyber layer: duplicate simplex");
    }
  }

  member_offsets_.assign(static_cast<std::size_t>(n) + 1, 0);
  for (const auto& s : simplices_) {
    for (NodeId v : s) ++member_offsets_[v + 1];
  }
  for (NodeId i = 0; i < n; ++i) member_offsets_[i + 1] += member_offsets_[i];
  member_ids_.resize(member_offsets_.back());
  partners_.resize(member_offsets_.back());
  std::vector<std::size_t> cursor(member_offsets_.begin(),
                                  member_offsets_.end() - 1);
  for (std::uint32_t id = 0; id < simplices_.size(); ++id) {
    const auto& s = simplices_[id];
    const Edge others[3] = {{s[1], s[2]}, {s[0], s[2]}, {s[0], s[1]}};
    for (int m = 0; m < 3; ++m) {
      const auto slot = cursor[s[m]]++;
      member_ids_[slot] = id;
      partners_[slot] = others[m];
    }
  }
}

double CyberLayer::mean_simplex_membership() const {
  return size() == 0 ? 0.0 : 3.0 * simplices_.size() / size();
}

MultiplexNetwork::MultiplexNetwork(CyberLayer cyber, PhysicalLayer physical)
    : cyber_(std::move(cyber)), physical_(std::move(physical)) {
  if (cyber_.size() != physical_.size()) {
    throw NetworkError("multiplex: layer sizes differ (cyber " +
                       std::to_string(cyber_.size()) + ", physical " +
                       std::to_string(physical_.size()) + ")");
  }
}

// ---------------------------------------------------------------------------
// Generators

ConnectionProbs compute_connection_probs(NodeId n, double k1, double k2) {
  if (n < 3) throw NetworkError("connection probs: need n >= 3");
  const double nm1 = n - 1.0;
  const double nm2 = n - 2.0;
  if (!(k1 > 0.0 && k1 < nm1)) {
    throw NetworkError("connection probs: k1 must lie in (0, n-1)");
  }
  if (!(k2 >= 0.0)) throw NetworkError("connection probs: k2 must be >= 0");
  const double p1 = (k1 - 2.0 * k2) / (nm1 - 2.0 * k2);
  const double p2 = 2.0 * k2 / (nm1 * nm2);
  if (!(p1 >= 0.0)) {
    throw NetworkError("connection probs: p1 = " + std::to_string(p1) +
                       " < 0 (requires 2*k2 <= k1)");
  }
  if (!(p1 <= 1.0)) {
    throw NetworkError("connection probs: p1 = " + std::to_string(p1) +
                       " > 1");
  }
  if (!(p2 <= 1.0)) {
    throw NetworkError("connection probs: p2 = " + std::to_string(p2) +
                       " > 1");
  }
  return {p1, p2};
}

namespace {

// S ~ Binomial(C(n,3), p2), then S distinct uniform triples.
std::vector<Simplex> sample_simplices(NodeId n, double p2, Rng& rng) {
  if (p2 <= 0.0 || n < 3) return {};
  const auto nn = static_cast<std::int64_t>(n);
  const std::int64_t triples = nn * (nn - 1) * (nn - 2) / 6;
  std::binomial_distribution<std::int64_t> count_dist(triples, p2);
  const std::int64_t count = count_dist(rng);

  std::vector<Simplex> out;
  out.reserve(static_cast<std::size_t>(count));
  std::unordered_set<std::uint64_t> seen;
  seen.reserve(static_cast<std::size_t>(count) * 2);
  const auto un = static_cast<std::uint64_t>(n);
  while (static_cast<std::int64_t>(out.size()) < count) {
    Simplex s{};
    s[0] = static_cast<NodeId>(uniform_below(rng, un));
    do {
      s[1] = static_cast<NodeId>(uniform_below(rng, un));
    } while (s[1] == s[0]);
    do {
      s[2] = static_cast<NodeId>(uniform_below(rng, un));
    } while (s[2] == s[0] || s[2] == s[1]);
    std::sort(s.begin(), s.end());
    const std::uint64_t key =
        (static_cast<std::uint64_t>(s[0]) * un + s[1]) * un + s[2];
    if (seen.insert(key).second) out.push_back(s);
  }
  return out;
}

CyberLayer close_simplices(NodeId n, std::vector<Edge> edges,
                           std::vector<Simplex> simplices) {
  for (const auto& s : simplices) {
    edges.emplace_back(s[0], s[1]);
    edges.emplace_back(s[1], s[2]);
    edges.emplace_back(s[0], s[2]);
  }
  // from_edges collapses the duplicates, so existing edges are kept once.
  return CyberLayer(Graph::from_edges(n, edges), std::move(simplices));
}

}  // namespace

CyberLayer generate_simplicial_er(NodeId n, double k1, double k2,
                                  std::uint64_t seed) {
  const auto probs = compute_connection_probs(n, k1, k2);
  Rng edge_rng(derive_seed(seed, "er-edges"));
  Rng simplex_rng(derive_seed(seed, "er-simplices"));

  std::vector<Edge> edges;
  edges.reserve(static_cast<std::size_t>(n * k1 / 2 * 1.2) + 16);
  for (NodeId i = 0; i < n; ++i) {
    for (NodeId j = i + 1; j < n; ++j) {
      if (uniform01(edge_rng) < probs.p1) edges.emplace_back(i, j);
    }
  }
  return close_simplices(n, std::move(edges),
                         sample_simplices(n, probs.p2, simplex_rng));
}

PhysicalLayer generate_ws(NodeId n, NodeId k, double p, std::uint64_t seed) {
  if (k <= 0 || k % 2 != 0) {
    throw NetworkError("watts-strogatz: K must be a positive even number");
  }
  if (n <= k) throw NetworkError("watts-strogatz: need n > K");
  if (!(p >= 0.0 && p <= 1.0)) {
    throw NetworkError("watts-strogatz: rewiring probability outside [0,1]");
  }
  Rng rng(derive_seed(seed, "ws"));

  std::vector<std::vector<NodeId>> adj(static_cast<std::size_t>(n));
  auto connected = [&](NodeId a, NodeId b) {
    return std::find(adj[a].begin(), adj[a].end(), b) != adj[a].end();
  };
  auto unlink = [&](NodeId a, NodeId b) {
    adj[a].erase(std::find(adj[a].begin(), adj[a].end(), b));
    adj[b].erase(std::find(adj[b].begin(), adj[b].end(), a));
  };
  for (NodeId u = 0; u < n; ++u) {
    for (NodeId j = 1; j <= k / 2; ++j) {
      const NodeId v = (u + j) % n;
      adj[u].push_back(v);
      adj[v].push_back(u);
    }
  }
  // Lattice-distance-major sweep, one draw per lattice edge.
  for (NodeId j = 1; j <= k / 2; ++j) {
    for (NodeId u = 0; u < n; ++u) {
      const NodeId v = (u + j) % n;
      if (uniform01(rng) >= p) continue;
      if (!connected(u, v)) continue;  // already rewired away
      if (static_cast<NodeId>(adj[u].size()) >= n - 1) continue;
      NodeId w;
      do {
        w = static_cast<NodeId>(uniform_below(rng, static_cast<std::uint64_t>(n)));
      } while (w == u || connected(u, w));
      unlink(u, v);
      adj[u].push_back(w);
      adj[w].push_back(u);
    }
  }

  std::vector<Edge> edges;
  edges.reserve(static_cast<std::size_t>(n) * k / 2);
  for (NodeId u = 0; u < n; ++u) {
    for (NodeId v : adj[u]) {
      if (u < v) edges.emplace_back(u, v);
    }
  }
  return PhysicalLayer{Graph::from_edges(n, edges), {}};
}

CyberLayer mirror_layer(const PhysicalLayer& physical, double k2,
                        std::uint64_t seed) {
  const NodeId n = physical.size();
  if (k2 < 0.0) throw NetworkError("mirror layer: k2 must be >= 0");
  double p2 = 0.0;
  if (k2 > 0.0) {
    if (n < 3) throw NetworkError("mirror layer: simplices need n >= 3");
    p2 = 2.0 * k2 / ((n - 1.0) * (n - 2.0));
    if (p2 > 1.0) throw NetworkError("mirror layer: k2 too large for n");
  }
  Rng simplex_rng(derive_seed(seed, "mirror-simplices"));
  return close_simplices(n, physical.adj.edges(),
                         sample_simplices(n, p2, simplex_rng));
}

// ---------------------------------------------------------------------------
// Files

namespace {

std::vector<std::string_view> split_fields(std::string_view line,
                                           EdgeListFormat format) {
  auto is_sep = [format](char c) {
    const bool ws = c == ' ' || c == '\t' || c == '\r';
    switch (format) {
      case EdgeListFormat::Whitespace: return ws;
      case EdgeListFormat::Comma: return c == ',' || c == '\r';
      case EdgeListFormat::Auto: return ws || c == ',';
    }
    return ws;
  };
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && is_sep(line[i])) ++i;
    if (i >= line.size()) break;
    std::size_t j = i;
    while (j < line.size() && !is_sep(line[j])) ++j;
    auto tok = line.substr(i, j - i);
    if (format == EdgeListFormat::Comma) {
      while (!tok.empty() && (tok.front() == ' ' || tok.front() == '\t')) {
        tok.remove_prefix(1);
      }
      while (!tok.empty() && (tok.back() == ' ' || tok.back() == '\t')) {
        tok.remove_suffix(1);
      }
    }
    out.push_back(tok);
    i = j;
  }
  return out;
}

bool parse_int(std::string_view tok, std::int64_t& value) {
  const auto* end = tok.data() + tok.size();
  auto [ptr, ec] = std::from_chars(tok.data(), end, value);
  return ec == std::errc{} && ptr == end;
}

bool is_blank_or_comment(std::string_view line) {
  const auto first = line.find_first_not_of(" \t\r");
  return first == std::string_view::npos || line[first] == '#' ||
         line[first] == '%';
}

}  // namespace

PhysicalLayer load_edge_list(const std::filesystem::path& path,
                             EdgeListFormat format, LoadReport* report) {
  std::ifstream in(path);
  if (!in) throw NetworkError("edge list: cannot open " + path.string());

  LoadReport local;
  std::vector<std::pair<std::int64_t, std::int64_t>> raw;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (is_blank_or_comment(line)) continue;
    ++local.lines_read;
    const auto fields = split_fields(line, format);
    std::int64_t u = 0;
    std::int64_t v = 0;
    if (fields.size() < 2 || !parse_int(fields[0], u) ||
        !parse_int(fields[1], v)) {
      throw NetworkError(path.string() + ":" + std::to_string(line_no) +
                         ": malformed edge line '" + line + "'");
    }
    raw.emplace_back(u, v);
  }
  if (raw.empty()) {
    throw NetworkError("edge list: " + path.string() + " contains no edges");
  }

  std::vector<std::int64_t> labels;
  labels.reserve(raw.size() * 2);
  for (auto [u, v] : raw) {
    labels.push_back(u);
    labels.push_back(v);
  }
  std::sort(labels.begin(), labels.end());
  labels.erase(std::unique(labels.begin(), labels.end()), labels.end());
  if (labels.size() >
      static_cast<std::size_t>(std::numeric_limits<NodeId>::max())) {
    throw NetworkError("edge list: too many nodes");
  }
  auto compact = [&](std::int64_t label) {
    return static_cast<NodeId>(
        std::lower_bound(labels.begin(), labels.end(), label) -
        labels.begin());
  };

  std::vector<Edge> edges;
  edges.reserve(raw.size());
  for (auto [u, v] : raw) {
    if (u == v) {
      ++local.self_loops_dropped;
      continue;
    }
    NodeId a = compact(u);
    NodeId b = compact(v);
    if (a > b) std::swap(a, b);
    edges.emplace_back(a, b);
  }
  const auto n = static_cast<NodeId>(labels.size());
  Graph g = Graph::from_edges(n, edges);
  local.duplicates_collapsed = edges.size() - g.edge_count();
  if (report) *report = local;
  return PhysicalLayer{std::move(g), std::move(labels)};
}

void write_edge_list(const Graph& g, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw NetworkError("cannot write " + path.string());
  out << "# n=" << g.size() << " m=" << g.edge_count() << '\n';
  for (auto [u, v] : g.edges()) out << u << ' ' << v << '\n';
}

void write_simplices(const CyberLayer& c, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw NetworkError("cannot write " + path.string());
  out << "# simplices=" << c.simplices().size() << '\n';
  for (const auto& s : c.simplices()) {
    out << s[0] << ' ' << s[1] << ' ' << s[2] << '\n';
  }
}

std::vector<Simplex> read_simplices(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw NetworkError("simplex file: cannot open " + path.string());
  std::vector<Simplex> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (is_blank_or_comment(line)) continue;
    const auto fields = split_fields(line, EdgeListFormat::Auto);
    Simplex s{};
    bool ok = fields.size() == 3;
    for (std::size_t m = 0; ok && m < 3; ++m) {
      std::int64_t v = 0;
      ok = parse_int(fields[m], v) && v >= 0 &&
           v <= std::numeric_limits<NodeId>::max();
      s[m] = static_cast<NodeId>(v);
    }
    if (!ok) {
      throw NetworkError(path.string() + ":" + std::to_string(line_no) +
                         ": malformed simplex line '" + line + "'");
    }
    out.push_back(s);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Structural statistics

double clustering_coefficient(const Graph& g) {
  if (g.size() == 0) return 0.0;
  double total = 0.0;
  for (NodeId i = 0; i < g.size(); ++i) {
    const auto nb = g.neighbors(i);
    const auto d = nb.size();
    if (d < 2) continue;
    std::size_t links = 0;
    for (std::size_t a = 0; a < d; ++a) {
      for (std::size_t b = a + 1; b < d; ++b) {
        if (g.has_edge(nb[a], nb[b])) ++links;
      }
    }
    total += 2.0 * links / (static_cast<double>(d) * (d - 1));
  }
  return total / g.size();
}

double mean_shortest_path(const Graph& g) {
  const NodeId n = g.size();
  std::vector<NodeId> dist(static_cast<std::size_t>(n));
  std::vector<NodeId> frontier;
  double sum = 0.0;
  std::uint64_t pairs = 0;
  for (NodeId s = 0; s < n; ++s) {
    std::fill(dist.begin(), dist.end(), -1);
    dist[s] = 0;
    frontier.assign(1, s);
    for (std::size_t head = 0; head < frontier.size(); ++head) {
      const NodeId u = frontier[head];
      for (NodeId v : g.neighbors(u)) {
        if (dist[v] < 0) {
          dist[v] = dist[u] + 1;
          sum += dist[v];
          ++pairs;
          frontier.push_back(v);
        }
      }
    }
  }
  return pairs == 0 ? 0.0 : sum / static_cast<double>(pairs);
}

}  // namespace cpsim
