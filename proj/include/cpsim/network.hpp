#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace cpsim {

using NodeId = std::int32_t;
using Edge = std::pair<NodeId, NodeId>;

/// Thrown for malformed input files and impossible generator parameters.
class NetworkError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Undirected simple graph in compressed sparse row form. Neighbour lists
/// are sorted, so membership tests are logarithmic.
class Graph {
 public:
  Graph() = default;

  /// Builds from an edge list. Duplicates (in either orientation) are
  /// collapsed; self-loops are rejected.
  static Graph from_edges(NodeId n, std::span<const Edge> edges);

  NodeId size() const { return n_; }
  std::size_t edge_count() const { return nbrs_.size() / 2; }
  NodeId degree(NodeId i) const {
    return static_cast<NodeId>(offsets_[i + 1] - offsets_[i]);
  }
  std::span<const NodeId> neighbors(NodeId i) const {
    return {nbrs_.data() + offsets_[i], nbrs_.data() + offsets_[i + 1]};
  }
  bool has_edge(NodeId i, NodeId j) const;
  double mean_degree() const;

  /// Each edge once, as (i, j) with i < j, in lexicographic order.
  std::vector<Edge> edges() const;

  friend bool operator==(const Graph&, const Graph&) = default;

 private:
  NodeId n_ = 0;
  std::vector<std::size_t> offsets_{0};
  std::vector<NodeId> nbrs_;
};

/// Sorted node triple {a < b < c}.
using Simplex = std::array<NodeId, 3>;

/// Information layer: pairwise adjacency plus the 2-simplex roster.
class CyberLayer {
 public:
  CyberLayer() = default;

  /// Validates simplex closure and uniqueness; throws NetworkError.
  CyberLayer(Graph adjacency, std::vector<Simplex> simplices);

  NodeId size() const { return adj_.size(); }
  const Graph& adjacency() const { return adj_; }
  const std::vector<Simplex>& simplices() const { return simplices_; }

  /// Ids (into simplices()) of the simplices containing node i.
  std::span<const std::uint32_t> simplex_index(NodeId i) const {
    return {member_ids_.data() + member_offsets_[i],
            member_ids_.data() + member_offsets_[i + 1]};
  }
  /// The other two members of each simplex containing node i, in the same
  /// order as simplex_index(i).
  std::span<const Edge> simplex_partners(NodeId i) const {
    return {partners_.data() + member_offsets_[i],
            partners_.data() + member_offsets_[i + 1]};
  }
  double mean_simplex_membership() const;

  friend bool operator==(const CyberLayer& a, const CyberLayer& b) {
    return a.adj_ == b.adj_ && a.simplices_ == b.simplices_;
  }

 private:
  Graph adj_;
  std::vector<Simplex> simplices_;
  std::vector<std::size_t> member_offsets_{0};
  std::vector<std::uint32_t> member_ids_;
  std::vector<Edge> partners_;
};

/// Contact layer. original_ids is empty for generated graphs; for loaded
/// graphs original_ids[i] is the file's label of compacted node i.
struct PhysicalLayer {
  Graph adj;
  std::vector<std::int64_t> original_ids;

  NodeId size() const { return adj.size(); }
  NodeId degree(NodeId i) const { return adj.degree(i); }

  friend bool operator==(const PhysicalLayer&,
                         const PhysicalLayer&) = default;
};

/// Both layers over the same node set.
class MultiplexNetwork {
 public:
  MultiplexNetwork(CyberLayer cyber, PhysicalLayer physical);

  NodeId size() const { return physical_.size(); }
  const CyberLayer& cyber() const { return cyber_; }
  const PhysicalLayer& physical() const { return physical_; }

 private:
  CyberLayer cyber_;
  PhysicalLayer physical_;
};

struct ConnectionProbs {
  double p1;
  double p2;
};

/// Pairwise and per-triple probabilities giving mean cyber degree k1 and
/// mean simplex membership k2 once simplex edges are merged in.
ConnectionProbs compute_connection_probs(NodeId n, double k1, double k2);

/// ER graph with the simplices layered on top; closure edges are added only
/// where missing.
CyberLayer generate_simplicial_er(NodeId n, double k1, double k2,
                                  std::uint64_t seed);

/// Watts-Strogatz small world: ring of `k` nearest neighbours, then each
/// lattice edge has its far endpoint redirected with probability p.
PhysicalLayer generate_ws(NodeId n, NodeId k, double p, std::uint64_t seed);

/// Copies the physical adjacency into a cyber layer and adds simplices
/// calibrated to mean membership k2.
CyberLayer mirror_layer(const PhysicalLayer& physical, double k2,
                        std::uint64_t seed);

enum class EdgeListFormat { Auto, Whitespace, Comma };

struct LoadReport {
  std::size_t lines_read = 0;
  std::size_t self_loops_dropped = 0;
  std::size_t duplicates_collapsed = 0;
};

/// Reads "u v" pairs (extra columns ignored); '#' and '%' start comments.
/// Labels are compacted to 0..n-1 in increasing label order.
PhysicalLayer load_edge_list(const std::filesystem::path& path,
                             EdgeListFormat format = EdgeListFormat::Auto,
                             LoadReport* report = nullptr);

void write_edge_list(const Graph& g, const std::filesystem::path& path);
void write_simplices(const CyberLayer& c, const std::filesystem::path& path);
std::vector<Simplex> read_simplices(const std::filesystem::path& path);

/// Average local clustering coefficient (nodes of degree < 2 count as 0).
double clustering_coefficient(const Graph& g);

/// Mean shortest-path length over connected ordered pairs (BFS from every
/// node).
double mean_shortest_path(const Graph& g);

}  // namespace cpsim
