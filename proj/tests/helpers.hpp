#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "cpsim/network.hpp"
#include "cpsim/rng.hpp"

namespace testutil {

inline cpsim::Graph graph(cpsim::NodeId n, std::vector<cpsim::Edge> edges) {
  return cpsim::Graph::from_edges(n, edges);
}

/// Both layers carry the same graph; no simplices.
inline cpsim::MultiplexNetwork same_layers(cpsim::NodeId n,
                                           std::vector<cpsim::Edge> edges,
                                           std::vector<cpsim::Simplex> simplices = {}) {
  auto g = graph(n, edges);
  return cpsim::MultiplexNetwork(cpsim::CyberLayer(g, std::move(simplices)),
                                 cpsim::PhysicalLayer{g, {}});
}

inline std::vector<cpsim::Edge> ring(cpsim::NodeId n, cpsim::NodeId k) {
  std::vector<cpsim::Edge> e;
  for (cpsim::NodeId i = 0; i < n; ++i) {
    for (cpsim::NodeId d = 1; d <= k / 2; ++d) e.emplace_back(i, (i + d) % n);
  }
  return e;
}

/// Fresh directory under the system temp dir, removed on destruction.
struct TempDir {
  std::filesystem::path path;
  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    path = std::filesystem::temp_directory_path() /
           ("cpsim_test_" + tag + "_" + std::to_string(::getpid()) + "_" +
            std::to_string(counter++));
    std::filesystem::remove_all(path);
    std::filesystem::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path, ec);
  }
  std::filesystem::path write(const std::string& name, const std::string& text) const {
    const auto p = path / name;
    std::ofstream(p) << text;
    return p;
  }
};

}  // namespace testutil
