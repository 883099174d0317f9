#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <utility>
#include <vector>

#include "cnids/matrix.hpp"

namespace cnids {

enum class TopologyKind { ring, torus2d, petersen, random_graph, custom };

const char* to_string(TopologyKind kind);

/// Undirected connected graph of NIDS modules, immutable after construction.
/// Node ids are 0-based; a torus cell (r, c) maps to id r * side + c. All
/// factories reject self-loops, collapse duplicate edges and require the
/// result to be connected.
class Topology {
public:
  /// Cycle 0-1-...-(n-1)-0. Requires n >= 3; every node has degree 2.
  static Topology ring(int n);

  /// side x side wraparound grid. Requires side >= 3 (a smaller side would
  /// collapse wraparound edges into duplicates); every node has degree 4.
  static Topology torus(int side);

  /// The 10-node, 15-edge, 3-regular Petersen graph: outer 5-cycle, inner
  /// pentagram, spokes between them.
  static Topology petersen();

  /// m distinct edges sampled uniformly from all unordered pairs, resampled
  /// wholesale until the graph is connected. Deterministic per seed.
  /// Requires n - 1 <= m <= n (n - 1) / 2.
  static Topology random(int n, int m, std::uint64_t seed);

  static Topology from_edges(int n, const std::vector<std::pair<int, int>>& edges,
                             TopologyKind kind = TopologyKind::custom);

  /// Edge-list text format: one `i j` pair per line, 0-based, whitespace
  /// separated; blank lines and `#` comments ignored. The node count is
  /// max index + 1.
  static Topology load_edge_list(std::istream& in);
  static Topology load_edge_list(const std::filesystem::path& path);

  int size() const { return static_cast<int>(adjacency_.size()); }
  int edge_count() const { return edge_count_; }
  TopologyKind kind() const { return kind_; }

  const std::vector<int>& neighbors(int i) const { return adjacency_[static_cast<std::size_t>(i)]; }
  int degree(int i) const { return static_cast<int>(neighbors(i).size()); }
  int max_degree() const;
  bool has_edge(int i, int j) const;

  /// Unweighted BFS hop counts from source to every node.
  std::vector<int> shortest_path_lengths(int source) const;

  /// All unordered edges as (i, j) with i < j, sorted.
  std::vector<std::pair<int, int>> edges() const;

private:
  Topology() = default;

  TopologyKind kind_ = TopologyKind::custom;
  std::vector<std::vector<int>> adjacency_;
  int edge_count_ = 0;
};

/// Graph Laplacian L = D - A: node degrees on the diagonal, -1 per edge.
/// Every row sums to zero.
SquareMatrix laplacian(const Topology& t);

}  // namespace cnids
