#include "cnids/topology.hpp"

#include <algorithm>
#include <fstream>
#include <queue>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>

#include "cnids/rng.hpp"

namespace cnids {

namespace {

bool connected(const std::vector<std::vector<int>>& adjacency) {
  const int n = static_cast<int>(adjacency.size());
  if (n == 0) return false;
  std::vector<char> seen(static_cast<std::size_t>(n), 0);
  std::queue<int> frontier;
  frontier.push(0);
  seen[0] = 1;
  int reached = 1;
  while (!frontier.empty()) {
    const int v = frontier.front();
    frontier.pop();
    for (int u : adjacency[static_cast<std::size_t>(v)]) {
      if (!seen[static_cast<std::size_t>(u)]) {
        seen[static_cast<std::size_t>(u)] = 1;
        ++reached;
        frontier.push(u);
      }
    }
  }
  return reached == n;
}

}  // namespace

const char* to_string(TopologyKind kind) {
  switch (kind) {
    case TopologyKind::ring: return "ring";
    case TopologyKind::torus2d: return "torus2d";
    case TopologyKind::petersen: return "petersen";
    case TopologyKind::random_graph: return "random";
    case TopologyKind::custom: return "custom";
  }
  return "custom";
}

Topology Topology::from_edges(int n, const std::vector<std::pair<int, int>>& edges,
                              TopologyKind kind) {
  if (n < 1) throw std::invalid_argument("topology needs at least one node");

  std::set<std::pair<int, int>> unique;
  for (const auto& [a, b] : edges) {
    if (a < 0 || a >= n || b < 0 || b >= n)
      throw std::invalid_argument("edge endpoint out of range: " + std::to_string(a) + " " +
                                  std::to_string(b));
    if (a == b) throw std::invalid_argument("self-loop on node " + std::to_string(a));
    unique.emplace(std::min(a, b), std::max(a, b));
  }

  Topology t;
  t.kind_ = kind;
  t.adjacency_.assign(static_cast<std::size_t>(n), {});
  for (const auto& [a, b] : unique) {
    t.adjacency_[static_cast<std::size_t>(a)].push_back(b);
    t.adjacency_[static_cast<std::size_t>(b)].push_back(a);
  }
  for (auto& nbrs : t.adjacency_) std::sort(nbrs.begin(), nbrs.end());
  t.edge_count_ = static_cast<int>(unique.size());

  if (!connected(t.adjacency_))
    throw std::invalid_argument("topology is not connected");
  return t;
}

Topology Topology::ring(int n) {
  if (n < 3) throw std::invalid_argument("ring needs at least 3 nodes, got " + std::to_string(n));
  std::vector<std::pair<int, int>> edges;
  edges.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) edges.emplace_back(i, (i + 1) % n);
  return from_edges(n, edges, TopologyKind::ring);
}

Topology Topology::torus(int side) {
  if (side < 3)
    throw std::invalid_argument("torus needs side >= 3, got " + std::to_string(side));
  const int n = side * side;
  std::vector<std::pair<int, int>> edges;
  edges.reserve(static_cast<std::size_t>(2 * n));
  const auto id = [side](int r, int c) { return r * side + c; };
  for (int r = 0; r < side; ++r) {
    for (int c = 0; c < side; ++c) {
      edges.emplace_back(id(r, c), id((r + 1) % side, c));
      edges.emplace_back(id(r, c), id(r, (c + 1) % side));
    }
  }
  return from_edges(n, edges, TopologyKind::torus2d);
}

Topology Topology::petersen() {
  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i < 5; ++i) {
    edges.emplace_back(i, (i + 1) % 5);          // outer cycle
    edges.emplace_back(i, i + 5);                // spoke
    edges.emplace_back(i + 5, (i + 2) % 5 + 5);  // inner pentagram
  }
  return from_edges(10, edges, TopologyKind::petersen);
}

Topology Topology::random(int n, int m, std::uint64_t seed) {
  if (n < 2) throw std::invalid_argument("random graph needs at least 2 nodes");
  const long long max_edges = static_cast<long long>(n) * (n - 1) / 2;
  if (m < n - 1 || m > max_edges)
    throw std::invalid_argument("random graph with " + std::to_string(n) + " nodes needs " +
                                std::to_string(n - 1) + ".." + std::to_string(max_edges) +
                                " edges, got " + std::to_string(m));

  std::vector<std::pair<int, int>> all_pairs;
  all_pairs.reserve(static_cast<std::size_t>(max_edges));
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b) all_pairs.emplace_back(a, b);

  Rng rng(seed);
  constexpr int kMaxAttempts = 20000;
  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    // partial Fisher-Yates: the first m slots become the sample
    for (int i = 0; i < m; ++i) {
      const std::size_t j =
          static_cast<std::size_t>(i) +
          static_cast<std::size_t>(rng.uniform_below(all_pairs.size() - static_cast<std::size_t>(i)));
      std::swap(all_pairs[static_cast<std::size_t>(i)], all_pairs[j]);
    }
    std::vector<std::vector<int>> adjacency(static_cast<std::size_t>(n));
    for (int i = 0; i < m; ++i) {
      const auto& [a, b] = all_pairs[static_cast<std::size_t>(i)];
      adjacency[static_cast<std::size_t>(a)].push_back(b);
      adjacency[static_cast<std::size_t>(b)].push_back(a);
    }
    if (connected(adjacency)) {
      std::vector<std::pair<int, int>> sample(all_pairs.begin(), all_pairs.begin() + m);
      return from_edges(n, sample, TopologyKind::random_graph);
    }
  }
  throw std::runtime_error("no connected graph found after " + std::to_string(kMaxAttempts) +
                           " samples; edge count is too close to a spanning tree");
}

Topology Topology::load_edge_list(std::istream& in) {
  std::vector<std::pair<int, int>> edges;
  int max_node = -1;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    long long a, b;
    if (!(fields >> a)) continue;  // blank or comment-only line
    long long extra;
    if (!(fields >> b) || (fields >> extra))
      throw std::runtime_error("edge list line " + std::to_string(line_no) +
                               ": expected exactly two node indices");
    if (a < 0 || b < 0)
      throw std::runtime_error("edge list line " + std::to_string(line_no) +
                               ": negative node index");
    edges.emplace_back(static_cast<int>(a), static_cast<int>(b));
    max_node = std::max(max_node, static_cast<int>(std::max(a, b)));
  }
  if (edges.empty()) throw std::runtime_error("edge list contains no edges");
  return from_edges(max_node + 1, edges, TopologyKind::custom);
}

Topology Topology::load_edge_list(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open edge list file: " + path.string());
  return load_edge_list(in);
}

int Topology::max_degree() const {
  int best = 0;
  for (const auto& nbrs : adjacency_) best = std::max(best, static_cast<int>(nbrs.size()));
  return best;
}

bool Topology::has_edge(int i, int j) const {
  const auto& nbrs = neighbors(i);
  return std::binary_search(nbrs.begin(), nbrs.end(), j);
}

std::vector<int> Topology::shortest_path_lengths(int source) const {
  const int n = size();
  if (source < 0 || source >= n)
    throw std::invalid_argument("source node " + std::to_string(source) + " out of range");
  std::vector<int> dist(static_cast<std::size_t>(n), -1);
  std::queue<int> frontier;
  dist[static_cast<std::size_t>(source)] = 0;
  frontier.push(source);
  while (!frontier.empty()) {
    const int v = frontier.front();
    frontier.pop();
    for (int u : neighbors(v)) {
      if (dist[static_cast<std::size_t>(u)] < 0) {
        dist[static_cast<std::size_t>(u)] = dist[static_cast<std::size_t>(v)] + 1;
        frontier.push(u);
      }
    }
  }
  return dist;  // connectivity is a construction invariant, no -1 can remain
}

std::vector<std::pair<int, int>> Topology::edges() const {
  std::vector<std::pair<int, int>> result;
  result.reserve(static_cast<std::size_t>(edge_count_));
  for (int i = 0; i < size(); ++i)
    for (int j : neighbors(i))
      if (i < j) result.emplace_back(i, j);
  return result;
}

SquareMatrix laplacian(const Topology& t) {
  const int n = t.size();
  SquareMatrix l(n);
  for (int i = 0; i < n; ++i) {
    l(i, i) = static_cast<double>(t.degree(i));
    for (int j : t.neighbors(i)) l(i, j) = -1.0;
  }
  return l;
}

}  // namespace cnids
