#pragma once

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace misvqa {

/// Largest node count representable by BitString / Graph.
inline constexpr int kMaxNodes = 63;

/// Subset of graph nodes. Bit i of `bits()` is node i; the text form lists
/// node 0 first, so "1010" selects nodes 0 and 2. The same word doubles as
/// the statevector basis index (qubit i = bit i).
class BitString {
 public:
  BitString() = default;
  BitString(int n, std::uint64_t bits);

  static BitString zeros(int n) { return BitString(n, 0); }
  static BitString parse(std::string_view text);

  int size() const { return n_; }
  std::uint64_t bits() const { return bits_; }
  bool test(int i) const { return (bits_ >> i) & 1U; }
  BitString with(int i, bool value) const;
  int weight() const;

  std::string to_string() const;

  /// Orders by size, then by text form (lexicographic on node 0 first).
  std::strong_ordering operator<=>(const BitString& other) const;
  bool operator==(const BitString& other) const = default;

 private:
  int n_ = 0;
  std::uint64_t bits_ = 0;
};

std::ostream& operator<<(std::ostream& os, const BitString& s);

inline int hamming_weight(const BitString& s) { return s.weight(); }

/// Undirected simple graph on nodes [0, n).
class Graph {
 public:
  using Edge = std::pair<int, int>;

  Graph() = default;
  /// Normalizes each edge to (min, max), sorts, and rejects self-loops,
  /// duplicates, and out-of-range endpoints.
  Graph(int n, std::vector<Edge> edges);

  int node_count() const { return n_; }
  const std::vector<Edge>& edges() const { return edges_; }
  std::size_t edge_count() const { return edges_.size(); }

  /// Neighbor set of `v` as a bitmask.
  std::uint64_t neighbor_mask(int v) const { return adjacency_[v]; }
  std::vector<int> neighbors(int v) const;
  int degree(int v) const;
  bool has_edge(int i, int j) const { return (adjacency_[i] >> j) & 1U; }
  bool is_connected() const;

  /// Number of edges with both endpoints set in `bits`.
  int violations(std::uint64_t bits) const;

  std::string to_edge_list() const;
  static Graph from_edge_list(std::string_view text);
  static Graph load(const std::string& path);
  void save(const std::string& path) const;

  static Graph complete(int n);
  static Graph ring(int n);
  static Graph path(int n);

  bool operator==(const Graph& other) const { return n_ == other.n_ && edges_ == other.edges_; }

 private:
  int n_ = 0;
  std::vector<Edge> edges_;
  std::vector<std::uint64_t> adjacency_;
};

/// G(n, p): each of the n(n-1)/2 pairs is an edge independently with
/// probability p. Pairs are visited in (i, j), i < j, row-major order so a
/// given seed always yields the same graph.
Graph erdos_renyi(int n, double p, std::uint64_t seed);

/// Redraws from the same stream until the sample is connected. Throws
/// CapabilityError after `max_attempts` disconnected draws.
Graph erdos_renyi_connected(int n, double p, std::uint64_t seed, int max_attempts = 10000);

bool is_independent(const Graph& g, const BitString& s);

struct MisResult {
  int size = 0;
  std::vector<BitString> witnesses;  // sorted
};

/// Exhaustive below 20 nodes, branch-and-bound up to 30.
MisResult exact_mis(const Graph& g);

/// Minimum-degree greedy: take a minimum-degree node of the remaining graph,
/// drop it and its neighbors, repeat. Ties are broken uniformly by `seed`.
BitString greedy_mis(const Graph& g, std::uint64_t seed);

}  // namespace misvqa
