#include "misvqa/graph.hpp"

#include <algorithm>
#include <bit>
#include <fstream>
#include <functional>
#include <limits>
#include <ostream>
#include <sstream>

#include "misvqa/errors.hpp"
#include "misvqa/random.hpp"

namespace misvqa {

namespace {

std::uint64_t low_mask(int n) { return n >= 64 ? ~0ULL : ((1ULL << n) - 1); }

void check_node_count(int n) {
  if (n < 1 || n > kMaxNodes) {
    throw ParameterError("node count must be in [1, " + std::to_string(kMaxNodes) + "], got " +
                         std::to_string(n));
  }
}

}  // namespace

BitString::BitString(int n, std::uint64_t bits) : n_(n), bits_(bits) {
  if (n < 0 || n > kMaxNodes) throw ParameterError("bitstring length out of range");
  if ((bits & ~low_mask(n)) != 0) throw ParameterError("bitstring has bits beyond its length");
}

BitString BitString::parse(std::string_view text) {
  if (text.size() > static_cast<std::size_t>(kMaxNodes)) throw ParameterError("bitstring too long");
  std::uint64_t bits = 0;
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] == '1') {
      bits |= 1ULL << i;
    } else if (text[i] != '0') {
      throw ParameterError("bitstring may contain only '0' and '1': " + std::string(text));
    }
  }
  return BitString(static_cast<int>(text.size()), bits);
}

BitString BitString::with(int i, bool value) const {
  if (i < 0 || i >= n_) throw ParameterError("bit index out of range");
  return BitString(n_, value ? (bits_ | (1ULL << i)) : (bits_ & ~(1ULL << i)));
}

int BitString::weight() const { return std::popcount(bits_); }

std::string BitString::to_string() const {
  std::string out(static_cast<std::size_t>(n_), '0');
  for (int i = 0; i < n_; ++i) {
    if (test(i)) out[static_cast<std::size_t>(i)] = '1';
  }
  return out;
}

std::strong_ordering BitString::operator<=>(const BitString& other) const {
  if (auto c = n_ <=> other.n_; c != 0) return c;
  // Text order compares node 0 first; the lowest differing node decides.
  const std::uint64_t diff = bits_ ^ other.bits_;
  if (diff == 0) return std::strong_ordering::equal;
  const int first = std::countr_zero(diff);
  return test(first) ? std::strong_ordering::greater : std::strong_ordering::less;
}

std::ostream& operator<<(std::ostream& os, const BitString& s) { return os << s.to_string(); }

Graph::Graph(int n, std::vector<Edge> edges) : n_(n), adjacency_(static_cast<std::size_t>(n), 0) {
  check_node_count(n);
  for (auto& [a, b] : edges) {
    if (a < 0 || b < 0 || a >= n || b >= n) {
      throw ParameterError("edge (" + std::to_string(a) + ", " + std::to_string(b) + ") out of range");
    }
    if (a == b) throw ParameterError("self-loop on node " + std::to_string(a));
    if (a > b) std::swap(a, b);
  }
  std::sort(edges.begin(), edges.end());
  if (std::adjacent_find(edges.begin(), edges.end()) != edges.end()) {
    throw ParameterError("duplicate edge");
  }
  for (const auto& [a, b] : edges) {
    adjacency_[static_cast<std::size_t>(a)] |= 1ULL << b;
    adjacency_[static_cast<std::size_t>(b)] |= 1ULL << a;
  }
  edges_ = std::move(edges);
}

std::vector<int> Graph::neighbors(int v) const {
  std::vector<int> out;
  for (std::uint64_t m = adjacency_[static_cast<std::size_t>(v)]; m != 0; m &= m - 1) {
    out.push_back(std::countr_zero(m));
  }
  return out;
}

int Graph::degree(int v) const { return std::popcount(adjacency_[static_cast<std::size_t>(v)]); }

bool Graph::is_connected() const {
  std::uint64_t seen = 1;
  std::uint64_t frontier = 1;
  while (frontier != 0) {
    std::uint64_t next = 0;
    for (std::uint64_t m = frontier; m != 0; m &= m - 1) {
      next |= adjacency_[static_cast<std::size_t>(std::countr_zero(m))];
    }
    frontier = next & ~seen;
    seen |= next;
  }
  return seen == low_mask(n_);
}

int Graph::violations(std::uint64_t bits) const {
  int count = 0;
  for (std::uint64_t m = bits; m != 0; m &= m - 1) {
    const int v = std::countr_zero(m);
    // Count each edge once, from its lower endpoint.
    count += std::popcount(adjacency_[static_cast<std::size_t>(v)] & bits & ~low_mask(v + 1));
  }
  return count;
}

std::string Graph::to_edge_list() const {
  std::ostringstream os;
  os << "n " << n_ << '\n';
  for (const auto& [a, b] : edges_) os << a << ' ' << b << '\n';
  return os.str();
}

Graph Graph::from_edge_list(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  int n = -1;
  std::vector<Edge> edges;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    std::string first;
    if (!(fields >> first)) continue;
    if (n < 0) {
      if (first != "n" || !(fields >> n)) {
        throw ParameterError("edge list must start with 'n <count>' (line " + std::to_string(line_no) + ")");
      }
      continue;
    }
    int a = 0;
    int b = 0;
    try {
      a = std::stoi(first);
    } catch (const std::exception&) {
      throw ParameterError("bad edge on line " + std::to_string(line_no));
    }
    if (!(fields >> b)) throw ParameterError("bad edge on line " + std::to_string(line_no));
    edges.emplace_back(a, b);
  }
  if (n < 0) throw ParameterError("edge list has no 'n <count>' header");
  return Graph(n, std::move(edges));
}

Graph Graph::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParameterError("cannot open graph file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return from_edge_list(buf.str());
}

void Graph::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw ParameterError("cannot write graph file " + path);
  out << to_edge_list();
}

Graph Graph::complete(int n) {
  std::vector<Edge> edges;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) edges.emplace_back(i, j);
  }
  return Graph(n, std::move(edges));
}

Graph Graph::ring(int n) {
  std::vector<Edge> edges;
  for (int i = 0; i < n; ++i) {
    if (n > 2 || i == 0) edges.emplace_back(i, (i + 1) % n);
  }
  if (n == 1) edges.clear();
  return Graph(n, std::move(edges));
}

Graph Graph::path(int n) {
  std::vector<Edge> edges;
  for (int i = 0; i + 1 < n; ++i) edges.emplace_back(i, i + 1);
  return Graph(n, std::move(edges));
}

namespace {

Graph draw_gnp(int n, double p, Rng& rng) {
  std::vector<Graph::Edge> edges;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (uniform01(rng) < p) edges.emplace_back(i, j);
    }
  }
  return Graph(n, std::move(edges));
}

void check_probability(double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw ParameterError("edge probability must be in [0, 1]");
}

}  // namespace

Graph erdos_renyi(int n, double p, std::uint64_t seed) {
  check_node_count(n);
  check_probability(p);
  Rng rng(seed);
  return draw_gnp(n, p, rng);
}

Graph erdos_renyi_connected(int n, double p, std::uint64_t seed, int max_attempts) {
  check_node_count(n);
  check_probability(p);
  Rng rng(seed);
  for (int attempt = 0; attempt < max_attempts; ++attempt) {
    Graph g = draw_gnp(n, p, rng);
    if (g.is_connected()) return g;
  }
  throw CapabilityError("no connected G(" + std::to_string(n) + ", " + std::to_string(p) + ") sample after " +
                        std::to_string(max_attempts) + " attempts");
}

bool is_independent(const Graph& g, const BitString& s) {
  if (s.size() != g.node_count()) {
    throw ParameterError("bitstring length " + std::to_string(s.size()) + " does not match graph size " +
                         std::to_string(g.node_count()));
  }
  const std::uint64_t bits = s.bits();
  for (std::uint64_t m = bits; m != 0; m &= m - 1) {
    if (g.neighbor_mask(std::countr_zero(m)) & bits) return false;
  }
  return true;
}

namespace {

constexpr int kExhaustiveLimit = 20;
constexpr int kExactLimit = 30;

MisResult exhaustive_mis(const Graph& g) {
  const int n = g.node_count();
  MisResult out;
  out.size = -1;
  const std::uint64_t total = 1ULL << n;
  for (std::uint64_t z = 0; z < total; ++z) {
    const BitString s(n, z);
    const int w = s.weight();
    if (w < out.size || !is_independent(g, s)) continue;
    if (w > out.size) {
      out.size = w;
      out.witnesses.clear();
    }
    out.witnesses.push_back(s);
  }
  return out;
}

// Enumerates independent sets by branching on the lowest candidate node:
// either it joins (its neighbors leave the candidate pool) or it is dropped.
// Branches whose optimistic size cannot reach the incumbent are cut.
MisResult branch_and_bound_mis(const Graph& g) {
  const int n = g.node_count();
  MisResult out;
  out.size = 0;
  std::vector<std::uint64_t> found;

  std::function<void(std::uint64_t, std::uint64_t, int)> recurse =
      [&](std::uint64_t chosen, std::uint64_t candidates, int size) {
        if (size + std::popcount(candidates) < out.size) return;
        if (candidates == 0) {
          if (size > out.size) {
            out.size = size;
            found.clear();
          }
          found.push_back(chosen);
          return;
        }
        const int v = std::countr_zero(candidates);
        const std::uint64_t bit = 1ULL << v;
        recurse(chosen | bit, candidates & ~bit & ~g.neighbor_mask(v), size + 1);
        recurse(chosen, candidates & ~bit, size);
      };
  recurse(0, low_mask(n), 0);

  // Non-maximal sets can tie at smaller sizes before the incumbent grows;
  // keep only the final size.
  for (std::uint64_t bits : found) {
    if (std::popcount(bits) == out.size) out.witnesses.emplace_back(n, bits);
  }
  std::sort(out.witnesses.begin(), out.witnesses.end());
  out.witnesses.erase(std::unique(out.witnesses.begin(), out.witnesses.end()), out.witnesses.end());
  return out;
}

}  // namespace

MisResult exact_mis(const Graph& g) {
  if (g.node_count() > kExactLimit) {
    throw CapabilityError("exact_mis supports at most " + std::to_string(kExactLimit) + " nodes");
  }
  MisResult out = g.node_count() < kExhaustiveLimit ? exhaustive_mis(g) : branch_and_bound_mis(g);
  std::sort(out.witnesses.begin(), out.witnesses.end());
  return out;
}

BitString greedy_mis(const Graph& g, std::uint64_t seed) {
  const int n = g.node_count();
  Rng rng(seed);
  std::uint64_t remaining = low_mask(n);
  std::uint64_t chosen = 0;
  std::vector<int> ties;
  while (remaining != 0) {
    int best_degree = std::numeric_limits<int>::max();
    ties.clear();
    for (std::uint64_t m = remaining; m != 0; m &= m - 1) {
      const int v = std::countr_zero(m);
      const int d = std::popcount(g.neighbor_mask(v) & remaining);
      if (d < best_degree) {
        best_degree = d;
        ties.clear();
      }
      if (d == best_degree) ties.push_back(v);
    }
    std::uniform_int_distribution<std::size_t> pick(0, ties.size() - 1);
    const int v = ties[pick(rng)];
    chosen |= 1ULL << v;
    remaining &= ~((1ULL << v) | g.neighbor_mask(v));
  }
  return BitString(n, chosen);
}

}  // namespace misvqa
