#pragma once

// Enumeration and ordering machinery for the combinatorial side of the
// expansion: connected graphs and trees on [n], the lexicographic-style edge
// order, the Kruskal partition scheme with its E'(tau) sets, bipartite
// leaf-constrained star/cloud graphs, and hypergraphs with their bipartite
// representation.
//
// Vertex labels are 1-based; an edge {i,j} is stored with i < j.

#include <algorithm>
#include <bit>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <vector>

namespace renact::graphs {

using Edge = std::pair<int, int>;  // (i, j) with 1 <= i < j

inline Edge make_edge(int a, int b) {
  if (a == b) throw std::invalid_argument("make_edge: self-loop");
  if (a <= 0 || b <= 0) throw std::invalid_argument("make_edge: labels are 1-based");
  return a < b ? Edge{a, b} : Edge{b, a};
}

/// Strict total order on edges: {i,j} precedes {i',j'} iff j' < j, or j = j'
/// and i' < i. Edges with the larger max label come first, so star-cloud
/// edges (clouds carry the top labels) precede star-star edges.
inline bool edge_precedes(Edge e, Edge e2) {
  e = make_edge(e.first, e.second);
  e2 = make_edge(e2.first, e2.second);
  if (e2.second != e.second) return e2.second < e.second;
  return e2.first < e.first;
}

struct LabeledGraph {
  int n = 0;
  std::vector<Edge> edges;

  void validate() const {
    if (n < 1) throw std::invalid_argument("LabeledGraph: n must be >= 1");
    std::vector<Edge> sorted;
    sorted.reserve(edges.size());
    for (auto [a, b] : edges) {
      Edge e = make_edge(a, b);
      if (e.second > n) throw std::invalid_argument("LabeledGraph: vertex out of range");
      sorted.push_back(e);
    }
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
      throw std::invalid_argument("LabeledGraph: duplicate edge");
  }
};

namespace detail {

constexpr int kMaxMaskVertices = 8;  // C(8,2) = 28 edge bits

/// Bit position of edge {i,j}, i < j, grouped by the larger endpoint.
inline int edge_bit(int i, int j) {
  return (j - 1) * (j - 2) / 2 + (i - 1);
}

inline Edge edge_from_bit(int bit) {
  int j = 2;
  while ((j) * (j - 1) / 2 <= bit) ++j;
  const int i = bit - (j - 1) * (j - 2) / 2 + 1;
  return {i, j};
}

inline std::uint32_t mask_of(const LabeledGraph& g) {
  std::uint32_t m = 0;
  for (auto [a, b] : g.edges) {
    Edge e = make_edge(a, b);
    m |= 1u << edge_bit(e.first, e.second);
  }
  return m;
}

inline LabeledGraph graph_from_mask(int n, std::uint32_t mask) {
  LabeledGraph g{n, {}};
  for (std::uint32_t m = mask; m; m &= m - 1)
    g.edges.push_back(edge_from_bit(std::countr_zero(m)));
  return g;
}

/// Connectivity of the edge set `mask` as a spanning subgraph of [n].
inline bool mask_connected(int n, std::uint32_t mask) {
  if (n == 1) return true;
  std::array<std::uint32_t, kMaxMaskVertices + 1> adj{};
  for (std::uint32_t m = mask; m; m &= m - 1) {
    const auto [i, j] = edge_from_bit(std::countr_zero(m));
    adj[i] |= 1u << j;
    adj[j] |= 1u << i;
  }
  std::uint32_t seen = 1u << 1, frontier = 1u << 1;
  while (frontier) {
    std::uint32_t next = 0;
    for (std::uint32_t f = frontier; f; f &= f - 1)
      next |= adj[std::countr_zero(f)];
    frontier = next & ~seen;
    seen |= next;
  }
  const std::uint32_t all = (1u << (n + 1)) - 2u;  // bits 1..n
  return (seen & all) == all;
}

inline void check_enumeration_bound(int n, int n_max, const char* what) {
  if (n < 1) throw std::invalid_argument(std::string(what) + ": n must be >= 1");
  if (n > n_max || n > kMaxMaskVertices)
    throw std::invalid_argument(std::string(what) + ": n above enumeration bound");
}

}  // namespace detail

/// Visit every connected graph on [n] once, as an edge bitmask (bit layout
/// detail::edge_bit). Streaming form; n = 7 already has ~1.87M graphs.
template <class F>
void for_each_connected_mask(int n, F&& visit, int n_max = 7) {
  detail::check_enumeration_bound(n, n_max, "for_each_connected_mask");
  const int bits = n * (n - 1) / 2;  // <= 28 given the vertex bound
  const std::uint32_t top = 1u << bits;
  for (std::uint32_t mask = 0; mask < top; ++mask)
    if (detail::mask_connected(n, mask)) visit(mask);
}

inline std::uint64_t count_connected(int n, int n_max = 7) {
  std::uint64_t c = 0;
  for_each_connected_mask(n, [&](std::uint32_t) { ++c; }, n_max);
  return c;
}

inline std::vector<LabeledGraph> enumerate_connected(int n, int n_max = 7) {
  std::vector<LabeledGraph> out;
  for_each_connected_mask(
      n, [&](std::uint32_t m) { out.push_back(detail::graph_from_mask(n, m)); },
      n_max);
  return out;
}

/// All n^(n-2) labeled trees on [n], by Pruefer decoding.
inline std::vector<LabeledGraph> enumerate_trees(int n, int n_max = 7) {
  detail::check_enumeration_bound(n, n_max, "enumerate_trees");
  std::vector<LabeledGraph> out;
  if (n == 1) {
    out.push_back({1, {}});
    return out;
  }
  if (n == 2) {
    out.push_back({2, {{1, 2}}});
    return out;
  }
  std::vector<int> code(n - 2, 1);
  while (true) {
    std::vector<int> deg(n + 1, 1);
    for (int v : code) ++deg[v];
    std::vector<char> consumed(n + 1, 0);
    LabeledGraph tree{n, {}};
    for (int v : code) {
      int leaf = 0;
      for (int u = 1; u <= n; ++u)
        if (deg[u] == 1 && !consumed[u]) {
          leaf = u;
          break;
        }
      tree.edges.push_back(make_edge(leaf, v));
      consumed[leaf] = 1;
      --deg[v];
    }
    std::array<int, 2> rest{};
    int nrest = 0;
    for (int u = 1; u <= n; ++u)
      if (!consumed[u]) rest[nrest++] = u;
    tree.edges.push_back(make_edge(rest[0], rest[1]));
    std::sort(tree.edges.begin(), tree.edges.end());
    out.push_back(std::move(tree));

    int pos = n - 3;
    while (pos >= 0 && code[pos] == n) {
      code[pos] = 1;
      --pos;
    }
    if (pos < 0) break;
    ++code[pos];
  }
  return out;
}

/// Spanning tree of a connected graph: scan edges in increasing order under
/// edge_precedes, keep an edge iff it joins two components.
inline LabeledGraph kruskal_tree_of(const LabeledGraph& g) {
  g.validate();
  std::vector<Edge> order = g.edges;
  for (auto& e : order) e = make_edge(e.first, e.second);
  std::sort(order.begin(), order.end(), edge_precedes);

  std::vector<int> parent(g.n + 1);
  for (int v = 0; v <= g.n; ++v) parent[v] = v;
  std::function<int(int)> find = [&](int v) {
    return parent[v] == v ? v : parent[v] = find(parent[v]);
  };

  LabeledGraph tree{g.n, {}};
  for (const Edge& e : order) {
    const int a = find(e.first), b = find(e.second);
    if (a != b) {
      parent[a] = b;
      tree.edges.push_back(e);
    }
  }
  if (static_cast<int>(tree.edges.size()) != g.n - 1)
    throw std::invalid_argument("kruskal_tree_of: graph is disconnected");
  std::sort(tree.edges.begin(), tree.edges.end());
  return tree;
}

namespace detail {

/// Edges on the tau-path between a and b (tau must be a tree).
inline std::vector<Edge> tree_path_edges(const LabeledGraph& tau, int a, int b) {
  std::vector<std::vector<int>> adj(tau.n + 1);
  for (auto [i, j] : tau.edges) {
    adj[i].push_back(j);
    adj[j].push_back(i);
  }
  std::vector<int> parent(tau.n + 1, 0);
  std::vector<int> stack{a};
  parent[a] = a;
  while (!stack.empty()) {
    const int v = stack.back();
    stack.pop_back();
    for (int w : adj[v])
      if (parent[w] == 0) {
        parent[w] = v;
        stack.push_back(w);
      }
  }
  std::vector<Edge> path;
  for (int v = b; v != a; v = parent[v]) {
    if (parent[v] == 0) throw std::invalid_argument("tree_path_edges: disconnected");
    path.push_back(make_edge(v, parent[v]));
  }
  return path;
}

}  // namespace detail

/// E'(tau): non-tree edges {i,j} such that every tree edge on the tau-path
/// from i to j precedes {i,j} in the edge order. R(tau) has edge set
/// E(tau) u E'(tau); the intervals [tau, R(tau)] partition the connected
/// graphs and Kruskal recovers tau from any member.
inline std::vector<Edge> e_prime_of(const LabeledGraph& tau) {
  tau.validate();
  if (static_cast<int>(tau.edges.size()) != tau.n - 1)
    throw std::invalid_argument("e_prime_of: not a tree (wrong edge count)");
  std::vector<Edge> tree_edges = tau.edges;
  for (auto& e : tree_edges) e = make_edge(e.first, e.second);
  std::sort(tree_edges.begin(), tree_edges.end());
  // connectivity check doubles as cycle check given the edge count
  kruskal_tree_of(tau);

  std::vector<Edge> result;
  for (int j = 2; j <= tau.n; ++j)
    for (int i = 1; i < j; ++i) {
      const Edge cand{i, j};
      if (std::binary_search(tree_edges.begin(), tree_edges.end(), cand)) continue;
      bool all_smaller = true;
      for (const Edge& e : detail::tree_path_edges(tau, i, j))
        if (!edge_precedes(e, cand)) {
          all_smaller = false;
          break;
        }
      if (all_smaller) result.push_back(cand);
    }
  return result;
}

// ---------------------------------------------------------------------------
// Bipartite leaf-constrained graphs (stars 1..m, clouds m+1..m+r).

struct BipartiteStarGraph {
  int stars = 0;
  int clouds = 0;
  std::vector<Edge> edges;

  int n() const { return stars + clouds; }

  /// Invariants: no cloud-cloud edges; every cloud meets >= 2 distinct stars.
  void validate() const {
    LabeledGraph{n(), edges}.validate();
    std::vector<int> cloud_degree(clouds, 0);
    for (auto [a, b] : edges) {
      const Edge e = make_edge(a, b);
      if (e.first > stars)
        throw std::invalid_argument("BipartiteStarGraph: cloud-cloud edge");
      if (e.second > stars) ++cloud_degree[e.second - stars - 1];
    }
    for (int d : cloud_degree)
      if (d < 2)
        throw std::invalid_argument(
            "BipartiteStarGraph: cloud with fewer than two star edges");
  }
};

enum class StarClass { all, connected, trees };

/// Enumerate G*_{m,r} (all), C*_{m,r} (connected) or T*_{m,r} (trees).
/// For r = 0 these are just the graphs / connected graphs / trees on [m].
inline std::vector<BipartiteStarGraph> enumerate_bipartite_star(
    int m, int r, StarClass cls, int n_max = 7) {
  if (m < 0 || r < 0 || m + r < 1)
    throw std::invalid_argument("enumerate_bipartite_star: need m + r >= 1");
  if (m + r > n_max || m + r > detail::kMaxMaskVertices)
    throw std::invalid_argument("enumerate_bipartite_star: size above bound");

  // Per-cloud star neighborhoods of size >= 2.
  std::vector<std::uint32_t> neighborhoods;
  for (std::uint32_t s = 0; s < (1u << m); ++s)
    if (std::popcount(s) >= 2) neighborhoods.push_back(s);
  if (r > 0 && neighborhoods.empty()) return {};  // constraint unsatisfiable

  const int star_pairs = m * (m - 1) / 2;
  std::vector<BipartiteStarGraph> out;

  std::vector<int> choice(r, 0);
  while (true) {
    for (std::uint32_t ss = 0; ss < (1u << star_pairs); ++ss) {
      BipartiteStarGraph g{m, r, {}};
      std::uint32_t mask = 0;
      for (std::uint32_t b = ss; b; b &= b - 1) {
        const Edge e = detail::edge_from_bit(std::countr_zero(b));
        g.edges.push_back(e);
        mask |= 1u << detail::edge_bit(e.first, e.second);
      }
      for (int k = 0; k < r; ++k) {
        const std::uint32_t nb = neighborhoods[choice[k]];
        for (std::uint32_t sb = nb; sb; sb &= sb - 1) {
          const int s = std::countr_zero(sb) + 1;
          g.edges.push_back(make_edge(s, m + 1 + k));
          mask |= 1u << detail::edge_bit(s, m + 1 + k);
        }
      }
      const bool connected = detail::mask_connected(m + r, mask);
      const bool tree = connected &&
                        static_cast<int>(g.edges.size()) == m + r - 1;
      if (cls == StarClass::connected && !connected) continue;
      if (cls == StarClass::trees && !tree) continue;
      std::sort(g.edges.begin(), g.edges.end());
      out.push_back(std::move(g));
    }
    if (r == 0) break;
    int pos = r - 1;
    while (pos >= 0 && choice[pos] + 1 == static_cast<int>(neighborhoods.size())) {
      choice[pos] = 0;
      --pos;
    }
    if (pos < 0) break;
    ++choice[pos];
  }
  return out;
}

// ---------------------------------------------------------------------------
// Hypergraphs.

struct Hypergraph {
  int n = 0;
  std::vector<std::vector<int>> hyperedges;      // each sorted, size >= 2
  std::vector<int> multiplicities;               // empty means all 1

  int multiplicity(std::size_t e) const {
    return multiplicities.empty() ? 1 : multiplicities[e];
  }

  void validate() const {
    if (n < 1) throw std::invalid_argument("Hypergraph: n must be >= 1");
    for (const auto& he : hyperedges) {
      if (he.size() < 2)
        throw std::invalid_argument("Hypergraph: hyperedge of cardinality < 2");
      for (std::size_t i = 0; i < he.size(); ++i) {
        if (he[i] < 1 || he[i] > n)
          throw std::invalid_argument("Hypergraph: vertex out of range");
        if (i > 0 && he[i] <= he[i - 1])
          throw std::invalid_argument("Hypergraph: hyperedge not sorted/unique");
      }
    }
    if (!multiplicities.empty()) {
      if (multiplicities.size() != hyperedges.size())
        throw std::invalid_argument("Hypergraph: multiplicity count mismatch");
      for (int k : multiplicities)
        if (k < 1) throw std::invalid_argument("Hypergraph: multiplicity < 1");
    }
  }
};

namespace detail {

inline std::uint32_t vertex_mask(const std::vector<int>& he) {
  std::uint32_t m = 0;
  for (int v : he) m |= 1u << v;
  return m;
}

/// Connected via overlapping-hyperedge paths, with every vertex covered.
inline bool hypergraph_connected(int n, const std::vector<std::uint32_t>& edge_masks) {
  if (n == 1) return true;
  if (edge_masks.empty()) return false;
  std::uint32_t reach = edge_masks.front();
  bool grew = true;
  while (grew) {
    grew = false;
    for (const std::uint32_t em : edge_masks)
      if ((em & reach) && (em & ~reach)) {
        reach |= em;
        grew = true;
      }
  }
  const std::uint32_t all = ((1u << (n + 1)) - 1u) & ~1u;
  return reach == all;
}

}  // namespace detail

/// All connected hypergraphs on [m] (simple: each hyperedge at most once).
/// The hyperedge set grows doubly exponentially, hence the small bound.
inline std::vector<Hypergraph> enumerate_connected_hypergraphs(int m, int m_max = 4) {
  if (m < 2) throw std::invalid_argument("enumerate_connected_hypergraphs: m >= 2");
  if (m > m_max || m > 5)
    throw std::invalid_argument("enumerate_connected_hypergraphs: m above bound");

  std::vector<std::vector<int>> all_edges;   // E_m, subsets of size >= 2
  for (std::uint32_t s = 0; s < (1u << m); ++s) {
    if (std::popcount(s) < 2) continue;
    std::vector<int> he;
    for (std::uint32_t b = s; b; b &= b - 1) he.push_back(std::countr_zero(b) + 1);
    all_edges.push_back(std::move(he));
  }
  std::vector<std::uint32_t> all_masks;
  all_masks.reserve(all_edges.size());
  for (const auto& he : all_edges) all_masks.push_back(detail::vertex_mask(he));

  std::vector<Hypergraph> out;
  const std::uint32_t top = 1u << all_edges.size();
  for (std::uint32_t sub = 1; sub < top; ++sub) {
    std::vector<std::uint32_t> masks;
    for (std::uint32_t b = sub; b; b &= b - 1)
      masks.push_back(all_masks[std::countr_zero(b)]);
    if (!detail::hypergraph_connected(m, masks)) continue;
    Hypergraph h{m, {}, {}};
    for (std::uint32_t b = sub; b; b &= b - 1)
      h.hyperedges.push_back(all_edges[std::countr_zero(b)]);
    out.push_back(std::move(h));
  }
  return out;
}

/// Bipartite representation: one cloud per hyperedge copy, edge {s, cloud}
/// iff star s belongs to that hyperedge. Clouds inherit the hyperedge order,
/// repeated by multiplicity.
inline BipartiteStarGraph hypergraph_to_bipartite(const Hypergraph& h) {
  h.validate();
  BipartiteStarGraph g{h.n, 0, {}};
  for (std::size_t e = 0; e < h.hyperedges.size(); ++e)
    g.clouds += h.multiplicity(e);
  int cloud = h.n;
  for (std::size_t e = 0; e < h.hyperedges.size(); ++e)
    for (int copy = 0; copy < h.multiplicity(e); ++copy) {
      ++cloud;
      for (int s : h.hyperedges[e]) g.edges.push_back(make_edge(s, cloud));
    }
  std::sort(g.edges.begin(), g.edges.end());
  g.validate();
  return g;
}

// ---------------------------------------------------------------------------
// Partition-scheme report (CLI surface and acceptance check).

struct PartitionCheck {
  int n = 0;
  std::uint64_t connected_count = 0;
  std::uint64_t interval_sum = 0;  // sum over trees of 2^{#E'(tau)}
  bool every_graph_in_unique_interval = false;
  bool kruskal_matches_interval = false;

  bool pass() const {
    return connected_count == interval_sum && every_graph_in_unique_interval &&
           kruskal_matches_interval;
  }
};

inline PartitionCheck partition_check(int n, int n_max = 7) {
  detail::check_enumeration_bound(n, n_max, "partition_check");
  PartitionCheck report;
  report.n = n;

  const auto trees = enumerate_trees(n, n_max);
  struct Interval {
    std::uint32_t tree_mask;
    std::uint32_t reach_mask;  // E(tau) u E'(tau)
  };
  std::vector<Interval> intervals;
  intervals.reserve(trees.size());
  for (const auto& tau : trees) {
    const std::uint32_t tm = detail::mask_of(tau);
    std::uint32_t rm = tm;
    for (const Edge& e : e_prime_of(tau))
      rm |= 1u << detail::edge_bit(e.first, e.second);
    report.interval_sum += 1ull << std::popcount(rm & ~tm);
    intervals.push_back({tm, rm});
  }

  bool unique_ok = true, kruskal_ok = true;
  for_each_connected_mask(n, [&](std::uint32_t gm) {
    ++report.connected_count;
    int hits = 0;
    std::uint32_t hit_tree = 0;
    for (const auto& iv : intervals)
      if ((gm & iv.tree_mask) == iv.tree_mask && (gm & ~iv.reach_mask) == 0) {
        ++hits;
        hit_tree = iv.tree_mask;
      }
    if (hits != 1) unique_ok = false;
    else if (detail::mask_of(kruskal_tree_of(detail::graph_from_mask(n, gm))) != hit_tree)
      kruskal_ok = false;
  }, n_max);

  report.every_graph_in_unique_interval = unique_ok;
  report.kruskal_matches_interval = kruskal_ok;
  return report;
}

}  // namespace renact::graphs
