#include <algorithm>
#include <numeric>
#include <unordered_map>

#include "skillgraph/error.hpp"
#include "skillgraph/graph.hpp"
#include "skillgraph/rng.hpp"

namespace skillgraph {

namespace {

// Working graph for one Louvain level. `self` holds the number of edges folded
// inside a super-node; each contributes 2 to that node's degree.
struct LevelGraph {
  std::vector<std::vector<std::pair<std::uint32_t, double>>> adj;
  std::vector<double> self;
  double total = 0.0;  // m

  std::size_t size() const { return adj.size(); }
  double degree(std::size_t i) const {
    double k = 2.0 * self[i];
    for (const auto& [j, w] : adj[i]) k += w;
    return k;
  }
};

LevelGraph from_graph(const UndirectedGraph& g) {
  LevelGraph lg;
  lg.adj.resize(g.num_nodes());
  lg.self.assign(g.num_nodes(), 0.0);
  for (NodeId v = 0; v < g.num_nodes(); ++v)
    for (NodeId w : g.neighbors(v)) lg.adj[v].emplace_back(w, 1.0);
  lg.total = static_cast<double>(g.num_edges());
  return lg;
}

// One round of local moves; returns community per node and whether anything moved.
std::pair<std::vector<std::uint32_t>, bool> local_moves(const LevelGraph& lg, Rng& rng) {
  const std::size_t n = lg.size();
  std::vector<std::uint32_t> comm(n);
  std::iota(comm.begin(), comm.end(), 0u);
  std::vector<double> k(n), tot(n);
  for (std::size_t i = 0; i < n; ++i) tot[i] = k[i] = lg.degree(i);
  const double two_m = 2.0 * lg.total;

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);

  bool any_move = false;
  std::vector<double> link(n, 0.0);
  std::vector<std::uint32_t> touched;
  constexpr double kEps = 1e-12;
  for (int pass = 0; pass < 1000; ++pass) {
    bool moved = false;
    for (std::size_t i : order) {
      const std::uint32_t own = comm[i];
      touched.clear();
      for (const auto& [j, w] : lg.adj[i]) {
        const auto c = comm[j];
        if (link[c] == 0.0) touched.push_back(c);
        link[c] += w;
      }
      tot[own] -= k[i];
      std::uint32_t best = own;
      double best_gain = link[own] - tot[own] * k[i] / two_m;
      for (auto c : touched) {
        const double gain = link[c] - tot[c] * k[i] / two_m;
        if (gain > best_gain + kEps) {
          best = c;
          best_gain = gain;
        }
      }
      tot[best] += k[i];
      comm[i] = best;
      if (best != own) moved = true;
      for (auto c : touched) link[c] = 0.0;
    }
    if (!moved) break;
    any_move = true;
  }
  return {canonical_labels(comm), any_move};
}

LevelGraph aggregate(const LevelGraph& lg, const std::vector<std::uint32_t>& comm) {
  const std::size_t nc = comm.empty() ? 0 : *std::max_element(comm.begin(), comm.end()) + 1;
  LevelGraph out;
  out.adj.resize(nc);
  out.self.assign(nc, 0.0);
  out.total = lg.total;
  std::vector<std::unordered_map<std::uint32_t, double>> weights(nc);
  for (std::size_t i = 0; i < lg.size(); ++i) {
    out.self[comm[i]] += lg.self[i];
    for (const auto& [j, w] : lg.adj[i]) {
      if (j < i) continue;
      if (comm[i] == comm[j]) {
        out.self[comm[i]] += w;
      } else {
        weights[comm[i]][comm[j]] += w;
        weights[comm[j]][comm[i]] += w;
      }
    }
  }
  for (std::size_t c = 0; c < nc; ++c) {
    out.adj[c].assign(weights[c].begin(), weights[c].end());
    std::sort(out.adj[c].begin(), out.adj[c].end());
  }
  return out;
}

std::vector<std::uint32_t> component_labels(const UndirectedGraph& g) {
  std::vector<std::uint32_t> label(g.num_nodes(), UINT32_MAX);
  std::uint32_t next = 0;
  std::vector<NodeId> stack;
  for (NodeId s = 0; s < g.num_nodes(); ++s) {
    if (label[s] != UINT32_MAX) continue;
    label[s] = next;
    stack.push_back(s);
    while (!stack.empty()) {
      const NodeId v = stack.back();
      stack.pop_back();
      for (NodeId w : g.neighbors(v))
        if (label[w] == UINT32_MAX) {
          label[w] = next;
          stack.push_back(w);
        }
    }
    ++next;
  }
  return label;
}

}  // namespace

CommunityPartition louvain_partition(const UndirectedGraph& g, std::uint64_t seed) {
  if (g.num_nodes() == 0) throw Error(ErrorCode::EmptyGraph, "", "louvain needs at least one node");
  CommunityPartition result;
  std::vector<std::uint32_t> membership(g.num_nodes());
  std::iota(membership.begin(), membership.end(), 0u);
  if (g.num_edges() > 0) {
    Rng rng(seed);
    LevelGraph level = from_graph(g);
    while (true) {
      auto [comm, moved] = local_moves(level, rng);
      if (!moved) break;
      for (auto& m : membership) m = comm[m];
      level = aggregate(level, comm);
    }
  }
  result.assignment = canonical_labels(membership);
  result.q = modularity(g, result.assignment);
  // Connected components always score >= 0; never report less.
  auto components = component_labels(g);
  const double q_components = modularity(g, components);
  if (q_components > result.q + 1e-12) {
    result.assignment = canonical_labels(components);
    result.q = q_components;
  }
  result.num_communities = *std::max_element(result.assignment.begin(), result.assignment.end()) + 1;
  return result;
}

CommunityPartition louvain_partition(const KnowledgeGraph& g, std::uint64_t seed) {
  return louvain_partition(g.full_graph(), seed);
}

}  // namespace skillgraph
