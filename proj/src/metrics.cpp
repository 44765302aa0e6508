#include "skillgraph/metrics.hpp"

#include <algorithm>
#include <map>
#include <queue>
#include <set>

#include "skillgraph/error.hpp"

namespace skillgraph {

std::string_view skill_tier_name(SkillTier t) {
  switch (t) {
    case SkillTier::Universal: return "Universal";
    case SkillTier::Tier1: return "Tier 1";
    case SkillTier::Tier2: return "Tier 2";
    case SkillTier::Untiered: return "Untiered";
  }
  return "Untiered";
}

std::vector<double> betweenness_centrality(const UndirectedGraph& g) {
  const std::size_t n = g.num_nodes();
  if (n == 0) throw Error(ErrorCode::EmptyGraph, "", "betweenness needs at least one node");
  std::vector<double> cb(n, 0.0);
  std::vector<double> sigma(n), delta(n);
  std::vector<long long> dist(n);
  std::vector<std::vector<NodeId>> preds(n);
  std::vector<NodeId> stack;
  stack.reserve(n);
  for (NodeId s = 0; s < n; ++s) {
    std::fill(sigma.begin(), sigma.end(), 0.0);
    std::fill(delta.begin(), delta.end(), 0.0);
    std::fill(dist.begin(), dist.end(), -1);
    for (auto& p : preds) p.clear();
    stack.clear();
    sigma[s] = 1.0;
    dist[s] = 0;
    std::queue<NodeId> queue;
    queue.push(s);
    while (!queue.empty()) {
      const NodeId v = queue.front();
      queue.pop();
      stack.push_back(v);
      for (NodeId w : g.neighbors(v)) {
        if (dist[w] < 0) {
          dist[w] = dist[v] + 1;
          queue.push(w);
        }
        if (dist[w] == dist[v] + 1) {
          sigma[w] += sigma[v];
          preds[w].push_back(v);
        }
      }
    }
    for (auto it = stack.rbegin(); it != stack.rend(); ++it) {
      const NodeId w = *it;
      for (NodeId v : preds[w]) delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w]);
      if (w != s) cb[w] += delta[w];
    }
  }
  // Each unordered pair was counted from both ends.
  for (auto& x : cb) x /= 2.0;
  return cb;
}

std::vector<double> betweenness_centrality(const KnowledgeGraph& g) {
  return betweenness_centrality(g.performs_graph());
}

std::uint64_t connection_pairs(std::span<const std::uint64_t> jobs_per_community) {
  std::uint64_t total = 0, sum_sq = 0;
  for (auto l : jobs_per_community) {
    total += l;
    sum_sq += l * l;
  }
  return (total * total - sum_sq) / 2;
}

namespace {

std::size_t require_activity(const KnowledgeGraph& g, std::string_view id) {
  auto a = g.find_activity(id);
  if (!a) throw Error(ErrorCode::UnknownActivity, std::string(id), "no such activity");
  return *a;
}

std::uint64_t connection_pairs_at(const KnowledgeGraph& g, const CommunityPartition& partition, std::size_t a) {
  std::map<std::uint32_t, std::uint64_t> per;
  for (auto j : g.jobs_of_activity(a)) {
    if (g.job_node(j) >= partition.assignment.size())
      throw Error(ErrorCode::PartialAssignment, g.job(j).id, "partition must cover job nodes");
    ++per[partition.assignment[g.job_node(j)]];
  }
  std::vector<std::uint64_t> counts;
  for (const auto& [c, l] : per) counts.push_back(l);
  return connection_pairs(counts);
}

std::size_t distinct_isco2(const KnowledgeGraph& g, std::size_t a) {
  std::set<std::string> prefixes;
  for (auto j : g.jobs_of_activity(a)) prefixes.insert(g.job_attributes(j).isco4.substr(0, 2));
  return prefixes.size();
}

BridgeSkillMetrics importance_at(const KnowledgeGraph& g, std::span<const double> rho, std::size_t a,
                                 std::size_t max_d) {
  BridgeSkillMetrics m;
  m.activity_id = g.activity(a).id;
  m.label = g.activity(a).label;
  const auto jobs = g.jobs_of_activity(a);
  m.k = jobs.size();
  m.d_isco = distinct_isco2(g, a);
  m.i_pr = static_cast<std::uint64_t>(m.k) * static_cast<std::uint64_t>(m.d_isco);
  if (!jobs.empty()) {
    double sum = 0.0;
    for (auto j : jobs) sum += rho[j];
    m.mean_rho = sum / static_cast<double>(jobs.size());
  }
  m.tier = assign_tier(m.d_isco, max_d, m.mean_rho);
  return m;
}

std::size_t max_d_isco(const KnowledgeGraph& g) {
  std::size_t best = 0;
  for (std::size_t a = 0; a < g.num_activities(); ++a) best = std::max(best, distinct_isco2(g, a));
  return best;
}

void require_rho(const KnowledgeGraph& g, std::span<const double> rho) {
  if (rho.size() != g.num_jobs()) throw Error(ErrorCode::UnknownJob, "", "risk needed for every job");
}

}  // namespace

SkillTier assign_tier(std::size_t d_isco, std::size_t max_d_isco, std::optional<double> mean_rho) {
  if (d_isco > 0 && d_isco == max_d_isco) return SkillTier::Universal;
  if (!mean_rho) return SkillTier::Untiered;
  if (*mean_rho < kTier1RiskCeiling) return SkillTier::Tier1;
  if (*mean_rho < kTier2RiskCeiling) return SkillTier::Tier2;
  return SkillTier::Untiered;
}

std::uint64_t connection_pairs(const KnowledgeGraph& g, const CommunityPartition& partition,
                               std::string_view activity_id) {
  return connection_pairs_at(g, partition, require_activity(g, activity_id));
}

BridgeSkillMetrics skill_importance(const KnowledgeGraph& g, std::span<const double> rho_by_job,
                                    std::string_view activity_id) {
  const auto a = require_activity(g, activity_id);
  require_rho(g, rho_by_job);
  return importance_at(g, rho_by_job, a, max_d_isco(g));
}

std::vector<BridgeSkillMetrics> rank_bridge_skills(const KnowledgeGraph& g, const CommunityPartition& partition,
                                                   std::span<const double> rho_by_job, std::size_t top_n) {
  require_rho(g, rho_by_job);
  std::vector<BridgeSkillMetrics> out;
  if (g.num_activities() == 0) return out;
  const auto cb = betweenness_centrality(g);
  const auto max_d = max_d_isco(g);
  for (std::size_t a = 0; a < g.num_activities(); ++a) {
    auto m = importance_at(g, rho_by_job, a, max_d);
    m.c_b = cb[g.activity_node(a)];
    m.c_p = connection_pairs_at(g, partition, a);
    out.push_back(std::move(m));
  }
  std::sort(out.begin(), out.end(), [](const BridgeSkillMetrics& x, const BridgeSkillMetrics& y) {
    if (x.c_p != y.c_p) return x.c_p > y.c_p;
    if (x.k != y.k) return x.k > y.k;
    return x.activity_id < y.activity_id;
  });
  if (out.size() > top_n) out.resize(top_n);
  return out;
}

std::vector<BridgeSkillMetrics> rank_skill_importance(const KnowledgeGraph& g, std::span<const double> rho_by_job,
                                                      std::size_t top_n) {
  require_rho(g, rho_by_job);
  std::vector<BridgeSkillMetrics> out;
  const auto max_d = max_d_isco(g);
  for (std::size_t a = 0; a < g.num_activities(); ++a) out.push_back(importance_at(g, rho_by_job, a, max_d));
  std::sort(out.begin(), out.end(), [](const BridgeSkillMetrics& x, const BridgeSkillMetrics& y) {
    if (x.i_pr != y.i_pr) return x.i_pr > y.i_pr;
    if (x.k != y.k) return x.k > y.k;
    return x.activity_id < y.activity_id;
  });
  if (out.size() > top_n) out.resize(top_n);
  return out;
}

}  // namespace skillgraph
