#include "skillgraph/graph.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "skillgraph/error.hpp"

namespace skillgraph {

bool UndirectedGraph::add_edge(NodeId a, NodeId b) {
  if (a == b) return false;
  auto& la = adjacency_.at(a);
  auto it = std::lower_bound(la.begin(), la.end(), b);
  if (it != la.end() && *it == b) return false;
  la.insert(it, b);
  auto& lb = adjacency_.at(b);
  lb.insert(std::lower_bound(lb.begin(), lb.end(), a), a);
  ++num_edges_;
  return true;
}

std::vector<std::pair<NodeId, NodeId>> UndirectedGraph::edges() const {
  std::vector<std::pair<NodeId, NodeId>> out;
  out.reserve(num_edges_);
  for (NodeId v = 0; v < adjacency_.size(); ++v)
    for (NodeId w : adjacency_[v])
      if (v < w) out.emplace_back(v, w);
  return out;
}

std::string_view node_kind_name(NodeKind k) {
  switch (k) {
    case NodeKind::job: return "job";
    case NodeKind::activity: return "activity";
    case NodeKind::tool: return "tool";
  }
  return "job";
}

const GraphNode& KnowledgeGraph::node(NodeId global) const {
  if (global < num_jobs()) return jobs_[global];
  global -= static_cast<NodeId>(num_jobs());
  if (global < num_activities()) return activities_[global];
  return tools_.at(global - num_activities());
}

namespace {
std::optional<std::size_t> lookup(const std::unordered_map<std::string, std::size_t>& idx, std::string_view id) {
  auto it = idx.find(std::string(id));
  if (it == idx.end()) return std::nullopt;
  return it->second;
}

void insert_sorted(std::vector<std::uint32_t>& v, std::uint32_t x) {
  auto it = std::lower_bound(v.begin(), v.end(), x);
  if (it == v.end() || *it != x) v.insert(it, x);
}
}  // namespace

std::optional<std::size_t> KnowledgeGraph::find_job(std::string_view id) const { return lookup(job_index_, id); }
std::optional<std::size_t> KnowledgeGraph::find_activity(std::string_view id) const {
  return lookup(activity_index_, id);
}
std::optional<std::size_t> KnowledgeGraph::find_tool(std::string_view id) const { return lookup(tool_index_, id); }

UndirectedGraph KnowledgeGraph::full_graph() const {
  UndirectedGraph g(num_nodes());
  for (std::size_t j = 0; j < num_jobs(); ++j)
    for (auto a : job_activities_[j]) g.add_edge(job_node(j), activity_node(a));
  for (std::size_t a = 0; a < num_activities(); ++a)
    for (auto t : activity_tools_[a]) g.add_edge(activity_node(a), tool_node(t));
  return g;
}

UndirectedGraph KnowledgeGraph::performs_graph() const {
  UndirectedGraph g(num_jobs() + num_activities());
  for (std::size_t j = 0; j < num_jobs(); ++j)
    for (auto a : job_activities_[j]) g.add_edge(job_node(j), activity_node(a));
  return g;
}

KnowledgeGraph build_graph(const Corpus& corpus, std::span<const SkillCluster> activity_clusters,
                           std::span<const SkillCluster> tool_clusters) {
  KnowledgeGraph g;
  std::unordered_map<std::string, std::uint32_t> activity_of_form, tool_of_form;
  auto register_clusters = [](std::span<const SkillCluster> clusters, EntityKind kind, NodeKind node_kind,
                              std::vector<GraphNode>& nodes, std::unordered_map<std::string, std::size_t>& index,
                              std::unordered_map<std::string, std::uint32_t>& of_form) {
    for (const auto& c : clusters) {
      if (c.kind != kind)
        throw Error(ErrorCode::InvalidArgument, c.canonical_id, "cluster passed with the wrong entity kind");
      const auto idx = static_cast<std::uint32_t>(nodes.size());
      if (!index.emplace(c.canonical_id, idx).second)
        throw Error(ErrorCode::DuplicateId, c.canonical_id, "cluster id repeated");
      nodes.push_back({c.canonical_id, node_kind, c.representative});
      for (const auto& m : c.members) of_form.emplace(m, idx);
    }
  };
  register_clusters(activity_clusters, EntityKind::activity, NodeKind::activity, g.activities_, g.activity_index_,
                    activity_of_form);
  register_clusters(tool_clusters, EntityKind::tool, NodeKind::tool, g.tools_, g.tool_index_, tool_of_form);

  g.job_activities_.resize(corpus.postings.size());
  g.job_tools_.resize(corpus.postings.size());
  g.activity_jobs_.resize(g.activities_.size());
  g.activity_tools_.resize(g.activities_.size());
  g.tool_activities_.resize(g.tools_.size());

  for (std::size_t j = 0; j < corpus.postings.size(); ++j) {
    const auto& p = corpus.postings[j];
    if (!g.job_index_.emplace(p.id, j).second) throw Error(ErrorCode::DuplicateId, p.id, "posting id repeated");
    g.jobs_.push_back({p.id, NodeKind::job, p.title});
    g.job_attrs_.push_back({p.title, p.isco4});
    std::vector<std::uint32_t> acts, tools;
    for (const auto& m : p.activity_mentions) {
      auto it = activity_of_form.find(m);
      if (it == activity_of_form.end()) throw Error(ErrorCode::UnresolvedMention, m, "activity mention in " + p.id);
      insert_sorted(acts, it->second);
    }
    for (const auto& m : p.tool_mentions) {
      auto it = tool_of_form.find(m);
      if (it == tool_of_form.end()) throw Error(ErrorCode::UnresolvedMention, m, "tool mention in " + p.id);
      insert_sorted(tools, it->second);
    }
    g.job_activities_[j] = acts;
    g.job_tools_[j] = tools;
    for (auto a : acts) g.activity_jobs_[a].push_back(static_cast<std::uint32_t>(j));
    for (auto a : acts)
      for (auto t : tools) insert_sorted(g.activity_tools_[a], t);
  }
  for (std::size_t a = 0; a < g.activity_tools_.size(); ++a) {
    g.num_uses_ += g.activity_tools_[a].size();
    for (auto t : g.activity_tools_[a]) g.tool_activities_[t].push_back(static_cast<std::uint32_t>(a));
  }
  for (const auto& acts : g.job_activities_) g.num_performs_ += acts.size();
  return g;
}

std::vector<double> risk_by_job(const KnowledgeGraph& g, std::span<const JobRiskProfile> profiles) {
  std::vector<double> rho(g.num_jobs(), -1.0);
  for (const auto& p : profiles)
    if (auto j = g.find_job(p.job_id)) rho[*j] = p.rho;
  for (std::size_t j = 0; j < rho.size(); ++j)
    if (rho[j] < 0.0) throw Error(ErrorCode::UnknownJob, g.job(j).id, "job has no risk profile");
  return rho;
}

// ---- topology -------------------------------------------------------------

double mean_job_degree(std::size_t performs_edges, std::size_t n_jobs) {
  if (n_jobs == 0) throw Error(ErrorCode::EmptyGraph, "jobs", "no job nodes");
  return static_cast<double>(performs_edges) / static_cast<double>(n_jobs);
}

double bipartite_density(std::size_t performs_edges, std::size_t n_jobs, std::size_t n_activities) {
  if (n_jobs == 0 || n_activities == 0) throw Error(ErrorCode::EmptyGraph, "nodes", "need jobs and activities");
  return static_cast<double>(performs_edges) / (static_cast<double>(n_jobs) * static_cast<double>(n_activities));
}

TopologyStats topology_stats(const KnowledgeGraph& g) {
  if (g.num_jobs() == 0 || g.num_activities() == 0)
    throw Error(ErrorCode::EmptyGraph, "", "topology needs at least one job and one activity");
  TopologyStats s;
  s.n_jobs = g.num_jobs();
  s.n_activities = g.num_activities();
  s.n_tools = g.num_tools();
  s.n_performs_edges = g.num_performs_edges();
  s.n_uses_edges = g.num_uses_edges();
  s.mean_degree = mean_job_degree(s.n_performs_edges, s.n_jobs);
  s.bipartite_density = bipartite_density(s.n_performs_edges, s.n_jobs, s.n_activities);
  std::vector<std::size_t> degrees;
  for (std::size_t j = 0; j < g.num_jobs(); ++j) {
    const auto d = g.activities_of_job(j).size();
    s.max_degree = std::max(s.max_degree, static_cast<double>(d));
    if (d > 0) degrees.push_back(d);
  }
  for (std::size_t a = 0; a < g.num_activities(); ++a)
    if (auto d = g.jobs_of_activity(a).size(); d > 0) degrees.push_back(d);
  try {
    s.gamma = fit_power_law(degrees, 1);
  } catch (const Error&) {
    s.gamma.reset();
  }
  return s;
}

// ---- modularity -------------------------------------------------------------

double modularity(const UndirectedGraph& g, std::span<const std::uint32_t> assignment) {
  if (assignment.size() != g.num_nodes())
    throw Error(ErrorCode::PartialAssignment, std::to_string(assignment.size()), "assignment must cover every node");
  const double m = static_cast<double>(g.num_edges());
  if (m == 0.0) return 0.0;
  std::map<std::uint32_t, std::pair<double, double>> per;  // community -> (internal edges, degree sum)
  for (NodeId v = 0; v < g.num_nodes(); ++v) {
    auto& e = per[assignment[v]];
    e.second += static_cast<double>(g.degree(v));
    for (NodeId w : g.neighbors(v))
      if (v < w && assignment[v] == assignment[w]) e.first += 1.0;
  }
  double q = 0.0;
  for (const auto& [c, e] : per) {
    const double a = e.second / (2.0 * m);
    q += e.first / m - a * a;
  }
  return q;
}

double modularity(const KnowledgeGraph& g, std::span<const std::uint32_t> assignment) {
  return modularity(g.full_graph(), assignment);
}

std::vector<std::uint32_t> canonical_labels(std::span<const std::uint32_t> assignment) {
  std::unordered_map<std::uint32_t, std::uint32_t> relabel;
  std::vector<std::uint32_t> out(assignment.size());
  for (std::size_t v = 0; v < assignment.size(); ++v) {
    auto [it, inserted] = relabel.emplace(assignment[v], static_cast<std::uint32_t>(relabel.size()));
    out[v] = it->second;
  }
  return out;
}

std::vector<CommunitySummary> community_summaries(const KnowledgeGraph& g, const CommunityPartition& partition,
                                                  std::span<const double> rho_by_job) {
  if (partition.assignment.size() != g.num_nodes())
    throw Error(ErrorCode::PartialAssignment, "", "partition must cover every graph node");
  if (rho_by_job.size() != g.num_jobs()) throw Error(ErrorCode::UnknownJob, "", "risk needed for every job");
  const auto full = g.full_graph();
  std::map<std::uint32_t, CommunitySummary> by_id;
  std::map<std::uint32_t, double> rho_sum;
  std::map<std::uint32_t, std::pair<std::size_t, std::size_t>> edges;  // internal, touching
  for (NodeId v = 0; v < full.num_nodes(); ++v) {
    const auto c = partition.assignment[v];
    auto& s = by_id[c];
    s.community_id = c;
    ++s.size;
    if (v < g.num_jobs()) {
      ++s.n_jobs;
      rho_sum[c] += rho_by_job[v];
      if (s.sample_titles.size() < 3) s.sample_titles.push_back(g.job_attributes(v).title);
    }
  }
  for (const auto& [a, b] : full.edges()) {
    const auto ca = partition.assignment[a], cb = partition.assignment[b];
    if (ca == cb) {
      ++edges[ca].first;
      ++edges[ca].second;
    } else {
      ++edges[ca].second;
      ++edges[cb].second;
    }
  }
  std::vector<CommunitySummary> out;
  for (auto& [c, s] : by_id) {
    if (s.n_jobs > 0) s.mean_rho = rho_sum[c] / static_cast<double>(s.n_jobs);
    auto it = edges.find(c);
    if (it != edges.end() && it->second.second > 0)
      s.q_int = static_cast<double>(it->second.first) / static_cast<double>(it->second.second);
    out.push_back(std::move(s));
  }
  std::stable_sort(out.begin(), out.end(), [](const CommunitySummary& a, const CommunitySummary& b) {
    if (a.size != b.size) return a.size > b.size;
    return a.community_id < b.community_id;
  });
  return out;
}

}  // namespace skillgraph
