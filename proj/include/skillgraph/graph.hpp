#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "skillgraph/cluster.hpp"
#include "skillgraph/corpus.hpp"
#include "skillgraph/risk.hpp"

namespace skillgraph {

using NodeId = std::uint32_t;

// Simple undirected unit-weight graph; adjacency lists are sorted and unique.
class UndirectedGraph {
 public:
  UndirectedGraph() = default;
  explicit UndirectedGraph(std::size_t n) : adjacency_(n) {}

  std::size_t num_nodes() const { return adjacency_.size(); }
  std::size_t num_edges() const { return num_edges_; }
  std::span<const NodeId> neighbors(NodeId v) const { return adjacency_[v]; }
  std::size_t degree(NodeId v) const { return adjacency_[v].size(); }

  // Returns false for self loops and edges already present.
  bool add_edge(NodeId a, NodeId b);
  std::vector<std::pair<NodeId, NodeId>> edges() const;

 private:
  std::vector<std::vector<NodeId>> adjacency_;
  std::size_t num_edges_ = 0;
};

enum class NodeKind { job, activity, tool };
std::string_view node_kind_name(NodeKind k);

struct GraphNode {
  std::string id;
  NodeKind kind = NodeKind::job;
  std::string label;
};

struct JobAttributes {
  std::string title;
  std::string isco4;
};

// Tripartite job -PERFORMS-> activity -USES-> tool graph. Jobs, activities and
// tools are indexed separately from 0; global node ids put jobs first, then
// activities, then tools.
class KnowledgeGraph {
 public:
  std::size_t num_jobs() const { return jobs_.size(); }
  std::size_t num_activities() const { return activities_.size(); }
  std::size_t num_tools() const { return tools_.size(); }
  std::size_t num_nodes() const { return num_jobs() + num_activities() + num_tools(); }
  std::size_t num_performs_edges() const { return num_performs_; }
  std::size_t num_uses_edges() const { return num_uses_; }

  const GraphNode& job(std::size_t j) const { return jobs_[j]; }
  const GraphNode& activity(std::size_t a) const { return activities_[a]; }
  const GraphNode& tool(std::size_t t) const { return tools_[t]; }
  const JobAttributes& job_attributes(std::size_t j) const { return job_attrs_[j]; }
  const GraphNode& node(NodeId global) const;

  std::optional<std::size_t> find_job(std::string_view id) const;
  std::optional<std::size_t> find_activity(std::string_view id) const;
  std::optional<std::size_t> find_tool(std::string_view id) const;

  // N(j): sorted activity indices.
  std::span<const std::uint32_t> activities_of_job(std::size_t j) const { return job_activities_[j]; }
  std::span<const std::uint32_t> jobs_of_activity(std::size_t a) const { return activity_jobs_[a]; }
  std::span<const std::uint32_t> tools_of_activity(std::size_t a) const { return activity_tools_[a]; }
  std::span<const std::uint32_t> activities_of_tool(std::size_t t) const { return tool_activities_[t]; }
  // Tools the posting itself mentions (resolved), sorted.
  std::span<const std::uint32_t> tools_of_job(std::size_t j) const { return job_tools_[j]; }

  NodeId job_node(std::size_t j) const { return static_cast<NodeId>(j); }
  NodeId activity_node(std::size_t a) const { return static_cast<NodeId>(num_jobs() + a); }
  NodeId tool_node(std::size_t t) const { return static_cast<NodeId>(num_jobs() + num_activities() + t); }

  // PERFORMS and USES edges over all nodes.
  UndirectedGraph full_graph() const;
  // PERFORMS edges only, over jobs then activities (no tool nodes).
  UndirectedGraph performs_graph() const;

  friend KnowledgeGraph build_graph(const Corpus&, std::span<const SkillCluster>, std::span<const SkillCluster>);

 private:
  std::vector<GraphNode> jobs_, activities_, tools_;
  std::vector<JobAttributes> job_attrs_;
  std::unordered_map<std::string, std::size_t> job_index_, activity_index_, tool_index_;
  std::vector<std::vector<std::uint32_t>> job_activities_, job_tools_, activity_jobs_, activity_tools_, tool_activities_;
  std::size_t num_performs_ = 0;
  std::size_t num_uses_ = 0;
};

KnowledgeGraph build_graph(const Corpus& corpus, std::span<const SkillCluster> activity_clusters,
                           std::span<const SkillCluster> tool_clusters);

// rho per job index; throws UnknownJob when a job lacks a profile.
std::vector<double> risk_by_job(const KnowledgeGraph& g, std::span<const JobRiskProfile> profiles);

// ---- topology -------------------------------------------------------------

struct TopologyStats {
  std::size_t n_jobs = 0;
  std::size_t n_activities = 0;
  std::size_t n_tools = 0;
  std::size_t n_performs_edges = 0;
  std::size_t n_uses_edges = 0;
  double bipartite_density = 0.0;
  double mean_degree = 0.0;
  double max_degree = 0.0;
  std::optional<double> gamma;  // absent when the degree sample cannot be fitted
};

double mean_job_degree(std::size_t performs_edges, std::size_t n_jobs);
double bipartite_density(std::size_t performs_edges, std::size_t n_jobs, std::size_t n_activities);

TopologyStats topology_stats(const KnowledgeGraph& g);

// Discrete power-law MLE: maximises -gamma * sum(ln x) - n * ln zeta(gamma, x_min)
// over values >= x_min.
double fit_power_law(std::span<const std::size_t> degrees, std::size_t x_min = 1);
// Hurwitz zeta(s, q) for s > 1, q >= 1.
double hurwitz_zeta(double s, std::size_t q);

// ---- communities ----------------------------------------------------------

struct CommunityPartition {
  std::vector<std::uint32_t> assignment;  // node -> community, ids dense from 0
  std::size_t num_communities = 0;
  double q = 0.0;
};

double modularity(const UndirectedGraph& g, std::span<const std::uint32_t> assignment);
double modularity(const KnowledgeGraph& g, std::span<const std::uint32_t> assignment);

// Two-phase Louvain, resolution 1. Node visiting order is shuffled from `seed`.
CommunityPartition louvain_partition(const UndirectedGraph& g, std::uint64_t seed);
CommunityPartition louvain_partition(const KnowledgeGraph& g, std::uint64_t seed);

// Relabels communities densely in order of first appearance by node id.
std::vector<std::uint32_t> canonical_labels(std::span<const std::uint32_t> assignment);

struct CommunitySummary {
  std::uint32_t community_id = 0;
  std::size_t size = 0;  // jobs + activities + tools
  std::size_t n_jobs = 0;
  std::optional<double> mean_rho;
  double q_int = 1.0;  // internal edges / edges touching the community
  std::vector<std::string> sample_titles;
};

std::vector<CommunitySummary> community_summaries(const KnowledgeGraph& g, const CommunityPartition& partition,
                                                  std::span<const double> rho_by_job);

}  // namespace skillgraph
