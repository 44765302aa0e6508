#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "skillgraph/graph.hpp"

namespace skillgraph {

enum class SkillTier { Universal, Tier1, Tier2, Untiered };
std::string_view skill_tier_name(SkillTier t);

inline constexpr double kTier1RiskCeiling = 35.0;
inline constexpr double kTier2RiskCeiling = 45.0;

struct BridgeSkillMetrics {
  std::string activity_id;
  std::string label;
  double c_b = 0.0;         // betweenness on the PERFORMS graph
  std::uint64_t c_p = 0;    // cross-community job pairs linked by the skill
  std::size_t k = 0;        // jobs requiring the skill
  std::size_t d_isco = 0;   // distinct ISCO-2 prefixes among those jobs
  std::uint64_t i_pr = 0;   // k * d_isco
  std::optional<double> mean_rho;
  SkillTier tier = SkillTier::Untiered;
};

// Exact unnormalised betweenness (Brandes); unordered pairs, endpoints excluded.
std::vector<double> betweenness_centrality(const UndirectedGraph& g);
// Over the job-activity PERFORMS graph; indexed by global node id (jobs, then activities).
std::vector<double> betweenness_centrality(const KnowledgeGraph& g);

// sum over community pairs i < j of L_i * L_j, where L_c counts the skill's jobs in c.
std::uint64_t connection_pairs(std::span<const std::uint64_t> jobs_per_community);
std::uint64_t connection_pairs(const KnowledgeGraph& g, const CommunityPartition& partition,
                               std::string_view activity_id);

// Fills k, d_isco, i_pr, mean_rho and tier; c_b and c_p are left at zero.
BridgeSkillMetrics skill_importance(const KnowledgeGraph& g, std::span<const double> rho_by_job,
                                    std::string_view activity_id);

// All activities, c_b and c_p included, sorted by c_p desc, then k desc, then id.
std::vector<BridgeSkillMetrics> rank_bridge_skills(const KnowledgeGraph& g, const CommunityPartition& partition,
                                                   std::span<const double> rho_by_job, std::size_t top_n);

// Same metrics sorted by i_pr desc, then k desc, then id.
std::vector<BridgeSkillMetrics> rank_skill_importance(const KnowledgeGraph& g, std::span<const double> rho_by_job,
                                                      std::size_t top_n);

SkillTier assign_tier(std::size_t d_isco, std::size_t max_d_isco, std::optional<double> mean_rho);

}  // namespace skillgraph
