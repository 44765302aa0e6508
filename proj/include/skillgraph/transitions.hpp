#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "skillgraph/graph.hpp"

namespace skillgraph {

struct ThresholdConfig {
  std::size_t tau = 3;                // minimum shared activities
  std::optional<double> phi = 0.50;   // minimum transfer fraction; absent = tau-only
  bool require_risk_drop = true;

  bool operator==(const ThresholdConfig&) const = default;
};

void validate_thresholds(const ThresholdConfig& cfg);
std::string describe(const ThresholdConfig& cfg);

struct Overlap {
  std::vector<std::uint32_t> shared;
  double transfer_rate = 0.0;  // |shared| / |N(source)|
  double jaccard = 0.0;        // |shared| / |N(source) u N(target)|
};

Overlap pairwise_overlap(const KnowledgeGraph& g, std::size_t source_job, std::size_t target_job);

bool is_realistic_transition(const KnowledgeGraph& g, std::span<const double> rho_by_job, std::size_t source_job,
                             std::size_t target_job, const ThresholdConfig& cfg);

struct TransitionPathway {
  std::size_t source = 0;  // job index
  std::size_t target = 0;
  std::vector<std::uint32_t> shared;
  std::vector<std::uint32_t> gap;  // N(target) \ N(source)
  double transfer_rate = 0.0;
  double jaccard = 0.0;
  double delta_rho = 0.0;  // rho(target) - rho(source), percentage points
};

enum class SourceFilter { HighRisk, AnyJob };

struct TransitionNetwork {
  std::vector<TransitionPathway> pathways;  // ordered by (source id, target id)
  std::vector<std::size_t> source_universe;  // job indices, ordered by id
};

TransitionNetwork enumerate_transition_network(const KnowledgeGraph& g, std::span<const double> rho_by_job,
                                               const ThresholdConfig& cfg,
                                               SourceFilter filter = SourceFilter::HighRisk);

// Pathways out of one job, sorted by delta_rho ascending then target id.
std::vector<TransitionPathway> transitions_from_job(const KnowledgeGraph& g, std::span<const double> rho_by_job,
                                                    std::size_t source_job, const ThresholdConfig& cfg);

// Same rule with a caller-supplied N(source). Without a source rho the risk
// clause is skipped and delta_rho is reported relative to 0. `source` in the
// returned pathways is meaningless.
std::vector<TransitionPathway> transitions_from_profile(const KnowledgeGraph& g, std::span<const double> rho_by_job,
                                                        std::vector<std::uint32_t> activities,
                                                        std::optional<double> source_rho,
                                                        const ThresholdConfig& cfg);

struct TransitionStats {
  std::size_t n_pathways = 0;
  std::optional<double> mean_shared;
  std::size_t max_shared = 0;
  std::optional<double> mean_transfer;
  std::size_t unique_sources = 0;
  std::optional<double> mean_out_degree;
  std::size_t sources_over_10 = 0;
  std::size_t unique_destinations = 0;
  std::optional<double> mean_in_degree;
  std::size_t hub_destinations = 0;  // k_in > 100
  std::optional<double> mean_delta_rho;
  std::optional<double> max_risk_reduction;  // most negative delta_rho
  std::size_t source_universe = 0;
  std::optional<double> coverage;       // unique_sources / source_universe
  std::optional<double> reskilling_gap;  // 1 - coverage
};

TransitionStats transition_network_stats(const TransitionNetwork& tn);

struct SafeHarborEntry {
  std::size_t target = 0;
  double rho = 0.0;
  std::size_t k_in = 0;
  double mean_jaccard = 0.0;
  std::size_t n_activities = 0;
  std::size_t bridge = 0;  // other jobs sharing at least one activity with the target
};

std::vector<SafeHarborEntry> rank_safe_harbors(const KnowledgeGraph& g, std::span<const double> rho_by_job,
                                               const TransitionNetwork& tn, std::size_t top_k);

struct GapSkillStat {
  std::uint32_t activity = 0;
  std::size_t f_gap = 0;
  double share = 0.0;             // f_gap / |T|
  double cumulative_share = 0.0;  // running sum over the ranking; may exceed 1
};

std::vector<GapSkillStat> gap_skill_frequencies(const KnowledgeGraph& g, const TransitionNetwork& tn,
                                                std::size_t top_k);

struct TransitionDecomposition {
  std::vector<std::uint32_t> shared_activities, unused_activities, gap_activities;
  std::vector<std::uint32_t> shared_tools, unused_tools, gap_tools;
  std::size_t n_gap = 0;
};

TransitionDecomposition decompose_transition(const KnowledgeGraph& g, std::size_t source_job, std::size_t target_job);

struct SensitivityRow {
  ThresholdConfig config;
  std::size_t n_pathways = 0;
  std::optional<double> mean_shared;
  std::optional<double> mean_transfer;
  std::size_t unique_sources = 0;
  std::optional<double> coverage;
};

std::vector<SensitivityRow> threshold_sensitivity_grid(const KnowledgeGraph& g, std::span<const double> rho_by_job,
                                                       std::span<const ThresholdConfig> configs);

// The thirteen configurations of the extended sensitivity table.
std::vector<ThresholdConfig> extended_threshold_grid();

}  // namespace skillgraph
