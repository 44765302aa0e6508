#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "skillgraph/cluster.hpp"
#include "skillgraph/corpus.hpp"
#include "skillgraph/graph.hpp"
#include "skillgraph/risk.hpp"
#include "skillgraph/report.hpp"
#include "skillgraph/transitions.hpp"

namespace skillgraph {

struct PipelineConfig {
  std::optional<std::filesystem::path> corpus_path;
  std::optional<SynthConfig> synthetic;
  bool synthetic_seed_given = false;  // false: the synthetic corpus follows `seed`
  double dedup_threshold = kDefaultTitleThreshold;

  std::size_t embedding_dimension = 256;
  double embedding_perturbation = 0.15;

  double theta = kDefaultTheta;
  double grid_lo = 0.80, grid_hi = 0.95, grid_step = 0.01;
  std::size_t labeled_pairs = 500;
  std::optional<std::filesystem::path> labeled_pairs_path;

  ThresholdConfig thresholds;
  std::vector<ThresholdConfig> sensitivity_grid = extended_threshold_grid();

  std::vector<int> isco_levels = {1, 2};
  std::size_t min_group_size = 50;
  std::vector<std::string> heterogeneity_codes;  // empty: every ISCO-3 prefix present

  std::uint64_t validation_seed = 2025;
  std::map<Stratum, std::size_t> validation_plan;
  std::optional<std::filesystem::path> judgments_path;

  std::size_t top_n = 10;
  std::size_t exemplar_count = 5;
  std::vector<std::pair<std::string, std::string>> exemplar_pairs;  // overrides automatic choice

  std::filesystem::path output_dir = "out";
  std::uint64_t seed = 0;
  report::Format format = report::Format::csv;
};

// Default validation sample sizes per stratum.
std::map<Stratum, std::size_t> default_validation_plan();

// Relative paths inside the document resolve against `base_dir`. Throws BadConfig.
PipelineConfig parse_pipeline_config(std::string_view json_text, const std::filesystem::path& base_dir = {});
PipelineConfig load_pipeline_config(const std::filesystem::path& path);
void validate_pipeline_config(const PipelineConfig& cfg);

// Applies SKILLGRAPH_SEED, SKILLGRAPH_OUT and SKILLGRAPH_FORMAT when set.
void apply_environment(PipelineConfig& cfg);
void set_seed(PipelineConfig& cfg, std::uint64_t seed);

enum class Stage { ingest, cluster, graph, analyze, transitions, sensitivity, validate, report };
std::optional<Stage> parse_stage(std::string_view s);
std::string_view stage_name(Stage s);

struct StageResult {
  std::vector<std::string> files;  // written by this run, relative to output_dir
  report::Manifest manifest;
};

// Cached intermediate artifacts: corpus.jsonl, clusters.jsonl and, when
// present, partition.csv.
struct Artifacts {
  Corpus corpus;
  std::vector<SkillCluster> activity_clusters;
  std::vector<SkillCluster> tool_clusters;
  KnowledgeGraph graph;
  std::vector<JobRiskProfile> profiles;
  std::vector<double> rho;  // by job index
};

Corpus read_corpus_artifact(const std::filesystem::path& dir);
Artifacts load_artifacts(const std::filesystem::path& dir);

void write_partition(const KnowledgeGraph& g, const CommunityPartition& p, const std::filesystem::path& path);
// Throws InvalidRecord when the file does not cover exactly the graph's nodes.
CommunityPartition read_partition(const KnowledgeGraph& g, const std::filesystem::path& path);

// Runs one stage against cached artifacts in output_dir (`report` runs all).
StageResult run_stage(const PipelineConfig& cfg, Stage stage);

}  // namespace skillgraph
