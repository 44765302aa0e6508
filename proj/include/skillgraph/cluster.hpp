#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "skillgraph/corpus.hpp"
#include "skillgraph/embedding.hpp"

namespace skillgraph {

enum class EntityKind { activity, tool };

struct SkillCluster {
  std::string canonical_id;
  EntityKind kind = EntityKind::activity;
  std::string representative;
  std::vector<std::string> members;  // representative first, then join order

  bool operator==(const SkillCluster&) const = default;
};

inline constexpr double kDefaultTheta = 0.88;

struct ClusterConfig {
  double theta = kDefaultTheta;
};

std::string_view entity_kind_name(EntityKind k);
std::optional<EntityKind> parse_entity_kind(std::string_view s);

// Single pass in input order. A form joins the leader with the highest cosine
// among leaders strictly above theta (earliest leader on ties), otherwise it
// founds a new cluster. Leaders are never re-centred.
std::vector<SkillCluster> leader_follower(std::span<const std::string> surface_forms,
                                          const EmbeddingProvider& provider, const ClusterConfig& cfg,
                                          EntityKind kind = EntityKind::activity);

// Same pass over precomputed unit vectors; returns the cluster index per form.
std::vector<std::size_t> leader_follower_assign(std::span<const Embedding> embeddings, double theta);

// Distinct forms in first-seen order.
std::vector<std::string> collect_forms(const Corpus& corpus, EntityKind kind);

struct LabeledPair {
  std::string a;
  std::string b;
  bool same_concept = false;
};

struct ThetaRow {
  double theta = 0.0;
  std::size_t n_clusters = 0;
  std::optional<double> precision;  // absent when no labelled pair is merged
  std::optional<double> recall;     // absent when no labelled pair is same-concept
};

std::vector<LabeledPair> parse_labeled_pairs(std::istream& in);
void write_labeled_pairs(std::span<const LabeledPair> pairs, std::ostream& out);
// Balanced positive/negative pairs drawn from a ground-truth map.
std::vector<LabeledPair> sample_labeled_pairs(const std::map<std::string, std::string>& truth, std::size_t n,
                                              std::uint64_t seed);

// Thresholds lo, lo+step, ..., hi (inclusive, snapped to 1e-9).
std::vector<double> theta_grid(double lo, double hi, double step);

std::vector<ThetaRow> theta_sensitivity_grid(std::span<const std::string> forms, const EmbeddingProvider& provider,
                                             std::span<const LabeledPair> labeled_pairs, double lo, double hi,
                                             double step);

// ---- validation protocol ------------------------------------------------

enum class SizeBand { Two, ThreeToFive, SixToTen, ElevenPlus };

struct Stratum {
  EntityKind kind = EntityKind::tool;
  SizeBand band = SizeBand::Two;
  auto operator<=>(const Stratum&) const = default;
};

std::optional<SizeBand> size_band(std::size_t members);
std::string_view size_band_label(SizeBand b);
// Tools before activities, bands ascending.
std::vector<Stratum> all_strata();

struct StratumSample {
  Stratum stratum;
  std::size_t population = 0;
  std::size_t requested = 0;
  std::vector<std::string> cluster_ids;  // in population order
};

std::vector<StratumSample> stratified_validation_sample(std::span<const SkillCluster> clusters,
                                                        const std::map<Stratum, std::size_t>& plan_sizes,
                                                        std::uint64_t seed);

struct WilsonInterval {
  double lo = 0.0;
  double hi = 0.0;
};

inline constexpr double kZ95 = 1.96;

WilsonInterval wilson_interval(std::size_t errors, std::size_t n, double z = kZ95);

enum class Judgment { Correct, Minor, Major };
std::optional<Judgment> parse_judgment(std::string_view s);
std::string_view judgment_name(Judgment j);

struct ValidationRow {
  std::string type;     // "Tools", "Activities", "Combined"
  std::string stratum;  // band label, "Subtotal" or "Total"
  std::size_t samples = 0;
  std::size_t correct = 0;
  std::size_t minor = 0;
  std::size_t major = 0;
  std::optional<double> error_rate;  // major / samples
  std::optional<WilsonInterval> ci;  // subtotal and total rows only
};

struct ValidationReport {
  std::vector<ValidationRow> rows;
};

ValidationReport validation_report(std::span<const StratumSample> samples,
                                   const std::map<std::string, Judgment>& judgments);

std::map<std::string, Judgment> parse_judgments(std::istream& in);

// Major when the members of a cluster span more than one canonical.
std::map<std::string, Judgment> judge_against_ground_truth(std::span<const SkillCluster> clusters,
                                                           const GroundTruth& truth);

// Cluster file: one JSON object per line.
void write_clusters(std::span<const SkillCluster> clusters, std::ostream& out);
std::vector<SkillCluster> read_clusters(std::istream& in);

}  // namespace skillgraph
