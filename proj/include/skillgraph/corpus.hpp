#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace skillgraph {

enum class Source { wuzzuf, linkedin, forasna, synthetic };
enum class Importance { Primary, Secondary, Ancillary };

struct Task {
  std::string description;
  Importance importance = Importance::Primary;
  bool automatable = false;

  bool operator==(const Task&) const = default;
};

struct JobPosting {
  std::string id;
  std::string title;
  std::string employer;
  Source source = Source::synthetic;
  std::string isco4;
  std::vector<Task> tasks;
  std::vector<std::string> activity_mentions;
  std::vector<std::string> tool_mentions;

  bool operator==(const JobPosting&) const = default;
};

// Surface form -> canonical name. Only synthetic corpora carry one; it is
// used to score clustering and never enters the graph.
struct GroundTruth {
  std::map<std::string, std::string> activities;
  std::map<std::string, std::string> tools;

  bool empty() const { return activities.empty() && tools.empty(); }
  bool operator==(const GroundTruth&) const = default;
};

enum class Provenance { loaded, synthetic };

struct Corpus {
  std::vector<JobPosting> postings;
  Provenance provenance = Provenance::loaded;
  std::optional<std::uint64_t> seed;
  GroundTruth ground_truth;
};

struct VariantRange {
  std::size_t min = 1;
  std::size_t max = 3;
};

struct SynthConfig {
  std::uint64_t seed = 0;
  std::size_t n_jobs = 0;
  std::map<int, double> isco_mix;  // ISCO major group -> share of jobs
  std::size_t canonical_activities = 0;
  std::size_t canonical_tools = 0;
  VariantRange synonym_variants_per_canonical;
  std::map<int, double> automatable_bias;  // ISCO major group -> P(task automatable)
};

// Maximum number of distinct surface variants the generator can emit per canonical.
inline constexpr std::size_t kMaxSurfaceVariants = 5;
inline constexpr std::size_t kMaxTasksPerJob = 15;
inline constexpr double kDefaultTitleThreshold = 0.85;

std::string_view source_name(Source s);
std::optional<Source> parse_source(std::string_view s);
char importance_code(Importance i);
std::optional<Importance> parse_importance(std::string_view s);

bool is_valid_isco4(std::string_view code);

Corpus parse_postings(std::istream& in);
Corpus load_postings(const std::filesystem::path& path);
void write_postings(const Corpus& corpus, std::ostream& out);
std::string serialize_posting(const JobPosting& posting);

void write_ground_truth(const GroundTruth& truth, std::ostream& out);
GroundTruth read_ground_truth(std::istream& in);

std::set<std::string> title_tokens(std::string_view title);
double title_jaccard(std::string_view a, std::string_view b);
Corpus deduplicate(const Corpus& corpus, double title_threshold = kDefaultTitleThreshold);

void validate_synth_config(const SynthConfig& cfg);
Corpus generate_synthetic_corpus(const SynthConfig& cfg);

}  // namespace skillgraph
