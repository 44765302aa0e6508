#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "skillgraph/corpus.hpp"

namespace skillgraph {

enum class RiskCategory { High, Medium, Low };

inline constexpr double kHighRiskCutoff = 60.0;
inline constexpr double kMediumRiskCutoff = 30.0;
// Heterogeneity counts "safe" positions with a looser cutoff than the Low category.
inline constexpr double kSafePositionCutoff = 40.0;

struct JobRiskProfile {
  std::string job_id;
  double rho = 0.0;  // percent, [0,100]
  RiskCategory category = RiskCategory::Low;
};

struct RiskAggregate {
  std::string group_code;  // ISCO prefix, or "ALL" for the weighted overall row
  std::string label;
  std::size_t n = 0;
  double mean_rho = 0.0;
  double sigma = 0.0;       // population standard deviation
  double high_share = 0.0;  // percent with rho >= 60
};

struct HeterogeneityRow {
  std::string isco3;
  std::optional<double> mean_rho;  // absent when no job falls in the group
  std::size_t high_count = 0;
  std::size_t low_count = 0;
  std::optional<double> low_share;  // fraction; absent when high + low == 0
};

std::string_view risk_category_name(RiskCategory c);

// Importance-weighted share of automatable tasks, in percent. Category masses
// {P: 0.6, S: 0.3, A: 0.1} are split equally among that category's tasks and
// renormalised over the categories present.
double compute_risk(std::span<const Task> tasks);
RiskCategory categorize_risk(double rho);

std::vector<JobRiskProfile> profile_corpus(const Corpus& corpus);

std::string isco1_label(char major_group);

// Rows sorted by mean_rho descending (ties by code), followed by the overall row.
std::vector<RiskAggregate> aggregate_by_isco(std::span<const JobRiskProfile> profiles, const Corpus& corpus,
                                             int level, std::size_t min_n);

std::optional<double> low_share(std::size_t high_count, std::size_t low_count);

std::vector<HeterogeneityRow> heterogeneity_table(std::span<const JobRiskProfile> profiles, const Corpus& corpus,
                                                  std::span<const std::string> isco3_codes);

}  // namespace skillgraph
