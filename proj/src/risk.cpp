#include "skillgraph/risk.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <unordered_map>

#include "skillgraph/error.hpp"

namespace skillgraph {

std::string_view risk_category_name(RiskCategory c) {
  switch (c) {
    case RiskCategory::High: return "High";
    case RiskCategory::Medium: return "Medium";
    case RiskCategory::Low: return "Low";
  }
  return "Low";
}

double compute_risk(std::span<const Task> tasks) {
  if (tasks.empty()) throw Error(ErrorCode::EmptyTaskList, "", "a job needs at least one task");
  if (tasks.size() > kMaxTasksPerJob)
    throw Error(ErrorCode::InvalidArgument, std::to_string(tasks.size()), "at most 15 tasks per job");
  // Category masses in tenths keep the all-present case exact.
  constexpr std::array<double, 3> kMass = {6.0, 3.0, 1.0};
  std::array<std::size_t, 3> count{};
  std::array<std::size_t, 3> automatable{};
  for (const auto& t : tasks) {
    const auto k = static_cast<std::size_t>(t.importance);
    ++count[k];
    if (t.automatable) ++automatable[k];
  }
  double present = 0.0;
  double weighted = 0.0;
  for (std::size_t k = 0; k < 3; ++k) {
    if (count[k] == 0) continue;
    present += kMass[k];
    weighted += kMass[k] * static_cast<double>(automatable[k]) / static_cast<double>(count[k]);
  }
  const double rho = 100.0 * weighted / present;
  return std::clamp(rho, 0.0, 100.0);
}

RiskCategory categorize_risk(double rho) {
  if (!(rho >= 0.0 && rho <= 100.0)) throw Error(ErrorCode::OutOfRange, std::to_string(rho), "rho must lie in [0,100]");
  if (rho >= kHighRiskCutoff) return RiskCategory::High;
  if (rho >= kMediumRiskCutoff) return RiskCategory::Medium;
  return RiskCategory::Low;
}

std::vector<JobRiskProfile> profile_corpus(const Corpus& corpus) {
  std::vector<JobRiskProfile> out;
  out.reserve(corpus.postings.size());
  for (const auto& p : corpus.postings) {
    const double rho = compute_risk(p.tasks);
    out.push_back({p.id, rho, categorize_risk(rho)});
  }
  return out;
}

std::string isco1_label(char major_group) {
  switch (major_group) {
    case '0': return "Armed Forces Occupations";
    case '1': return "Managers";
    case '2': return "Professionals";
    case '3': return "Technicians & Associates";
    case '4': return "Clerical Support Workers";
    case '5': return "Service & Sales Workers";
    case '6': return "Skilled Agricultural Workers";
    case '7': return "Craft & Related Workers";
    case '8': return "Plant & Machine Operators";
    case '9': return "Elementary Occupations";
    default: return "";
  }
}

namespace {

std::unordered_map<std::string, const JobPosting*> index_by_id(const Corpus& corpus) {
  std::unordered_map<std::string, const JobPosting*> idx;
  for (const auto& p : corpus.postings) idx.emplace(p.id, &p);
  return idx;
}

RiskAggregate summarize(std::string code, std::string label, const std::vector<double>& rhos) {
  RiskAggregate agg;
  agg.group_code = std::move(code);
  agg.label = std::move(label);
  agg.n = rhos.size();
  double sum = 0.0;
  std::size_t high = 0;
  for (double r : rhos) {
    sum += r;
    if (r >= kHighRiskCutoff) ++high;
  }
  const double n = static_cast<double>(rhos.size());
  agg.mean_rho = sum / n;
  double ss = 0.0;
  for (double r : rhos) ss += (r - agg.mean_rho) * (r - agg.mean_rho);
  agg.sigma = std::sqrt(ss / n);
  agg.high_share = 100.0 * static_cast<double>(high) / n;
  return agg;
}

}  // namespace

std::vector<RiskAggregate> aggregate_by_isco(std::span<const JobRiskProfile> profiles, const Corpus& corpus,
                                             int level, std::size_t min_n) {
  if (level < 1 || level > 4) throw Error(ErrorCode::InvalidArgument, std::to_string(level), "ISCO level must be 1-4");
  const auto idx = index_by_id(corpus);
  std::map<std::string, std::vector<double>> groups;
  for (const auto& prof : profiles) {
    auto it = idx.find(prof.job_id);
    if (it == idx.end()) throw Error(ErrorCode::UnknownJob, prof.job_id, "risk profile without a posting");
    groups[it->second->isco4.substr(0, static_cast<std::size_t>(level))].push_back(prof.rho);
  }
  std::vector<RiskAggregate> rows;
  std::vector<double> surviving;
  for (const auto& [code, rhos] : groups) {
    if (rhos.size() < min_n) continue;
    rows.push_back(summarize(code, level == 1 ? isco1_label(code[0]) : std::string(), rhos));
    surviving.insert(surviving.end(), rhos.begin(), rhos.end());
  }
  std::stable_sort(rows.begin(), rows.end(), [](const RiskAggregate& a, const RiskAggregate& b) {
    if (a.mean_rho != b.mean_rho) return a.mean_rho > b.mean_rho;
    return a.group_code < b.group_code;
  });
  if (!surviving.empty()) {
    auto overall = summarize("ALL", "Total/Weighted Avg", surviving);
    // Weighted mean of the group means; identical to the pooled mean up to rounding.
    double weighted = 0.0;
    for (const auto& r : rows) weighted += static_cast<double>(r.n) * r.mean_rho;
    overall.mean_rho = weighted / static_cast<double>(overall.n);
    rows.push_back(std::move(overall));
  }
  return rows;
}

std::optional<double> low_share(std::size_t high_count, std::size_t low_count) {
  if (high_count + low_count == 0) return std::nullopt;
  return static_cast<double>(low_count) / static_cast<double>(high_count + low_count);
}

std::vector<HeterogeneityRow> heterogeneity_table(std::span<const JobRiskProfile> profiles, const Corpus& corpus,
                                                  std::span<const std::string> isco3_codes) {
  const auto idx = index_by_id(corpus);
  std::vector<HeterogeneityRow> rows;
  for (const auto& code : isco3_codes) {
    if (code.size() != 3 || !std::all_of(code.begin(), code.end(), [](char c) { return c >= '0' && c <= '9'; }))
      throw Error(ErrorCode::BadIsco, code, "heterogeneity codes must be 3 digits");
    HeterogeneityRow row;
    row.isco3 = code;
    double sum = 0.0;
    std::size_t n = 0;
    for (const auto& prof : profiles) {
      auto it = idx.find(prof.job_id);
      if (it == idx.end()) throw Error(ErrorCode::UnknownJob, prof.job_id, "risk profile without a posting");
      if (it->second->isco4.compare(0, 3, code) != 0) continue;
      ++n;
      sum += prof.rho;
      if (prof.rho >= kHighRiskCutoff) ++row.high_count;
      if (prof.rho <= kSafePositionCutoff) ++row.low_count;
    }
    if (n > 0) row.mean_rho = sum / static_cast<double>(n);
    row.low_share = low_share(row.high_count, row.low_count);
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace skillgraph
