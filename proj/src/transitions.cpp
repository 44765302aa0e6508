#include "skillgraph/transitions.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <numeric>
#include <set>
#include <thread>

#include "skillgraph/error.hpp"
#include "skillgraph/risk.hpp"

namespace skillgraph {

void validate_thresholds(const ThresholdConfig& cfg) {
  if (cfg.tau < 1) throw Error(ErrorCode::BadThresholds, "tau", "tau must be >= 1");
  if (cfg.phi && !(*cfg.phi > 0.0 && *cfg.phi <= 1.0))
    throw Error(ErrorCode::BadThresholds, "phi", "phi must lie in (0,1]");
}

std::string describe(const ThresholdConfig& cfg) {
  std::string out = "tau>=" + std::to_string(cfg.tau);
  if (cfg.phi) {
    char buf[32];
    std::snprintf(buf, sizeof buf, " AND >=%g%%", *cfg.phi * 100.0);
    out += buf;
  } else {
    out += " only";
  }
  return out;
}

namespace {

std::size_t require_job(const KnowledgeGraph& g, std::size_t j) {
  if (j >= g.num_jobs()) throw Error(ErrorCode::UnknownJob, std::to_string(j), "job index out of range");
  return j;
}

std::vector<std::uint32_t> intersect(std::span<const std::uint32_t> a, std::span<const std::uint32_t> b) {
  std::vector<std::uint32_t> out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

std::vector<std::uint32_t> difference(std::span<const std::uint32_t> a, std::span<const std::uint32_t> b) {
  std::vector<std::uint32_t> out;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

bool passes(std::size_t shared, std::size_t source_size, std::optional<double> rho_s, double rho_t,
            const ThresholdConfig& cfg) {
  if (cfg.require_risk_drop && rho_s && !(rho_t < *rho_s)) return false;
  if (shared < cfg.tau) return false;
  if (cfg.phi && !(static_cast<double>(shared) / static_cast<double>(source_size) >= *cfg.phi)) return false;
  return true;
}

TransitionPathway make_pathway(const KnowledgeGraph& g, std::span<const std::uint32_t> source_acts,
                               std::size_t source, std::size_t target, double delta) {
  TransitionPathway p;
  p.source = source;
  p.target = target;
  const auto target_acts = g.activities_of_job(target);
  p.shared = intersect(source_acts, target_acts);
  p.gap = difference(target_acts, source_acts);
  const std::size_t uni = source_acts.size() + target_acts.size() - p.shared.size();
  p.transfer_rate = static_cast<double>(p.shared.size()) / static_cast<double>(source_acts.size());
  p.jaccard = uni == 0 ? 0.0 : static_cast<double>(p.shared.size()) / static_cast<double>(uni);
  p.delta_rho = delta;
  return p;
}

// Candidate targets sharing >= tau activities, found through the activity->jobs
// index instead of a scan over every job.
std::vector<TransitionPathway> scan(const KnowledgeGraph& g, std::span<const double> rho,
                                    std::span<const std::uint32_t> source_acts, std::optional<double> rho_s,
                                    std::optional<std::size_t> exclude, std::size_t source_index,
                                    const ThresholdConfig& cfg) {
  std::vector<TransitionPathway> out;
  if (source_acts.empty()) return out;
  std::map<std::size_t, std::size_t> shared_count;
  for (auto a : source_acts)
    for (auto t : g.jobs_of_activity(a)) ++shared_count[t];
  for (const auto& [t, shared] : shared_count) {
    if (exclude && t == *exclude) continue;
    if (!passes(shared, source_acts.size(), rho_s, rho[t], cfg)) continue;
    out.push_back(make_pathway(g, source_acts, source_index, t, rho[t] - rho_s.value_or(0.0)));
  }
  return out;
}

std::vector<std::size_t> jobs_by_id(const KnowledgeGraph& g) {
  std::vector<std::size_t> order(g.num_jobs());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return g.job(a).id < g.job(b).id; });
  return order;
}

void require_rho(const KnowledgeGraph& g, std::span<const double> rho) {
  if (rho.size() != g.num_jobs()) throw Error(ErrorCode::InvalidArgument, "rho_by_job", "risk needed for every job");
}

void sort_by_risk_drop(const KnowledgeGraph& g, std::vector<TransitionPathway>& ps) {
  std::stable_sort(ps.begin(), ps.end(), [&](const TransitionPathway& a, const TransitionPathway& b) {
    if (a.delta_rho != b.delta_rho) return a.delta_rho < b.delta_rho;
    return g.job(a.target).id < g.job(b.target).id;
  });
}

}  // namespace

Overlap pairwise_overlap(const KnowledgeGraph& g, std::size_t source_job, std::size_t target_job) {
  require_job(g, source_job);
  require_job(g, target_job);
  const auto s = g.activities_of_job(source_job);
  const auto t = g.activities_of_job(target_job);
  if (s.empty()) throw Error(ErrorCode::EmptySourceNeighborhood, g.job(source_job).id, "source has no activities");
  Overlap o;
  o.shared = intersect(s, t);
  const std::size_t uni = s.size() + t.size() - o.shared.size();
  o.transfer_rate = static_cast<double>(o.shared.size()) / static_cast<double>(s.size());
  o.jaccard = static_cast<double>(o.shared.size()) / static_cast<double>(uni);
  return o;
}

bool is_realistic_transition(const KnowledgeGraph& g, std::span<const double> rho_by_job, std::size_t source_job,
                             std::size_t target_job, const ThresholdConfig& cfg) {
  validate_thresholds(cfg);
  require_job(g, source_job);
  require_job(g, target_job);
  require_rho(g, rho_by_job);
  if (source_job == target_job) return false;
  const auto s = g.activities_of_job(source_job);
  if (s.empty()) return false;
  const auto shared = intersect(s, g.activities_of_job(target_job)).size();
  return passes(shared, s.size(), rho_by_job[source_job], rho_by_job[target_job], cfg);
}

TransitionNetwork enumerate_transition_network(const KnowledgeGraph& g, std::span<const double> rho_by_job,
                                               const ThresholdConfig& cfg, SourceFilter filter) {
  validate_thresholds(cfg);
  require_rho(g, rho_by_job);
  TransitionNetwork tn;
  const auto order = jobs_by_id(g);
  std::vector<std::size_t> rank(g.num_jobs());
  for (std::size_t i = 0; i < order.size(); ++i) rank[order[i]] = i;
  for (std::size_t s : order)
    if (filter == SourceFilter::AnyJob || categorize_risk(rho_by_job[s]) == RiskCategory::High)
      tn.source_universe.push_back(s);

  // Sources are independent; each worker fills its own slots and the
  // results are concatenated in universe order.
  std::vector<std::vector<TransitionPathway>> per_source(tn.source_universe.size());
  auto work = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const std::size_t s = tn.source_universe[i];
      auto ps = scan(g, rho_by_job, g.activities_of_job(s), rho_by_job[s], s, s, cfg);
      std::sort(ps.begin(), ps.end(), [&](const TransitionPathway& a, const TransitionPathway& b) {
        return rank[a.target] < rank[b.target];
      });
      per_source[i] = std::move(ps);
    }
  };
  const std::size_t n = per_source.size();
  const std::size_t workers = n < 256 ? 1 : std::min<std::size_t>(8, std::max(1u, std::thread::hardware_concurrency()));
  if (workers == 1) {
    work(0, n);
  } else {
    std::vector<std::thread> pool;
    const std::size_t chunk = (n + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
      const std::size_t begin = w * chunk, end = std::min(n, begin + chunk);
      if (begin < end) pool.emplace_back(work, begin, end);
    }
    for (auto& t : pool) t.join();
  }
  for (auto& ps : per_source)
    for (auto& p : ps) tn.pathways.push_back(std::move(p));
  return tn;
}

std::vector<TransitionPathway> transitions_from_job(const KnowledgeGraph& g, std::span<const double> rho_by_job,
                                                    std::size_t source_job, const ThresholdConfig& cfg) {
  validate_thresholds(cfg);
  require_job(g, source_job);
  require_rho(g, rho_by_job);
  auto ps = scan(g, rho_by_job, g.activities_of_job(source_job), rho_by_job[source_job], source_job, source_job, cfg);
  sort_by_risk_drop(g, ps);
  return ps;
}

std::vector<TransitionPathway> transitions_from_profile(const KnowledgeGraph& g, std::span<const double> rho_by_job,
                                                        std::vector<std::uint32_t> activities,
                                                        std::optional<double> source_rho,
                                                        const ThresholdConfig& cfg) {
  validate_thresholds(cfg);
  require_rho(g, rho_by_job);
  if (activities.empty()) throw Error(ErrorCode::EmptySourceNeighborhood, "profile", "profile has no activities");
  for (auto a : activities)
    if (a >= g.num_activities()) throw Error(ErrorCode::UnknownActivity, std::to_string(a), "activity out of range");
  std::sort(activities.begin(), activities.end());
  activities.erase(std::unique(activities.begin(), activities.end()), activities.end());
  auto ps = scan(g, rho_by_job, activities, source_rho, std::nullopt, g.num_jobs(), cfg);
  sort_by_risk_drop(g, ps);
  return ps;
}

TransitionStats transition_network_stats(const TransitionNetwork& tn) {
  TransitionStats st;
  st.n_pathways = tn.pathways.size();
  st.source_universe = tn.source_universe.size();
  std::map<std::size_t, std::size_t> out_deg, in_deg;
  double shared = 0.0, transfer = 0.0, delta = 0.0;
  for (const auto& p : tn.pathways) {
    shared += static_cast<double>(p.shared.size());
    transfer += p.transfer_rate;
    delta += p.delta_rho;
    st.max_shared = std::max(st.max_shared, p.shared.size());
    st.max_risk_reduction = st.max_risk_reduction ? std::min(*st.max_risk_reduction, p.delta_rho) : p.delta_rho;
    ++out_deg[p.source];
    ++in_deg[p.target];
  }
  st.unique_sources = out_deg.size();
  st.unique_destinations = in_deg.size();
  if (st.n_pathways > 0) {
    const double n = static_cast<double>(st.n_pathways);
    st.mean_shared = shared / n;
    st.mean_transfer = transfer / n;
    st.mean_delta_rho = delta / n;
    st.mean_out_degree = n / static_cast<double>(st.unique_sources);
    st.mean_in_degree = n / static_cast<double>(st.unique_destinations);
  }
  for (const auto& [s, d] : out_deg)
    if (d > 10) ++st.sources_over_10;
  for (const auto& [t, d] : in_deg)
    if (d > 100) ++st.hub_destinations;
  if (st.source_universe > 0) {
    st.coverage = static_cast<double>(st.unique_sources) / static_cast<double>(st.source_universe);
    st.reskilling_gap = 1.0 - *st.coverage;
  }
  return st;
}

std::vector<SafeHarborEntry> rank_safe_harbors(const KnowledgeGraph& g, std::span<const double> rho_by_job,
                                               const TransitionNetwork& tn, std::size_t top_k) {
  require_rho(g, rho_by_job);
  std::map<std::size_t, std::pair<std::set<std::size_t>, double>> incoming;
  for (const auto& p : tn.pathways) {
    auto& e = incoming[p.target];
    if (e.first.insert(p.source).second) e.second += p.jaccard;
  }
  std::vector<SafeHarborEntry> out;
  for (const auto& [t, e] : incoming) {
    SafeHarborEntry h;
    h.target = t;
    h.rho = rho_by_job[t];
    h.k_in = e.first.size();
    h.mean_jaccard = e.second / static_cast<double>(h.k_in);
    h.n_activities = g.activities_of_job(t).size();
    std::set<std::uint32_t> neighbours;
    for (auto a : g.activities_of_job(t))
      for (auto j : g.jobs_of_activity(a))
        if (j != t) neighbours.insert(j);
    h.bridge = neighbours.size();
    out.push_back(h);
  }
  std::sort(out.begin(), out.end(), [&](const SafeHarborEntry& a, const SafeHarborEntry& b) {
    if (a.k_in != b.k_in) return a.k_in > b.k_in;
    if (a.mean_jaccard != b.mean_jaccard) return a.mean_jaccard > b.mean_jaccard;
    return g.job(a.target).id < g.job(b.target).id;
  });
  if (out.size() > top_k) out.resize(top_k);
  return out;
}

std::vector<GapSkillStat> gap_skill_frequencies(const KnowledgeGraph& g, const TransitionNetwork& tn,
                                                std::size_t top_k) {
  std::vector<GapSkillStat> out;
  if (tn.pathways.empty()) return out;
  std::map<std::uint32_t, std::size_t> freq;
  for (const auto& p : tn.pathways)
    for (auto a : p.gap) ++freq[a];
  const double n = static_cast<double>(tn.pathways.size());
  for (const auto& [a, f] : freq) out.push_back({a, f, static_cast<double>(f) / n, 0.0});
  std::sort(out.begin(), out.end(), [&](const GapSkillStat& x, const GapSkillStat& y) {
    if (x.f_gap != y.f_gap) return x.f_gap > y.f_gap;
    return g.activity(x.activity).id < g.activity(y.activity).id;
  });
  if (out.size() > top_k) out.resize(top_k);
  double cumulative = 0.0;
  for (auto& s : out) {
    cumulative += s.share;
    s.cumulative_share = cumulative;
  }
  return out;
}

TransitionDecomposition decompose_transition(const KnowledgeGraph& g, std::size_t source_job, std::size_t target_job) {
  require_job(g, source_job);
  require_job(g, target_job);
  const auto s = g.activities_of_job(source_job);
  const auto t = g.activities_of_job(target_job);
  TransitionDecomposition d;
  d.shared_activities = intersect(s, t);
  d.unused_activities = difference(s, t);
  d.gap_activities = difference(t, s);
  const auto ts = g.tools_of_job(source_job);
  const auto tt = g.tools_of_job(target_job);
  d.shared_tools = intersect(ts, tt);
  d.unused_tools = difference(ts, tt);
  d.gap_tools = difference(tt, ts);
  d.n_gap = d.gap_activities.size();
  return d;
}

std::vector<SensitivityRow> threshold_sensitivity_grid(const KnowledgeGraph& g, std::span<const double> rho_by_job,
                                                       std::span<const ThresholdConfig> configs) {
  if (configs.empty()) throw Error(ErrorCode::InvalidArgument, "configs", "sensitivity grid needs configurations");
  std::vector<SensitivityRow> rows;
  for (const auto& cfg : configs) {
    const auto tn = enumerate_transition_network(g, rho_by_job, cfg);
    const auto st = transition_network_stats(tn);
    rows.push_back({cfg, st.n_pathways, st.mean_shared, st.mean_transfer, st.unique_sources, st.coverage});
  }
  return rows;
}

std::vector<ThresholdConfig> extended_threshold_grid() {
  return {
      {3, std::nullopt, true}, {4, std::nullopt, true}, {5, std::nullopt, true},
      {3, 0.30, true},         {4, 0.30, true},         {5, 0.30, true},
      {3, 0.40, true},         {4, 0.40, true},
      {3, 0.50, true},         {4, 0.50, true},         {5, 0.50, true},
      {3, 0.60, true},         {4, 0.60, true},
  };
}

}  // namespace skillgraph
