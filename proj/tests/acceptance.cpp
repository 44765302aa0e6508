// Acceptance suite: one PASS/FAIL line per criterion.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "helpers.hpp"
#include "oracles.hpp"
#include "skillgraph/cluster.hpp"
#include "skillgraph/graph.hpp"
#include "skillgraph/metrics.hpp"
#include "skillgraph/pipeline.hpp"
#include "skillgraph/report.hpp"
#include "skillgraph/risk.hpp"
#include "skillgraph/transitions.hpp"

using namespace skillgraph;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok && pass) {
      pass = false;
      detail = what;
    }
  }
};

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

std::string fmt(const char* f, double a, double b = 0, double c = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

std::string pct(double fraction, int decimals) { return report::format_fixed(fraction * 100.0, decimals); }

UndirectedGraph to_graph(const oracle::Adjacency& adj) {
  UndirectedGraph g(adj.size());
  for (std::size_t u = 0; u < adj.size(); ++u)
    for (int v : adj[u])
      if (static_cast<std::size_t>(v) > u) g.add_edge(static_cast<NodeId>(u), static_cast<NodeId>(v));
  return g;
}

Outcome wilson() {
  Outcome o;
  const auto t0 = Clock::now();
  const auto all = wilson_interval(8, 1085);
  const auto acts = wilson_interval(0, 565);
  const auto tools = wilson_interval(8, 520);
  const double ms = ms_since(t0);
  o.require(pct(all.lo, 2) == "0.37" && pct(all.hi, 2) == "1.45",
            "combined [" + pct(all.lo, 2) + ", " + pct(all.hi, 2) + "]");
  o.require(std::fabs(acts.lo * 100) <= 0.02 && std::fabs(acts.hi * 100 - 0.67) <= 0.02,
            "activities [" + pct(acts.lo, 2) + ", " + pct(acts.hi, 2) + "]");
  o.require(std::fabs(tools.lo * 100 - 0.78) <= 0.02 && std::fabs(tools.hi * 100 - 3.00) <= 0.02,
            "tools [" + pct(tools.lo, 2) + ", " + pct(tools.hi, 2) + "]");
  o.require(ms < 1.0, fmt("runtime %.3f ms", ms));
  if (o.pass)
    o.detail = "combined [" + pct(all.lo, 2) + "%, " + pct(all.hi, 2) + "%], activities [" + pct(acts.lo, 2) + "%, " +
               pct(acts.hi, 2) + "%], tools [" + pct(tools.lo, 2) + "%, " + pct(tools.hi, 2) + "%], " +
               fmt("%.3f ms", ms);
  return o;
}

Outcome topology() {
  Outcome o;
  const auto t0 = Clock::now();
  const auto md = report::format_fixed(mean_job_degree(84346, 9978), 2);
  const auto dens = report::format_fixed(bipartite_density(84346, 9978, 19766), 5);
  const double ms = ms_since(t0);
  o.require(md == "8.45", "mean degree " + md);
  o.require(dens == "0.00043", "density " + dens);
  o.require(ms < 1.0, fmt("runtime %.3f ms", ms));
  if (o.pass) o.detail = "mean degree " + md + ", density " + dens + fmt(", %.3f ms", ms);
  return o;
}

Outcome heterogeneity() {
  Outcome o;
  struct Row {
    const char* code;
    std::size_t high, low;
    double printed;
  } rows[] = {{"331", 76, 25, 24.8}, {"241", 230, 163, 41.5}, {"216", 168, 137, 44.9}, {"333", 41, 106, 72.1}};
  Corpus c;
  std::vector<std::string> codes;
  for (const auto& r : rows) {
    codes.push_back(r.code);
    for (std::size_t i = 0; i < r.high + r.low; ++i)
      c.postings.push_back(testing::posting(std::string(r.code) + "_" + std::to_string(i), std::string(r.code) + "1",
                                            testing::rho_extreme(i < r.high), {}));
  }
  const auto table = heterogeneity_table(profile_corpus(c), c, codes);
  std::string shown;
  for (std::size_t i = 0; i < 4; ++i) {
    const auto& r = table[i];
    o.require(r.high_count == rows[i].high && r.low_count == rows[i].low, std::string("counts for ") + rows[i].code);
    o.require(r.low_share && std::fabs(*r.low_share * 100.0 - rows[i].printed) <= 0.05,
              std::string("low share for ") + rows[i].code);
    const auto text = r.low_share ? pct(*r.low_share, 1) : std::string("undefined");
    o.require(text == report::format_fixed(rows[i].printed, 1), std::string("rendering for ") + rows[i].code);
    shown += (i ? ", " : "") + text;
  }
  if (o.pass) o.detail = "low share " + shown;
  return o;
}

Outcome importance() {
  Outcome o;
  struct Row {
    std::size_t k, d;
    std::uint64_t i_pr;
    double rho;
    SkillTier tier;
  } rows[] = {{529, 27, 14283, 42.3, SkillTier::Universal}, {387, 27, 10449, 34.6, SkillTier::Universal},
              {577, 15, 8655, 33.0, SkillTier::Tier1},      {328, 22, 7216, 40.8, SkillTier::Tier2},
              {355, 18, 6390, 33.0, SkillTier::Tier1},      {293, 21, 6153, 38.9, SkillTier::Tier2},
              {321, 17, 5457, 37.8, SkillTier::Tier2},      {411, 12, 4932, 30.7, SkillTier::Tier1},
              {342, 14, 4788, 29.4, SkillTier::Tier1},      {467, 10, 4670, 28.7, SkillTier::Tier1}};
  // 27 distinct ISCO-2 prefixes.
  std::vector<std::string> prefixes;
  for (int a = 1; a <= 9 && prefixes.size() < 27; ++a)
    for (int b = 1; b <= 4 && prefixes.size() < 27; ++b) prefixes.push_back(std::to_string(a) + std::to_string(b));
  Corpus c;
  std::vector<double> rho;
  for (std::size_t r = 0; r < 10; ++r) {
    const std::string skill = "skill" + std::to_string(r);
    for (std::size_t j = 0; j < rows[r].k; ++j) {
      c.postings.push_back(testing::posting("R" + std::to_string(r) + "_" + std::to_string(j),
                                            prefixes[j % rows[r].d] + "11", testing::rho_extreme(true), {skill}));
      rho.push_back(rows[r].rho);
    }
  }
  const auto g = testing::graph_of(c);
  const auto ranked = rank_skill_importance(g, rho, 10);
  o.require(ranked.size() == 10, "ranking size");
  for (std::size_t r = 0; r < 10 && o.pass; ++r) {
    const auto& m = ranked[r];
    const std::string row = "row " + std::to_string(r + 1);
    o.require(m.label == "skill" + std::to_string(r), row + " order");
    o.require(m.k == rows[r].k && m.d_isco == rows[r].d, row + " inputs");
    o.require(m.i_pr == rows[r].i_pr, row + " i_pr " + std::to_string(m.i_pr));
    o.require(m.i_pr == m.k * m.d_isco, row + " product");
    o.require(m.tier == rows[r].tier, row + " tier " + std::string(skill_tier_name(m.tier)));
    o.require(m.mean_rho && report::format_fixed(*m.mean_rho, 1) == report::format_fixed(rows[r].rho, 1),
              row + " mean rho");
  }
  if (o.pass) o.detail = "10 rows, first i_pr " + std::to_string(ranked[0].i_pr) + ", tiers match";
  return o;
}

Outcome connection_pairs_check() {
  Outcome o;
  o.require(connection_pairs(std::vector<std::uint64_t>{10, 20}) == 200, "worked example");
  std::mt19937_64 rng(20250);
  for (int i = 0; i < 100 && o.pass; ++i) {
    std::vector<int> labels(1 + rng() % 60);
    std::vector<std::uint64_t> counts(3, 0);
    for (auto& l : labels) ++counts[static_cast<std::size_t>(l = static_cast<int>(rng() % 3))];
    o.require(connection_pairs(counts) == oracle::cross_pairs(labels), "case " + std::to_string(i));
  }
  if (o.pass) o.detail = "{10,20} -> 200; 100/100 seeded cases match";
  return o;
}

Outcome betweenness() {
  Outcome o;
  const auto t0 = Clock::now();
  std::mt19937_64 rng(1234);
  double worst = 0.0;
  for (int i = 0; i < 50; ++i) {
    const int n = 3 + static_cast<int>(rng() % 10);
    const auto adj = oracle::random_graph(rng, n, 0.25 + 0.05 * (i % 6));
    const auto got = betweenness_centrality(to_graph(adj));
    const auto want = oracle::betweenness(adj);
    for (int v = 0; v < n; ++v) worst = std::max(worst, std::fabs(got[v] - want[v]));
  }
  const double ms = ms_since(t0);
  o.require(worst <= 1e-9, fmt("max deviation %.3g", worst));
  o.require(ms < 5000.0, fmt("runtime %.0f ms", ms));
  if (o.pass) o.detail = fmt("50 graphs, max deviation %.1g, %.1f ms", worst, ms);
  return o;
}

Outcome modularity_check() {
  Outcome o;
  oracle::Adjacency adj(6);
  auto e = [&](int a, int b) {
    adj[a].insert(b);
    adj[b].insert(a);
  };
  e(0, 1), e(1, 2), e(0, 2), e(3, 4), e(4, 5), e(3, 5);
  const auto g = to_graph(adj);
  const double q_one = modularity(g, std::vector<std::uint32_t>(6, 0));
  const double q_split = modularity(g, std::vector<std::uint32_t>{0, 0, 0, 1, 1, 1});
  o.require(std::fabs(q_one) <= 1e-12, fmt("all-in-one Q %.3g", q_one));
  o.require(std::fabs(q_split - 0.5) <= 1e-12, fmt("split Q %.15f", q_split));
  e(2, 3);
  const auto p = louvain_partition(to_graph(adj), 0);
  const auto& a = p.assignment;
  const bool recovered = p.num_communities == 2 && a[0] == a[1] && a[1] == a[2] && a[3] == a[4] && a[4] == a[5] &&
                         a[0] != a[3];
  o.require(recovered, "louvain partition");
  o.require(std::fabs(p.q - oracle::best_modularity(adj)) <= 1e-9, "louvain Q below brute-force optimum");
  if (o.pass) o.detail = fmt("Q(one)=%.0f, Q(split)=%.1f, bridged triangles Q=%.4f", q_one, q_split, p.q);
  return o;
}

Outcome eq1() {
  Outcome o;
  std::mt19937_64 rng(31337);
  const auto grid = extended_threshold_grid();
  std::size_t total = 0;
  for (int trial = 0; trial < 100 && o.pass; ++trial) {
    Corpus c;
    std::vector<double> rho;
    const std::size_t n = 2 + rng() % 29;
    const std::size_t pool = 4 + rng() % 10;
    for (std::size_t j = 0; j < n; ++j) {
      std::vector<std::string> acts;
      const std::size_t k = rng() % 9;
      for (std::size_t i = 0; i < k; ++i) acts.push_back("act" + std::to_string(rng() % pool));
      c.postings.push_back(testing::posting("J" + std::to_string(100 + j), "2411", testing::rho_extreme(true), acts));
      rho.push_back(static_cast<double>(rng() % 21) * 5.0);
    }
    const auto g = testing::graph_of(c);
    std::vector<oracle::Job> jobs;
    for (std::size_t j = 0; j < g.num_jobs(); ++j) {
      oracle::Job job{g.job(j).id, rho[j], {}};
      for (const auto& m : c.postings[j].activity_mentions) job.activities.insert(m);
      jobs.push_back(job);
    }
    std::vector<std::set<oracle::Pair>> sets;
    for (const auto& cfg : grid) {
      const auto tn = enumerate_transition_network(g, rho, cfg);
      std::set<oracle::Pair> got;
      for (const auto& p : tn.pathways) got.insert({g.job(p.source).id, g.job(p.target).id});
      const auto want = oracle::realistic_pairs(jobs, cfg.tau, cfg.phi ? *cfg.phi : -1.0);
      o.require(got == want, "corpus " + std::to_string(trial) + " config " + describe(cfg));
      total += got.size();
      sets.push_back(got);
    }
    for (std::size_t a = 0; a < grid.size(); ++a)
      for (std::size_t b = 0; b < grid.size(); ++b) {
        const double pa = grid[a].phi.value_or(0.0), pb = grid[b].phi.value_or(0.0);
        if (grid[a].tau <= grid[b].tau && pa <= pb)
          for (const auto& p : sets[b])
            o.require(sets[a].count(p) == 1, "nesting " + describe(grid[b]) + " in " + describe(grid[a]));
      }
  }
  if (o.pass) o.detail = "100 corpora x 13 configs agree with the double loop (" + std::to_string(total) +
                         " pathways); nesting holds";
  return o;
}

Outcome risk_formula() {
  Outcome o;
  using testing::task;
  o.require(compute_risk(std::vector<Task>{task('P', true)}) == 100.0, "single primary");
  const double mixed = compute_risk(std::vector<Task>{task('P', true), task('S', false), task('A', true)});
  o.require(std::fabs(mixed - 70.0) <= 1e-12, fmt("mixed %.15f", mixed));
  o.require(compute_risk(std::vector<Task>{task('P', false), task('S', false), task('A', false)}) == 0.0, "none");
  std::mt19937_64 rng(1000);
  std::size_t flips = 0;
  for (int i = 0; i < 1000 && o.pass; ++i) {
    std::vector<Task> t;
    const int n = 1 + static_cast<int>(rng() % 15);
    for (int k = 0; k < n; ++k) t.push_back(task("PSA"[rng() % 3], rng() % 2 == 0));
    const double base = compute_risk(t);
    for (auto& x : t) {
      if (x.automatable) continue;
      x.automatable = true;
      o.require(compute_risk(t) >= base - 1e-12, "monotonicity on list " + std::to_string(i));
      x.automatable = false;
      ++flips;
    }
  }
  if (o.pass) o.detail = "100.0 / 70.0 / 0.0; 1000 lists, " + std::to_string(flips) + " flips monotone";
  return o;
}

Outcome determinism() {
  Outcome o;
  auto cfg = load_pipeline_config(testing::fixture("synthetic_seed7.json"));
  o.require(cfg.synthetic && cfg.synthetic->seed == 7 && cfg.synthetic->n_jobs == 500, "fixture config");
  const auto t0 = Clock::now();
  cfg.output_dir = testing::scratch_dir("acceptance_a");
  const auto a = run_stage(cfg, Stage::report).manifest;
  cfg.output_dir = testing::scratch_dir("acceptance_b");
  const auto b = run_stage(cfg, Stage::report).manifest;
  const double s = ms_since(t0) / 1000.0;
  o.require(!a.digest.empty() && a.digest == b.digest, "digests differ");
  o.require(a.files.size() > 20, "report bundle has " + std::to_string(a.files.size()) + " files");
  o.require(s < 60.0, fmt("runtime %.1f s", s));
  if (o.pass) o.detail = "digest " + a.digest.substr(0, 16) + "... twice, " + std::to_string(a.files.size()) +
                         " files, " + fmt("%.2f s for both runs", s);
  return o;
}

Outcome gradient() {
  Outcome o;
  const auto base = load_pipeline_config(testing::fixture("synthetic_seed7.json"));
  std::string margins;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    auto sc = *base.synthetic;
    sc.seed = seed;
    const auto c = generate_synthetic_corpus(sc);
    const auto rows = aggregate_by_isco(profile_corpus(c), c, 1, 1);
    double m1 = -1, m4 = -1;
    for (const auto& r : rows) {
      if (r.group_code == "1") m1 = r.mean_rho;
      if (r.group_code == "4") m4 = r.mean_rho;
    }
    o.require(m1 >= 0 && m4 >= 0, "seed " + std::to_string(seed) + " lacks a group");
    o.require(m4 > m1, "seed " + std::to_string(seed) + fmt(": ISCO-4 %.1f vs ISCO-1 %.1f", m4, m1));
    margins += (seed > 1 ? " " : "") + report::format_fixed(m4 - m1, 1);
  }
  if (o.pass) o.detail = "mean rho gap (ISCO-4 minus ISCO-1) per seed: " + margins;
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"wilson-ci", wilson},
      {"topology-arithmetic", topology},
      {"heterogeneity-low-share", heterogeneity},
      {"importance-products", importance},
      {"connection-pairs", connection_pairs_check},
      {"betweenness-oracle", betweenness},
      {"modularity-identities", modularity_check},
      {"transition-rule-oracle", eq1},
      {"risk-formula", risk_formula},
      {"end-to-end-determinism", determinism},
      {"synthetic-gradient", gradient},
  };
  int failed = 0;
  for (const auto& [name, run] : criteria) {
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    std::printf("%s %s: %s\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str());
    failed += !o.pass;
  }
  std::printf("%zu criteria, %d failed\n", criteria.size(), failed);
  return failed == 0 ? 0 : 1;
}
