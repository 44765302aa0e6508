#include <cmath>
#include <random>
#include <set>

#include "doctest.h"
#include "helpers.hpp"
#include "oracles.hpp"
#include "skillgraph/error.hpp"
#include "skillgraph/graph.hpp"

using namespace skillgraph;
using testing::posting;
using testing::task;

namespace {

UndirectedGraph to_graph(const oracle::Adjacency& adj) {
  UndirectedGraph g(adj.size());
  for (std::size_t u = 0; u < adj.size(); ++u)
    for (int v : adj[u])
      if (static_cast<std::size_t>(v) > u) g.add_edge(static_cast<NodeId>(u), static_cast<NodeId>(v));
  return g;
}

oracle::Adjacency two_triangles(bool bridged) {
  oracle::Adjacency adj(6);
  auto e = [&](int a, int b) {
    adj[a].insert(b);
    adj[b].insert(a);
  };
  e(0, 1), e(1, 2), e(0, 2), e(3, 4), e(4, 5), e(3, 5);
  if (bridged) e(2, 3);
  return adj;
}

std::vector<int> as_int(std::span<const std::uint32_t> a) { return {a.begin(), a.end()}; }

SkillCluster cluster(std::string id, EntityKind kind, std::vector<std::string> members) {
  SkillCluster c;
  c.canonical_id = std::move(id);
  c.kind = kind;
  c.representative = members.front();
  c.members = std::move(members);
  return c;
}

}  // namespace

TEST_CASE("variants resolve to one activity node") {
  Corpus c;
  c.postings.push_back(posting("J1", "1111", {task('P', true)}, {"budgeting"}));
  c.postings.push_back(posting("J2", "1112", {task('P', true)}, {"Budgeting", "budgeting"}));
  const std::vector<SkillCluster> acts{cluster("A1", EntityKind::activity, {"budgeting", "Budgeting"})};
  const auto g = build_graph(c, acts, {});
  CHECK(g.num_nodes() == 3);
  CHECK(g.num_performs_edges() == 2);
  CHECK(g.activities_of_job(1).size() == 1);
}

TEST_CASE("co-mention rule for USES edges") {
  Corpus c;
  c.postings.push_back(posting("J1", "1111", {task('P', true)}, {"a", "b"}, {"t1"}));
  c.postings.push_back(posting("J2", "1111", {task('P', true)}, {"b"}, {"t2", "t1"}));
  c.postings.push_back(posting("J3", "1111", {task('P', true)}, {"c"}, {}));
  const auto g = testing::graph_of(c);
  // Oracle: every (activity, tool) pair co-mentioned in some posting.
  std::set<std::pair<std::string, std::string>> expected;
  for (const auto& p : c.postings)
    for (const auto& a : p.activity_mentions)
      for (const auto& t : p.tool_mentions) expected.insert({a, t});
  std::set<std::pair<std::string, std::string>> got;
  for (std::size_t a = 0; a < g.num_activities(); ++a)
    for (auto t : g.tools_of_activity(a)) got.insert({g.activity(a).label, g.tool(t).label});
  CHECK(got == expected);
  CHECK(g.num_uses_edges() == expected.size());
  CHECK(as_int(g.tools_of_job(1)) == std::vector<int>{0, 1});
  CHECK(g.tools_of_job(2).empty());

  std::size_t sum = 0;
  for (std::size_t j = 0; j < g.num_jobs(); ++j) sum += g.activities_of_job(j).size();
  CHECK(sum == g.num_performs_edges());
  CHECK(g.full_graph().num_edges() == g.num_performs_edges() + g.num_uses_edges());
  CHECK(g.performs_graph().num_nodes() == g.num_jobs() + g.num_activities());
}

TEST_CASE("graph build errors") {
  Corpus c;
  c.postings.push_back(posting("J1", "1111", {task('P', true)}, {"a"}));
  try {
    build_graph(c, {}, {});
    FAIL("no error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::UnresolvedMention);
    CHECK(e.detail() == "a");
  }
  c.postings.push_back(c.postings[0]);
  try {
    testing::graph_of(c);
    FAIL("no error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DuplicateId);
  }
}

TEST_CASE("graph build is deterministic") {
  SynthConfig cfg;
  cfg.seed = 4;
  cfg.n_jobs = 150;
  cfg.isco_mix = {{3, 1.0}};
  cfg.canonical_activities = 50;
  cfg.canonical_tools = 10;
  const auto corpus = generate_synthetic_corpus(cfg);
  const auto a = testing::graph_of(corpus);
  const auto b = testing::graph_of(corpus);
  CHECK(a.full_graph().edges() == b.full_graph().edges());
}

TEST_CASE("topology arithmetic") {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", mean_job_degree(84346, 9978));
  CHECK(std::string(buf) == "8.45");
  std::snprintf(buf, sizeof buf, "%.5f", bipartite_density(84346, 9978, 19766));
  CHECK(std::string(buf) == "0.00043");
  CHECK_THROWS_AS(mean_job_degree(1, 0), Error);

  Corpus c;
  c.postings.push_back(posting("J1", "1111", {task('P', true)}, {"a"}));
  const auto s = topology_stats(testing::graph_of(c));
  CHECK(s.mean_degree == 1.0);
  CHECK(s.bipartite_density == 1.0);
  CHECK_FALSE(s.gamma.has_value());

  Corpus empty;
  empty.postings.push_back(posting("J1", "1111", {task('P', true)}, {}));
  CHECK_THROWS_AS(topology_stats(testing::graph_of(empty)), Error);
}

TEST_CASE("power law fit against the oracle") {
  std::mt19937_64 rng(230);
  const auto xs = oracle::zipf_sample(rng, 2.3, 1, 10000);
  const double fitted = fit_power_law(xs, 1);
  CHECK(std::fabs(fitted - 2.3) <= 0.15);
  CHECK(std::fabs(fitted - oracle::power_law_mle(xs, 1)) <= 0.005);
  const double fitted2 = fit_power_law(xs, 2);
  CHECK(std::fabs(fitted2 - oracle::power_law_mle(xs, 2)) <= 0.005);
  CHECK(fitted2 != doctest::Approx(fitted).epsilon(1e-6));

  CHECK(hurwitz_zeta(2.0, 1) == doctest::Approx(M_PI * M_PI / 6.0));
  CHECK(hurwitz_zeta(2.5, 3) == doctest::Approx(oracle::zeta(2.5, 3.0)).epsilon(1e-8));

  const std::vector<std::size_t> same(20, 4);
  try {
    fit_power_law(same);
    FAIL("no error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DegenerateSample);
  }
  const std::vector<std::size_t> few{1, 2, 3};
  try {
    fit_power_law(few);
    FAIL("no error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::TooFewPoints);
  }
}

TEST_CASE("modularity identities") {
  const auto adj = two_triangles(false);
  const auto g = to_graph(adj);
  CHECK(modularity(g, std::vector<std::uint32_t>(6, 0)) == 0.0);
  const std::vector<std::uint32_t> split{0, 0, 0, 1, 1, 1};
  CHECK(modularity(g, split) == doctest::Approx(0.5));
  const std::vector<std::uint32_t> singletons{0, 1, 2, 3, 4, 5};
  CHECK(modularity(g, singletons) < modularity(g, split));
  CHECK_THROWS_AS(modularity(g, std::vector<std::uint32_t>(5, 0)), Error);

  std::mt19937_64 rng(5);
  for (int i = 0; i < 50; ++i) {
    const auto r = oracle::random_graph(rng, 7, 0.4);
    std::vector<std::uint32_t> a(7);
    std::vector<int> ai(7);
    for (int k = 0; k < 7; ++k) ai[k] = static_cast<int>(a[k] = rng() % 3);
    CHECK(modularity(to_graph(r), a) == doctest::Approx(oracle::modularity(r, ai)).epsilon(1e-12));
  }
}

TEST_CASE("louvain recovers bridged triangles") {
  const auto adj = two_triangles(true);
  const auto p = louvain_partition(to_graph(adj), 1);
  CHECK(p.num_communities == 2);
  CHECK(p.assignment[0] == p.assignment[1]);
  CHECK(p.assignment[1] == p.assignment[2]);
  CHECK(p.assignment[3] == p.assignment[4]);
  CHECK(p.assignment[2] != p.assignment[3]);
  CHECK(p.q == doctest::Approx(oracle::best_modularity(adj)).epsilon(1e-9));
}

TEST_CASE("louvain on K4 and determinism") {
  oracle::Adjacency k4(4);
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      if (a != b) k4[a].insert(b);
  const auto p = louvain_partition(to_graph(k4), 3);
  CHECK(p.num_communities == 1);

  std::mt19937_64 rng(8);
  for (int i = 0; i < 40; ++i) {
    const auto r = oracle::random_graph(rng, 8, 0.35);
    const auto g = to_graph(r);
    if (g.num_edges() == 0) continue;
    const auto a = louvain_partition(g, 42);
    const auto b = louvain_partition(g, 42);
    CHECK(a.assignment == b.assignment);
    CHECK(a.q >= 0.0);
    CHECK(a.q <= oracle::best_modularity(r) + 1e-9);
    CHECK(a.q == doctest::Approx(modularity(g, a.assignment)).epsilon(1e-12));
  }
  CHECK_THROWS_AS(louvain_partition(UndirectedGraph(0), 1), Error);
}

TEST_CASE("canonical labels") {
  const std::vector<std::uint32_t> a{5, 5, 2, 9, 2};
  CHECK(canonical_labels(a) == std::vector<std::uint32_t>{0, 0, 1, 2, 1});
}

TEST_CASE("community summaries") {
  // J1,J2 share a; J3 has b; tool t used with b.
  Corpus c;
  c.postings.push_back(posting("J1", "1111", {task('P', true)}, {"a"}));
  c.postings.push_back(posting("J2", "1111", {task('P', true)}, {"a"}));
  c.postings.push_back(posting("J3", "1111", {task('P', true)}, {"b", "a"}, {"t"}));
  const auto g = testing::graph_of(c);
  // Nodes: J1 J2 J3 a b t. Community 0 = {J1, J2, a}, community 1 = {J3, b, t}.
  CommunityPartition p;
  p.assignment = {0, 0, 1, 0, 1, 1};
  p.num_communities = 2;
  const std::vector<double> rho{50.0, 52.6, 10.0};
  const auto s = community_summaries(g, p, rho);
  REQUIRE(s.size() == 2);
  CHECK(s[0].size == 3);
  // Community 0: J1-a, J2-a internal; J3-a boundary: 2 internal of 3 touching.
  // USES edges a-t and b-t also exist (J3 co-mentions both), so count them.
  std::size_t internal0 = 0, touching0 = 0, internal1 = 0, touching1 = 0;
  for (auto [u, v] : g.full_graph().edges()) {
    const bool in_u = p.assignment[u] == 0, in_v = p.assignment[v] == 0;
    if (in_u || in_v) ++touching0;
    if (in_u && in_v) ++internal0;
    if (!in_u || !in_v) ++touching1;
    if (!in_u && !in_v) ++internal1;
  }
  for (const auto& row : s) {
    if (row.community_id == 0) {
      CHECK(row.q_int == doctest::Approx(double(internal0) / touching0));
      CHECK(*row.mean_rho == doctest::Approx(51.3));
      CHECK(row.n_jobs == 2);
    } else {
      CHECK(row.q_int == doctest::Approx(double(internal1) / touching1));
    }
    CHECK(row.q_int >= 0.0);
    CHECK(row.q_int <= 1.0);
  }

  CommunityPartition one;
  one.assignment.assign(6, 0);
  one.num_communities = 1;
  CHECK(community_summaries(g, one, rho)[0].q_int == 1.0);
  CHECK_THROWS_AS(community_summaries(g, one, std::vector<double>{1.0}), Error);
}

TEST_CASE("risk_by_job needs every profile") {
  Corpus c;
  c.postings.push_back(posting("J1", "1111", {task('P', true)}, {}));
  const auto g = testing::graph_of(c);
  CHECK(risk_by_job(g, profile_corpus(c)) == std::vector<double>{100.0});
  CHECK_THROWS_AS(risk_by_job(g, std::vector<JobRiskProfile>{}), Error);
}
