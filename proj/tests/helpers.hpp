#pragma once

#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "skillgraph/cluster.hpp"
#include "skillgraph/corpus.hpp"
#include "skillgraph/graph.hpp"
#include "skillgraph/risk.hpp"

namespace testing {

inline skillgraph::Task task(char level, bool automatable) {
  skillgraph::Task t;
  t.description = std::string("task ") + level;
  t.importance = level == 'P'   ? skillgraph::Importance::Primary
                 : level == 'S' ? skillgraph::Importance::Secondary
                                : skillgraph::Importance::Ancillary;
  t.automatable = automatable;
  return t;
}

inline skillgraph::JobPosting posting(std::string id, std::string isco4, std::vector<skillgraph::Task> tasks,
                                      std::vector<std::string> activities, std::vector<std::string> tools = {}) {
  skillgraph::JobPosting p;
  p.id = std::move(id);
  p.title = "job " + p.id;
  p.employer = "employer " + p.id;
  p.isco4 = std::move(isco4);
  p.tasks = std::move(tasks);
  p.activity_mentions = std::move(activities);
  p.tool_mentions = std::move(tools);
  return p;
}

// A single primary task; automatable iff `high`. Gives rho 100 or 0.
inline std::vector<skillgraph::Task> rho_extreme(bool high) { return {task('P', high)}; }

// One cluster per distinct form, in first-seen order.
inline std::vector<skillgraph::SkillCluster> singleton_clusters(const skillgraph::Corpus& c,
                                                                skillgraph::EntityKind kind) {
  std::vector<skillgraph::SkillCluster> out;
  for (const auto& f : skillgraph::collect_forms(c, kind)) {
    skillgraph::SkillCluster cl;
    char buf[16];
    std::snprintf(buf, sizeof buf, "%c%06zu", kind == skillgraph::EntityKind::activity ? 'A' : 'T', out.size() + 1);
    cl.canonical_id = buf;
    cl.kind = kind;
    cl.representative = f;
    cl.members = {f};
    out.push_back(cl);
  }
  return out;
}

inline skillgraph::KnowledgeGraph graph_of(const skillgraph::Corpus& c) {
  return skillgraph::build_graph(c, singleton_clusters(c, skillgraph::EntityKind::activity),
                                 singleton_clusters(c, skillgraph::EntityKind::tool));
}

inline std::filesystem::path fixture(const std::string& name) {
  return std::filesystem::path(SKILLGRAPH_FIXTURE_DIR) / name;
}

inline std::filesystem::path scratch_dir(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("skillgraph_test_" + name);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

}  // namespace testing
