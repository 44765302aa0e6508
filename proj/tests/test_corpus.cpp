#include <set>
#include <sstream>

#include "doctest.h"
#include "helpers.hpp"
#include "skillgraph/corpus.hpp"
#include "skillgraph/error.hpp"
#include "skillgraph/risk.hpp"

using namespace skillgraph;
using testing::posting;
using testing::task;

namespace {

std::string record(const std::string& id, const std::string& extra = "") {
  return R"({"id":")" + id +
         R"(","title":"clerk","employer":"Nile","source":"wuzzuf","isco4":"4132","tasks":[{"description":"x","importance":"P","automatable":true}],"activities":["a"],"tools":[])" +
         extra + "}\n";
}

ErrorCode code_of(const std::string& text) {
  std::istringstream in(text);
  try {
    parse_postings(in);
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::Internal;
}

SynthConfig small_synth(std::uint64_t seed, std::size_t n) {
  SynthConfig c;
  c.seed = seed;
  c.n_jobs = n;
  c.isco_mix = {{1, 0.5}, {4, 0.5}};
  c.canonical_activities = 60;
  c.canonical_tools = 20;
  c.synonym_variants_per_canonical = {1, 3};
  return c;
}

std::string dump(const Corpus& c) {
  std::ostringstream out;
  write_postings(c, out);
  return out.str();
}

}  // namespace

TEST_CASE("two valid records load") {
  std::istringstream in(record("J1") + record("J2"));
  auto c = parse_postings(in);
  CHECK(c.postings.size() == 2);
  CHECK(c.postings[0].tasks[0].importance == Importance::Primary);
  CHECK(c.postings[1].source == Source::wuzzuf);
}

TEST_CASE("record errors") {
  CHECK(code_of(R"({"id":"J1","employer":"e","source":"wuzzuf","isco4":"4132","tasks":[],"activities":[],"tools":[]})"
                "\n") == ErrorCode::MissingField);
  CHECK(code_of("not json\n") == ErrorCode::MissingField);

  std::istringstream dup(record("J1") + record("J1"));
  try {
    parse_postings(dup);
    FAIL("duplicate accepted");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DuplicateId);
    CHECK(e.detail() == "J1");
  }

  std::string bad_isco = record("J1");
  bad_isco.replace(bad_isco.find("4132"), 4, "41A2");
  CHECK(code_of(bad_isco) == ErrorCode::BadIsco);
  std::string short_isco = record("J1");
  short_isco.replace(short_isco.find("4132"), 4, "413");
  CHECK(code_of(short_isco) == ErrorCode::BadIsco);

  std::string no_tasks = record("J1");
  no_tasks.replace(no_tasks.find("[{"), no_tasks.find("}]") + 2 - no_tasks.find("[{"), "[]");
  CHECK(code_of(no_tasks) == ErrorCode::InvalidRecord);

  std::string many = R"({"id":"J1","title":"t","employer":"e","source":"linkedin","isco4":"1111","tasks":[)";
  for (int i = 0; i < 16; ++i) many += std::string(i ? "," : "") + R"({"description":"x","importance":"S","automatable":false})";
  many += R"(],"activities":[],"tools":[]})";
  CHECK(code_of(many + "\n") == ErrorCode::InvalidRecord);

  std::string bad_importance = record("J1");
  bad_importance.replace(bad_importance.find("\"P\""), 3, "\"X\"");
  CHECK(code_of(bad_importance) == ErrorCode::InvalidRecord);
}

TEST_CASE("write and parse round trip") {
  Corpus c;
  c.postings.push_back(posting("J1", "4132", {task('P', true), task('A', false)}, {"a", "b"}, {"t"}));
  c.postings.push_back(posting("J2", "2433", {task('S', false)}, {}, {}));
  c.postings[1].source = Source::forasna;
  std::istringstream in(dump(c));
  auto back = parse_postings(in);
  CHECK(back.postings == c.postings);
}

TEST_CASE("serialized key order is fixed") {
  auto p = posting("J1", "4132", {task('P', true)}, {"a"}, {"t"});
  const auto s = serialize_posting(p);
  const char* keys[] = {"\"id\"", "\"title\"", "\"employer\"", "\"source\"", "\"isco4\"", "\"tasks\"", "\"activities\"", "\"tools\""};
  std::size_t last = 0;
  for (const char* k : keys) {
    const auto at = s.find(k);
    REQUIRE(at != std::string::npos);
    CHECK(at >= last);
    last = at;
  }
}

TEST_CASE("title jaccard tokenization") {
  CHECK(title_jaccard("senior data entry clerk", "data entry clerk senior") == 1.0);
  CHECK(title_jaccard("Data-Entry, Clerk", "dataentry clerk") == 1.0);
  CHECK(title_jaccard("a b", "c d") == 0.0);
  CHECK(title_jaccard("", "") == 1.0);
}

TEST_CASE("deduplicate examples") {
  Corpus c;
  auto p1 = posting("J1", "4132", {task('P', true)}, {});
  auto p2 = posting("J2", "4132", {task('P', true)}, {});
  p1.title = "senior data entry clerk";
  p2.title = "data entry clerk senior";
  p1.employer = p2.employer = "Nile";
  c.postings = {p1, p2};
  auto d = deduplicate(c);
  REQUIRE(d.postings.size() == 1);
  CHECK(d.postings[0].id == "J1");

  // 17 shared tokens, union 20: Jaccard exactly 0.85, kept under the strict rule.
  std::string base;
  for (int i = 0; i < 17; ++i) base += "w" + std::to_string(i) + " ";
  p1.title = base + "x1";
  p2.title = base + "y1 y2";
  CHECK(title_jaccard(p1.title, p2.title) == 0.85);
  c.postings = {p1, p2};
  CHECK(deduplicate(c, 0.85).postings.size() == 2);

  p1.title = p2.title = "accountant";
  p2.employer = "Other";
  c.postings = {p1, p2};
  CHECK(deduplicate(c).postings.size() == 2);

  CHECK(deduplicate(Corpus{}).postings.empty());
}

TEST_CASE("deduplicate is idempotent and never invents postings") {
  auto c = generate_synthetic_corpus(small_synth(5, 300));
  // Inject near-copies so there is something to collapse.
  for (std::size_t i = 0; i < 40; ++i) {
    auto copy = c.postings[i * 3];
    copy.id = "DUP" + std::to_string(i);
    c.postings.push_back(copy);
  }
  const auto once = deduplicate(c);
  const auto twice = deduplicate(once);
  CHECK(once.postings == twice.postings);
  CHECK(once.postings.size() <= c.postings.size() - 40);
  std::set<std::string> ids;
  for (const auto& p : c.postings) ids.insert(p.id);
  for (const auto& p : once.postings) CHECK(ids.count(p.id) == 1);
}

TEST_CASE("generator determinism") {
  const auto a = generate_synthetic_corpus(small_synth(42, 200));
  const auto b = generate_synthetic_corpus(small_synth(42, 200));
  CHECK(dump(a) == dump(b));
  CHECK(a.ground_truth == b.ground_truth);
  CHECK(a.seed == std::optional<std::uint64_t>(42));
  CHECK(a.provenance == Provenance::synthetic);
  const auto c = generate_synthetic_corpus(small_synth(43, 200));
  CHECK(dump(a) != dump(c));
  CHECK(generate_synthetic_corpus(small_synth(1, 0)).postings.empty());
}

TEST_CASE("generated postings satisfy record invariants") {
  const auto c = generate_synthetic_corpus(small_synth(9, 300));
  std::set<std::string> ids;
  for (const auto& p : c.postings) {
    CHECK(ids.insert(p.id).second);
    CHECK(is_valid_isco4(p.isco4));
    CHECK(p.tasks.size() >= 1);
    CHECK(p.tasks.size() <= kMaxTasksPerJob);
    for (const auto& m : p.activity_mentions) CHECK(c.ground_truth.activities.count(m) == 1);
    for (const auto& m : p.tool_mentions) CHECK(c.ground_truth.tools.count(m) == 1);
  }
  // Round trip through the file format.
  std::istringstream in(dump(c));
  CHECK(parse_postings(in).postings == c.postings);
}

TEST_CASE("synth config validation") {
  auto c = small_synth(1, 10);
  c.isco_mix = {{1, 0.5}, {4, 0.4}};
  CHECK_THROWS_AS(generate_synthetic_corpus(c), Error);
  try {
    validate_synth_config(c);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::BadConfig);
  }
  c = small_synth(1, 10);
  c.automatable_bias = {{4, 1.5}};
  CHECK_THROWS_AS(validate_synth_config(c), Error);
  c = small_synth(1, 10);
  c.synonym_variants_per_canonical = {3, 2};
  CHECK_THROWS_AS(validate_synth_config(c), Error);
}

TEST_CASE("automatable bias orders group risk") {
  auto cfg = small_synth(2024, 1000);
  cfg.automatable_bias = {{4, 0.7}, {1, 0.2}};
  const auto c = generate_synthetic_corpus(cfg);
  const auto profiles = profile_corpus(c);
  const auto rows = aggregate_by_isco(profiles, c, 1, 1);
  double m1 = -1, m4 = -1;
  for (const auto& r : rows) {
    if (r.group_code == "1") m1 = r.mean_rho;
    if (r.group_code == "4") m4 = r.mean_rho;
  }
  REQUIRE(m1 >= 0);
  REQUIRE(m4 >= 0);
  CHECK(m4 > m1);
}

TEST_CASE("ground truth file round trip") {
  GroundTruth g;
  g.activities = {{"Budget Mgmt", "budget management"}, {"budget management", "budget management"}};
  g.tools = {{"ACME LEDGER", "ledger"}};
  std::stringstream s;
  write_ground_truth(g, s);
  CHECK(read_ground_truth(s) == g);
}
