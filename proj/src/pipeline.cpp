#include "skillgraph/pipeline.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "skillgraph/embedding.hpp"
#include "skillgraph/error.hpp"
#include "skillgraph/metrics.hpp"

namespace skillgraph {

namespace fs = std::filesystem;
using json = nlohmann::json;
using report::Cell;
using report::Table;

// ---------------------------------------------------------------------------
// configuration

std::map<Stratum, std::size_t> default_validation_plan() {
  return {
      {{EntityKind::tool, SizeBand::Two}, 420},
      {{EntityKind::tool, SizeBand::ThreeToFive}, 97},
      {{EntityKind::tool, SizeBand::SixToTen}, 3},
      {{EntityKind::tool, SizeBand::ElevenPlus}, 0},
      {{EntityKind::activity, SizeBand::Two}, 381},
      {{EntityKind::activity, SizeBand::ThreeToFive}, 131},
      {{EntityKind::activity, SizeBand::SixToTen}, 49},
      {{EntityKind::activity, SizeBand::ElevenPlus}, 4},
  };
}

namespace {

[[noreturn]] void bad(const std::string& key, const std::string& msg) { throw Error(ErrorCode::BadConfig, key, msg); }

template <typename T>
T get(const json& j, const std::string& key, T fallback) {
  if (!j.contains(key) || j.at(key).is_null()) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    bad(key, "wrong type");
  }
}

std::size_t get_count(const json& j, const std::string& key, std::size_t fallback) {
  if (!j.contains(key) || j.at(key).is_null()) return fallback;
  const auto& v = j.at(key);
  if (!v.is_number_integer() || v.get<std::int64_t>() < 0) bad(key, "must be a non-negative integer");
  return v.get<std::size_t>();
}

std::uint64_t get_seed(const json& j, const std::string& key, std::uint64_t fallback) {
  if (!j.contains(key) || j.at(key).is_null()) return fallback;
  const auto& v = j.at(key);
  if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<std::int64_t>() < 0))
    bad(key, "must be a non-negative integer");
  return v.get<std::uint64_t>();
}

fs::path resolve(const fs::path& base, const std::string& p) {
  fs::path path(p);
  return path.is_absolute() || base.empty() ? path : base / path;
}

std::map<int, double> group_map(const json& j, const std::string& key) {
  std::map<int, double> out;
  if (!j.contains(key)) return out;
  if (!j.at(key).is_object()) bad(key, "must map ISCO major groups to numbers");
  for (const auto& [k, v] : j.at(key).items()) {
    if (k.size() != 1 || k[0] < '0' || k[0] > '9') bad(key, "keys must be single ISCO digits");
    if (!v.is_number()) bad(key, "values must be numbers");
    out[k[0] - '0'] = v.get<double>();
  }
  return out;
}

ThresholdConfig parse_threshold(const json& j, const std::string& key) {
  if (!j.is_object()) bad(key, "threshold entries must be objects");
  ThresholdConfig c;
  c.tau = get_count(j, "tau", 3);
  if (j.contains("phi")) {
    if (j.at("phi").is_null()) c.phi.reset();
    else if (j.at("phi").is_number()) c.phi = j.at("phi").get<double>();
    else bad(key + ".phi", "must be a number or null");
  }
  c.require_risk_drop = get<bool>(j, "require_risk_drop", true);
  try {
    validate_thresholds(c);
  } catch (const Error& e) {
    bad(key, e.what());
  }
  return c;
}

std::optional<SizeBand> parse_band(std::string_view s) {
  if (s == "2") return SizeBand::Two;
  if (s == "3-5") return SizeBand::ThreeToFive;
  if (s == "6-10") return SizeBand::SixToTen;
  if (s == "11+") return SizeBand::ElevenPlus;
  return std::nullopt;
}

}  // namespace

PipelineConfig parse_pipeline_config(std::string_view json_text, const fs::path& base_dir) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    bad("config", std::string("not valid JSON: ") + e.what());
  }
  if (!j.is_object()) bad("config", "top level must be an object");

  PipelineConfig cfg;
  cfg.seed = get_seed(j, "seed", 0);

  if (!j.contains("corpus") || !j.at("corpus").is_object()) bad("corpus", "missing corpus section");
  const auto& c = j.at("corpus");
  const bool has_path = c.contains("path"), has_synth = c.contains("synthetic");
  if (has_path == has_synth) bad("corpus", "give exactly one of path or synthetic");
  if (has_path) {
    cfg.corpus_path = resolve(base_dir, get<std::string>(c, "path", ""));
  } else {
    const auto& s = c.at("synthetic");
    if (!s.is_object()) bad("corpus.synthetic", "must be an object");
    SynthConfig sc;
    cfg.synthetic_seed_given = s.contains("seed");
    sc.seed = get_seed(s, "seed", cfg.seed);
    sc.n_jobs = get_count(s, "n_jobs", 500);
    sc.isco_mix = group_map(s, "isco_mix");
    if (sc.isco_mix.empty())
      for (int g = 1; g <= 9; ++g) sc.isco_mix[g] = 1.0 / 9.0;
    sc.canonical_activities = get_count(s, "canonical_activities", 200);
    sc.canonical_tools = get_count(s, "canonical_tools", 80);
    if (s.contains("synonym_variants_per_canonical")) {
      const auto& v = s.at("synonym_variants_per_canonical");
      if (!v.is_object()) bad("synonym_variants_per_canonical", "must be {min, max}");
      sc.synonym_variants_per_canonical = {get_count(v, "min", 1), get_count(v, "max", 3)};
    }
    sc.automatable_bias = group_map(s, "automatable_bias");
    cfg.synthetic = sc;
  }

  cfg.dedup_threshold = get<double>(j, "dedup_threshold", kDefaultTitleThreshold);
  if (j.contains("embedding")) {
    const auto& e = j.at("embedding");
    cfg.embedding_dimension = get_count(e, "dimension", 256);
    cfg.embedding_perturbation = get<double>(e, "max_perturbation", 0.15);
  }
  if (j.contains("cluster")) {
    const auto& cl = j.at("cluster");
    cfg.theta = get<double>(cl, "theta", kDefaultTheta);
    if (cl.contains("grid")) {
      const auto& g = cl.at("grid");
      cfg.grid_lo = get<double>(g, "lo", 0.80);
      cfg.grid_hi = get<double>(g, "hi", 0.95);
      cfg.grid_step = get<double>(g, "step", 0.01);
    }
    cfg.labeled_pairs = get_count(cl, "labeled_pairs", 500);
    if (cl.contains("labeled_pairs_path"))
      cfg.labeled_pairs_path = resolve(base_dir, get<std::string>(cl, "labeled_pairs_path", ""));
  }

  bool grid_from_thresholds = false;
  if (j.contains("thresholds")) {
    const auto& t = j.at("thresholds");
    if (t.is_array()) {
      if (t.empty()) bad("thresholds", "list must not be empty");
      std::vector<ThresholdConfig> list;
      for (const auto& e : t) list.push_back(parse_threshold(e, "thresholds"));
      cfg.thresholds = list.front();
      cfg.sensitivity_grid = list;
      grid_from_thresholds = true;
    } else {
      cfg.thresholds = parse_threshold(t, "thresholds");
    }
  }
  if (j.contains("sensitivity_grid")) {
    const auto& t = j.at("sensitivity_grid");
    if (!t.is_array() || t.empty()) bad("sensitivity_grid", "must be a non-empty list");
    cfg.sensitivity_grid.clear();
    for (const auto& e : t) cfg.sensitivity_grid.push_back(parse_threshold(e, "sensitivity_grid"));
  } else if (!grid_from_thresholds) {
    cfg.sensitivity_grid = extended_threshold_grid();
  }

  if (j.contains("isco_levels")) cfg.isco_levels = get<std::vector<int>>(j, "isco_levels", {});
  cfg.min_group_size = get_count(j, "min_group_size", 50);
  if (j.contains("heterogeneity_codes"))
    cfg.heterogeneity_codes = get<std::vector<std::string>>(j, "heterogeneity_codes", {});

  cfg.validation_plan = default_validation_plan();
  if (j.contains("validation")) {
    const auto& v = j.at("validation");
    cfg.validation_seed = get_seed(v, "seed", 2025);
    if (v.contains("plan")) {
      const auto& plan = v.at("plan");
      if (!plan.is_object()) bad("validation.plan", "must be an object");
      cfg.validation_plan.clear();
      for (const auto& [kind_name, bands] : plan.items()) {
        auto kind = parse_entity_kind(kind_name);
        if (!kind || !bands.is_object()) bad("validation.plan", "keys must be activity or tool");
        for (const auto& [band_name, n] : bands.items()) {
          auto band = parse_band(band_name);
          if (!band || !n.is_number_integer() || n.get<std::int64_t>() < 0)
            bad("validation.plan", "bands are 2, 3-5, 6-10, 11+ with non-negative sizes");
          cfg.validation_plan[{*kind, *band}] = n.get<std::size_t>();
        }
      }
    }
    if (v.contains("judgments_path"))
      cfg.judgments_path = resolve(base_dir, get<std::string>(v, "judgments_path", ""));
  }

  cfg.top_n = get_count(j, "top_n", 10);
  if (j.contains("exemplars")) {
    const auto& e = j.at("exemplars");
    if (e.is_number_integer()) {
      cfg.exemplar_count = get_count(j, "exemplars", 5);
    } else if (e.is_array()) {
      for (const auto& pair : e) {
        if (!pair.is_array() || pair.size() != 2 || !pair[0].is_string() || !pair[1].is_string())
          bad("exemplars", "pairs must be [source, target] job ids");
        cfg.exemplar_pairs.emplace_back(pair[0].get<std::string>(), pair[1].get<std::string>());
      }
    } else {
      bad("exemplars", "must be a count or a list of pairs");
    }
  }

  cfg.output_dir = resolve(base_dir, get<std::string>(j, "output_dir", "out"));
  if (j.contains("format")) {
    auto f = report::parse_format(get<std::string>(j, "format", "csv"));
    if (!f) bad("format", "must be csv or structured");
    cfg.format = *f;
  }
  validate_pipeline_config(cfg);
  return cfg;
}

PipelineConfig load_pipeline_config(const fs::path& path) {
  std::string text;
  try {
    text = report::read_text(path);
  } catch (const Error&) {
    bad(path.string(), "cannot read config file");
  }
  return parse_pipeline_config(text, path.parent_path());
}

void validate_pipeline_config(const PipelineConfig& cfg) {
  if (cfg.corpus_path.has_value() == cfg.synthetic.has_value()) bad("corpus", "give exactly one corpus source");
  if (cfg.synthetic) validate_synth_config(*cfg.synthetic);
  if (!(cfg.theta >= -1.0 && cfg.theta <= 1.0)) bad("cluster.theta", "theta must lie in [-1, 1]");
  if (!(cfg.dedup_threshold >= 0.0 && cfg.dedup_threshold <= 1.0)) bad("dedup_threshold", "must lie in [0, 1]");
  if (!(cfg.grid_step > 0.0) || !(cfg.grid_lo <= cfg.grid_hi) || cfg.grid_lo < -1.0 || cfg.grid_hi > 1.0)
    bad("cluster.grid", "need -1 <= lo <= hi <= 1 and step > 0");
  if (cfg.embedding_dimension < 2) bad("embedding.dimension", "must be at least 2");
  if (!(cfg.embedding_perturbation >= 0.0 && cfg.embedding_perturbation < 1.0))
    bad("embedding.max_perturbation", "must lie in [0, 1)");
  for (int level : cfg.isco_levels)
    if (level < 1 || level > 4) bad("isco_levels", "levels must be 1-4");
  for (const auto& code : cfg.heterogeneity_codes)
    if (code.size() != 3 || !std::all_of(code.begin(), code.end(), [](char ch) { return ch >= '0' && ch <= '9'; }))
      bad("heterogeneity_codes", "codes must be 3 digits");
  if (cfg.sensitivity_grid.empty()) bad("sensitivity_grid", "must not be empty");
  try {
    validate_thresholds(cfg.thresholds);
    for (const auto& t : cfg.sensitivity_grid) validate_thresholds(t);
  } catch (const Error& e) {
    bad("thresholds", e.what());
  }
}

void set_seed(PipelineConfig& cfg, std::uint64_t seed) {
  cfg.seed = seed;
  if (cfg.synthetic) cfg.synthetic->seed = seed;
}

void apply_environment(PipelineConfig& cfg) {
  if (const char* s = std::getenv("SKILLGRAPH_SEED"); s && *s) {
    char* end = nullptr;
    const auto v = std::strtoull(s, &end, 10);
    if (*end != '\0' || s[0] == '-') bad("SKILLGRAPH_SEED", "must be a non-negative integer");
    set_seed(cfg, v);
  }
  if (const char* s = std::getenv("SKILLGRAPH_OUT"); s && *s) cfg.output_dir = s;
  if (const char* s = std::getenv("SKILLGRAPH_FORMAT"); s && *s) {
    auto f = report::parse_format(s);
    if (!f) bad("SKILLGRAPH_FORMAT", "must be csv or structured");
    cfg.format = *f;
  }
}

std::optional<Stage> parse_stage(std::string_view s) {
  for (Stage st : {Stage::ingest, Stage::cluster, Stage::graph, Stage::analyze, Stage::transitions,
                   Stage::sensitivity, Stage::validate, Stage::report})
    if (stage_name(st) == s) return st;
  return std::nullopt;
}

std::string_view stage_name(Stage s) {
  switch (s) {
    case Stage::ingest: return "ingest";
    case Stage::cluster: return "cluster";
    case Stage::graph: return "graph";
    case Stage::analyze: return "analyze";
    case Stage::transitions: return "transitions";
    case Stage::sensitivity: return "sensitivity";
    case Stage::validate: return "validate";
    case Stage::report: return "report";
  }
  return "";
}

// ---------------------------------------------------------------------------
// artifacts

namespace {

std::ifstream open_in(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoFailure, path.string(), "missing artifact; run the earlier stage first");
  return in;
}

template <typename F>
void write_with(const fs::path& path, F&& fn) {
  std::ostringstream out;
  fn(out);
  report::write_text(path, out.str());
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur += ch;
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace

Corpus read_corpus_artifact(const fs::path& dir) {
  auto in = open_in(dir / "corpus.jsonl");
  Corpus c = parse_postings(in);
  if (fs::exists(dir / "ground_truth.tsv")) {
    auto gt = open_in(dir / "ground_truth.tsv");
    c.ground_truth = read_ground_truth(gt);
  }
  return c;
}

Artifacts load_artifacts(const fs::path& dir) {
  Artifacts a;
  a.corpus = read_corpus_artifact(dir);
  auto in = open_in(dir / "clusters.jsonl");
  for (auto& c : read_clusters(in))
    (c.kind == EntityKind::activity ? a.activity_clusters : a.tool_clusters).push_back(std::move(c));
  a.graph = build_graph(a.corpus, a.activity_clusters, a.tool_clusters);
  a.profiles = profile_corpus(a.corpus);
  a.rho = risk_by_job(a.graph, a.profiles);
  return a;
}

void write_partition(const KnowledgeGraph& g, const CommunityPartition& p, const fs::path& path) {
  std::string out = "kind,node,community\n";
  for (std::size_t v = 0; v < g.num_nodes(); ++v) {
    const auto& n = g.node(static_cast<NodeId>(v));
    out += std::string(node_kind_name(n.kind)) + "," + n.id + "," + std::to_string(p.assignment[v]) + "\n";
  }
  report::write_text(path, out);
}

CommunityPartition read_partition(const KnowledgeGraph& g, const fs::path& path) {
  auto in = open_in(path);
  std::string line;
  std::getline(in, line);
  std::vector<std::optional<std::uint32_t>> seen(g.num_nodes());
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != 3) throw Error(ErrorCode::InvalidRecord, std::to_string(line_no), "partition row needs 3 fields");
    std::optional<std::size_t> idx;
    std::size_t offset = 0;
    if (f[0] == "job") {
      idx = g.find_job(f[1]);
    } else if (f[0] == "activity") {
      idx = g.find_activity(f[1]);
      offset = g.num_jobs();
    } else if (f[0] == "tool") {
      idx = g.find_tool(f[1]);
      offset = g.num_jobs() + g.num_activities();
    }
    if (!idx) throw Error(ErrorCode::InvalidRecord, std::to_string(line_no), "partition names an unknown node");
    try {
      seen[offset + *idx] = static_cast<std::uint32_t>(std::stoul(f[2]));
    } catch (const std::exception&) {
      throw Error(ErrorCode::InvalidRecord, std::to_string(line_no), "community id must be an integer");
    }
  }
  CommunityPartition p;
  for (const auto& s : seen) {
    if (!s) throw Error(ErrorCode::InvalidRecord, path.string(), "partition does not cover every node");
    p.assignment.push_back(*s);
  }
  p.assignment = canonical_labels(p.assignment);
  p.num_communities = p.assignment.empty() ? 0 : *std::max_element(p.assignment.begin(), p.assignment.end()) + 1;
  p.q = modularity(g, p.assignment);
  return p;
}

// ---------------------------------------------------------------------------
// stages

namespace {

struct Run {
  const PipelineConfig& cfg;
  std::vector<std::string> files;

  fs::path dir() const { return cfg.output_dir; }
  void emit(const Table& t) { files.push_back(report::write_table(t, dir(), cfg.format)); }
  void emit_raw(const std::string& name) { files.push_back(name); }
};

Cell txt(std::string s) { return Cell::text(std::move(s)); }
Cell num(std::optional<double> v, int d) { return Cell::number(v, d); }
Cell cnt(std::uint64_t v) { return Cell::integer(static_cast<std::int64_t>(v)); }
Cell pct(std::optional<double> fraction, int d) {
  return fraction ? Cell::number(*fraction * 100.0, d) : Cell::null();
}

std::string join_labels(const KnowledgeGraph& g, std::span<const std::uint32_t> ids, bool tools) {
  std::string out;
  for (auto i : ids) {
    if (!out.empty()) out += "; ";
    out += tools ? g.tool(i).label : g.activity(i).label;
  }
  return out;
}

std::string config_label(const ThresholdConfig& c) {
  std::string s = "tau>=" + std::to_string(c.tau);
  if (c.phi) s += " AND >=" + report::format_fixed(*c.phi * 100.0, 0) + "%";
  else s += " only";
  return s;
}

// A new corpus or clustering invalidates the cached community partition.
void drop_partition(const Run& run) {
  std::error_code ec;
  fs::remove(run.dir() / "partition.csv", ec);
}

void stage_ingest(Run& run) {
  const auto& cfg = run.cfg;
  drop_partition(run);
  Corpus raw = cfg.corpus_path ? load_postings(*cfg.corpus_path) : generate_synthetic_corpus(*cfg.synthetic);
  Corpus c = deduplicate(raw, cfg.dedup_threshold);
  write_with(run.dir() / "corpus.jsonl", [&](std::ostream& o) { write_postings(c, o); });
  run.emit_raw("corpus.jsonl");
  write_with(run.dir() / "ground_truth.tsv", [&](std::ostream& o) { write_ground_truth(c.ground_truth, o); });
  run.emit_raw("ground_truth.tsv");

  Table t{"corpus_summary", {"metric", "value"}, {}};
  t.add({txt("provenance"), txt(c.provenance == Provenance::synthetic ? "synthetic" : "loaded")});
  t.add({txt("seed"), c.seed ? cnt(*c.seed) : Cell::null()});
  t.add({txt("postings_read"), cnt(raw.postings.size())});
  t.add({txt("postings_after_dedup"), cnt(c.postings.size())});
  t.add({txt("dedup_threshold"), num(cfg.dedup_threshold, 2)});
  run.emit(t);
}

void stage_cluster(Run& run) {
  const auto& cfg = run.cfg;
  drop_partition(run);
  const Corpus c = read_corpus_artifact(run.dir());
  StubEmbeddingProvider provider(cfg.embedding_dimension, cfg.embedding_perturbation);
  const ClusterConfig cc{cfg.theta};
  const auto activity_forms = collect_forms(c, EntityKind::activity);
  const auto tool_forms = collect_forms(c, EntityKind::tool);
  auto clusters = activity_forms.empty() ? std::vector<SkillCluster>{}
                                         : leader_follower(activity_forms, provider, cc, EntityKind::activity);
  if (!tool_forms.empty()) {
    auto tools = leader_follower(tool_forms, provider, cc, EntityKind::tool);
    clusters.insert(clusters.end(), tools.begin(), tools.end());
  }
  write_with(run.dir() / "clusters.jsonl", [&](std::ostream& o) { write_clusters(clusters, o); });
  run.emit_raw("clusters.jsonl");

  std::vector<LabeledPair> pairs;
  if (cfg.labeled_pairs_path) {
    auto in = open_in(*cfg.labeled_pairs_path);
    pairs = parse_labeled_pairs(in);
  } else if (!c.ground_truth.activities.empty() && cfg.labeled_pairs > 0) {
    pairs = sample_labeled_pairs(c.ground_truth.activities, cfg.labeled_pairs, cfg.seed);
    write_with(run.dir() / "labeled_pairs.tsv", [&](std::ostream& o) { write_labeled_pairs(pairs, o); });
    run.emit_raw("labeled_pairs.tsv");
  }
  Table t{"theta_sensitivity", {"theta", "n_clusters", "precision", "recall"}, {}};
  if (!pairs.empty()) {
    for (const auto& row :
         theta_sensitivity_grid(activity_forms, provider, pairs, cfg.grid_lo, cfg.grid_hi, cfg.grid_step))
      t.add({num(row.theta, 2), cnt(row.n_clusters), num(row.precision, 2), num(row.recall, 2)});
  }
  run.emit(t);
}

CommunityPartition partition_for(const Artifacts& a, const PipelineConfig& cfg) {
  const auto path = cfg.output_dir / "partition.csv";
  if (fs::exists(path)) return read_partition(a.graph, path);
  return louvain_partition(a.graph, cfg.seed);
}

void stage_graph(Run& run) {
  const auto a = load_artifacts(run.dir());
  const auto& g = a.graph;

  Table nodes{"graph_nodes", {"id", "kind", "label"}, {}};
  for (std::size_t v = 0; v < g.num_nodes(); ++v) {
    const auto& n = g.node(static_cast<NodeId>(v));
    nodes.add({txt(n.id), txt(std::string(node_kind_name(n.kind))), txt(n.label)});
  }
  run.emit(nodes);

  Table edges{"graph_edges", {"src", "dst", "kind"}, {}};
  for (std::size_t j = 0; j < g.num_jobs(); ++j)
    for (auto act : g.activities_of_job(j)) edges.add({txt(g.job(j).id), txt(g.activity(act).id), txt("PERFORMS")});
  for (std::size_t act = 0; act < g.num_activities(); ++act)
    for (auto t : g.tools_of_activity(act)) edges.add({txt(g.activity(act).id), txt(g.tool(t).id), txt("USES")});
  run.emit(edges);

  const auto topo = topology_stats(g);
  const auto partition = louvain_partition(g, run.cfg.seed);
  write_partition(g, partition, run.dir() / "partition.csv");
  run.emit_raw("partition.csv");

  Table t{"topology", {"metric", "value"}, {}};
  t.add({txt("n_jobs"), cnt(topo.n_jobs)});
  t.add({txt("n_activities"), cnt(topo.n_activities)});
  t.add({txt("n_tools"), cnt(topo.n_tools)});
  t.add({txt("n_performs_edges"), cnt(topo.n_performs_edges)});
  t.add({txt("n_uses_edges"), cnt(topo.n_uses_edges)});
  t.add({txt("mean_degree"), num(topo.mean_degree, 2)});
  t.add({txt("bipartite_density"), num(topo.bipartite_density, 5)});
  t.add({txt("max_degree"), num(topo.max_degree, 0)});
  t.add({txt("gamma"), num(topo.gamma, 2)});
  t.add({txt("n_communities"), cnt(partition.num_communities)});
  t.add({txt("modularity"), num(partition.q, 3)});
  run.emit(t);

  Table cs{"communities", {"rank", "community_id", "size", "n_jobs", "mean_rho", "q_int", "sample_titles"}, {}};
  std::size_t rank = 0;
  for (const auto& s : community_summaries(g, partition, a.rho)) {
    std::string titles;
    for (const auto& title : s.sample_titles) titles += (titles.empty() ? "" : "; ") + title;
    cs.add({cnt(++rank), cnt(s.community_id), cnt(s.size), cnt(s.n_jobs), num(s.mean_rho, 1), num(s.q_int, 2),
            txt(titles)});
  }
  run.emit(cs);
}

std::vector<std::string> present_isco3(const Corpus& c) {
  std::set<std::string> codes;
  for (const auto& p : c.postings) codes.insert(p.isco4.substr(0, 3));
  return {codes.begin(), codes.end()};
}

void stage_analyze(Run& run) {
  const auto& cfg = run.cfg;
  const auto a = load_artifacts(run.dir());
  const auto& g = a.graph;

  Table rp{"risk_profiles", {"job_id", "isco4", "rho", "category"}, {}};
  for (std::size_t j = 0; j < a.profiles.size(); ++j) {
    const auto& p = a.profiles[j];
    rp.add({txt(p.job_id), txt(a.corpus.postings[j].isco4), num(p.rho, 1),
            txt(std::string(risk_category_name(p.category)))});
  }
  run.emit(rp);

  for (int level : cfg.isco_levels) {
    Table t{"risk_isco" + std::to_string(level), {"code", "label", "n", "mean_rho", "sigma", "high_share"}, {}};
    for (const auto& r : aggregate_by_isco(a.profiles, a.corpus, level, cfg.min_group_size))
      t.add({txt(r.group_code), txt(r.label), cnt(r.n), num(r.mean_rho, 1), num(r.sigma, 1), num(r.high_share, 1)});
    run.emit(t);
  }

  const auto codes = cfg.heterogeneity_codes.empty() ? present_isco3(a.corpus) : cfg.heterogeneity_codes;
  Table h{"heterogeneity", {"isco3", "mean_rho", "high_count", "low_count", "low_share"}, {}};
  for (const auto& r : heterogeneity_table(a.profiles, a.corpus, codes))
    h.add({txt(r.isco3), num(r.mean_rho, 1), cnt(r.high_count), cnt(r.low_count), pct(r.low_share, 1)});
  run.emit(h);

  const auto partition = partition_for(a, cfg);
  Table b{"bridge_skills", {"rank", "activity", "label", "c_b", "c_p", "k", "d_isco", "mean_rho"}, {}};
  std::size_t rank = 0;
  for (const auto& m : rank_bridge_skills(g, partition, a.rho, cfg.top_n))
    b.add({cnt(++rank), txt(m.activity_id), txt(m.label), num(m.c_b, 1), cnt(m.c_p), cnt(m.k), cnt(m.d_isco),
           num(m.mean_rho, 1)});
  run.emit(b);

  Table s{"skill_importance", {"rank", "activity", "label", "k", "d_isco", "i_pr", "mean_rho", "tier"}, {}};
  rank = 0;
  for (const auto& m : rank_skill_importance(g, a.rho, cfg.top_n))
    s.add({cnt(++rank), txt(m.activity_id), txt(m.label), cnt(m.k), cnt(m.d_isco), cnt(m.i_pr), num(m.mean_rho, 1),
           txt(std::string(skill_tier_name(m.tier)))});
  run.emit(s);
}

std::vector<std::pair<std::size_t, std::size_t>> choose_exemplars(const Artifacts& a, const TransitionNetwork& tn,
                                                                  const PipelineConfig& cfg) {
  const auto& g = a.graph;
  std::vector<std::pair<std::size_t, std::size_t>> out;
  if (!cfg.exemplar_pairs.empty()) {
    for (const auto& [s, t] : cfg.exemplar_pairs) {
      auto si = g.find_job(s), ti = g.find_job(t);
      if (!si) throw Error(ErrorCode::UnknownJob, s, "exemplar source not in corpus");
      if (!ti) throw Error(ErrorCode::UnknownJob, t, "exemplar target not in corpus");
      out.emplace_back(*si, *ti);
    }
    return out;
  }
  // Largest risk drop first, one pathway per source.
  std::vector<const TransitionPathway*> ps;
  for (const auto& p : tn.pathways) ps.push_back(&p);
  std::stable_sort(ps.begin(), ps.end(), [](const TransitionPathway* x, const TransitionPathway* y) {
    if (x->delta_rho != y->delta_rho) return x->delta_rho < y->delta_rho;
    return x->jaccard > y->jaccard;
  });
  std::set<std::size_t> used;
  for (const auto* p : ps) {
    if (out.size() >= cfg.exemplar_count) break;
    if (used.insert(p->source).second) out.emplace_back(p->source, p->target);
  }
  return out;
}

void stage_transitions(Run& run) {
  const auto& cfg = run.cfg;
  const auto a = load_artifacts(run.dir());
  const auto& g = a.graph;
  const auto tn = enumerate_transition_network(g, a.rho, cfg.thresholds);

  Table p{"pathways", {"source", "target", "shared_count", "transfer", "jaccard", "delta_rho"}, {}};
  for (const auto& x : tn.pathways)
    p.add({txt(g.job(x.source).id), txt(g.job(x.target).id), cnt(x.shared.size()), num(x.transfer_rate, 4),
           num(x.jaccard, 4), num(x.delta_rho, 1)});
  run.emit(p);

  const auto st = transition_network_stats(tn);
  Table s{"transition_stats", {"metric", "value"}, {}};
  s.add({txt("configuration"), txt(config_label(cfg.thresholds))});
  s.add({txt("total_transitions"), cnt(st.n_pathways)});
  s.add({txt("mean_shared"), num(st.mean_shared, 1)});
  s.add({txt("max_shared"), cnt(st.max_shared)});
  s.add({txt("mean_transfer_pct"), pct(st.mean_transfer, 1)});
  s.add({txt("unique_sources"), cnt(st.unique_sources)});
  s.add({txt("mean_out_degree"), num(st.mean_out_degree, 1)});
  s.add({txt("sources_over_10"), cnt(st.sources_over_10)});
  s.add({txt("unique_destinations"), cnt(st.unique_destinations)});
  s.add({txt("mean_in_degree"), num(st.mean_in_degree, 1)});
  s.add({txt("hub_destinations"), cnt(st.hub_destinations)});
  s.add({txt("mean_delta_rho"), num(st.mean_delta_rho, 1)});
  s.add({txt("max_risk_reduction"), num(st.max_risk_reduction, 1)});
  s.add({txt("high_risk_jobs"), cnt(st.source_universe)});
  s.add({txt("coverage_pct"), pct(st.coverage, 1)});
  s.add({txt("reskilling_gap_pct"), pct(st.reskilling_gap, 1)});
  run.emit(s);

  Table h{"safe_harbors", {"rank", "target", "title", "rho", "k_in", "mean_jaccard", "n_activities", "bridge"}, {}};
  std::size_t rank = 0;
  for (const auto& e : rank_safe_harbors(g, a.rho, tn, cfg.top_n))
    h.add({cnt(++rank), txt(g.job(e.target).id), txt(g.job(e.target).label), num(e.rho, 1), cnt(e.k_in),
           num(e.mean_jaccard, 2), cnt(e.n_activities), cnt(e.bridge)});
  run.emit(h);

  Table gs{"gap_skills", {"rank", "activity", "label", "f_gap", "share_pct", "cumulative_pct"}, {}};
  rank = 0;
  for (const auto& e : gap_skill_frequencies(g, tn, cfg.top_n))
    gs.add({cnt(++rank), txt(g.activity(e.activity).id), txt(g.activity(e.activity).label), cnt(e.f_gap),
            pct(e.share, 1), pct(e.cumulative_share, 1)});
  run.emit(gs);

  Table ex{"exemplars",
           {"source", "source_title", "target", "target_title", "rho_s", "rho_t", "delta_rho", "jaccard_pct"},
           {}};
  Table de{"decomposition",
           {"source", "target", "shared_activities", "unused_activities", "gap_activities", "shared_tools",
            "unused_tools", "gap_tools", "n_gap"},
           {}};
  for (const auto& [s_idx, t_idx] : choose_exemplars(a, tn, cfg)) {
    const auto ov = pairwise_overlap(g, s_idx, t_idx);
    ex.add({txt(g.job(s_idx).id), txt(g.job(s_idx).label), txt(g.job(t_idx).id), txt(g.job(t_idx).label),
            num(a.rho[s_idx], 1), num(a.rho[t_idx], 1), num(a.rho[t_idx] - a.rho[s_idx], 1), pct(ov.jaccard, 0)});
    const auto d = decompose_transition(g, s_idx, t_idx);
    de.add({txt(g.job(s_idx).id), txt(g.job(t_idx).id), txt(join_labels(g, d.shared_activities, false)),
            txt(join_labels(g, d.unused_activities, false)), txt(join_labels(g, d.gap_activities, false)),
            txt(join_labels(g, d.shared_tools, true)), txt(join_labels(g, d.unused_tools, true)),
            txt(join_labels(g, d.gap_tools, true)), cnt(d.n_gap)});
  }
  run.emit(ex);
  run.emit(de);
}

void stage_sensitivity(Run& run) {
  const auto a = load_artifacts(run.dir());
  Table t{"threshold_sensitivity",
          {"configuration", "tau", "phi", "pathways", "mean_shared", "mean_transfer_pct", "sources", "coverage_pct"},
          {}};
  for (const auto& r : threshold_sensitivity_grid(a.graph, a.rho, run.cfg.sensitivity_grid))
    t.add({txt(config_label(r.config)), cnt(r.config.tau), num(r.config.phi, 2), cnt(r.n_pathways),
           num(r.mean_shared, 1), pct(r.mean_transfer, 1), cnt(r.unique_sources), pct(r.coverage, 1)});
  run.emit(t);
}

void stage_validate(Run& run) {
  const auto& cfg = run.cfg;
  const Corpus c = read_corpus_artifact(run.dir());
  auto in = open_in(run.dir() / "clusters.jsonl");
  const auto clusters = read_clusters(in);
  const auto samples = stratified_validation_sample(clusters, cfg.validation_plan, cfg.validation_seed);

  Table pop{"validation_population", {"type", "stratum", "population", "sample"}, {}};
  Table sample{"validation_sample", {"type", "stratum", "cluster_id"}, {}};
  for (const auto& s : samples) {
    const std::string type = s.stratum.kind == EntityKind::tool ? "Tools" : "Activities";
    const std::string band(size_band_label(s.stratum.band));
    pop.add({txt(type), txt(band), cnt(s.population), cnt(s.cluster_ids.size())});
    for (const auto& id : s.cluster_ids) sample.add({txt(type), txt(band), txt(id)});
  }
  run.emit(pop);
  run.emit(sample);

  std::map<std::string, Judgment> judgments;
  if (cfg.judgments_path) {
    auto jin = open_in(*cfg.judgments_path);
    judgments = parse_judgments(jin);
  } else if (!c.ground_truth.empty()) {
    judgments = judge_against_ground_truth(clusters, c.ground_truth);
  } else {
    return;  // nothing to score against; the sample is the deliverable
  }
  Table r{"validation_report",
          {"type", "stratum", "samples", "correct", "minor", "major", "error_rate_pct", "ci_lo_pct", "ci_hi_pct"},
          {}};
  for (const auto& row : validation_report(samples, judgments).rows)
    r.add({txt(row.type), txt(row.stratum), cnt(row.samples), cnt(row.correct), cnt(row.minor), cnt(row.major),
           pct(row.error_rate, 2), row.ci ? pct(row.ci->lo, 2) : Cell::null(),
           row.ci ? pct(row.ci->hi, 2) : Cell::null()});
  run.emit(r);
}

}  // namespace

StageResult run_stage(const PipelineConfig& cfg, Stage stage) {
  validate_pipeline_config(cfg);
  std::error_code ec;
  fs::create_directories(cfg.output_dir, ec);
  if (ec) throw Error(ErrorCode::IoFailure, cfg.output_dir.string(), "cannot create output directory");
  Run run{cfg, {}};
  switch (stage) {
    case Stage::ingest: stage_ingest(run); break;
    case Stage::cluster: stage_cluster(run); break;
    case Stage::graph: stage_graph(run); break;
    case Stage::analyze: stage_analyze(run); break;
    case Stage::transitions: stage_transitions(run); break;
    case Stage::sensitivity: stage_sensitivity(run); break;
    case Stage::validate: stage_validate(run); break;
    case Stage::report:
      stage_ingest(run);
      stage_cluster(run);
      stage_graph(run);
      stage_analyze(run);
      stage_transitions(run);
      stage_sensitivity(run);
      stage_validate(run);
      break;
  }
  StageResult result;
  result.files = run.files;
  result.manifest = report::update_manifest(cfg.output_dir, run.files);
  return result;
}

}  // namespace skillgraph
