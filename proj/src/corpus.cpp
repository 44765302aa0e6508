#include "skillgraph/corpus.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <span>
#include <sstream>
#include <unordered_set>

#include "json.hpp"
#include "skillgraph/error.hpp"
#include "skillgraph/rng.hpp"
#include "skillgraph/surface.hpp"

namespace skillgraph {

using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

std::string_view source_name(Source s) {
  switch (s) {
    case Source::wuzzuf: return "wuzzuf";
    case Source::linkedin: return "linkedin";
    case Source::forasna: return "forasna";
    case Source::synthetic: return "synthetic";
  }
  return "synthetic";
}

std::optional<Source> parse_source(std::string_view s) {
  if (s == "wuzzuf") return Source::wuzzuf;
  if (s == "linkedin") return Source::linkedin;
  if (s == "forasna") return Source::forasna;
  if (s == "synthetic") return Source::synthetic;
  return std::nullopt;
}

char importance_code(Importance i) {
  switch (i) {
    case Importance::Primary: return 'P';
    case Importance::Secondary: return 'S';
    case Importance::Ancillary: return 'A';
  }
  return 'P';
}

std::optional<Importance> parse_importance(std::string_view s) {
  if (s == "P") return Importance::Primary;
  if (s == "S") return Importance::Secondary;
  if (s == "A") return Importance::Ancillary;
  return std::nullopt;
}

bool is_valid_isco4(std::string_view code) {
  return code.size() == 4 &&
         std::all_of(code.begin(), code.end(), [](char c) { return c >= '0' && c <= '9'; });
}

namespace {

const json& require(const json& record, const char* key, std::size_t line) {
  auto it = record.find(key);
  if (it == record.end() || it->is_null())
    throw Error(ErrorCode::MissingField, std::to_string(line), std::string("missing key '") + key + "'");
  return *it;
}

std::string require_string(const json& record, const char* key, std::size_t line) {
  const json& v = require(record, key, line);
  if (!v.is_string())
    throw Error(ErrorCode::MissingField, std::to_string(line), std::string("key '") + key + "' must be a string");
  return v.get<std::string>();
}

std::vector<std::string> require_strings(const json& record, const char* key, std::size_t line) {
  const json& v = require(record, key, line);
  if (!v.is_array())
    throw Error(ErrorCode::MissingField, std::to_string(line), std::string("key '") + key + "' must be an array");
  std::vector<std::string> out;
  for (const auto& e : v) {
    if (!e.is_string())
      throw Error(ErrorCode::MissingField, std::to_string(line), std::string("key '") + key + "' must hold strings");
    out.push_back(e.get<std::string>());
  }
  return out;
}

JobPosting parse_record(const std::string& text, std::size_t line) {
  json record;
  try {
    record = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::MissingField, std::to_string(line), std::string("malformed record: ") + e.what());
  }
  if (!record.is_object()) throw Error(ErrorCode::MissingField, std::to_string(line), "record is not an object");

  JobPosting p;
  p.id = require_string(record, "id", line);
  p.title = require_string(record, "title", line);
  p.employer = require_string(record, "employer", line);
  const auto source = require_string(record, "source", line);
  auto parsed_source = parse_source(source);
  if (!parsed_source) throw Error(ErrorCode::InvalidRecord, std::to_string(line), "unknown source '" + source + "'");
  p.source = *parsed_source;
  p.isco4 = require_string(record, "isco4", line);
  if (!is_valid_isco4(p.isco4)) throw Error(ErrorCode::BadIsco, std::to_string(line), "isco4 '" + p.isco4 + "'");

  const json& tasks = require(record, "tasks", line);
  if (!tasks.is_array()) throw Error(ErrorCode::MissingField, std::to_string(line), "key 'tasks' must be an array");
  for (const auto& t : tasks) {
    if (!t.is_object()) throw Error(ErrorCode::MissingField, std::to_string(line), "task is not an object");
    Task task;
    task.description = require_string(t, "description", line);
    const auto imp = require_string(t, "importance", line);
    auto parsed = parse_importance(imp);
    if (!parsed) throw Error(ErrorCode::InvalidRecord, std::to_string(line), "importance '" + imp + "' is not P|S|A");
    task.importance = *parsed;
    const json& a = require(t, "automatable", line);
    if (!a.is_boolean())
      throw Error(ErrorCode::MissingField, std::to_string(line), "key 'automatable' must be a boolean");
    task.automatable = a.get<bool>();
    p.tasks.push_back(std::move(task));
  }
  if (p.tasks.empty() || p.tasks.size() > kMaxTasksPerJob)
    throw Error(ErrorCode::InvalidRecord, std::to_string(line),
                "task count " + std::to_string(p.tasks.size()) + " outside 1-15");
  p.activity_mentions = require_strings(record, "activities", line);
  p.tool_mentions = require_strings(record, "tools", line);
  return p;
}

}  // namespace

Corpus parse_postings(std::istream& in) {
  Corpus corpus;
  corpus.provenance = Provenance::loaded;
  std::unordered_set<std::string> seen;
  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    if (!text.empty() && text.back() == '\r') text.pop_back();
    if (std::all_of(text.begin(), text.end(), [](unsigned char c) { return std::isspace(c); })) continue;
    JobPosting p = parse_record(text, line);
    if (!seen.insert(p.id).second) throw Error(ErrorCode::DuplicateId, p.id, "line " + std::to_string(line));
    corpus.postings.push_back(std::move(p));
  }
  return corpus;
}

Corpus load_postings(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoFailure, path.string(), "cannot open corpus file");
  return parse_postings(in);
}

std::string serialize_posting(const JobPosting& p) {
  ordered_json record;
  record["id"] = p.id;
  record["title"] = p.title;
  record["employer"] = p.employer;
  record["source"] = std::string(source_name(p.source));
  record["isco4"] = p.isco4;
  ordered_json tasks = ordered_json::array();
  for (const auto& t : p.tasks) {
    ordered_json task;
    task["description"] = t.description;
    task["importance"] = std::string(1, importance_code(t.importance));
    task["automatable"] = t.automatable;
    tasks.push_back(std::move(task));
  }
  record["tasks"] = std::move(tasks);
  record["activities"] = p.activity_mentions;
  record["tools"] = p.tool_mentions;
  return record.dump();
}

void write_postings(const Corpus& corpus, std::ostream& out) {
  for (const auto& p : corpus.postings) out << serialize_posting(p) << '\n';
}

void write_ground_truth(const GroundTruth& truth, std::ostream& out) {
  for (const auto& [form, canonical] : truth.activities) out << "activity\t" << form << '\t' << canonical << '\n';
  for (const auto& [form, canonical] : truth.tools) out << "tool\t" << form << '\t' << canonical << '\n';
}

GroundTruth read_ground_truth(std::istream& in) {
  GroundTruth truth;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.empty()) continue;
    const auto a = line.find('\t');
    const auto b = a == std::string::npos ? a : line.find('\t', a + 1);
    if (b == std::string::npos) throw Error(ErrorCode::InvalidRecord, std::to_string(n), "ground truth needs 3 columns");
    const auto kind = line.substr(0, a);
    auto form = line.substr(a + 1, b - a - 1);
    auto canonical = line.substr(b + 1);
    if (kind == "activity") {
      truth.activities.emplace(std::move(form), std::move(canonical));
    } else if (kind == "tool") {
      truth.tools.emplace(std::move(form), std::move(canonical));
    } else {
      throw Error(ErrorCode::InvalidRecord, std::to_string(n), "unknown kind '" + kind + "'");
    }
  }
  return truth;
}

std::set<std::string> title_tokens(std::string_view title) {
  std::set<std::string> tokens;
  std::string cur;
  for (char c : title) {
    const auto u = static_cast<unsigned char>(c);
    if (std::isspace(u)) {
      if (!cur.empty()) tokens.insert(std::move(cur));
      cur.clear();
    } else if (u < 0x80 && std::ispunct(u)) {
      continue;
    } else {
      cur.push_back(static_cast<char>(std::tolower(u)));
    }
  }
  if (!cur.empty()) tokens.insert(std::move(cur));
  return tokens;
}

double title_jaccard(std::string_view a, std::string_view b) {
  const auto ta = title_tokens(a);
  const auto tb = title_tokens(b);
  if (ta.empty() && tb.empty()) return 1.0;
  std::size_t inter = 0;
  for (const auto& t : ta) inter += tb.count(t);
  const std::size_t uni = ta.size() + tb.size() - inter;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

Corpus deduplicate(const Corpus& corpus, double title_threshold) {
  if (!(title_threshold >= 0.0 && title_threshold <= 1.0))
    throw Error(ErrorCode::InvalidArgument, "title_threshold", "must lie in [0,1]");
  Corpus out;
  out.provenance = corpus.provenance;
  out.seed = corpus.seed;
  std::map<std::string, std::vector<std::size_t>> survivors_by_employer;
  for (const auto& p : corpus.postings) {
    auto& kept = survivors_by_employer[p.employer];
    const bool duplicate = std::any_of(kept.begin(), kept.end(), [&](std::size_t i) {
      return title_jaccard(out.postings[i].title, p.title) > title_threshold;
    });
    if (duplicate) continue;
    kept.push_back(out.postings.size());
    out.postings.push_back(p);
  }
  // Keep only ground truth for forms that still occur.
  if (!corpus.ground_truth.empty()) {
    std::set<std::string> acts, tools;
    for (const auto& p : out.postings) {
      acts.insert(p.activity_mentions.begin(), p.activity_mentions.end());
      tools.insert(p.tool_mentions.begin(), p.tool_mentions.end());
    }
    for (const auto& [form, c] : corpus.ground_truth.activities)
      if (acts.count(form)) out.ground_truth.activities.emplace(form, c);
    for (const auto& [form, c] : corpus.ground_truth.tools)
      if (tools.count(form)) out.ground_truth.tools.emplace(form, c);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Synthetic generator

void validate_synth_config(const SynthConfig& cfg) {
  if (cfg.isco_mix.empty() && cfg.n_jobs > 0) throw Error(ErrorCode::BadConfig, "isco_mix", "must not be empty");
  double total = 0.0;
  for (const auto& [group, share] : cfg.isco_mix) {
    if (group < 0 || group > 9) throw Error(ErrorCode::BadConfig, "isco_mix", "major group must be 0-9");
    if (!(share >= 0.0 && share <= 1.0)) throw Error(ErrorCode::BadConfig, "isco_mix", "shares must lie in [0,1]");
    total += share;
  }
  if (!cfg.isco_mix.empty() && std::abs(total - 1.0) > 1e-9)
    throw Error(ErrorCode::BadConfig, "isco_mix", "shares must sum to 1");
  for (const auto& [group, p] : cfg.automatable_bias) {
    if (group < 0 || group > 9) throw Error(ErrorCode::BadConfig, "automatable_bias", "major group must be 0-9");
    if (!(p >= 0.0 && p <= 1.0)) throw Error(ErrorCode::BadConfig, "automatable_bias", "probabilities must lie in [0,1]");
  }
  const auto& v = cfg.synonym_variants_per_canonical;
  if (v.min < 1 || v.min > v.max || v.max > kMaxSurfaceVariants)
    throw Error(ErrorCode::BadConfig, "synonym_variants_per_canonical", "range must satisfy 1 <= min <= max <= 5");
}

namespace {

constexpr std::array<std::string_view, 40> kActivityObjects = {
    "budget",     "invoice",   "payroll",     "inventory", "customer",  "vendor",    "contract",
    "campaign",   "brand",     "software",    "network",   "database",  "quality",   "safety",
    "compliance", "recruitment", "training",  "logistics", "procurement", "sales",   "account",
    "report",     "document",  "schedule",    "project",   "risk",      "audit",     "tax",
    "pricing",    "warehouse", "shipment",    "patient",   "maintenance", "equipment", "production",
    "menu",       "event",     "facility",    "marketing", "data"};

constexpr std::array<std::string_view, 20> kActivityActions = {
    "planning",   "analysis",   "management",   "coordination",  "reporting",
    "development", "administration", "operations", "review",      "tracking",
    "forecasting", "negotiation", "processing", "monitoring",      "auditing",
    "optimization", "support",  "documentation", "scheduling",     "assessment"};

constexpr std::array<std::string_view, 30> kToolStems = {
    "ledger", "atlas",  "nimbus", "vertex", "quanta", "orbit", "pixel",  "sigma",  "delta",  "harbor",
    "summit", "beacon", "cobalt", "falcon", "granite", "helix", "ion",   "jade",   "kite",   "lumen",
    "matrix", "nova",   "onyx",   "prism",  "quartz", "ridge", "solar",  "titan",  "unity",  "vista"};

constexpr std::array<std::string_view, 8> kToolKinds = {"suite", "studio", "cloud", "desk",
                                                        "analytics", "erp", "crm", "workbench"};

constexpr std::array<std::string_view, 10> kDomains = {"finance",   "sales",   "operations", "marketing",
                                                       "it",        "hr",      "logistics",  "quality",
                                                       "customer service", "production"};

constexpr std::array<std::array<std::string_view, 4>, 10> kRoles = {{
    {"soldier", "officer", "sergeant", "guard"},
    {"manager", "director", "head", "lead"},
    {"engineer", "analyst", "specialist", "accountant"},
    {"technician", "associate", "coordinator", "officer"},
    {"clerk", "assistant", "secretary", "data entry clerk"},
    {"sales representative", "cashier", "agent", "steward"},
    {"farm worker", "grower", "breeder", "gardener"},
    {"electrician", "mechanic", "craftsman", "fitter"},
    {"operator", "driver", "assembler", "machinist"},
    {"laborer", "helper", "cleaner", "porter"},
}};

constexpr std::array<std::string_view, 4> kSeniority = {"", "senior ", "junior ", "chief "};

constexpr std::array<std::string_view, 40> kEmployers = {
    "Nile Holdings",    "Delta Logistics",  "Cairo Trading",    "Sphinx Software",  "Pyramid Foods",
    "Lotus Pharma",     "Giza Systems",     "Red Sea Resorts",  "Alex Textiles",    "Sinai Mining",
    "Faros Bank",       "Horus Retail",     "Memphis Media",    "Karnak Build",     "Aswan Energy",
    "Luxor Hotels",     "Siwa Water",       "Tanta Motors",     "Mansoura Dairy",   "Suez Shipping",
    "Ismailia Steel",   "Fayoum Farms",     "Qena Cement",      "Damietta Ports",   "Hurghada Travel",
    "Zamalek Consulting", "Maadi Health",   "Helwan Works",     "Matrouh Fisheries", "Minya Mills",
    "Sohag Print",      "Beni Suef Glass",  "Dakahlia Agro",    "Sharqia Chem",     "Gharbia Cotton",
    "Menofia Plastics", "Qalyubia Paper",   "Beheira Oils",     "Kafr Cables",      "Marsa Telecom"};

struct Canonical {
  std::string name;
  std::vector<std::string> variants;
};

std::vector<Canonical> make_canonicals(Rng& rng, std::size_t count, std::span<const std::string_view> first,
                                       std::span<const std::string_view> second, const VariantRange& range) {
  std::vector<std::string> combos;
  for (auto a : first)
    for (auto b : second) combos.push_back(std::string(a) + " " + std::string(b));
  // Deterministic shuffle so canonical i is not simply combos[i].
  const auto order = rng.sample_indices(combos.size(), combos.size());
  std::vector<Canonical> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    Canonical c;
    c.name = combos[order[i % combos.size()]];
    if (i >= combos.size()) c.name += " " + std::to_string(i / combos.size() + 1);
    const std::size_t wanted = static_cast<std::size_t>(rng.between(range.min, range.max));
    std::vector<std::string> candidates = {
        c.name,
        surface::to_upper(c.name),
        surface::to_title(c.name),
        surface::to_title(std::string(surface::vendor_prefixes()[rng.below(surface::vendor_prefixes().size())])) +
            " " + c.name,
        surface::abbreviate(c.name),
    };
    c.variants.push_back(candidates[0]);
    const auto picks = rng.sample_indices(candidates.size() - 1, candidates.size() - 1);
    for (std::size_t k = 0; k < picks.size() && c.variants.size() < wanted; ++k) {
      const auto& v = candidates[picks[k] + 1];
      if (std::find(c.variants.begin(), c.variants.end(), v) == c.variants.end()) c.variants.push_back(v);
    }
    out.push_back(std::move(c));
  }
  return out;
}

int draw_group(Rng& rng, const std::map<int, double>& mix) {
  const double u = rng.uniform01();
  double acc = 0.0;
  int last = mix.begin()->first;
  for (const auto& [group, share] : mix) {
    acc += share;
    if (share > 0.0) last = group;
    if (u < acc) return group;
  }
  return last;
}

}  // namespace

Corpus generate_synthetic_corpus(const SynthConfig& cfg) {
  validate_synth_config(cfg);
  Corpus corpus;
  corpus.provenance = Provenance::synthetic;
  corpus.seed = cfg.seed;
  if (cfg.n_jobs == 0) return corpus;

  Rng rng(cfg.seed);
  const auto activities = make_canonicals(rng, cfg.canonical_activities, kActivityObjects, kActivityActions,
                                          cfg.synonym_variants_per_canonical);
  const auto tools =
      make_canonicals(rng, cfg.canonical_tools, kToolStems, kToolKinds, cfg.synonym_variants_per_canonical);

  // Each activity is used with one or two tools.
  std::vector<std::vector<std::size_t>> activity_tools(activities.size());
  if (!tools.empty()) {
    for (auto& ts : activity_tools) {
      const std::size_t k = std::min<std::size_t>(tools.size(), rng.between(1, 2));
      ts = rng.sample_indices(tools.size(), k);
    }
  }
  // Each ISCO sub-major group (first two digits) draws from its own activity pool,
  // which is what gives the graph community structure.
  constexpr std::size_t kPoolSize = 10;
  std::array<std::vector<std::size_t>, 100> pools;
  for (auto& pool : pools) pool = rng.sample_indices(activities.size(), std::min(kPoolSize, activities.size()));

  const double default_bias = 0.4;
  for (std::size_t j = 0; j < cfg.n_jobs; ++j) {
    JobPosting p;
    char id[16];
    std::snprintf(id, sizeof id, "J%05zu", j + 1);
    p.id = id;
    p.source = Source::synthetic;
    const int group = draw_group(rng, cfg.isco_mix);
    const int d2 = static_cast<int>(rng.between(1, 4));
    const int d3 = static_cast<int>(rng.between(1, 3));
    const int d4 = static_cast<int>(rng.between(1, 3));
    p.isco4 = std::to_string(group) + std::to_string(d2) + std::to_string(d3) + std::to_string(d4);
    const auto& roles = kRoles[static_cast<std::size_t>(group)];
    p.title = std::string(kSeniority[rng.below(kSeniority.size())]) +
              std::string(kDomains[static_cast<std::size_t>((d2 * 3 + d3) % 10)]) + " " +
              std::string(roles[rng.below(roles.size())]);
    p.employer = std::string(kEmployers[rng.below(kEmployers.size())]);

    std::vector<std::size_t> picked;
    if (!activities.empty()) {
      const auto& pool = pools[static_cast<std::size_t>(group * 10 + d2)];
      const std::size_t wanted = std::min<std::size_t>(activities.size(), rng.between(4, 10));
      for (int attempt = 0; attempt < 200 && picked.size() < wanted; ++attempt) {
        const std::size_t c = rng.bernoulli(0.8) ? pool[rng.below(pool.size())] : rng.below(activities.size());
        if (std::find(picked.begin(), picked.end(), c) == picked.end()) picked.push_back(c);
      }
    }
    std::vector<std::size_t> picked_tools;
    for (std::size_t c : picked) {
      const auto& variants = activities[c].variants;
      const auto& form = variants[rng.below(variants.size())];
      p.activity_mentions.push_back(form);
      corpus.ground_truth.activities.emplace(form, activities[c].name);
      if (!activity_tools[c].empty() && rng.bernoulli(0.5)) {
        const std::size_t t = activity_tools[c][rng.below(activity_tools[c].size())];
        if (std::find(picked_tools.begin(), picked_tools.end(), t) == picked_tools.end()) {
          picked_tools.push_back(t);
          const auto& tv = tools[t].variants;
          const auto& tform = tv[rng.below(tv.size())];
          p.tool_mentions.push_back(tform);
          corpus.ground_truth.tools.emplace(tform, tools[t].name);
        }
      }
    }

    auto bias_it = cfg.automatable_bias.find(group);
    const double bias = bias_it == cfg.automatable_bias.end() ? default_bias : bias_it->second;
    const std::size_t n_tasks = rng.between(3, 8);
    for (std::size_t k = 0; k < n_tasks; ++k) {
      Task t;
      if (k == 0) {
        t.importance = Importance::Primary;
      } else {
        const double u = rng.uniform01();
        t.importance = u < 0.3 ? Importance::Primary : (u < 0.7 ? Importance::Secondary : Importance::Ancillary);
      }
      t.automatable = rng.bernoulli(bias);
      t.description = picked.empty() ? "general duty " + std::to_string(k + 1)
                                     : activities[picked[k % picked.size()]].name + " duty " + std::to_string(k + 1);
      p.tasks.push_back(std::move(t));
    }
    corpus.postings.push_back(std::move(p));
  }
  return corpus;
}

}  // namespace skillgraph
