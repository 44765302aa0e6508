#include "skillgraph/cluster.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "json.hpp"
#include "skillgraph/error.hpp"
#include "skillgraph/rng.hpp"

namespace skillgraph {

std::string_view entity_kind_name(EntityKind k) { return k == EntityKind::activity ? "activity" : "tool"; }

std::optional<EntityKind> parse_entity_kind(std::string_view s) {
  if (s == "activity") return EntityKind::activity;
  if (s == "tool") return EntityKind::tool;
  return std::nullopt;
}

namespace {

std::string make_cluster_id(EntityKind kind, std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%c%06zu", kind == EntityKind::activity ? 'A' : 'T', index + 1);
  return buf;
}

std::vector<Embedding> embed_all(std::span<const std::string> forms, const EmbeddingProvider& provider) {
  std::vector<Embedding> out;
  out.reserve(forms.size());
  for (const auto& f : forms) {
    Embedding v;
    try {
      v = provider.embed(f);
    } catch (const Error&) {
      throw;
    } catch (const std::exception& e) {
      throw Error(ErrorCode::ProviderFailure, f, e.what());
    }
    if (v.size() != provider.dimension())
      throw Error(ErrorCode::ProviderFailure, f, "embedding has the wrong dimension");
    out.push_back(std::move(v));
  }
  return out;
}

void require_distinct(std::span<const std::string> forms) {
  if (forms.empty()) throw Error(ErrorCode::InvalidArgument, "forms", "no surface forms to cluster");
  std::unordered_set<std::string> seen;
  for (const auto& f : forms)
    if (!seen.insert(f).second) throw Error(ErrorCode::InvalidArgument, f, "surface forms must be distinct");
}

}  // namespace

std::vector<std::size_t> leader_follower_assign(std::span<const Embedding> embeddings, double theta) {
  std::vector<std::size_t> leaders;  // index into embeddings
  std::vector<std::size_t> assignment(embeddings.size());
  for (std::size_t i = 0; i < embeddings.size(); ++i) {
    std::optional<std::size_t> best;
    double best_sim = 0.0;
    for (std::size_t c = 0; c < leaders.size(); ++c) {
      const double sim = cosine_similarity(embeddings[i], embeddings[leaders[c]]);
      if (sim > theta && (!best || sim > best_sim)) {
        best = c;
        best_sim = sim;
      }
    }
    if (best) {
      assignment[i] = *best;
    } else {
      assignment[i] = leaders.size();
      leaders.push_back(i);
    }
  }
  return assignment;
}

std::vector<SkillCluster> leader_follower(std::span<const std::string> surface_forms,
                                          const EmbeddingProvider& provider, const ClusterConfig& cfg,
                                          EntityKind kind) {
  if (!(cfg.theta >= -1.0 && cfg.theta <= 1.0))
    throw Error(ErrorCode::InvalidArgument, "theta", "cosine threshold must lie in [-1,1]");
  require_distinct(surface_forms);
  const auto embeddings = embed_all(surface_forms, provider);
  const auto assignment = leader_follower_assign(embeddings, cfg.theta);
  std::vector<SkillCluster> clusters;
  for (std::size_t i = 0; i < surface_forms.size(); ++i) {
    const std::size_t c = assignment[i];
    if (c == clusters.size()) {
      SkillCluster cl;
      cl.canonical_id = make_cluster_id(kind, c);
      cl.kind = kind;
      cl.representative = surface_forms[i];
      clusters.push_back(std::move(cl));
    }
    clusters[c].members.push_back(surface_forms[i]);
  }
  return clusters;
}

std::vector<std::string> collect_forms(const Corpus& corpus, EntityKind kind) {
  std::vector<std::string> out;
  std::unordered_set<std::string> seen;
  for (const auto& p : corpus.postings) {
    const auto& mentions = kind == EntityKind::activity ? p.activity_mentions : p.tool_mentions;
    for (const auto& m : mentions)
      if (seen.insert(m).second) out.push_back(m);
  }
  return out;
}

std::vector<LabeledPair> parse_labeled_pairs(std::istream& in) {
  std::vector<LabeledPair> pairs;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto a = line.find('\t');
    const auto b = a == std::string::npos ? a : line.find('\t', a + 1);
    if (b == std::string::npos) throw Error(ErrorCode::InvalidRecord, std::to_string(n), "expected formA<TAB>formB<TAB>0|1");
    const auto label = line.substr(b + 1);
    if (label != "0" && label != "1") throw Error(ErrorCode::InvalidRecord, std::to_string(n), "label must be 0 or 1");
    pairs.push_back({line.substr(0, a), line.substr(a + 1, b - a - 1), label == "1"});
  }
  return pairs;
}

void write_labeled_pairs(std::span<const LabeledPair> pairs, std::ostream& out) {
  for (const auto& p : pairs) out << p.a << '\t' << p.b << '\t' << (p.same_concept ? '1' : '0') << '\n';
}

std::vector<LabeledPair> sample_labeled_pairs(const std::map<std::string, std::string>& truth, std::size_t n,
                                              std::uint64_t seed) {
  std::map<std::string, std::vector<std::string>> by_canonical;
  std::vector<std::string> forms;
  for (const auto& [form, canonical] : truth) {
    by_canonical[canonical].push_back(form);
    forms.push_back(form);
  }
  std::vector<std::pair<std::string, std::string>> positives;
  for (const auto& [canonical, members] : by_canonical)
    for (std::size_t i = 0; i < members.size(); ++i)
      for (std::size_t j = i + 1; j < members.size(); ++j) positives.emplace_back(members[i], members[j]);

  Rng rng(seed);
  std::vector<LabeledPair> out;
  const std::size_t want_pos = std::min(positives.size(), n / 2);
  for (std::size_t idx : rng.sample_indices(positives.size(), want_pos))
    out.push_back({positives[idx].first, positives[idx].second, true});
  std::set<std::pair<std::string, std::string>> used;
  const std::size_t want_neg = n - out.size();
  for (std::size_t attempt = 0; forms.size() > 1 && out.size() < n && attempt < 50 * (want_neg + 1); ++attempt) {
    const auto& a = forms[rng.below(forms.size())];
    const auto& b = forms[rng.below(forms.size())];
    if (truth.at(a) == truth.at(b)) continue;
    if (!used.emplace(std::min(a, b), std::max(a, b)).second) continue;
    out.push_back({a, b, false});
  }
  return out;
}

std::vector<double> theta_grid(double lo, double hi, double step) {
  if (!(step > 0.0)) throw Error(ErrorCode::InvalidArgument, "step", "grid step must be positive");
  if (!(lo <= hi)) throw Error(ErrorCode::InvalidArgument, "lo", "grid needs lo <= hi");
  const auto count = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
  std::vector<double> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back(std::round((lo + static_cast<double>(i) * step) * 1e9) / 1e9);
  return out;
}

std::vector<ThetaRow> theta_sensitivity_grid(std::span<const std::string> forms, const EmbeddingProvider& provider,
                                             std::span<const LabeledPair> labeled_pairs, double lo, double hi,
                                             double step) {
  if (labeled_pairs.empty()) throw Error(ErrorCode::EmptyLabels, "", "no labelled pairs");
  const auto thetas = theta_grid(lo, hi, step);
  require_distinct(forms);
  std::unordered_map<std::string, std::size_t> position;
  for (std::size_t i = 0; i < forms.size(); ++i) position.emplace(forms[i], i);
  std::vector<std::pair<std::size_t, std::size_t>> pair_idx;
  for (const auto& p : labeled_pairs) {
    auto a = position.find(p.a);
    if (a == position.end()) throw Error(ErrorCode::UnknownForm, p.a, "labelled pair references an unknown form");
    auto b = position.find(p.b);
    if (b == position.end()) throw Error(ErrorCode::UnknownForm, p.b, "labelled pair references an unknown form");
    pair_idx.emplace_back(a->second, b->second);
  }
  const auto embeddings = embed_all(forms, provider);

  std::vector<ThetaRow> rows;
  for (double theta : thetas) {
    const auto assignment = leader_follower_assign(embeddings, theta);
    ThetaRow row;
    row.theta = theta;
    row.n_clusters = assignment.empty() ? 0 : *std::max_element(assignment.begin(), assignment.end()) + 1;
    std::size_t merged = 0, correct = 0, positives = 0;
    for (std::size_t k = 0; k < pair_idx.size(); ++k) {
      const bool together = assignment[pair_idx[k].first] == assignment[pair_idx[k].second];
      if (labeled_pairs[k].same_concept) ++positives;
      if (together) {
        ++merged;
        if (labeled_pairs[k].same_concept) ++correct;
      }
    }
    if (merged > 0) row.precision = static_cast<double>(correct) / static_cast<double>(merged);
    if (positives > 0) row.recall = static_cast<double>(correct) / static_cast<double>(positives);
    rows.push_back(row);
  }
  return rows;
}

// ---- validation --------------------------------------------------------

std::optional<SizeBand> size_band(std::size_t members) {
  if (members < 2) return std::nullopt;
  if (members == 2) return SizeBand::Two;
  if (members <= 5) return SizeBand::ThreeToFive;
  if (members <= 10) return SizeBand::SixToTen;
  return SizeBand::ElevenPlus;
}

std::string_view size_band_label(SizeBand b) {
  switch (b) {
    case SizeBand::Two: return "2 variants";
    case SizeBand::ThreeToFive: return "3-5 variants";
    case SizeBand::SixToTen: return "6-10 variants";
    case SizeBand::ElevenPlus: return "11+ variants";
  }
  return "";
}

std::vector<Stratum> all_strata() {
  std::vector<Stratum> out;
  for (EntityKind k : {EntityKind::tool, EntityKind::activity})
    for (SizeBand b : {SizeBand::Two, SizeBand::ThreeToFive, SizeBand::SixToTen, SizeBand::ElevenPlus})
      out.push_back({k, b});
  return out;
}

std::vector<StratumSample> stratified_validation_sample(std::span<const SkillCluster> clusters,
                                                        const std::map<Stratum, std::size_t>& plan_sizes,
                                                        std::uint64_t seed) {
  std::map<Stratum, std::vector<std::size_t>> population;
  for (std::size_t i = 0; i < clusters.size(); ++i) {
    auto band = size_band(clusters[i].members.size());
    if (band) population[{clusters[i].kind, *band}].push_back(i);
  }
  std::vector<StratumSample> out;
  std::size_t stratum_index = 0;
  for (const Stratum& s : all_strata()) {
    ++stratum_index;
    StratumSample sample;
    sample.stratum = s;
    const auto& members = population[s];
    sample.population = members.size();
    auto plan = plan_sizes.find(s);
    sample.requested = plan == plan_sizes.end() ? 0 : plan->second;
    // Each stratum gets its own stream so changing one request leaves the others intact.
    Rng rng(splitmix64(seed ^ (0x9e3779b97f4a7c15ULL * stratum_index)));
    auto picks = rng.sample_indices(members.size(), std::min(sample.requested, members.size()));
    std::sort(picks.begin(), picks.end());
    for (std::size_t p : picks) sample.cluster_ids.push_back(clusters[members[p]].canonical_id);
    out.push_back(std::move(sample));
  }
  return out;
}

WilsonInterval wilson_interval(std::size_t errors, std::size_t n, double z) {
  if (n == 0 || errors > n || !(z > 0.0))
    throw Error(ErrorCode::BadCounts, std::to_string(errors) + "/" + std::to_string(n), "need 0 <= errors <= n, n >= 1, z > 0");
  const double nn = static_cast<double>(n);
  const double p = static_cast<double>(errors) / nn;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / nn;
  const double centre = (p + z2 / (2.0 * nn)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn)) / denom;
  return {std::clamp(centre - half, 0.0, 1.0), std::clamp(centre + half, 0.0, 1.0)};
}

std::optional<Judgment> parse_judgment(std::string_view s) {
  if (s == "CORRECT") return Judgment::Correct;
  if (s == "MINOR" || s == "MINOR ISSUE") return Judgment::Minor;
  if (s == "MAJOR" || s == "MAJOR ERROR") return Judgment::Major;
  return std::nullopt;
}

std::string_view judgment_name(Judgment j) {
  switch (j) {
    case Judgment::Correct: return "CORRECT";
    case Judgment::Minor: return "MINOR";
    case Judgment::Major: return "MAJOR";
  }
  return "CORRECT";
}

namespace {

void add_counts(ValidationRow& into, const ValidationRow& from) {
  into.samples += from.samples;
  into.correct += from.correct;
  into.minor += from.minor;
  into.major += from.major;
}

ValidationRow make_row(std::string type, std::string stratum) {
  ValidationRow row;
  row.type = std::move(type);
  row.stratum = std::move(stratum);
  return row;
}

void finish(ValidationRow& row, bool with_ci) {
  if (row.samples == 0) return;
  row.error_rate = static_cast<double>(row.major) / static_cast<double>(row.samples);
  if (with_ci) row.ci = wilson_interval(row.major, row.samples);
}

}  // namespace

ValidationReport validation_report(std::span<const StratumSample> samples,
                                   const std::map<std::string, Judgment>& judgments) {
  ValidationReport report;
  ValidationRow total = make_row("Combined", "Total");
  for (EntityKind kind : {EntityKind::tool, EntityKind::activity}) {
    ValidationRow subtotal = make_row(kind == EntityKind::tool ? "Tools" : "Activities", "Subtotal");
    bool any = false;
    for (const auto& s : samples) {
      if (s.stratum.kind != kind) continue;
      any = true;
      if (s.cluster_ids.empty()) continue;
      ValidationRow row = make_row(subtotal.type, std::string(size_band_label(s.stratum.band)));
      for (const auto& id : s.cluster_ids) {
        auto it = judgments.find(id);
        if (it == judgments.end()) throw Error(ErrorCode::MissingJudgment, id, "sampled cluster has no judgment");
        ++row.samples;
        switch (it->second) {
          case Judgment::Correct: ++row.correct; break;
          case Judgment::Minor: ++row.minor; break;
          case Judgment::Major: ++row.major; break;
        }
      }
      finish(row, false);
      add_counts(subtotal, row);
      report.rows.push_back(std::move(row));
    }
    if (!any) continue;
    finish(subtotal, true);
    add_counts(total, subtotal);
    report.rows.push_back(std::move(subtotal));
  }
  finish(total, true);
  report.rows.push_back(std::move(total));
  return report;
}

std::map<std::string, Judgment> parse_judgments(std::istream& in) {
  std::map<std::string, Judgment> out;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) throw Error(ErrorCode::InvalidRecord, std::to_string(n), "expected id<TAB>tier");
    auto j = parse_judgment(line.substr(tab + 1));
    if (!j) throw Error(ErrorCode::InvalidRecord, std::to_string(n), "tier must be CORRECT, MINOR or MAJOR");
    out[line.substr(0, tab)] = *j;
  }
  return out;
}

std::map<std::string, Judgment> judge_against_ground_truth(std::span<const SkillCluster> clusters,
                                                           const GroundTruth& truth) {
  std::map<std::string, Judgment> out;
  for (const auto& c : clusters) {
    const auto& map = c.kind == EntityKind::activity ? truth.activities : truth.tools;
    std::set<std::string> canonicals;
    for (const auto& m : c.members) {
      auto it = map.find(m);
      canonicals.insert(it == map.end() ? "?" + m : it->second);
    }
    out[c.canonical_id] = canonicals.size() <= 1 ? Judgment::Correct : Judgment::Major;
  }
  return out;
}

void write_clusters(std::span<const SkillCluster> clusters, std::ostream& out) {
  for (const auto& c : clusters) {
    nlohmann::ordered_json j;
    j["canonical_id"] = c.canonical_id;
    j["kind"] = std::string(entity_kind_name(c.kind));
    j["representative"] = c.representative;
    j["members"] = c.members;
    out << j.dump() << '\n';
  }
}

std::vector<SkillCluster> read_clusters(std::istream& in) {
  std::vector<SkillCluster> out;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.empty()) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      SkillCluster c;
      c.canonical_id = j.at("canonical_id").get<std::string>();
      auto kind = parse_entity_kind(j.at("kind").get<std::string>());
      if (!kind) throw Error(ErrorCode::InvalidRecord, std::to_string(n), "unknown cluster kind");
      c.kind = *kind;
      c.representative = j.at("representative").get<std::string>();
      c.members = j.at("members").get<std::vector<std::string>>();
      if (c.members.empty()) throw Error(ErrorCode::InvalidRecord, std::to_string(n), "cluster without members");
      out.push_back(std::move(c));
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::MissingField, std::to_string(n), e.what());
    }
  }
  return out;
}

}  // namespace skillgraph
