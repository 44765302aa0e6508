#include "skillgraph/service.hpp"

#include <algorithm>
#include <charconv>
#include <map>
#include <thread>

#include "httplib.h"
#include "json.hpp"
#include "skillgraph/error.hpp"
#include "skillgraph/surface.hpp"

namespace skillgraph {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

ServiceResponse ok(const json& j) { return {200, j.dump()}; }

ServiceResponse fail(int status, std::string_view code, const std::string& message) {
  json j;
  j["error"] = {{"code", code}, {"message", message}};
  return {status, j.dump()};
}

int status_of(ErrorCode c) {
  switch (c) {
    case ErrorCode::UnknownJob: return 404;
    case ErrorCode::UnknownActivity:
    case ErrorCode::EmptySourceNeighborhood:
    case ErrorCode::BadThresholds:
    case ErrorCode::InvalidArgument:
    case ErrorCode::OutOfRange: return 422;
    default: return 500;
  }
}

ServiceResponse fail(const Error& e) {
  const int status = status_of(e.code());
  json j;
  j["error"] = {{"code", error_code_name(e.code())}, {"detail", e.detail()}, {"message", e.what()}};
  return {status, j.dump()};
}

std::string url_decode(std::string_view s) {
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '+') {
      out += ' ';
    } else if (s[i] == '%' && i + 2 < s.size()) {
      int v = 0;
      auto r = std::from_chars(s.data() + i + 1, s.data() + i + 3, v, 16);
      if (r.ec == std::errc() && r.ptr == s.data() + i + 3) {
        out += static_cast<char>(v);
        i += 2;
      } else {
        out += s[i];
      }
    } else {
      out += s[i];
    }
  }
  return out;
}

std::map<std::string, std::string> parse_query(std::string_view q) {
  std::map<std::string, std::string> out;
  while (!q.empty()) {
    const auto amp = q.find('&');
    const auto part = q.substr(0, amp);
    const auto eq = part.find('=');
    if (!part.empty())
      out[url_decode(part.substr(0, eq))] = eq == std::string_view::npos ? "" : url_decode(part.substr(eq + 1));
    if (amp == std::string_view::npos) break;
    q.remove_prefix(amp + 1);
  }
  return out;
}

std::vector<std::string> split_path(std::string_view p) {
  std::vector<std::string> out;
  while (!p.empty()) {
    if (p.front() == '/') {
      p.remove_prefix(1);
      continue;
    }
    const auto slash = p.find('/');
    out.push_back(url_decode(p.substr(0, slash)));
    if (slash == std::string_view::npos) break;
    p.remove_prefix(slash);
  }
  return out;
}

struct ParamError {
  int status;
  std::string code;
  std::string message;
};

std::optional<std::size_t> parse_size(const std::map<std::string, std::string>& q, const std::string& key) {
  auto it = q.find(key);
  if (it == q.end() || it->second.empty()) return std::nullopt;
  std::size_t v = 0;
  const auto& s = it->second;
  auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc() || r.ptr != s.data() + s.size())
    throw ParamError{422, "InvalidArgument", key + " must be a non-negative integer"};
  return v;
}

ThresholdConfig thresholds_from_query(const std::map<std::string, std::string>& q) {
  ThresholdConfig cfg;
  if (auto it = q.find("tau"); it != q.end()) {
    long long v = 0;
    const auto& s = it->second;
    auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    if (r.ec != std::errc() || r.ptr != s.data() + s.size() || v < 1)
      throw ParamError{422, "BadThresholds", "tau must be an integer >= 1"};
    cfg.tau = static_cast<std::size_t>(v);
  }
  if (auto it = q.find("phi"); it != q.end()) {
    const auto& s = it->second;
    if (s == "none" || s == "null" || s.empty()) {
      cfg.phi.reset();
    } else {
      try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument("trailing");
        cfg.phi = v;
      } catch (const std::exception&) {
        throw ParamError{422, "BadThresholds", "phi must be a number in (0,1] or none"};
      }
    }
  }
  try {
    validate_thresholds(cfg);
  } catch (const Error& e) {
    throw ParamError{422, "BadThresholds", e.what()};
  }
  return cfg;
}

json phi_json(const ThresholdConfig& cfg) { return cfg.phi ? json(*cfg.phi) : json(nullptr); }

json refs(const KnowledgeGraph& g, std::span<const std::uint32_t> ids, bool tools) {
  json arr = json::array();
  for (auto i : ids) {
    const auto& n = tools ? g.tool(i) : g.activity(i);
    arr.push_back({{"id", n.id}, {"label", n.label}});
  }
  return arr;
}

json pathway_json(const Artifacts& a, const TransitionPathway& p, bool risk_filtered) {
  const auto& g = a.graph;
  json j;
  j["target"] = g.job(p.target).id;
  j["title"] = g.job(p.target).label;
  j["rho"] = a.rho[p.target];
  j["delta_rho"] = risk_filtered ? json(p.delta_rho) : json(nullptr);
  j["shared_count"] = p.shared.size();
  j["transfer"] = p.transfer_rate;
  j["jaccard"] = p.jaccard;
  j["shared"] = refs(g, p.shared, false);
  j["gap"] = refs(g, p.gap, false);
  return j;
}

json page(const Artifacts& a, const std::vector<TransitionPathway>& ps, std::size_t limit, std::size_t offset,
          bool risk_filtered) {
  json arr = json::array();
  for (std::size_t i = offset; i < ps.size() && i - offset < limit; ++i)
    arr.push_back(pathway_json(a, ps[i], risk_filtered));
  return arr;
}

}  // namespace

QueryService::QueryService(Artifacts artifacts, CommunityPartition partition, std::string digest)
    : artifacts_(std::move(artifacts)), partition_(std::move(partition)), digest_(std::move(digest)) {
  bridge_ = rank_bridge_skills(artifacts_.graph, partition_, artifacts_.rho, artifacts_.graph.num_activities());
}

QueryService QueryService::load(const fs::path& dir) {
  Artifacts a = load_artifacts(dir);
  CommunityPartition p = fs::exists(dir / "partition.csv") ? read_partition(a.graph, dir / "partition.csv")
                                                            : louvain_partition(a.graph, 0);
  std::string digest;
  if (auto m = report::read_manifest(dir)) digest = m->digest;
  return QueryService(std::move(a), std::move(p), std::move(digest));
}

ServiceResponse QueryService::handle(std::string_view method, std::string_view target, std::string_view body) const {
  const auto qmark = target.find('?');
  const auto path = split_path(target.substr(0, qmark));
  const auto query = qmark == std::string_view::npos ? std::map<std::string, std::string>{}
                                                      : parse_query(target.substr(qmark + 1));
  try {
    const bool get = method == "GET";
    const std::size_t limit = parse_size(query, "limit").value_or(kDefaultPageLimit);
    const std::size_t offset = parse_size(query, "offset").value_or(0);
    if (path.size() == 1 && path[0] == "jobs" && get) {
      auto it = query.find("query");
      return jobs(it == query.end() ? std::string() : it->second, limit, offset);
    }
    if (path.size() == 2 && path[0] == "jobs" && get) return job(path[1]);
    if (path.size() == 3 && path[0] == "jobs" && path[2] == "transitions" && get) {
      if (!artifacts_.graph.find_job(path[1])) return fail(404, "UnknownJob", "no job with id " + path[1]);
      return job_transitions(path[1], thresholds_from_query(query), limit, offset);
    }
    if (path.size() == 1 && path[0] == "what-if") {
      if (method != "POST") return fail(405, "MethodNotAllowed", "use POST");
      return what_if(body);
    }
    if (path.size() == 2 && path[0] == "skills" && path[1] == "bridge" && get)
      return bridge(parse_size(query, "top").value_or(10));
    if (path.size() == 1 && path[0] == "safe-harbors" && get)
      return safe_harbors(thresholds_from_query(query), parse_size(query, "top").value_or(10));
    if (path.size() == 1 && path[0] == "sensitivity" && get) return sensitivity();
    if (path.size() == 1 && path[0] == "meta" && get) return meta();
    if (!get) return fail(405, "MethodNotAllowed", "read-only service");
    return fail(404, "NotFound", "no such endpoint");
  } catch (const ParamError& e) {
    return fail(e.status, e.code, e.message);
  } catch (const Error& e) {
    return fail(e);
  } catch (const std::exception& e) {
    return fail(500, "Internal", e.what());
  }
}

ServiceResponse QueryService::jobs(const std::string& query, std::size_t limit, std::size_t offset) const {
  const auto& g = artifacts_.graph;
  const std::string needle = surface::to_lower(query);
  std::vector<std::size_t> hits;
  for (std::size_t j = 0; j < g.num_jobs(); ++j) {
    const auto& n = g.job(j);
    if (needle.empty() || surface::to_lower(n.label).find(needle) != std::string::npos ||
        surface::to_lower(n.id).find(needle) != std::string::npos)
      hits.push_back(j);
  }
  std::sort(hits.begin(), hits.end(), [&](std::size_t a, std::size_t b) { return g.job(a).id < g.job(b).id; });
  json out;
  out["query"] = query;
  out["total"] = hits.size();
  out["limit"] = limit;
  out["offset"] = offset;
  json arr = json::array();
  for (std::size_t i = offset; i < hits.size() && i - offset < limit; ++i) {
    const std::size_t j = hits[i];
    arr.push_back({{"id", g.job(j).id},
                   {"title", g.job(j).label},
                   {"isco4", g.job_attributes(j).isco4},
                   {"rho", artifacts_.rho[j]},
                   {"category", risk_category_name(categorize_risk(artifacts_.rho[j]))}});
  }
  out["jobs"] = std::move(arr);
  return ok(out);
}

ServiceResponse QueryService::job(const std::string& id) const {
  const auto& g = artifacts_.graph;
  auto j = g.find_job(id);
  if (!j) return fail(404, "UnknownJob", "no job with id " + id);
  const auto& posting = artifacts_.corpus.postings[*j];
  json out;
  out["id"] = posting.id;
  out["title"] = posting.title;
  out["employer"] = posting.employer;
  out["isco4"] = posting.isco4;
  out["rho"] = artifacts_.rho[*j];
  out["category"] = risk_category_name(categorize_risk(artifacts_.rho[*j]));
  out["activities"] = refs(g, g.activities_of_job(*j), false);
  out["tools"] = refs(g, g.tools_of_job(*j), true);
  return ok(out);
}

ServiceResponse QueryService::job_transitions(const std::string& id, const ThresholdConfig& cfg, std::size_t limit,
                                              std::size_t offset) const {
  const auto& g = artifacts_.graph;
  const std::size_t j = *g.find_job(id);
  std::vector<TransitionPathway> ps;
  if (!g.activities_of_job(j).empty()) ps = transitions_from_job(g, artifacts_.rho, j, cfg);
  json out;
  out["source"] = id;
  out["rho"] = artifacts_.rho[j];
  out["tau"] = cfg.tau;
  out["phi"] = phi_json(cfg);
  out["total"] = ps.size();
  out["limit"] = limit;
  out["offset"] = offset;
  out["pathways"] = page(artifacts_, ps, limit, offset, true);
  return ok(out);
}

ServiceResponse QueryService::what_if(std::string_view body) const {
  json req;
  try {
    req = json::parse(body);
  } catch (const json::exception&) {
    return fail(400, "InvalidArgument", "body must be a JSON object");
  }
  if (!req.is_object()) return fail(400, "InvalidArgument", "body must be a JSON object");
  const auto& g = artifacts_.graph;

  std::map<std::string, std::string> q;
  if (req.contains("tau")) {
    if (!req["tau"].is_number_integer()) return fail(422, "BadThresholds", "tau must be an integer >= 1");
    q["tau"] = std::to_string(req["tau"].get<long long>());
  }
  if (req.contains("phi")) {
    if (req["phi"].is_null()) q["phi"] = "none";
    else if (req["phi"].is_number()) q["phi"] = json(req["phi"].get<double>()).dump();
    else return fail(422, "BadThresholds", "phi must be a number or null");
  }
  ThresholdConfig cfg;
  try {
    cfg = thresholds_from_query(q);
  } catch (const ParamError& e) {
    return fail(e.status, e.code, e.message);
  }

  if (!req.contains("activities") || !req["activities"].is_array() || req["activities"].empty())
    return fail(422, "EmptySourceNeighborhood", "profile needs at least one activity");
  std::vector<std::uint32_t> acts;
  for (const auto& a : req["activities"]) {
    if (!a.is_string()) return fail(422, "UnknownActivity", "activity ids are strings");
    auto idx = g.find_activity(a.get<std::string>());
    if (!idx) return fail(422, "UnknownActivity", "no activity with id " + a.get<std::string>());
    acts.push_back(static_cast<std::uint32_t>(*idx));
  }
  std::optional<double> rho;
  if (req.contains("rho") && !req["rho"].is_null()) {
    if (!req["rho"].is_number()) return fail(422, "InvalidArgument", "rho must be a number");
    rho = req["rho"].get<double>();
    if (!(*rho >= 0.0 && *rho <= 100.0)) return fail(422, "OutOfRange", "rho must lie in [0,100]");
  }
  std::size_t limit = kDefaultPageLimit, offset = 0;
  if (req.contains("limit") && req["limit"].is_number_unsigned()) limit = req["limit"].get<std::size_t>();
  if (req.contains("offset") && req["offset"].is_number_unsigned()) offset = req["offset"].get<std::size_t>();

  const auto ps = transitions_from_profile(g, artifacts_.rho, acts, rho, cfg);
  json out;
  out["risk_unfiltered"] = !rho.has_value();
  out["rho"] = rho ? json(*rho) : json(nullptr);
  out["tau"] = cfg.tau;
  out["phi"] = phi_json(cfg);
  out["total"] = ps.size();
  out["limit"] = limit;
  out["offset"] = offset;
  out["pathways"] = page(artifacts_, ps, limit, offset, rho.has_value());
  return ok(out);
}

ServiceResponse QueryService::bridge(std::size_t top) const {
  json arr = json::array();
  for (std::size_t i = 0; i < bridge_.size() && i < top; ++i) {
    const auto& m = bridge_[i];
    arr.push_back({{"rank", i + 1},
                   {"activity", m.activity_id},
                   {"label", m.label},
                   {"c_b", m.c_b},
                   {"c_p", m.c_p},
                   {"k", m.k},
                   {"d_isco", m.d_isco},
                   {"mean_rho", m.mean_rho ? json(*m.mean_rho) : json(nullptr)}});
  }
  return ok({{"communities", partition_.num_communities}, {"skills", std::move(arr)}});
}

ServiceResponse QueryService::safe_harbors(const ThresholdConfig& cfg, std::size_t top) const {
  const auto& g = artifacts_.graph;
  const auto tn = enumerate_transition_network(g, artifacts_.rho, cfg);
  json arr = json::array();
  std::size_t rank = 0;
  for (const auto& e : rank_safe_harbors(g, artifacts_.rho, tn, top))
    arr.push_back({{"rank", ++rank},
                   {"target", g.job(e.target).id},
                   {"title", g.job(e.target).label},
                   {"rho", e.rho},
                   {"k_in", e.k_in},
                   {"mean_jaccard", e.mean_jaccard},
                   {"n_activities", e.n_activities},
                   {"bridge", e.bridge}});
  return ok({{"tau", cfg.tau}, {"phi", phi_json(cfg)}, {"safe_harbors", std::move(arr)}});
}

ServiceResponse QueryService::sensitivity() const {
  const auto grid = extended_threshold_grid();
  json arr = json::array();
  for (const auto& r : threshold_sensitivity_grid(artifacts_.graph, artifacts_.rho, grid)) {
    auto opt = [](const std::optional<double>& v) { return v ? json(*v) : json(nullptr); };
    arr.push_back({{"tau", r.config.tau},
                   {"phi", phi_json(r.config)},
                   {"pathways", r.n_pathways},
                   {"mean_shared", opt(r.mean_shared)},
                   {"mean_transfer", opt(r.mean_transfer)},
                   {"sources", r.unique_sources},
                   {"coverage", opt(r.coverage)}});
  }
  return ok({{"rows", std::move(arr)}});
}

ServiceResponse QueryService::meta() const {
  const auto& g = artifacts_.graph;
  json out;
  out["digest"] = digest_.empty() ? json(nullptr) : json(digest_);
  out["counts"] = {{"jobs", g.num_jobs()},
                   {"activities", g.num_activities()},
                   {"tools", g.num_tools()},
                   {"performs_edges", g.num_performs_edges()},
                   {"uses_edges", g.num_uses_edges()},
                   {"communities", partition_.num_communities}};
  out["modularity"] = partition_.q;
  return ok(out);
}

// ---------------------------------------------------------------------------

struct HttpFrontEnd::Impl {
  const QueryService& service;
  httplib::Server server;
  std::thread thread;

  explicit Impl(const QueryService& s) : service(s) {
    auto route = [this](const httplib::Request& req, httplib::Response& res) {
      std::string target = req.path;
      if (!req.params.empty()) {
        std::string q;
        for (const auto& [k, v] : req.params) {
          q += q.empty() ? "?" : "&";
          q += httplib::detail::encode_query_param(k) + "=" + httplib::detail::encode_query_param(v);
        }
        target += q;
      }
      const auto r = service.handle(req.method, target, req.body);
      res.status = r.status;
      res.set_header("Access-Control-Allow-Origin", "*");
      res.set_content(r.body, "application/json");
    };
    server.Get(R"(/.*)", route);
    server.Post(R"(/.*)", route);
    server.Options(R"(/.*)", [](const httplib::Request&, httplib::Response& res) {
      res.set_header("Access-Control-Allow-Origin", "*");
      res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
      res.set_header("Access-Control-Allow-Headers", "Content-Type");
      res.status = 204;
    });
  }
};

HttpFrontEnd::HttpFrontEnd(const QueryService& service) : impl_(std::make_unique<Impl>(service)) {}

HttpFrontEnd::~HttpFrontEnd() { stop(); }

int HttpFrontEnd::start(const std::string& host, int port) {
  int bound = port;
  if (port == 0) {
    bound = impl_->server.bind_to_any_port(host);
  } else if (!impl_->server.bind_to_port(host, port)) {
    bound = -1;
  }
  if (bound < 0) throw Error(ErrorCode::IoFailure, host + ":" + std::to_string(port), "cannot bind");
  impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
  return bound;
}

void HttpFrontEnd::stop() {
  if (!impl_) return;
  impl_->server.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

bool HttpFrontEnd::listen(const std::string& host, int port) { return impl_->server.listen(host, port); }

}  // namespace skillgraph
