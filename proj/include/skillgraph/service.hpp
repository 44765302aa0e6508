#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "skillgraph/metrics.hpp"
#include "skillgraph/pipeline.hpp"
#include "skillgraph/transitions.hpp"

namespace skillgraph {

struct ServiceResponse {
  int status = 200;
  std::string body;  // JSON
};

// Read-only view over a pipeline output directory. After load() nothing is
// mutated, so handle() may be called from any number of threads.
class QueryService {
 public:
  static QueryService load(const std::filesystem::path& dir);
  // For callers that already hold the artifacts (tests, embedding).
  QueryService(Artifacts artifacts, CommunityPartition partition, std::string digest);

  // `target` is path plus optional query string, e.g. "/jobs/J1/transitions?tau=3".
  ServiceResponse handle(std::string_view method, std::string_view target, std::string_view body = {}) const;

  const Artifacts& artifacts() const { return artifacts_; }

 private:
  ServiceResponse jobs(const std::string& query, std::size_t limit, std::size_t offset) const;
  ServiceResponse job(const std::string& id) const;
  ServiceResponse job_transitions(const std::string& id, const ThresholdConfig& cfg, std::size_t limit,
                                  std::size_t offset) const;
  ServiceResponse what_if(std::string_view body) const;
  ServiceResponse bridge(std::size_t top) const;
  ServiceResponse safe_harbors(const ThresholdConfig& cfg, std::size_t top) const;
  ServiceResponse sensitivity() const;
  ServiceResponse meta() const;

  Artifacts artifacts_;
  CommunityPartition partition_;
  std::string digest_;
  std::vector<BridgeSkillMetrics> bridge_;  // all activities, ranked
};

inline constexpr std::size_t kDefaultPageLimit = 50;

// Blocking HTTP front end. start() binds and serves on a background thread;
// port 0 picks a free port, which start() returns.
class HttpFrontEnd {
 public:
  explicit HttpFrontEnd(const QueryService& service);
  ~HttpFrontEnd();
  HttpFrontEnd(const HttpFrontEnd&) = delete;
  HttpFrontEnd& operator=(const HttpFrontEnd&) = delete;

  int start(const std::string& host, int port);
  void stop();
  // Serve in the calling thread until stop() is called elsewhere.
  bool listen(const std::string& host, int port);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace skillgraph
