#include "skillgraph/skillgraph.h"

#include <cstdlib>
#include <cstring>
#include <fstream>
#include <string>

#include "json.hpp"
#include "skillgraph/cluster.hpp"
#include "skillgraph/corpus.hpp"
#include "skillgraph/error.hpp"
#include "skillgraph/pipeline.hpp"
#include "skillgraph/risk.hpp"
#include "skillgraph/service.hpp"

struct sg_corpus {
  skillgraph::Corpus corpus;
};

struct sg_service {
  skillgraph::QueryService service;
};

namespace {

thread_local std::string g_last_error;

sg_status to_status(skillgraph::ErrorCode code) {
  return static_cast<sg_status>(static_cast<int>(code) + 1);
}

template <typename F>
sg_status guard(F&& fn) {
  try {
    fn();
    g_last_error.clear();
    return SG_OK;
  } catch (const skillgraph::Error& e) {
    g_last_error = e.what();
    return to_status(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return SG_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return SG_ERR_INTERNAL;
  }
}

sg_status null_arg(const char* name) {
  g_last_error = std::string("InvalidArgument(") + name + "): null pointer";
  return SG_ERR_INVALID_ARGUMENT;
}

char* dup(const std::string& s) {
  char* p = static_cast<char*>(std::malloc(s.size() + 1));
  if (!p) throw std::bad_alloc();
  std::memcpy(p, s.c_str(), s.size() + 1);
  return p;
}

}  // namespace

static_assert(SG_ERR_INTERNAL == static_cast<int>(skillgraph::ErrorCode::Internal) + 1);

extern "C" {

const char* sg_status_name(sg_status status) {
  if (status == SG_OK) return "Ok";
  if (status < SG_OK || status > SG_ERR_INTERNAL) return "Unknown";
  return skillgraph::error_code_name(static_cast<skillgraph::ErrorCode>(status - 1)).data();
}

const char* sg_last_error_message(void) { return g_last_error.c_str(); }

void sg_string_free(char* s) { std::free(s); }

sg_status sg_corpus_load(const char* path, sg_corpus** out) {
  if (!path) return null_arg("path");
  if (!out) return null_arg("out");
  return guard([&] { *out = new sg_corpus{skillgraph::load_postings(path)}; });
}

sg_status sg_corpus_synthesize_json(const char* config_json, sg_corpus** out) {
  if (!config_json) return null_arg("config_json");
  if (!out) return null_arg("out");
  return guard([&] {
    // Reuse the pipeline parser so both entry points accept the same fields.
    nlohmann::json doc;
    try {
      doc = {{"corpus", {{"synthetic", nlohmann::json::parse(config_json)}}}};
    } catch (const nlohmann::json::exception& e) {
      throw skillgraph::Error(skillgraph::ErrorCode::BadConfig, "config_json", e.what());
    }
    const auto cfg = skillgraph::parse_pipeline_config(doc.dump());
    *out = new sg_corpus{skillgraph::generate_synthetic_corpus(*cfg.synthetic)};
  });
}

sg_status sg_corpus_deduplicate(const sg_corpus* in, double title_threshold, sg_corpus** out) {
  if (!in) return null_arg("in");
  if (!out) return null_arg("out");
  if (!(title_threshold >= 0.0 && title_threshold <= 1.0)) {
    g_last_error = "InvalidArgument(title_threshold): must lie in [0,1]";
    return SG_ERR_INVALID_ARGUMENT;
  }
  return guard([&] { *out = new sg_corpus{skillgraph::deduplicate(in->corpus, title_threshold)}; });
}

sg_status sg_corpus_size(const sg_corpus* corpus, size_t* out) {
  if (!corpus) return null_arg("corpus");
  if (!out) return null_arg("out");
  *out = corpus->corpus.postings.size();
  return SG_OK;
}

sg_status sg_corpus_write(const sg_corpus* corpus, const char* path) {
  if (!corpus) return null_arg("corpus");
  if (!path) return null_arg("path");
  return guard([&] {
    std::ofstream o(path, std::ios::binary | std::ios::trunc);
    if (!o) throw skillgraph::Error(skillgraph::ErrorCode::IoFailure, path, "cannot open for writing");
    skillgraph::write_postings(corpus->corpus, o);
  });
}

void sg_corpus_free(sg_corpus* corpus) { delete corpus; }

sg_status sg_compute_risk(const sg_task* tasks, size_t n, double* out_rho) {
  if (!tasks && n > 0) return null_arg("tasks");
  if (!out_rho) return null_arg("out_rho");
  return guard([&] {
    std::vector<skillgraph::Task> ts;
    for (size_t i = 0; i < n; ++i) {
      skillgraph::Task t;
      switch (tasks[i].importance) {
        case SG_PRIMARY: t.importance = skillgraph::Importance::Primary; break;
        case SG_SECONDARY: t.importance = skillgraph::Importance::Secondary; break;
        case SG_ANCILLARY: t.importance = skillgraph::Importance::Ancillary; break;
        default: throw skillgraph::Error(skillgraph::ErrorCode::InvalidArgument, "importance", "unknown level");
      }
      t.automatable = tasks[i].automatable != 0;
      ts.push_back(t);
    }
    *out_rho = skillgraph::compute_risk(ts);
  });
}

sg_status sg_categorize_risk(double rho, sg_risk_category* out) {
  if (!out) return null_arg("out");
  return guard([&] { *out = static_cast<sg_risk_category>(static_cast<int>(skillgraph::categorize_risk(rho))); });
}

sg_status sg_wilson_interval(size_t errors, size_t n, double z, double* lo, double* hi) {
  if (!lo) return null_arg("lo");
  if (!hi) return null_arg("hi");
  return guard([&] {
    const auto ci = skillgraph::wilson_interval(errors, n, z);
    *lo = ci.lo;
    *hi = ci.hi;
  });
}

sg_status sg_pipeline_run(const char* config_path, const char* stage, const sg_run_options* options,
                          char** manifest_json) {
  if (!config_path) return null_arg("config_path");
  if (!stage) return null_arg("stage");
  return guard([&] {
    auto st = skillgraph::parse_stage(stage);
    if (!st) throw skillgraph::Error(skillgraph::ErrorCode::InvalidArgument, stage, "unknown stage");
    auto cfg = skillgraph::load_pipeline_config(config_path);
    if (options && options->use_environment) skillgraph::apply_environment(cfg);
    if (options) {
      if (options->out_dir) cfg.output_dir = options->out_dir;
      if (options->has_seed) skillgraph::set_seed(cfg, options->seed);
      if (options->format == SG_FORMAT_CSV) cfg.format = skillgraph::report::Format::csv;
      else if (options->format == SG_FORMAT_STRUCTURED) cfg.format = skillgraph::report::Format::structured;
      else if (options->format != -1)
        throw skillgraph::Error(skillgraph::ErrorCode::BadConfig, "format", "unknown format");
    }
    const auto result = skillgraph::run_stage(cfg, *st);
    if (manifest_json) *manifest_json = dup(skillgraph::report::manifest_json(result.manifest));
  });
}

sg_status sg_service_open(const char* artifact_dir, sg_service** out) {
  if (!artifact_dir) return null_arg("artifact_dir");
  if (!out) return null_arg("out");
  return guard([&] { *out = new sg_service{skillgraph::QueryService::load(artifact_dir)}; });
}

sg_status sg_service_handle(const sg_service* service, const char* method, const char* target, const char* body,
                            int* http_status, char** response_json) {
  if (!service) return null_arg("service");
  if (!method) return null_arg("method");
  if (!target) return null_arg("target");
  if (!http_status) return null_arg("http_status");
  if (!response_json) return null_arg("response_json");
  return guard([&] {
    const auto r = service->service.handle(method, target, body ? body : "");
    *response_json = dup(r.body);
    *http_status = r.status;
  });
}

sg_status sg_service_serve(const sg_service* service, const char* host, int port) {
  if (!service) return null_arg("service");
  if (!host) return null_arg("host");
  return guard([&] {
    skillgraph::HttpFrontEnd front(service->service);
    if (!front.listen(host, port))
      throw skillgraph::Error(skillgraph::ErrorCode::IoFailure, std::string(host) + ":" + std::to_string(port),
                              "cannot listen");
  });
}

void sg_service_free(sg_service* service) { delete service; }

}  // extern "C"
