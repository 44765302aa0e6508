// skillgraph command-line driver. Talks to the library only through the C API.
#include <cstdio>
#include <cstdlib>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "skillgraph/skillgraph.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitData = 2;

int exit_code_for(sg_status s) {
  if (s == SG_OK) return kExitOk;
  if (s == SG_ERR_BAD_CONFIG || s == SG_ERR_BAD_THRESHOLDS) return kExitConfig;
  return kExitData;
}

struct StageOptions {
  std::string config;
  std::string out;
  std::string format;
  long long seed = -1;
};

int run_stage(const std::string& stage, const StageOptions& o) {
  sg_run_options opts{};
  opts.use_environment = 1;
  opts.out_dir = o.out.empty() ? nullptr : o.out.c_str();
  opts.has_seed = o.seed >= 0;
  opts.seed = o.seed >= 0 ? static_cast<uint64_t>(o.seed) : 0;
  opts.format = -1;
  if (o.format == "csv") opts.format = SG_FORMAT_CSV;
  else if (o.format == "structured") opts.format = SG_FORMAT_STRUCTURED;

  char* manifest = nullptr;
  const sg_status s = sg_pipeline_run(o.config.c_str(), stage.c_str(), &opts, &manifest);
  if (s != SG_OK) {
    std::fprintf(stderr, "skillgraph %s: %s\n", stage.c_str(), sg_last_error_message());
    return exit_code_for(s);
  }
  const auto m = nlohmann::json::parse(manifest);
  sg_string_free(manifest);
  std::printf("%s: %zu files in manifest, digest %s\n", stage.c_str(), m["files"].size(),
              m["digest"].get<std::string>().c_str());
  return kExitOk;
}

int serve(const std::string& dir, const std::string& host, int port) {
  sg_service* svc = nullptr;
  sg_status s = sg_service_open(dir.c_str(), &svc);
  if (s != SG_OK) {
    std::fprintf(stderr, "skillgraph serve: %s\n", sg_last_error_message());
    return exit_code_for(s);
  }
  std::printf("serving %s on http://%s:%d\n", dir.c_str(), host.c_str(), port);
  std::fflush(stdout);
  s = sg_service_serve(svc, host.c_str(), port);
  if (s != SG_OK) std::fprintf(stderr, "skillgraph serve: %s\n", sg_last_error_message());
  sg_service_free(svc);
  return exit_code_for(s);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Labor-market skill graph pipeline"};
  app.require_subcommand(1);

  StageOptions opts;
  const char* stages[] = {"ingest",      "cluster",     "graph",    "analyze", "transitions",
                          "sensitivity", "validate",    "report"};
  const char* help[] = {"Load or synthesize the corpus and de-duplicate it",
                        "Cluster surface forms and sweep theta",
                        "Build the knowledge graph, topology and communities",
                        "Risk aggregation, heterogeneity, bridge skills and importance",
                        "Enumerate transitions, safe harbors, gap skills and exemplars",
                        "Threshold sensitivity grid",
                        "Stratified cluster validation with Wilson intervals",
                        "Run every stage"};
  for (std::size_t i = 0; i < std::size(stages); ++i) {
    auto* sub = app.add_subcommand(stages[i], help[i]);
    sub->add_option("--config", opts.config, "Pipeline configuration (JSON)")->required();
    sub->add_option("--seed", opts.seed, "Override the run seed")->check(CLI::NonNegativeNumber);
    sub->add_option("--out", opts.out, "Output directory");
    sub->add_option("--format", opts.format, "Report table format")->check(CLI::IsMember({"csv", "structured"}));
  }

  std::string dir, host = "127.0.0.1";
  int port = 8080;
  auto* srv = app.add_subcommand("serve", "Serve a built artifact directory over HTTP");
  srv->add_option("--out,--dir", dir, "Artifact directory written by the pipeline");
  srv->add_option("--host", host, "Bind address");
  srv->add_option("--port", port, "Port")->check(CLI::Range(0, 65535));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  if (srv->parsed()) {
    if (dir.empty())
      if (const char* env = std::getenv("SKILLGRAPH_OUT")) dir = env;
    if (dir.empty()) {
      std::fprintf(stderr, "skillgraph serve: --out is required\n");
      return kExitConfig;
    }
    return serve(dir, host, port);
  }
  for (auto* sub : app.get_subcommands()) return run_stage(sub->get_name(), opts);
  return kExitConfig;
}
