/* Exercises the C interface from plain C. */
#include <math.h>
#include <stdio.h>
#include <stdlib.h>
#include <string.h>

#include "skillgraph/skillgraph.h"

static int failures = 0;

#define EXPECT(cond)                                                 \
  do {                                                               \
    if (!(cond)) {                                                   \
      fprintf(stderr, "%s:%d: expectation failed: %s\n", __FILE__, __LINE__, #cond); \
      ++failures;                                                    \
    }                                                                \
  } while (0)

static void test_risk(void) {
  sg_task tasks[3] = {{SG_PRIMARY, 1}, {SG_SECONDARY, 0}, {SG_ANCILLARY, 1}};
  double rho = -1;
  EXPECT(sg_compute_risk(tasks, 3, &rho) == SG_OK);
  EXPECT(fabs(rho - 70.0) < 1e-9);
  EXPECT(sg_compute_risk(tasks, 0, &rho) == SG_ERR_EMPTY_TASK_LIST);
  EXPECT(strstr(sg_last_error_message(), "task") != NULL);
  EXPECT(strcmp(sg_status_name(SG_ERR_EMPTY_TASK_LIST), "EmptyTaskList") == 0);
  sg_risk_category c;
  EXPECT(sg_categorize_risk(60.0, &c) == SG_OK && c == SG_RISK_HIGH);
  EXPECT(sg_categorize_risk(101.0, &c) == SG_ERR_OUT_OF_RANGE);
  EXPECT(sg_compute_risk(NULL, 1, &rho) == SG_ERR_INVALID_ARGUMENT);
  double lo, hi;
  EXPECT(sg_wilson_interval(8, 1085, 1.96, &lo, &hi) == SG_OK);
  EXPECT(fabs(lo - 0.0037) < 5e-5 && fabs(hi - 0.0145) < 5e-5);
  EXPECT(sg_wilson_interval(3, 0, 1.96, &lo, &hi) == SG_ERR_BAD_COUNTS);
}

static void test_corpus(void) {
  sg_corpus* corpus = NULL;
  EXPECT(sg_corpus_load(SKILLGRAPH_FIXTURE_DIR "/six_jobs.jsonl", &corpus) == SG_OK);
  size_t n = 0;
  EXPECT(sg_corpus_size(corpus, &n) == SG_OK && n == 6);
  sg_corpus* dedup = NULL;
  EXPECT(sg_corpus_deduplicate(corpus, 0.85, &dedup) == SG_OK);
  EXPECT(sg_corpus_size(dedup, &n) == SG_OK && n == 6);
  sg_corpus_free(dedup);
  sg_corpus_free(corpus);

  EXPECT(sg_corpus_load("/nonexistent/file.jsonl", &corpus) == SG_ERR_IO_FAILURE);
  sg_corpus* synth = NULL;
  EXPECT(sg_corpus_synthesize_json("{\"seed\":3,\"n_jobs\":40,\"isco_mix\":{\"2\":1.0}}", &synth) == SG_OK);
  EXPECT(sg_corpus_size(synth, &n) == SG_OK && n == 40);
  sg_corpus_free(synth);
  EXPECT(sg_corpus_synthesize_json("{\"n_jobs\":4,\"isco_mix\":{\"2\":0.5}}", &synth) == SG_ERR_BAD_CONFIG);
}

static void test_pipeline_and_service(void) {
  const char* out = "capi_out";
  sg_run_options opt = {out, 0, 0, -1, 0};
  char* manifest = NULL;
  EXPECT(sg_pipeline_run(SKILLGRAPH_FIXTURE_DIR "/six_jobs_config.json", "report", &opt, &manifest) == SG_OK);
  EXPECT(manifest != NULL && strstr(manifest, "\"digest\"") != NULL);
  sg_string_free(manifest);
  EXPECT(sg_pipeline_run(SKILLGRAPH_FIXTURE_DIR "/six_jobs_config.json", "bogus", &opt, NULL) ==
         SG_ERR_INVALID_ARGUMENT);
  EXPECT(sg_pipeline_run(SKILLGRAPH_FIXTURE_DIR "/bad_theta_config.json", "ingest", &opt, NULL) == SG_ERR_BAD_CONFIG);

  sg_service* svc = NULL;
  EXPECT(sg_service_open(out, &svc) == SG_OK);
  int status = 0;
  char* body = NULL;
  EXPECT(sg_service_handle(svc, "GET", "/jobs/J1/transitions", NULL, &status, &body) == SG_OK);
  EXPECT(status == 200 && strstr(body, "\"J2\"") != NULL);
  sg_string_free(body);
  EXPECT(sg_service_handle(svc, "GET", "/jobs/none", NULL, &status, &body) == SG_OK);
  EXPECT(status == 404);
  sg_string_free(body);
  sg_service_free(svc);
  EXPECT(sg_service_open("/nonexistent_dir", &svc) != SG_OK);
}

int main(void) {
  test_risk();
  test_corpus();
  test_pipeline_and_service();
  if (failures) {
    fprintf(stderr, "%d failure(s)\n", failures);
    return 1;
  }
  printf("capi: all checks passed\n");
  return 0;
}
