/* C interface to the skillgraph library. All functions return an sg_status;
 * on failure sg_last_error_message() describes the error for the calling
 * thread. Strings returned through char** are owned by the caller and must be
 * released with sg_string_free. */
#ifndef SKILLGRAPH_SKILLGRAPH_H
#define SKILLGRAPH_SKILLGRAPH_H

#include <stddef.h>
#include <stdint.h>

#if defined(SG_BUILDING_LIBRARY)
#define SG_API __attribute__((visibility("default")))
#else
#define SG_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum sg_status {
  SG_OK = 0,
  SG_ERR_INVALID_ARGUMENT,
  SG_ERR_MISSING_FIELD,
  SG_ERR_DUPLICATE_ID,
  SG_ERR_BAD_ISCO,
  SG_ERR_INVALID_RECORD,
  SG_ERR_BAD_CONFIG,
  SG_ERR_EMPTY_TASK_LIST,
  SG_ERR_OUT_OF_RANGE,
  SG_ERR_PROVIDER_FAILURE,
  SG_ERR_EMPTY_LABELS,
  SG_ERR_UNKNOWN_FORM,
  SG_ERR_BAD_COUNTS,
  SG_ERR_MISSING_JUDGMENT,
  SG_ERR_UNRESOLVED_MENTION,
  SG_ERR_EMPTY_GRAPH,
  SG_ERR_TOO_FEW_POINTS,
  SG_ERR_DEGENERATE_SAMPLE,
  SG_ERR_PARTIAL_ASSIGNMENT,
  SG_ERR_UNKNOWN_ACTIVITY,
  SG_ERR_UNKNOWN_JOB,
  SG_ERR_EMPTY_SOURCE_NEIGHBORHOOD,
  SG_ERR_BAD_THRESHOLDS,
  SG_ERR_IO_FAILURE,
  SG_ERR_INTERNAL
} sg_status;

typedef enum sg_importance { SG_PRIMARY = 0, SG_SECONDARY = 1, SG_ANCILLARY = 2 } sg_importance;
typedef enum sg_risk_category { SG_RISK_HIGH = 0, SG_RISK_MEDIUM = 1, SG_RISK_LOW = 2 } sg_risk_category;
typedef enum sg_format { SG_FORMAT_CSV = 0, SG_FORMAT_STRUCTURED = 1 } sg_format;

typedef struct sg_task {
  sg_importance importance;
  int automatable;
} sg_task;

typedef struct sg_corpus sg_corpus;
typedef struct sg_service sg_service;

SG_API const char* sg_status_name(sg_status status);
SG_API const char* sg_last_error_message(void);
SG_API void sg_string_free(char* s);

/* corpus */
SG_API sg_status sg_corpus_load(const char* path, sg_corpus** out);
/* config_json holds SynthConfig fields, as in the pipeline's corpus.synthetic section */
SG_API sg_status sg_corpus_synthesize_json(const char* config_json, sg_corpus** out);
SG_API sg_status sg_corpus_deduplicate(const sg_corpus* in, double title_threshold, sg_corpus** out);
SG_API sg_status sg_corpus_size(const sg_corpus* corpus, size_t* out);
SG_API sg_status sg_corpus_write(const sg_corpus* corpus, const char* path);
SG_API void sg_corpus_free(sg_corpus* corpus);

/* risk */
SG_API sg_status sg_compute_risk(const sg_task* tasks, size_t n, double* out_rho);
SG_API sg_status sg_categorize_risk(double rho, sg_risk_category* out);
SG_API sg_status sg_wilson_interval(size_t errors, size_t n, double z, double* lo, double* hi);

/* pipeline */
typedef struct sg_run_options {
  const char* out_dir; /* NULL: keep config/env value */
  uint64_t seed;
  int has_seed;
  int format; /* -1: keep, otherwise an sg_format */
  int use_environment; /* apply SKILLGRAPH_* variables before options */
} sg_run_options;

/* stage: ingest, cluster, graph, analyze, transitions, sensitivity, validate, report.
 * manifest_json (optional) receives the resulting manifest. */
SG_API sg_status sg_pipeline_run(const char* config_path, const char* stage, const sg_run_options* options,
                                 char** manifest_json);

/* service */
SG_API sg_status sg_service_open(const char* artifact_dir, sg_service** out);
SG_API sg_status sg_service_handle(const sg_service* service, const char* method, const char* target,
                                   const char* body, int* http_status, char** response_json);
/* Blocks until the process is terminated. */
SG_API sg_status sg_service_serve(const sg_service* service, const char* host, int port);
SG_API void sg_service_free(sg_service* service);

#ifdef __cplusplus
}
#endif

#endif
