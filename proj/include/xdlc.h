/*
 * xdlc - C API for the XDL plan converter and verifier.
 *
 * Conventions:
 *   - Every function that can fail returns an xdlc_status; out-parameters are
 *     written only on XDLC_OK.
 *   - xdlc_last_error() returns a thread-local message describing the most
 *     recent failure in the calling thread.
 *   - char* results owned by the caller are released with xdlc_string_free();
 *     const char* results borrow from their handle and stay valid until the
 *     handle is freed.
 *   - Handles are opaque and freed with their matching *_free function. All
 *     handles except backends are immutable after creation and may be shared
 *     across threads; a backend may only drive one conversion at a time
 *     unless it is an HTTP backend.
 */

#ifndef XDLC_H
#define XDLC_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum xdlc_status {
  XDLC_OK = 0,
  XDLC_ERR_INVALID_ARGUMENT = 1, /* null pointer, bad enum value, empty input */
  XDLC_ERR_PARSE = 2,            /* malformed schema/constraints/dataset/replay file */
  XDLC_ERR_IO = 3,               /* file cannot be read or written */
  XDLC_ERR_BACKEND = 4,          /* text generation failed */
  XDLC_ERR_INTERNAL = 5
} xdlc_status;

typedef enum xdlc_error_category {
  XDLC_CAT_XML_PARSE = 0,
  XDLC_CAT_WRONG_TAG = 1,
  XDLC_CAT_ACTION_DOES_NOT_EXIST = 2,
  XDLC_CAT_MISSING_MANDATORY_PROPERTY = 3,
  XDLC_CAT_PROPERTY_NOT_ALLOWED = 4,
  XDLC_CAT_UNDEFINED_RESOURCE = 5,
  XDLC_CAT_EMPTY_PLAN = 6,
  XDLC_CAT_INVALID_PROPERTY_VALUE = 7
} xdlc_error_category;

typedef enum xdlc_strategy {
  XDLC_STRATEGY_NAIVE = 0,
  XDLC_STRATEGY_LAST_ERROR = 1,
  XDLC_STRATEGY_ALL_ERRORS_CUMULATIVE = 2,
  XDLC_STRATEGY_XDL_PLUS_LAST_ERROR = 3
} xdlc_strategy;

typedef enum xdlc_outcome {
  XDLC_OUTCOME_SUCCESS = 0,
  XDLC_OUTCOME_TIMEOUT = 1,
  XDLC_OUTCOME_BACKEND_FAILURE = 2
} xdlc_outcome;

typedef struct xdlc_schema xdlc_schema;
typedef struct xdlc_constraints xdlc_constraints;
typedef struct xdlc_report xdlc_report;
typedef struct xdlc_backend xdlc_backend;
typedef struct xdlc_trace xdlc_trace;
typedef struct xdlc_batch_result xdlc_batch_result;

const char* xdlc_version(void);

/* Thread-local message for the last failing call in this thread; empty string
 * when no failure has been recorded. The pointer stays valid until the next
 * failing call in the same thread. */
const char* xdlc_last_error(void);

void xdlc_string_free(char* s);

/* ---- schema ---- */

xdlc_status xdlc_schema_default(xdlc_schema** out);
xdlc_status xdlc_schema_load_file(const char* path, xdlc_schema** out);
xdlc_status xdlc_schema_load_text(const char* text, xdlc_schema** out);
const char* xdlc_schema_version(const xdlc_schema* schema);
xdlc_status xdlc_schema_render(const xdlc_schema* schema, char** out_text);
xdlc_status xdlc_schema_dump(const xdlc_schema* schema, char** out_text);
void xdlc_schema_free(xdlc_schema* schema);

/* ---- environment constraints ---- */

xdlc_status xdlc_constraints_from_json(const char* json_text, xdlc_constraints** out);
xdlc_status xdlc_constraints_load_file(const char* path, xdlc_constraints** out);
void xdlc_constraints_free(xdlc_constraints* constraints);

/* ---- verification ---- */

/* constraints may be NULL (all resources permitted). */
xdlc_status xdlc_verify(const char* text, const xdlc_schema* schema,
                        const xdlc_constraints* constraints, int strict,
                        xdlc_report** out);
size_t xdlc_report_count(const xdlc_report* report);
xdlc_error_category xdlc_report_category(const xdlc_report* report, size_t index);
const char* xdlc_report_message(const xdlc_report* report, size_t index);
/* Returns 1 and fills line/column when the error has a position, else 0. */
int xdlc_report_position(const xdlc_report* report, size_t index, int* line,
                         int* column);
/* All error lines joined with '\n'; empty string for a clean report. */
xdlc_status xdlc_report_format(const xdlc_report* report, char** out_text);
xdlc_status xdlc_report_to_json(const xdlc_report* report, char** out_json);
void xdlc_report_free(xdlc_report* report);

/* Parse + canonical re-serialization of a plan (full document form). */
xdlc_status xdlc_canonicalize(const char* text, char** out_xdl);

/* ---- generation backends ---- */

typedef struct xdlc_http_options {
  const char* endpoint;       /* default https://api.openai.com/v1/completions */
  const char* model;          /* required */
  const char* credential_env; /* default XDLC_API_KEY */
  double temperature;         /* default 0.0 */
  int max_tokens;             /* default 1024 */
  double timeout_s;           /* default 60 */
  int max_attempts;           /* default 5 */
  double backoff_base_s;      /* default 1.0 */
} xdlc_http_options;

/* Fills an options struct with the defaults above. */
void xdlc_http_options_init(xdlc_http_options* options);

xdlc_status xdlc_backend_http(const xdlc_http_options* options, xdlc_backend** out);
/* json_text: JSON array of response strings. */
xdlc_status xdlc_backend_replay_from_json(const char* json_text, xdlc_backend** out);
xdlc_status xdlc_backend_replay_load_file(const char* path, xdlc_backend** out);
void xdlc_backend_free(xdlc_backend* backend);

/* ---- iterative conversion ---- */

typedef struct xdlc_loop_options {
  int max_iterations;      /* default 10 */
  xdlc_strategy strategy;  /* default XDLC_STRATEGY_XDL_PLUS_LAST_ERROR */
  int strict;              /* default 0 */
  double wall_clock_limit_s; /* <= 0: no wall-clock limit (default) */
  int prompt_char_budget;  /* <= 0: default budget */
} xdlc_loop_options;

void xdlc_loop_options_init(xdlc_loop_options* options);

/* Timeout and backend failure are reported through the trace outcome, not the
 * return status. constraints may be NULL. */
xdlc_status xdlc_convert(const char* instruction, const xdlc_schema* schema,
                         const xdlc_constraints* constraints, xdlc_backend* backend,
                         const xdlc_loop_options* options, xdlc_trace** out);
xdlc_outcome xdlc_trace_outcome(const xdlc_trace* trace);
/* Canonical final plan; NULL unless the outcome is success. */
const char* xdlc_trace_plan(const xdlc_trace* trace);
const char* xdlc_trace_failure_reason(const xdlc_trace* trace);
size_t xdlc_trace_iterations(const xdlc_trace* trace);
xdlc_status xdlc_trace_to_json(const xdlc_trace* trace, char** out_json);
void xdlc_trace_free(xdlc_trace* trace);

/* ---- batch evaluation ---- */

typedef struct xdlc_batch_options {
  int parallelism; /* default 1 */
  xdlc_loop_options loop;
} xdlc_batch_options;

void xdlc_batch_options_init(xdlc_batch_options* options);

/* Runs every record of a JSONL dataset with per-record replay scripts taken
 * from a JSON file: either an object mapping record ids to arrays of response
 * strings, or an array of such arrays indexed by dataset order. A record
 * without a script ends as a backend failure. default_constraints may be
 * NULL; out_dir may be NULL to skip writing output files. */
xdlc_status xdlc_batch_run_replay(const char* dataset_path, const xdlc_schema* schema,
                                  const xdlc_constraints* default_constraints,
                                  const char* replay_path,
                                  const xdlc_batch_options* options,
                                  const char* out_dir, xdlc_batch_result** out);

/* Same, with one HTTP backend configuration shared by all records. */
xdlc_status xdlc_batch_run_http(const char* dataset_path, const xdlc_schema* schema,
                                const xdlc_constraints* default_constraints,
                                const xdlc_http_options* http,
                                const xdlc_batch_options* options,
                                const char* out_dir, xdlc_batch_result** out);

size_t xdlc_batch_total(const xdlc_batch_result* result);
size_t xdlc_batch_succeeded(const xdlc_batch_result* result);
double xdlc_batch_success_rate(const xdlc_batch_result* result);
xdlc_status xdlc_batch_table(const xdlc_batch_result* result, char** out_text);
xdlc_status xdlc_batch_summary_json(const xdlc_batch_result* result, char** out_json);
void xdlc_batch_result_free(xdlc_batch_result* result);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* XDLC_H */
