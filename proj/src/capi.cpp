#include "xdlc.h"

#include <cstring>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "xdlc/evalkit.hpp"
#include "xdlc/http_backend.hpp"
#include "xdlc/loop.hpp"
#include "xdlc/schema.hpp"
#include "xdlc/verifier.hpp"

using namespace xdlc;

struct xdlc_schema {
  SchemaRegistry reg;
};
struct xdlc_constraints {
  EnvironmentConstraints constraints;
};
struct xdlc_report {
  VerificationReport report;
};
struct xdlc_backend {
  std::unique_ptr<GeneratorBackend> backend;
};
struct xdlc_trace {
  ConversionTrace trace;
};
struct xdlc_batch_result {
  std::vector<DatasetRecord> dataset;
  BatchResult result;
};

namespace {

thread_local std::string g_last_error;

xdlc_status fail(xdlc_status status, const std::string& message) {
  g_last_error = message;
  return status;
}

char* copy_string(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Failures from the core map onto the coarse C status codes. Plain
// runtime_errors come from format problems (constraints, replay scripts).
xdlc_status map_exception(const std::exception& e) {
  if (dynamic_cast<const BackendError*>(&e)) return XDLC_ERR_BACKEND;
  if (dynamic_cast<const IoError*>(&e)) return XDLC_ERR_IO;
  if (dynamic_cast<const SchemaError*>(&e) || dynamic_cast<const DatasetError*>(&e)) {
    return XDLC_ERR_PARSE;
  }
  if (dynamic_cast<const std::invalid_argument*>(&e)) return XDLC_ERR_INVALID_ARGUMENT;
  if (dynamic_cast<const std::runtime_error*>(&e)) return XDLC_ERR_PARSE;
  return XDLC_ERR_INTERNAL;
}

template <typename Fn>
xdlc_status guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const std::exception& e) {
    return fail(map_exception(e), e.what());
  } catch (...) {
    return fail(XDLC_ERR_INTERNAL, "unknown error");
  }
}

std::string read_file_or_throw(const char* path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(std::string("cannot read '") + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::vector<std::string> replay_script_from_json(const nlohmann::json& node,
                                                 const std::string& what) {
  if (!node.is_array()) {
    throw std::runtime_error(what + " must be a JSON array of strings");
  }
  std::vector<std::string> script;
  for (const auto& item : node) {
    if (!item.is_string()) {
      throw std::runtime_error(what + " must be a JSON array of strings");
    }
    script.push_back(item.get<std::string>());
  }
  return script;
}

LoopConfig loop_config_from(const xdlc_loop_options* options) {
  LoopConfig cfg;
  if (!options) return cfg;
  cfg.max_iterations = options->max_iterations;
  switch (options->strategy) {
    case XDLC_STRATEGY_NAIVE: cfg.strategy = FeedbackStrategy::Naive; break;
    case XDLC_STRATEGY_LAST_ERROR: cfg.strategy = FeedbackStrategy::LastError; break;
    case XDLC_STRATEGY_ALL_ERRORS_CUMULATIVE:
      cfg.strategy = FeedbackStrategy::AllErrorsCumulative;
      break;
    case XDLC_STRATEGY_XDL_PLUS_LAST_ERROR:
      cfg.strategy = FeedbackStrategy::XdlPlusLastError;
      break;
    default:
      throw std::invalid_argument("unknown strategy value");
  }
  cfg.strict_verify = options->strict != 0;
  if (options->wall_clock_limit_s > 0) {
    cfg.wall_clock_limit_s = options->wall_clock_limit_s;
  }
  cfg.prompt_char_budget = options->prompt_char_budget > 0
                               ? options->prompt_char_budget
                               : kDefaultPromptCharBudget;
  return cfg;
}

HttpBackendConfig http_config_from(const xdlc_http_options* options) {
  if (!options || !options->model || !*options->model) {
    throw std::invalid_argument("http backend needs a model name");
  }
  HttpBackendConfig cfg;
  if (options->endpoint && *options->endpoint) cfg.endpoint = options->endpoint;
  cfg.model = options->model;
  if (options->credential_env && *options->credential_env) {
    cfg.credential_env = options->credential_env;
  }
  cfg.temperature = options->temperature;
  if (options->max_tokens > 0) cfg.max_tokens = options->max_tokens;
  if (options->timeout_s > 0) cfg.timeout_s = options->timeout_s;
  if (options->max_attempts > 0) cfg.max_attempts = options->max_attempts;
  if (options->backoff_base_s >= 0) cfg.backoff_base_s = options->backoff_base_s;
  return cfg;
}

// Replay file for batches: {"id": [...], ...} or [[...], ...] by dataset order.
BackendFactory replay_factory(const std::string& json_text,
                              const std::vector<DatasetRecord>& dataset) {
  nlohmann::json parsed;
  try {
    parsed = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(std::string("replay file is not valid JSON: ") + e.what());
  }

  auto scripts = std::make_shared<std::map<std::string, std::vector<std::string>>>();
  if (parsed.is_object()) {
    for (const auto& [id, node] : parsed.items()) {
      (*scripts)[id] = replay_script_from_json(node, "replay script '" + id + "'");
    }
  } else if (parsed.is_array()) {
    if (parsed.size() != dataset.size()) {
      throw std::runtime_error("replay array has " + std::to_string(parsed.size()) +
                               " scripts for " + std::to_string(dataset.size()) +
                               " records");
    }
    for (size_t i = 0; i < parsed.size(); ++i) {
      (*scripts)[dataset[i].id] =
          replay_script_from_json(parsed[i], "replay script #" + std::to_string(i));
    }
  } else {
    throw std::runtime_error("replay file must be a JSON object or array");
  }

  return [scripts](const DatasetRecord& record) -> std::unique_ptr<GeneratorBackend> {
    auto it = scripts->find(record.id);
    if (it == scripts->end()) {
      throw BackendError("no replay script for record '" + record.id + "'");
    }
    return std::make_unique<ReplayBackend>(it->second);
  };
}

xdlc_status run_batch_capi(const char* dataset_path, const xdlc_schema* schema,
                           const xdlc_constraints* default_constraints,
                           const xdlc_batch_options* options, const char* out_dir,
                           xdlc_batch_result** out,
                           const std::function<BackendFactory(
                               const std::vector<DatasetRecord>&)>& make_factory) {
  if (!dataset_path || !schema || !out) {
    return fail(XDLC_ERR_INVALID_ARGUMENT, "null argument");
  }
  return guarded([&]() {
    auto holder = std::make_unique<xdlc_batch_result>();
    holder->dataset = load_dataset_jsonl(dataset_path);

    std::optional<EnvironmentConstraints> constraints;
    if (default_constraints) constraints = default_constraints->constraints;

    xdlc_batch_options defaults;
    xdlc_batch_options_init(&defaults);
    const xdlc_batch_options* opts = options ? options : &defaults;
    LoopConfig cfg = loop_config_from(&opts->loop);
    int parallelism = opts->parallelism > 0 ? opts->parallelism : 1;

    holder->result = run_batch(holder->dataset, schema->reg, constraints,
                               make_factory(holder->dataset), cfg, parallelism);
    if (out_dir && *out_dir) {
      write_batch_outputs(out_dir, holder->dataset, holder->result);
    }
    *out = holder.release();
    return XDLC_OK;
  });
}

}  // namespace

extern "C" {

const char* xdlc_version(void) { return "0.1.0"; }

const char* xdlc_last_error(void) { return g_last_error.c_str(); }

void xdlc_string_free(char* s) { delete[] s; }

/* ---- schema ---- */

xdlc_status xdlc_schema_default(xdlc_schema** out) {
  if (!out) return fail(XDLC_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&]() {
    *out = new xdlc_schema{default_registry()};
    return XDLC_OK;
  });
}

xdlc_status xdlc_schema_load_file(const char* path, xdlc_schema** out) {
  if (!path || !out) return fail(XDLC_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&]() {
    *out = new xdlc_schema{load_schema_file(path)};
    return XDLC_OK;
  });
}

xdlc_status xdlc_schema_load_text(const char* text, xdlc_schema** out) {
  if (!text || !out) return fail(XDLC_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&]() {
    *out = new xdlc_schema{load_schema_text(text)};
    return XDLC_OK;
  });
}

const char* xdlc_schema_version(const xdlc_schema* schema) {
  return schema ? schema->reg.version().c_str() : nullptr;
}

xdlc_status xdlc_schema_render(const xdlc_schema* schema, char** out_text) {
  if (!schema || !out_text) return fail(XDLC_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&]() {
    *out_text = copy_string(render_language_description(schema->reg));
    return XDLC_OK;
  });
}

xdlc_status xdlc_schema_dump(const xdlc_schema* schema, char** out_text) {
  if (!schema || !out_text) return fail(XDLC_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&]() {
    *out_text = copy_string(dump_schema(schema->reg));
    return XDLC_OK;
  });
}

void xdlc_schema_free(xdlc_schema* schema) { delete schema; }

/* ---- constraints ---- */

xdlc_status xdlc_constraints_from_json(const char* json_text, xdlc_constraints** out) {
  if (!json_text || !out) return fail(XDLC_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&]() -> xdlc_status {
    try {
      *out = new xdlc_constraints{constraints_from_json(json_text)};
    } catch (const std::runtime_error& e) {
      return fail(XDLC_ERR_PARSE, e.what());
    }
    return XDLC_OK;
  });
}

xdlc_status xdlc_constraints_load_file(const char* path, xdlc_constraints** out) {
  if (!path || !out) return fail(XDLC_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&]() -> xdlc_status {
    std::ifstream probe(path, std::ios::binary);
    if (!probe) return fail(XDLC_ERR_IO, std::string("cannot read '") + path + "'");
    probe.close();
    try {
      *out = new xdlc_constraints{load_constraints_file(path)};
    } catch (const std::runtime_error& e) {
      return fail(XDLC_ERR_PARSE, e.what());
    }
    return XDLC_OK;
  });
}

void xdlc_constraints_free(xdlc_constraints* constraints) { delete constraints; }

/* ---- verification ---- */

xdlc_status xdlc_verify(const char* text, const xdlc_schema* schema,
                        const xdlc_constraints* constraints, int strict,
                        xdlc_report** out) {
  if (!text || !schema || !out) {
    return fail(XDLC_ERR_INVALID_ARGUMENT, "null argument");
  }
  return guarded([&]() {
    std::optional<EnvironmentConstraints> opt;
    if (constraints) opt = constraints->constraints;
    *out = new xdlc_report{verify(text, schema->reg, opt, strict != 0)};
    return XDLC_OK;
  });
}

size_t xdlc_report_count(const xdlc_report* report) {
  return report ? report->report.errors.size() : 0;
}

xdlc_error_category xdlc_report_category(const xdlc_report* report, size_t index) {
  if (!report || index >= report->report.errors.size()) return XDLC_CAT_XML_PARSE;
  return static_cast<xdlc_error_category>(
      static_cast<int>(report->report.errors[index].category));
}

const char* xdlc_report_message(const xdlc_report* report, size_t index) {
  if (!report || index >= report->report.errors.size()) return nullptr;
  return report->report.errors[index].message.c_str();
}

int xdlc_report_position(const xdlc_report* report, size_t index, int* line,
                         int* column) {
  if (!report || index >= report->report.errors.size()) return 0;
  const auto& span = report->report.errors[index].span;
  if (!span) return 0;
  if (line) *line = span->line;
  if (column) *column = span->column;
  return 1;
}

xdlc_status xdlc_report_format(const xdlc_report* report, char** out_text) {
  if (!report || !out_text) return fail(XDLC_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&]() {
    std::string joined;
    for (const std::string& line : format_errors(report->report)) {
      if (!joined.empty()) joined += '\n';
      joined += line;
    }
    *out_text = copy_string(joined);
    return XDLC_OK;
  });
}

xdlc_status xdlc_report_to_json(const xdlc_report* report, char** out_json) {
  if (!report || !out_json) return fail(XDLC_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&]() {
    *out_json = copy_string(report_to_json(report->report));
    return XDLC_OK;
  });
}

void xdlc_report_free(xdlc_report* report) { delete report; }

xdlc_status xdlc_canonicalize(const char* text, char** out_xdl) {
  if (!text || !out_xdl) return fail(XDLC_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&]() -> xdlc_status {
    ParseResult parsed = parse_xdl(text);
    if (!parsed.ok()) return fail(XDLC_ERR_PARSE, parsed.error().message);
    *out_xdl = copy_string(serialize(parsed.plan().doc));
    return XDLC_OK;
  });
}

/* ---- backends ---- */

void xdlc_http_options_init(xdlc_http_options* options) {
  if (!options) return;
  options->endpoint = "https://api.openai.com/v1/completions";
  options->model = nullptr;
  options->credential_env = "XDLC_API_KEY";
  options->temperature = 0.0;
  options->max_tokens = 1024;
  options->timeout_s = 60.0;
  options->max_attempts = 5;
  options->backoff_base_s = 1.0;
}

xdlc_status xdlc_backend_http(const xdlc_http_options* options, xdlc_backend** out) {
  if (!options || !out) return fail(XDLC_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&]() {
    *out = new xdlc_backend{std::make_unique<HttpBackend>(http_config_from(options))};
    return XDLC_OK;
  });
}

xdlc_status xdlc_backend_replay_from_json(const char* json_text, xdlc_backend** out) {
  if (!json_text || !out) return fail(XDLC_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&]() -> xdlc_status {
    nlohmann::json parsed;
    try {
      parsed = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::exception& e) {
      return fail(XDLC_ERR_PARSE,
                  std::string("replay script is not valid JSON: ") + e.what());
    }
    std::vector<std::string> script;
    try {
      script = replay_script_from_json(parsed, "replay script");
    } catch (const std::runtime_error& e) {
      return fail(XDLC_ERR_PARSE, e.what());
    }
    *out = new xdlc_backend{std::make_unique<ReplayBackend>(std::move(script))};
    return XDLC_OK;
  });
}

xdlc_status xdlc_backend_replay_load_file(const char* path, xdlc_backend** out) {
  if (!path || !out) return fail(XDLC_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&]() -> xdlc_status {
    std::string text;
    try {
      text = read_file_or_throw(path);
    } catch (const std::runtime_error& e) {
      return fail(XDLC_ERR_IO, e.what());
    }
    return xdlc_backend_replay_from_json(text.c_str(), out);
  });
}

void xdlc_backend_free(xdlc_backend* backend) { delete backend; }

/* ---- conversion ---- */

void xdlc_loop_options_init(xdlc_loop_options* options) {
  if (!options) return;
  options->max_iterations = 10;
  options->strategy = XDLC_STRATEGY_XDL_PLUS_LAST_ERROR;
  options->strict = 0;
  options->wall_clock_limit_s = 0.0;
  options->prompt_char_budget = 0;
}

xdlc_status xdlc_convert(const char* instruction, const xdlc_schema* schema,
                         const xdlc_constraints* constraints, xdlc_backend* backend,
                         const xdlc_loop_options* options, xdlc_trace** out) {
  if (!instruction || !schema || !backend || !out) {
    return fail(XDLC_ERR_INVALID_ARGUMENT, "null argument");
  }
  return guarded([&]() {
    std::optional<EnvironmentConstraints> opt;
    if (constraints) opt = constraints->constraints;
    LoopConfig cfg = loop_config_from(options);
    *out = new xdlc_trace{
        convert(instruction, schema->reg, opt, *backend->backend, cfg)};
    return XDLC_OK;
  });
}

xdlc_outcome xdlc_trace_outcome(const xdlc_trace* trace) {
  switch (trace->trace.outcome) {
    case Outcome::Success: return XDLC_OUTCOME_SUCCESS;
    case Outcome::Timeout: return XDLC_OUTCOME_TIMEOUT;
    case Outcome::BackendFailure: break;
  }
  return XDLC_OUTCOME_BACKEND_FAILURE;
}

const char* xdlc_trace_plan(const xdlc_trace* trace) {
  if (!trace || trace->trace.outcome != Outcome::Success) return nullptr;
  return trace->trace.final_plan.c_str();
}

const char* xdlc_trace_failure_reason(const xdlc_trace* trace) {
  if (!trace || trace->trace.outcome != Outcome::BackendFailure) return nullptr;
  return trace->trace.failure_reason.c_str();
}

size_t xdlc_trace_iterations(const xdlc_trace* trace) {
  return trace ? trace->trace.records.size() : 0;
}

xdlc_status xdlc_trace_to_json(const xdlc_trace* trace, char** out_json) {
  if (!trace || !out_json) return fail(XDLC_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&]() {
    *out_json = copy_string(trace_to_json(trace->trace));
    return XDLC_OK;
  });
}

void xdlc_trace_free(xdlc_trace* trace) { delete trace; }

/* ---- batch ---- */

void xdlc_batch_options_init(xdlc_batch_options* options) {
  if (!options) return;
  options->parallelism = 1;
  xdlc_loop_options_init(&options->loop);
}

xdlc_status xdlc_batch_run_replay(const char* dataset_path, const xdlc_schema* schema,
                                  const xdlc_constraints* default_constraints,
                                  const char* replay_path,
                                  const xdlc_batch_options* options,
                                  const char* out_dir, xdlc_batch_result** out) {
  if (!replay_path) return fail(XDLC_ERR_INVALID_ARGUMENT, "null argument");
  return run_batch_capi(
      dataset_path, schema, default_constraints, options, out_dir, out,
      [&](const std::vector<DatasetRecord>& dataset) {
        return replay_factory(read_file_or_throw(replay_path), dataset);
      });
}

xdlc_status xdlc_batch_run_http(const char* dataset_path, const xdlc_schema* schema,
                                const xdlc_constraints* default_constraints,
                                const xdlc_http_options* http,
                                const xdlc_batch_options* options,
                                const char* out_dir, xdlc_batch_result** out) {
  if (!http) return fail(XDLC_ERR_INVALID_ARGUMENT, "null argument");
  return run_batch_capi(
      dataset_path, schema, default_constraints, options, out_dir, out,
      [&](const std::vector<DatasetRecord>&) -> BackendFactory {
        HttpBackendConfig cfg = http_config_from(http);
        return [cfg](const DatasetRecord&) {
          return std::make_unique<HttpBackend>(cfg);
        };
      });
}

size_t xdlc_batch_total(const xdlc_batch_result* result) {
  return result ? result->result.traces.size() : 0;
}

size_t xdlc_batch_succeeded(const xdlc_batch_result* result) {
  return result ? static_cast<size_t>(result->result.summary.succeeded) : 0;
}

double xdlc_batch_success_rate(const xdlc_batch_result* result) {
  return result ? result->result.summary.success_rate : 0.0;
}

xdlc_status xdlc_batch_table(const xdlc_batch_result* result, char** out_text) {
  if (!result || !out_text) return fail(XDLC_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&]() {
    *out_text = copy_string(render_table(result->result.summary));
    return XDLC_OK;
  });
}

xdlc_status xdlc_batch_summary_json(const xdlc_batch_result* result, char** out_json) {
  if (!result || !out_json) return fail(XDLC_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&]() {
    *out_json = copy_string(summary_to_json(result->result.summary));
    return XDLC_OK;
  });
}

void xdlc_batch_result_free(xdlc_batch_result* result) { delete result; }

} /* extern "C" */
