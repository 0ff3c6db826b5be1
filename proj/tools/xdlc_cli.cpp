// xdlc command line tool. Talks to the library exclusively through the C API.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include <xdlc.h>

namespace {

// Exit statuses: 0 success/clean, 1 plan invalid, 2 iteration budget
// exhausted, 3 backend failure, 4 usage or configuration error.
enum ExitStatus {
  kOk = 0,
  kInvalidPlan = 1,
  kTimeout = 2,
  kBackendFailure = 3,
  kUsageError = 4,
};

struct StringDeleter {
  void operator()(char* s) const { xdlc_string_free(s); }
};
using OwnedString = std::unique_ptr<char, StringDeleter>;

struct SchemaDeleter {
  void operator()(xdlc_schema* s) const { xdlc_schema_free(s); }
};
struct ConstraintsDeleter {
  void operator()(xdlc_constraints* c) const { xdlc_constraints_free(c); }
};
struct BackendDeleter {
  void operator()(xdlc_backend* b) const { xdlc_backend_free(b); }
};
struct TraceDeleter {
  void operator()(xdlc_trace* t) const { xdlc_trace_free(t); }
};
struct ReportDeleter {
  void operator()(xdlc_report* r) const { xdlc_report_free(r); }
};
struct BatchDeleter {
  void operator()(xdlc_batch_result* b) const { xdlc_batch_result_free(b); }
};

[[noreturn]] void die(const std::string& message) {
  std::cerr << "xdlc: " << message << "\n";
  std::exit(kUsageError);
}

void warn_last_error(const std::string& context) {
  std::cerr << "xdlc: " << context;
  const char* detail = xdlc_last_error();
  if (detail && *detail) std::cerr << ": " << detail;
  std::cerr << "\n";
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) die("cannot read '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) die("cannot write '" + path + "'");
  out << content;
}

std::unique_ptr<xdlc_schema, SchemaDeleter> load_schema(const std::string& path) {
  xdlc_schema* schema = nullptr;
  xdlc_status status = path.empty() ? xdlc_schema_default(&schema)
                                    : xdlc_schema_load_file(path.c_str(), &schema);
  if (status != XDLC_OK) {
    warn_last_error("schema");
    std::exit(kUsageError);
  }
  return std::unique_ptr<xdlc_schema, SchemaDeleter>(schema);
}

std::unique_ptr<xdlc_constraints, ConstraintsDeleter> load_constraints(
    const std::string& path) {
  if (path.empty()) return nullptr;
  xdlc_constraints* constraints = nullptr;
  if (xdlc_constraints_load_file(path.c_str(), &constraints) != XDLC_OK) {
    warn_last_error("constraints");
    std::exit(kUsageError);
  }
  return std::unique_ptr<xdlc_constraints, ConstraintsDeleter>(constraints);
}

xdlc_strategy parse_strategy(const std::string& name) {
  if (name == "naive") return XDLC_STRATEGY_NAIVE;
  if (name == "last-error") return XDLC_STRATEGY_LAST_ERROR;
  if (name == "all-errors") return XDLC_STRATEGY_ALL_ERRORS_CUMULATIVE;
  if (name == "xdl+last-error") return XDLC_STRATEGY_XDL_PLUS_LAST_ERROR;
  die("unknown strategy '" + name +
      "' (expected naive, last-error, all-errors or xdl+last-error)");
}

// Flags shared by convert and batch.
struct BackendFlags {
  std::string backend;
  std::string replay_file;
  std::string endpoint = "https://api.openai.com/v1/completions";
  std::string model;
  std::string credential_env = "XDLC_API_KEY";
};

void add_backend_flags(CLI::App* cmd, BackendFlags& flags) {
  cmd->add_option("--backend", flags.backend, "Generation backend: http or replay")
      ->required();
  cmd->add_option("--replay-file", flags.replay_file,
                  "JSON file with canned responses (replay backend)");
  cmd->add_option("--endpoint", flags.endpoint,
                  "Completions endpoint URL (http backend)");
  cmd->add_option("--model", flags.model, "Model name (http backend)");
  cmd->add_option("--credential-env", flags.credential_env,
                  "Environment variable holding the API credential "
                  "(default XDLC_API_KEY)");
}

xdlc_http_options http_options_from(const BackendFlags& flags) {
  xdlc_http_options options;
  xdlc_http_options_init(&options);
  options.endpoint = flags.endpoint.c_str();
  options.model = flags.model.c_str();
  options.credential_env = flags.credential_env.c_str();
  return options;
}

std::unique_ptr<xdlc_backend, BackendDeleter> make_backend(const BackendFlags& flags) {
  xdlc_backend* backend = nullptr;
  if (flags.backend == "replay") {
    if (flags.replay_file.empty()) die("--backend replay needs --replay-file");
    if (xdlc_backend_replay_load_file(flags.replay_file.c_str(), &backend) !=
        XDLC_OK) {
      warn_last_error("replay file");
      std::exit(kUsageError);
    }
  } else if (flags.backend == "http") {
    if (flags.model.empty()) die("--backend http needs --model");
    xdlc_http_options options = http_options_from(flags);
    if (xdlc_backend_http(&options, &backend) != XDLC_OK) {
      warn_last_error("http backend");
      std::exit(kUsageError);
    }
  } else {
    die("unknown backend '" + flags.backend + "' (expected http or replay)");
  }
  return std::unique_ptr<xdlc_backend, BackendDeleter>(backend);
}

int cmd_convert(const std::string& instruction_flag, const std::string& input_file,
                const std::string& schema_path, const std::string& constraints_path,
                const BackendFlags& backend_flags, int max_iters,
                const std::string& strategy, bool strict, const std::string& out_path,
                const std::string& trace_path) {
  std::string instruction = instruction_flag;
  if (!input_file.empty()) {
    if (!instruction.empty()) die("give either --instruction or --input-file, not both");
    instruction = read_file(input_file);
    while (!instruction.empty() &&
           (instruction.back() == '\n' || instruction.back() == '\r')) {
      instruction.pop_back();
    }
  }
  if (instruction.empty()) die("an instruction is required (--instruction or --input-file)");

  auto schema = load_schema(schema_path);
  auto constraints = load_constraints(constraints_path);
  auto backend = make_backend(backend_flags);

  xdlc_loop_options options;
  xdlc_loop_options_init(&options);
  options.max_iterations = max_iters;
  options.strategy = parse_strategy(strategy);
  options.strict = strict ? 1 : 0;

  xdlc_trace* trace_raw = nullptr;
  if (xdlc_convert(instruction.c_str(), schema.get(), constraints.get(),
                   backend.get(), &options, &trace_raw) != XDLC_OK) {
    warn_last_error("convert");
    return kUsageError;
  }
  std::unique_ptr<xdlc_trace, TraceDeleter> trace(trace_raw);

  if (!trace_path.empty()) {
    char* json = nullptr;
    if (xdlc_trace_to_json(trace.get(), &json) != XDLC_OK) {
      warn_last_error("trace export");
      return kUsageError;
    }
    OwnedString owned(json);
    write_file(trace_path, std::string(owned.get()) + "\n");
  }

  switch (xdlc_trace_outcome(trace.get())) {
    case XDLC_OUTCOME_SUCCESS: {
      std::string plan = xdlc_trace_plan(trace.get());
      if (out_path.empty()) {
        std::cout << plan << "\n";
      } else {
        write_file(out_path, plan + "\n");
      }
      return kOk;
    }
    case XDLC_OUTCOME_TIMEOUT:
      std::cerr << "xdlc: no valid plan within " << max_iters << " iterations\n";
      return kTimeout;
    case XDLC_OUTCOME_BACKEND_FAILURE: {
      const char* reason = xdlc_trace_failure_reason(trace.get());
      std::cerr << "xdlc: backend failed: " << (reason ? reason : "unknown") << "\n";
      return kBackendFailure;
    }
  }
  return kUsageError;
}

int cmd_validate(const std::string& file, const std::string& schema_path,
                 const std::string& constraints_path, bool strict, bool json) {
  std::string text = read_file(file);
  auto schema = load_schema(schema_path);
  auto constraints = load_constraints(constraints_path);

  xdlc_report* report_raw = nullptr;
  if (xdlc_verify(text.c_str(), schema.get(), constraints.get(), strict ? 1 : 0,
                  &report_raw) != XDLC_OK) {
    warn_last_error("verify");
    return kUsageError;
  }
  std::unique_ptr<xdlc_report, ReportDeleter> report(report_raw);

  if (json) {
    char* out = nullptr;
    if (xdlc_report_to_json(report.get(), &out) != XDLC_OK) {
      warn_last_error("report export");
      return kUsageError;
    }
    OwnedString owned(out);
    std::cout << owned.get() << "\n";
  } else if (xdlc_report_count(report.get()) > 0) {
    char* out = nullptr;
    if (xdlc_report_format(report.get(), &out) != XDLC_OK) {
      warn_last_error("report format");
      return kUsageError;
    }
    OwnedString owned(out);
    std::cout << owned.get() << "\n";
  }
  return xdlc_report_count(report.get()) == 0 ? kOk : kInvalidPlan;
}

int cmd_schema_render(const std::string& schema_path) {
  auto schema = load_schema(schema_path);
  char* text = nullptr;
  if (xdlc_schema_render(schema.get(), &text) != XDLC_OK) {
    warn_last_error("schema render");
    return kUsageError;
  }
  OwnedString owned(text);
  std::cout << owned.get();
  return kOk;
}

int cmd_batch(const std::string& dataset, const std::string& out_dir,
              const std::string& schema_path, const std::string& constraints_path,
              const BackendFlags& backend_flags, int max_iters,
              const std::string& strategy, bool strict, int parallelism) {
  auto schema = load_schema(schema_path);
  auto constraints = load_constraints(constraints_path);

  xdlc_batch_options options;
  xdlc_batch_options_init(&options);
  options.parallelism = parallelism;
  options.loop.max_iterations = max_iters;
  options.loop.strategy = parse_strategy(strategy);
  options.loop.strict = strict ? 1 : 0;

  xdlc_batch_result* result_raw = nullptr;
  xdlc_status status;
  if (backend_flags.backend == "replay") {
    if (backend_flags.replay_file.empty()) die("--backend replay needs --replay-file");
    status = xdlc_batch_run_replay(dataset.c_str(), schema.get(), constraints.get(),
                                   backend_flags.replay_file.c_str(), &options,
                                   out_dir.c_str(), &result_raw);
  } else if (backend_flags.backend == "http") {
    if (backend_flags.model.empty()) die("--backend http needs --model");
    xdlc_http_options http = http_options_from(backend_flags);
    status = xdlc_batch_run_http(dataset.c_str(), schema.get(), constraints.get(),
                                 &http, &options, out_dir.c_str(), &result_raw);
  } else {
    die("unknown backend '" + backend_flags.backend + "' (expected http or replay)");
  }
  if (status != XDLC_OK) {
    warn_last_error("batch");
    return kUsageError;
  }
  std::unique_ptr<xdlc_batch_result, BatchDeleter> result(result_raw);

  char* table = nullptr;
  if (xdlc_batch_table(result.get(), &table) != XDLC_OK) {
    warn_last_error("batch table");
    return kUsageError;
  }
  OwnedString owned(table);
  std::cout << owned.get();
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Convert natural-language lab instructions into verified XDL plans"};
  app.require_subcommand(1);

  // convert
  auto* convert = app.add_subcommand(
      "convert", "Convert one instruction into a verified XDL plan");
  std::string instruction, input_file, schema_path, constraints_path;
  std::string out_path, trace_path, strategy = "xdl+last-error";
  int max_iters = 10;
  bool strict = false;
  BackendFlags convert_backend;
  convert->add_option("--instruction", instruction, "Natural language instruction");
  convert->add_option("--input-file", input_file, "File holding the instruction");
  convert->add_option("--schema", schema_path, "Schema definition file");
  convert->add_option("--constraints", constraints_path,
                      "JSON file with available hardware/reagents");
  convert->add_option("--max-iters", max_iters,
                      "Iteration budget before giving up (default 10)");
  convert->add_option("--strategy", strategy,
                      "Feedback strategy: naive, last-error, all-errors or "
                      "xdl+last-error (default)");
  convert->add_flag("--strict", strict, "Also check quantity property values");
  convert->add_option("--out", out_path, "Write the plan here instead of stdout");
  convert->add_option("--trace", trace_path, "Write the conversion trace JSON here");
  add_backend_flags(convert, convert_backend);

  // validate
  auto* validate = app.add_subcommand("validate", "Check an XDL file and report errors");
  std::string validate_file, validate_schema, validate_constraints;
  bool validate_strict = false, validate_json = false;
  validate->add_option("--file", validate_file, "XDL file to check")->required();
  validate->add_option("--schema", validate_schema, "Schema definition file");
  validate->add_option("--constraints", validate_constraints,
                       "JSON file with available hardware/reagents");
  validate->add_flag("--strict", validate_strict, "Also check quantity property values");
  validate->add_flag("--json", validate_json, "Emit the report as JSON");

  // schema-render
  auto* schema_render = app.add_subcommand(
      "schema-render", "Print the language description used in prompts");
  std::string render_schema;
  schema_render->add_option("--schema", render_schema, "Schema definition file");

  // batch
  auto* batch = app.add_subcommand("batch", "Convert a JSONL dataset of instructions");
  std::string batch_dataset, batch_out_dir, batch_schema, batch_constraints;
  std::string batch_strategy = "xdl+last-error";
  int batch_max_iters = 10, parallelism = 1;
  bool batch_strict = false;
  BackendFlags batch_backend;
  batch->add_option("--dataset", batch_dataset, "JSONL dataset file")->required();
  batch->add_option("--out-dir", batch_out_dir,
                    "Directory for traces, plans, summary.json and table.txt")
      ->required();
  batch->add_option("--schema", batch_schema, "Schema definition file");
  batch->add_option("--constraints", batch_constraints,
                    "Default constraints JSON (per-record constraints win)");
  batch->add_option("--max-iters", batch_max_iters,
                    "Iteration budget per record (default 10)");
  batch->add_option("--strategy", batch_strategy,
                    "Feedback strategy: naive, last-error, all-errors or "
                    "xdl+last-error (default)");
  batch->add_flag("--strict", batch_strict, "Also check quantity property values");
  batch->add_option("--parallelism", parallelism,
                    "Concurrent conversions (default 1)");
  add_backend_flags(batch, batch_backend);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "xdlc: " << e.what() << "\n";
    return kUsageError;
  }

  if (convert->parsed()) {
    return cmd_convert(instruction, input_file, schema_path, constraints_path,
                       convert_backend, max_iters, strategy, strict, out_path,
                       trace_path);
  }
  if (validate->parsed()) {
    return cmd_validate(validate_file, validate_schema, validate_constraints,
                        validate_strict, validate_json);
  }
  if (schema_render->parsed()) {
    return cmd_schema_render(render_schema);
  }
  if (batch->parsed()) {
    return cmd_batch(batch_dataset, batch_out_dir, batch_schema, batch_constraints,
                     batch_backend, batch_max_iters, batch_strategy, batch_strict,
                     parallelism);
  }
  return kUsageError;
}
