#include "xdlc/loop.hpp"

#include <chrono>

#include <json.hpp>

namespace xdlc {

namespace {

using Clock = std::chrono::steady_clock;

std::optional<std::string> constraints_lines(
    const std::optional<EnvironmentConstraints>& constraints) {
  if (!constraints) return std::nullopt;
  return render_constraints_text(
      {constraints->hardware.begin(), constraints->hardware.end()},
      {constraints->reagents.begin(), constraints->reagents.end()});
}

}  // namespace

ConversionTrace convert(const std::string& instruction, const SchemaRegistry& reg,
                        const std::optional<EnvironmentConstraints>& constraints,
                        GeneratorBackend& backend, const LoopConfig& cfg) {
  if (instruction.empty()) {
    throw std::invalid_argument("instruction must not be empty");
  }
  if (cfg.max_iterations < 1) {
    throw std::invalid_argument("max_iterations must be at least 1");
  }

  ConversionTrace trace;
  trace.instruction = instruction;
  trace.config = cfg;
  trace.schema_version = reg.version();
  trace.constraints_applied = constraints.has_value();
  trace.backend = backend.describe();

  PromptBundle bundle;
  bundle.language_description = render_language_description(reg);
  bundle.constraints_text = constraints_lines(constraints);
  bundle.instruction = instruction;
  bundle.strategy = cfg.strategy;
  bundle.char_budget = cfg.prompt_char_budget;

  const Clock::time_point start = Clock::now();
  std::string prompt;
  try {
    prompt = build_initial_prompt(bundle);
  } catch (const PromptBudgetError& e) {
    trace.outcome = Outcome::BackendFailure;
    trace.failure_reason = e.what();
    return trace;
  }

  for (int iteration = 1; iteration <= cfg.max_iterations; ++iteration) {
    IterationRecord record;
    record.index = iteration;
    record.prompt = prompt;

    const Clock::time_point t0 = Clock::now();
    try {
      record.raw_response = backend.complete(prompt);
    } catch (const BackendError& e) {
      trace.outcome = Outcome::BackendFailure;
      trace.failure_reason = e.what();
      return trace;
    }
    record.candidate = extract_plan(record.raw_response);
    record.report = verify(record.candidate, reg, constraints, cfg.strict_verify);
    record.elapsed_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                            Clock::now() - t0)
                            .count();

    const bool clean = record.report.clean();
    const std::string candidate = record.candidate;
    const std::vector<std::string> error_lines = format_errors(record.report);
    trace.records.push_back(std::move(record));

    if (clean) {
      // A clean report implies the candidate parses; emit the canonical form.
      trace.outcome = Outcome::Success;
      trace.final_plan = serialize(parse_xdl(candidate).plan().doc);
      return trace;
    }
    if (iteration == cfg.max_iterations) break;
    if (cfg.wall_clock_limit_s &&
        std::chrono::duration<double>(Clock::now() - start).count() >
            *cfg.wall_clock_limit_s) {
      break;
    }

    bundle.error_history.emplace_back(iteration, error_lines);
    try {
      prompt = build_iterative_prompt(bundle, candidate, error_lines);
    } catch (const PromptBudgetError& e) {
      trace.outcome = Outcome::BackendFailure;
      trace.failure_reason = e.what();
      return trace;
    }
  }

  trace.outcome = Outcome::Timeout;
  return trace;
}

int verifier_call_count(const ConversionTrace& trace) {
  return static_cast<int>(trace.records.size());
}

std::string trace_to_json(const ConversionTrace& trace) {
  nlohmann::ordered_json j;
  j["instruction"] = trace.instruction;
  j["config"] = {
      {"max_iterations", trace.config.max_iterations},
      {"strategy", std::string(strategy_name(trace.config.strategy))},
      {"strict", trace.config.strict_verify},
      {"wall_clock_limit_s", trace.config.wall_clock_limit_s
                                 ? nlohmann::ordered_json(*trace.config.wall_clock_limit_s)
                                 : nlohmann::ordered_json(nullptr)},
      {"prompt_char_budget", trace.config.prompt_char_budget},
      {"schema_version", trace.schema_version},
      {"constraints_applied", trace.constraints_applied},
      {"backend", trace.backend},
  };

  nlohmann::ordered_json records = nlohmann::ordered_json::array();
  for (const IterationRecord& r : trace.records) {
    nlohmann::ordered_json errors = nlohmann::ordered_json::array();
    for (const VerificationError& e : r.report.errors) {
      errors.push_back({
          {"category", std::string(category_name(e.category))},
          {"message", e.message},
          {"line", e.span ? nlohmann::ordered_json(e.span->line)
                          : nlohmann::ordered_json(nullptr)},
          {"column", e.span ? nlohmann::ordered_json(e.span->column)
                            : nlohmann::ordered_json(nullptr)},
      });
    }
    records.push_back({
        {"index", r.index},
        {"prompt", r.prompt},
        {"raw_response", r.raw_response},
        {"candidate", r.candidate},
        {"errors", std::move(errors)},
        {"elapsed_ms", r.elapsed_ms},
    });
  }
  j["records"] = std::move(records);

  nlohmann::ordered_json outcome;
  switch (trace.outcome) {
    case Outcome::Success:
      outcome["status"] = "success";
      outcome["plan"] = trace.final_plan;
      break;
    case Outcome::Timeout:
      outcome["status"] = "timeout";
      break;
    case Outcome::BackendFailure:
      outcome["status"] = "backend-failure";
      outcome["reason"] = trace.failure_reason;
      break;
  }
  j["outcome"] = std::move(outcome);
  return j.dump(2);
}

}  // namespace xdlc
