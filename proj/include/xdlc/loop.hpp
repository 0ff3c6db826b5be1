#pragma once

#include <optional>
#include <string>
#include <vector>

#include "xdlc/generator.hpp"
#include "xdlc/prompting.hpp"
#include "xdlc/schema.hpp"
#include "xdlc/verifier.hpp"

namespace xdlc {

struct LoopConfig {
  int max_iterations = 10;
  FeedbackStrategy strategy = FeedbackStrategy::XdlPlusLastError;
  bool strict_verify = false;
  std::optional<double> wall_clock_limit_s;  // off by default
  int prompt_char_budget = kDefaultPromptCharBudget;
};

// One generate-verify round.
struct IterationRecord {
  int index = 1;  // 1-based
  std::string prompt;
  std::string raw_response;
  std::string candidate;  // extracted plan text
  VerificationReport report;
  long long elapsed_ms = 0;
};

enum class Outcome { Success, Timeout, BackendFailure };

// Full account of one conversion: every prompt, response and report, plus
// how it ended. On Success the final plan is the canonical serialization of
// the last (clean) candidate.
struct ConversionTrace {
  std::string instruction;
  LoopConfig config;
  std::string schema_version;
  bool constraints_applied = false;
  std::string backend;  // GeneratorBackend::describe()

  std::vector<IterationRecord> records;
  Outcome outcome = Outcome::Timeout;
  std::string final_plan;      // set on Success
  std::string failure_reason;  // set on BackendFailure
};

// Iterative conversion: prompt the backend, verify the candidate, and
// re-prompt with feedback until the plan verifies clean or the iteration
// budget is spent. Every iteration (the initial generation included) counts
// against max_iterations. A backend that fails after its own retries ends
// the conversion with a BackendFailure outcome; Timeout and BackendFailure
// are outcomes, not exceptions. Throws std::invalid_argument on an empty
// instruction or a non-positive iteration budget.
ConversionTrace convert(const std::string& instruction, const SchemaRegistry& reg,
                        const std::optional<EnvironmentConstraints>& constraints,
                        GeneratorBackend& backend, const LoopConfig& cfg);

// Number of verifier invocations in a conversion; one per iteration record.
int verifier_call_count(const ConversionTrace& trace);

// Credential-free JSON export of the whole trace.
std::string trace_to_json(const ConversionTrace& trace);

}  // namespace xdlc
