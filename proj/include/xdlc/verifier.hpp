#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "xdlc/schema.hpp"
#include "xdlc/source_span.hpp"
#include "xdlc/xdl_model.hpp"

namespace xdlc {

// Diagnostic categories. The first six mirror the classes of mistakes a
// syntax checker catches on generated plans; EmptyPlan marks a plan with no
// protocol at all, and InvalidPropertyValue only fires in strict mode.
enum class ErrorCategory {
  XmlParse,
  WrongTag,
  ActionDoesNotExist,
  MissingMandatoryProperty,
  PropertyNotAllowed,
  UndefinedResource,
  EmptyPlan,
  InvalidPropertyValue,
};

std::string_view category_name(ErrorCategory c);

// Parses "MissingMandatoryProperty" etc.; returns nullopt for unknown names.
std::optional<ErrorCategory> category_from_name(std::string_view name);

struct VerificationError {
  ErrorCategory category;
  std::string message;                // names the offending tag/property/resource
  std::optional<SourceSpan> span;     // absent for whole-plan findings
};

struct VerificationReport {
  std::vector<VerificationError> errors;  // document order, ties by category
  std::string checked_against;            // registry version
  bool constraints_applied = false;

  bool clean() const { return errors.empty(); }
};

// The resources actually available in the execution environment. When no
// constraints are given, every resource is permitted.
struct EnvironmentConstraints {
  std::set<std::string> hardware;
  std::set<std::string> reagents;
};

// Checks a candidate plan. Pipeline: XML parse (failure short-circuits
// everything else), structural checks on the element tree, per-step schema
// checks, resource-definition analysis, empty-plan detection, and - in
// strict mode only - number+unit checks on quantity-valued properties.
//
// Resource analysis: step references (vessel, from_vessel, to_vessel,
// reagent) must resolve against the document's own declarations or, when
// constraints are given, against declarations plus constraints; declared
// items missing from given constraints are also reported. A plan that
// declares nothing and runs without constraints skips resource analysis
// entirely.
VerificationReport verify(std::string_view text, const SchemaRegistry& reg,
                          const std::optional<EnvironmentConstraints>& constraints,
                          bool strict = false);

// One line per error: "<Category>: <message> (line L, col C)", the position
// omitted for errors without a span. Empty for a clean report.
std::vector<std::string> format_errors(const VerificationReport& report);
std::string format_error(const VerificationError& error);

// Histogram of the report by category.
std::map<ErrorCategory, int> diff_categories(const VerificationReport& report);

// JSON array of {category, message, line, column}; line/column are null for
// errors without a span.
std::string report_to_json(const VerificationReport& report);

// Constraints file: {"hardware": ["beaker", ...], "reagents": ["vinegar", ...]}.
// Either key may be omitted; unknown keys are an error. Throws
// std::runtime_error on malformed input.
EnvironmentConstraints constraints_from_json(std::string_view json_text);
EnvironmentConstraints load_constraints_file(const std::string& path);

}  // namespace xdlc
