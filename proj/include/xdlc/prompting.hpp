#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace xdlc {

// What a repair prompt carries from the previous iterations. XdlPlusLastError
// (the faulty plan plus the latest diagnostics) is the default.
enum class FeedbackStrategy {
  Naive,                // previous plan + a fixed "fix it" sentence, no diagnostics
  LastError,            // latest diagnostics only
  AllErrorsCumulative,  // diagnostics of every iteration so far
  XdlPlusLastError,     // previous plan + latest diagnostics
};

std::string_view strategy_name(FeedbackStrategy s);
std::optional<FeedbackStrategy> strategy_from_name(std::string_view name);

// A built prompt longer than the character budget is refused outright;
// silent truncation would corrupt the language description or the plan.
class PromptBudgetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr int kDefaultPromptCharBudget = 12000;

// Everything a prompt is assembled from. error_history accumulates the
// formatted diagnostics of each completed iteration.
struct PromptBundle {
  std::string language_description;
  std::optional<std::string> constraints_text;  // "Available hardware: ..." lines
  std::string instruction;
  FeedbackStrategy strategy = FeedbackStrategy::XdlPlusLastError;
  std::vector<std::pair<int, std::vector<std::string>>> error_history;
  int char_budget = kDefaultPromptCharBudget;
};

// Renders the constraint lines for the prompt; nullopt when both sets are
// empty.
std::optional<std::string> render_constraints_text(
    const std::vector<std::string>& hardware, const std::vector<std::string>& reagents);

// Description, optional constraint lines, the literal line "Convert to
// XDL:", then the instruction. Throws std::invalid_argument on an empty
// instruction and PromptBudgetError over budget.
std::string build_initial_prompt(const PromptBundle& bundle);

// The initial prompt body followed by the strategy-dependent repair suffix.
// last_errors must be non-empty for every strategy except Naive (throws
// std::logic_error otherwise).
std::string build_iterative_prompt(const PromptBundle& bundle,
                                   const std::string& prev_xdl,
                                   const std::vector<std::string>& last_errors);

}  // namespace xdlc
