#include "xdlc/prompting.hpp"

#include <sstream>

namespace xdlc {

namespace {

void check_budget(const std::string& prompt, int budget) {
  if (budget > 0 && static_cast<int>(prompt.size()) > budget) {
    throw PromptBudgetError("prompt of " + std::to_string(prompt.size()) +
                            " characters exceeds the budget of " +
                            std::to_string(budget));
  }
}

}  // namespace

std::string_view strategy_name(FeedbackStrategy s) {
  switch (s) {
    case FeedbackStrategy::Naive: return "naive";
    case FeedbackStrategy::LastError: return "last-error";
    case FeedbackStrategy::AllErrorsCumulative: return "all-errors";
    case FeedbackStrategy::XdlPlusLastError: return "xdl+last-error";
  }
  return "xdl+last-error";
}

std::optional<FeedbackStrategy> strategy_from_name(std::string_view name) {
  if (name == "naive") return FeedbackStrategy::Naive;
  if (name == "last-error") return FeedbackStrategy::LastError;
  if (name == "all-errors") return FeedbackStrategy::AllErrorsCumulative;
  if (name == "xdl+last-error") return FeedbackStrategy::XdlPlusLastError;
  return std::nullopt;
}

std::optional<std::string> render_constraints_text(
    const std::vector<std::string>& hardware,
    const std::vector<std::string>& reagents) {
  if (hardware.empty() && reagents.empty()) return std::nullopt;
  std::ostringstream out;
  if (!hardware.empty()) {
    out << "Available hardware: ";
    for (size_t i = 0; i < hardware.size(); ++i) {
      if (i) out << ", ";
      out << hardware[i];
    }
  }
  if (!reagents.empty()) {
    if (!hardware.empty()) out << "\n";
    out << "Available reagents: ";
    for (size_t i = 0; i < reagents.size(); ++i) {
      if (i) out << ", ";
      out << reagents[i];
    }
  }
  return out.str();
}

std::string build_initial_prompt(const PromptBundle& bundle) {
  if (bundle.instruction.empty()) {
    throw std::invalid_argument("instruction must not be empty");
  }
  std::ostringstream out;
  out << bundle.language_description << "\n\n";
  if (bundle.constraints_text) {
    out << *bundle.constraints_text << "\n\n";
  }
  out << "Convert to XDL:\n" << bundle.instruction;
  std::string prompt = out.str();
  check_budget(prompt, bundle.char_budget);
  return prompt;
}

std::string build_iterative_prompt(const PromptBundle& bundle,
                                   const std::string& prev_xdl,
                                   const std::vector<std::string>& last_errors) {
  if (bundle.strategy != FeedbackStrategy::Naive && last_errors.empty()) {
    throw std::logic_error("iterative prompt needs at least one error line");
  }

  // The body repeats the full initial prompt; the description is re-sent on
  // every iteration.
  PromptBundle initial = bundle;
  initial.char_budget = 0;
  std::ostringstream out;
  out << build_initial_prompt(initial) << "\n";

  switch (bundle.strategy) {
    case FeedbackStrategy::Naive:
      out << prev_xdl << "\nThis XDL was not correct. Please fix the errors.";
      break;
    case FeedbackStrategy::LastError:
      out << "There were the errors\n";
      for (const std::string& line : last_errors) out << line << "\n";
      out << "Please fix the errors";
      break;
    case FeedbackStrategy::AllErrorsCumulative:
      out << "There were the errors\n";
      for (const auto& [iteration, lines] : bundle.error_history) {
        for (const std::string& line : lines) out << line << "\n";
      }
      out << "Please fix the errors";
      break;
    case FeedbackStrategy::XdlPlusLastError:
      out << prev_xdl << "\nThis XDL was not correct.\nThere were the errors\n";
      for (const std::string& line : last_errors) out << line << "\n";
      out << "Please fix the errors";
      break;
  }
  std::string prompt = out.str();
  check_budget(prompt, bundle.char_budget);
  return prompt;
}

}  // namespace xdlc
