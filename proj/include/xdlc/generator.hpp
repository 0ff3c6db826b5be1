#pragma once

#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace xdlc {

class BackendError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A text-generation backend. complete() returns the raw model output for a
// prompt and throws BackendError when no text can be produced. An
// implementation is either safe for concurrent complete() calls or, like
// ReplayBackend, owned by a single conversion at a time.
class GeneratorBackend {
 public:
  virtual ~GeneratorBackend() = default;
  virtual std::string complete(const std::string& prompt) = 0;

  // One-line label for traces; must never include credentials.
  virtual std::string describe() const = 0;
};

// Canned responses in order; deterministic drop-in for tests and offline
// runs. Asking for more responses than scripted is an error. Not safe for
// concurrent use (cursor).
class ReplayBackend : public GeneratorBackend {
 public:
  explicit ReplayBackend(std::vector<std::string> responses)
      : responses_(std::move(responses)) {}

  std::string complete(const std::string& prompt) override;
  std::string describe() const override;

  size_t consumed() const { return cursor_; }
  size_t size() const { return responses_.size(); }

 private:
  std::vector<std::string> responses_;
  size_t cursor_ = 0;
};

// Pulls the plan text out of raw model output. Precedence: first fenced code
// block, then an <XDL>...</XDL> document, then the outermost element-like
// region (first '<' of an element to the last '>'), otherwise the raw text
// unchanged. Total and idempotent.
std::string extract_plan(const std::string& raw);

}  // namespace xdlc
