#include "xdlc/generator.hpp"

#include <cctype>

namespace xdlc {

namespace {

// Content of the first ``` fence pair, if any. The opening fence may carry a
// language tag on the same line; an unterminated fence does not count.
bool fenced_block(const std::string& raw, std::string& out) {
  size_t open = raw.find("```");
  if (open == std::string::npos) return false;
  size_t content = raw.find('\n', open);
  if (content == std::string::npos) return false;
  ++content;
  size_t close = raw.find("```", content);
  if (close == std::string::npos) return false;
  out = raw.substr(content, close - content);
  return true;
}

bool xdl_document_region(const std::string& raw, std::string& out) {
  size_t open = raw.find("<XDL");
  if (open == std::string::npos) return false;
  size_t close = raw.find("</XDL>", open);
  if (close == std::string::npos) return false;
  out = raw.substr(open, close + 6 - open);
  return true;
}

// First '<' that starts an element-like construct, to the last '>' after it.
bool element_region(const std::string& raw, std::string& out) {
  size_t open = std::string::npos;
  for (size_t i = 0; i + 1 < raw.size(); ++i) {
    if (raw[i] == '<' &&
        (std::isalpha(static_cast<unsigned char>(raw[i + 1])) || raw[i + 1] == '/')) {
      open = i;
      break;
    }
  }
  if (open == std::string::npos) return false;
  size_t close = raw.rfind('>');
  if (close == std::string::npos || close < open) return false;
  out = raw.substr(open, close + 1 - open);
  return true;
}

std::string extract_from(const std::string& text) {
  std::string region;
  if (xdl_document_region(text, region)) return region;
  if (element_region(text, region)) return region;
  return text;
}

}  // namespace

std::string ReplayBackend::complete(const std::string& prompt) {
  (void)prompt;
  if (cursor_ >= responses_.size()) {
    throw BackendError("replay script exhausted after " +
                       std::to_string(responses_.size()) + " responses");
  }
  return responses_[cursor_++];
}

std::string ReplayBackend::describe() const {
  return "replay(" + std::to_string(responses_.size()) + " responses)";
}

std::string extract_plan(const std::string& raw) {
  std::string fenced;
  if (fenced_block(raw, fenced)) return extract_from(fenced);
  return extract_from(raw);
}

}  // namespace xdlc
