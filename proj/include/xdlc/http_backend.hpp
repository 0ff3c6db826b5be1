#pragma once

#include <string>

#include "xdlc/generator.hpp"

namespace xdlc {

// Configuration for an OpenAI-compatible completions endpoint. The
// credential is read from the named environment variable at request time and
// never stored in traces or error text.
struct HttpBackendConfig {
  std::string endpoint = "https://api.openai.com/v1/completions";
  std::string model;
  std::string credential_env = "XDLC_API_KEY";
  double temperature = 0.0;
  int max_tokens = 1024;
  double timeout_s = 60.0;
  int max_attempts = 5;        // total requests per complete() call
  double backoff_base_s = 1.0; // exponential, factor 2, with jitter
};

// Speaks the completions protocol: POST {model, prompt, temperature,
// max_tokens}, returns the first choice's text. Rate limiting (429), server
// errors (5xx) and transport failures are retried with exponential backoff;
// other client errors and malformed responses are surfaced immediately.
// Stateless per call, safe for concurrent use.
class HttpBackend : public GeneratorBackend {
 public:
  explicit HttpBackend(HttpBackendConfig config);

  std::string complete(const std::string& prompt) override;
  std::string describe() const override;

  const HttpBackendConfig& config() const { return config_; }

 private:
  HttpBackendConfig config_;
};

}  // namespace xdlc
