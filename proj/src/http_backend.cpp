#include "xdlc/http_backend.hpp"

#include <chrono>
#include <cstdlib>
#include <random>
#include <thread>

#include <httplib.h>
#include <json.hpp>

namespace xdlc {

namespace {

struct SplitUrl {
  std::string base;  // scheme://host[:port]
  std::string path;  // /v1/completions
};

SplitUrl split_url(const std::string& url) {
  size_t scheme = url.find("://");
  if (scheme == std::string::npos) {
    throw BackendError("endpoint '" + url + "' is missing a scheme");
  }
  size_t path = url.find('/', scheme + 3);
  if (path == std::string::npos) return {url, "/"};
  return {url.substr(0, path), url.substr(path)};
}

double jittered_backoff(double base_s, int attempt) {
  thread_local std::mt19937 rng{std::random_device{}()};
  std::uniform_real_distribution<double> jitter(0.0, 0.25);
  double factor = static_cast<double>(1 << (attempt - 1));
  return base_s * factor * (1.0 + jitter(rng));
}

}  // namespace

HttpBackend::HttpBackend(HttpBackendConfig config) : config_(std::move(config)) {
  if (config_.max_attempts < 1) config_.max_attempts = 1;
}

std::string HttpBackend::describe() const {
  return "http " + config_.endpoint + " model=" + config_.model;
}

std::string HttpBackend::complete(const std::string& prompt) {
  SplitUrl url = split_url(config_.endpoint);

  nlohmann::json body{{"model", config_.model},
                      {"prompt", prompt},
                      {"temperature", config_.temperature},
                      {"max_tokens", config_.max_tokens}};
  const std::string payload = body.dump();

  httplib::Headers headers;
  if (const char* credential = std::getenv(config_.credential_env.c_str());
      credential && *credential) {
    headers.emplace("Authorization", std::string("Bearer ") + credential);
  }

  std::string last_failure;
  for (int attempt = 1; attempt <= config_.max_attempts; ++attempt) {
    if (attempt > 1) {
      std::this_thread::sleep_for(std::chrono::duration<double>(
          jittered_backoff(config_.backoff_base_s, attempt - 1)));
    }

    httplib::Client client(url.base);
    client.set_connection_timeout(std::chrono::duration<double>(config_.timeout_s));
    client.set_read_timeout(std::chrono::duration<double>(config_.timeout_s));
    client.set_write_timeout(std::chrono::duration<double>(config_.timeout_s));

    httplib::Result res =
        client.Post(url.path, headers, payload, "application/json");

    if (!res) {
      last_failure = "transport error: " + httplib::to_string(res.error());
      continue;  // retry
    }
    if (res->status == 429 || res->status >= 500) {
      last_failure = "HTTP " + std::to_string(res->status);
      continue;  // retry
    }
    if (res->status != 200) {
      throw BackendError("completion request failed with HTTP " +
                         std::to_string(res->status));
    }

    nlohmann::json parsed;
    try {
      parsed = nlohmann::json::parse(res->body);
    } catch (const nlohmann::json::exception&) {
      throw BackendError("completion response is not valid JSON");
    }
    if (!parsed.contains("choices") || !parsed["choices"].is_array() ||
        parsed["choices"].empty() || !parsed["choices"][0].contains("text") ||
        !parsed["choices"][0]["text"].is_string()) {
      throw BackendError(
          "completion response is missing choices[0].text");
    }
    return parsed["choices"][0]["text"].get<std::string>();
  }

  throw BackendError("completion request failed after " +
                     std::to_string(config_.max_attempts) + " attempts (" +
                     last_failure + ")");
}

}  // namespace xdlc
