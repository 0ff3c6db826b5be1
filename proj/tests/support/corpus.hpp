#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "support/test_util.hpp"
#include "xdlc/verifier.hpp"

namespace testutil {

// One hand-labeled corpus file: the plan text, how to verify it, and the
// exact per-category error counts it must produce.
struct CorpusCase {
  std::string file;
  std::string text;
  bool strict = false;
  std::optional<xdlc::EnvironmentConstraints> constraints;
  std::map<xdlc::ErrorCategory, int> expected;
};

inline std::vector<CorpusCase> load_corpus() {
  nlohmann::json labels =
      nlohmann::json::parse(read_fixture("corpus/labels.json"));
  std::vector<CorpusCase> cases;
  for (const auto& entry : labels) {
    CorpusCase c;
    c.file = entry.at("file").get<std::string>();
    c.text = read_fixture("corpus/" + c.file);
    c.strict = entry.value("strict", false);
    if (entry.contains("constraints") && !entry["constraints"].is_null()) {
      c.constraints = xdlc::constraints_from_json(entry["constraints"].dump());
    }
    for (const auto& [name, count] : entry.at("expected").items()) {
      auto category = xdlc::category_from_name(name);
      if (!category) throw std::runtime_error("unknown category " + name);
      c.expected[*category] = count.get<int>();
    }
    cases.push_back(std::move(c));
  }
  return cases;
}

}  // namespace testutil
