#pragma once

#include <random>
#include <set>
#include <string>
#include <vector>

#include "xdlc/schema.hpp"
#include "xdlc/xdl_model.hpp"

namespace testutil {

// Randomized document generator over the default action table. Values draw
// from a pool that includes entity-needing characters, UTF-8 reagent names
// and awkward quantities so that round-trip coverage is not just happy-path
// ASCII.
class DocumentGenerator {
 public:
  explicit DocumentGenerator(unsigned seed, bool valid_references = false)
      : rng_(seed), valid_references_(valid_references) {}

  xdlc::XdlDocument generate() {
    xdlc::XdlDocument doc;
    doc.hardware = unique_names(valid_references_ ? 1 : 0, 4, id_pool());
    doc.reagents = unique_names(valid_references_ ? 1 : 0, 4, reagent_pool());

    int steps = pick_int(0, 8);
    const auto& actions = xdlc::default_registry().actions();
    for (int s = 0; s < steps; ++s) {
      const xdlc::ActionSchema& action = actions[pick_int(0, actions.size() - 1)];
      xdlc::Step step;
      step.tag = action.tag;
      for (const auto& prop : action.mandatory) {
        step.attributes.push_back({prop.name, value_for(prop.name, doc)});
      }
      for (const auto& prop : action.optional) {
        if (pick_int(0, 1)) {
          step.attributes.push_back({prop.name, value_for(prop.name, doc)});
        }
      }
      doc.procedure.push_back(std::move(step));
    }
    return doc;
  }

 private:
  int pick_int(int lo, size_t hi) {
    return std::uniform_int_distribution<int>(lo, static_cast<int>(hi))(rng_);
  }

  static std::vector<std::string> id_pool() {
    return {"V1", "V2", "reactor", "beaker", "round flask", "Ω-vessel", "cup_3"};
  }

  static std::vector<std::string> reagent_pool() {
    return {"water",
            "m-CPBA",
            "5-chloro-10-oxa-3-thia-tricyclo[5,2,1,0*1,5*]dec-8-ene",
            "KOH & NaOH blend",
            "\"heavy\" water",
            "café-grade caffeine",
            "tris(2-aminoethyl)amine",
            "NaCl <technical>"};
  }

  std::vector<std::string> unique_names(int lo, int hi,
                                        std::vector<std::string> pool) {
    int n = pick_int(lo, hi);
    std::vector<std::string> out;
    std::set<std::string> seen;
    for (int i = 0; i < n && !pool.empty(); ++i) {
      std::string name = pool[pick_int(0, pool.size() - 1)];
      if (pick_int(0, 2) == 0) name += " #" + std::to_string(pick_int(0, 99));
      if (seen.insert(name).second) out.push_back(name);
    }
    return out;
  }

  std::string value_for(const std::string& prop, const xdlc::XdlDocument& doc) {
    if (valid_references_) {
      if (prop == "vessel" || prop == "from_vessel" || prop == "to_vessel") {
        return doc.hardware[pick_int(0, doc.hardware.size() - 1)];
      }
      if (prop == "reagent") {
        return doc.reagents[pick_int(0, doc.reagents.size() - 1)];
      }
    }
    static const std::vector<std::string> values = {
        "10 mL",      "200 mg",   "0 °C",        "-78 °C",  "3 min",
        "600 rpm",    "true",     "boiling point", "40.0",  "31.92 g",
        "a & b",      "<raw>",    "say \"when\"",  "tab\tsep", "two\nlines",
        "  padded  ", "100C",     "water",         "flask",   "µ-dose",
    };
    return values[pick_int(0, values.size() - 1)];
  }

  std::mt19937 rng_;
  bool valid_references_;
};

}  // namespace testutil
