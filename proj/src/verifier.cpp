#include "xdlc/verifier.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <limits>
#include <regex>
#include <sstream>

#include <json.hpp>

namespace xdlc {

namespace {

constexpr std::array<std::string_view, 8> kCategoryNames = {
    "XmlParse",           "WrongTag",           "ActionDoesNotExist",
    "MissingMandatoryProperty", "PropertyNotAllowed", "UndefinedResource",
    "EmptyPlan",          "InvalidPropertyValue"};

constexpr std::array<std::string_view, 3> kVesselProps = {"vessel", "from_vessel",
                                                          "to_vessel"};

constexpr std::array<std::string_view, 6> kQuantityProps = {
    "volume", "mass", "amount", "temp", "time", "stir_speed"};

bool is_vessel_prop(std::string_view key) {
  return std::find(kVesselProps.begin(), kVesselProps.end(), key) !=
         kVesselProps.end();
}

bool is_quantity_prop(std::string_view key) {
  return std::find(kQuantityProps.begin(), kQuantityProps.end(), key) !=
         kQuantityProps.end();
}

// number followed by an optional single unit token, e.g. "10 mL", "0 °C",
// "40.0", "-78 °C".
bool looks_like_quantity(const std::string& value) {
  static const std::regex pattern(
      R"(^\s*[+-]?([0-9]+(\.[0-9]+)?|\.[0-9]+)(\s*[^\s0-9][^\s]*)?\s*$)");
  return std::regex_match(value, pattern);
}

std::string trimmed(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) {
    s.remove_prefix(1);
  }
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) {
    s.remove_suffix(1);
  }
  return std::string(s);
}

// A bare section element carries no protocol content; it reads as a
// placeholder rather than a structural mistake.
bool is_bare_placeholder(const xml::Element& el) {
  return is_section_tag(el.tag) && el.attributes.empty() && el.children.empty() &&
         el.text.empty();
}

struct Declaration {
  std::string name;  // trimmed
  SourceSpan span;
};

class Checker {
 public:
  Checker(const SchemaRegistry& reg,
          const std::optional<EnvironmentConstraints>& constraints, bool strict)
      : reg_(reg), constraints_(constraints), strict_(strict) {}

  VerificationReport run(std::string_view text) {
    VerificationReport report;
    report.checked_against = reg_.version();
    report.constraints_applied = constraints_.has_value();

    ParseResult parsed = parse_xdl(text);
    if (!parsed.ok()) {
      report.errors.push_back(VerificationError{
          ErrorCategory::XmlParse, parsed.error().message, parsed.error().span});
      return report;
    }
    const ParsedPlan& plan = parsed.plan();

    if (plan.shape == DocumentShape::FullDocument) {
      walk_document(plan.forest.front());
    } else {
      for (const xml::Element& el : plan.forest) check_step_position(el);
    }

    check_resources();

    if (is_empty_plan(plan.doc)) {
      add(ErrorCategory::EmptyPlan, "plan contains no actions", std::nullopt);
    }

    sort_errors();
    report.errors = std::move(errors_);
    return report;
  }

 private:
  void add(ErrorCategory cat, std::string message, std::optional<SourceSpan> span) {
    errors_.push_back(VerificationError{cat, std::move(message), span});
  }

  void flag_text(const xml::Element& el) {
    for (const xml::TextRun& run : el.text) {
      add(ErrorCategory::WrongTag,
          "stray text '" + run.text + "' inside '<" + el.tag + ">'", run.span);
    }
  }

  void walk_document(const xml::Element& root) {
    const xml::Element* container = &root;
    if (root.children.size() == 1 && root.children[0].tag == "Synthesis") {
      container = &root.children[0];
      flag_text(root);
    }
    flag_text(*container);

    bool seen_hardware = false, seen_reagents = false, seen_procedure = false;
    for (const xml::Element& child : container->children) {
      if (child.tag == "Hardware") {
        if (seen_hardware) {
          add(ErrorCategory::WrongTag, "duplicate section '<Hardware>'", child.span);
        }
        seen_hardware = true;
        walk_declarations(child, "Component", "id", hardware_decls_);
      } else if (child.tag == "Reagents") {
        if (seen_reagents) {
          add(ErrorCategory::WrongTag, "duplicate section '<Reagents>'", child.span);
        }
        seen_reagents = true;
        walk_declarations(child, "Reagent", "name", reagent_decls_);
      } else if (child.tag == "Procedure") {
        if (seen_procedure) {
          add(ErrorCategory::WrongTag, "duplicate section '<Procedure>'", child.span);
        }
        seen_procedure = true;
        flag_text(child);
        for (const xml::Element& step : child.children) check_step_position(step);
      } else if (is_structural_tag(child.tag)) {
        add(ErrorCategory::WrongTag,
            "element '" + child.tag + "' is not allowed directly under '<" +
                container->tag + ">'",
            child.span);
      } else {
        add(ErrorCategory::WrongTag,
            "action element '" + child.tag + "' must appear inside '<Procedure>'",
            child.span);
      }
    }
  }

  void walk_declarations(const xml::Element& section, std::string_view item_tag,
                         std::string_view id_attr, std::vector<Declaration>& out) {
    flag_text(section);
    for (const xml::Element& item : section.children) {
      if (item.tag != item_tag) {
        add(ErrorCategory::WrongTag,
            "element '" + item.tag + "' is not allowed inside '<" + section.tag +
                ">'",
            item.span);
        continue;
      }
      const xml::Attribute* id = nullptr;
      for (const xml::Attribute& a : item.attributes) {
        if (a.key == id_attr) id = &a;
      }
      if (!id) {
        add(ErrorCategory::WrongTag,
            "element '" + item.tag + "' is missing its '" + std::string(id_attr) +
                "' attribute",
            item.span);
      } else {
        out.push_back(Declaration{trimmed(id->value), id->span});
      }
      for (const xml::Element& nested : item.children) {
        add(ErrorCategory::WrongTag,
            "element '" + nested.tag + "' is not allowed inside '<" + item.tag +
                ">'",
            nested.span);
      }
    }
  }

  // An element sitting where an action step belongs: either a real action
  // (checked against the schema) or a misplaced structural tag.
  void check_step_position(const xml::Element& el) {
    if (is_section_tag(el.tag)) {
      if (!is_bare_placeholder(el)) {
        add(ErrorCategory::WrongTag,
            "section element '" + el.tag + "' is not allowed in a step position",
            el.span);
      }
      return;
    }
    if (el.tag == "Component" || el.tag == "Reagent") {
      add(ErrorCategory::WrongTag,
          "declaration element '" + el.tag + "' is not allowed in a step position",
          el.span);
      return;
    }
    check_action(el);
  }

  void check_action(const xml::Element& el) {
    for (const xml::Element& nested : el.children) {
      add(ErrorCategory::WrongTag,
          "nested element '" + nested.tag + "' inside step '" + el.tag + "'",
          nested.span);
    }
    flag_text(el);

    // Resource references are collected for every step, known action or not.
    for (const xml::Attribute& a : el.attributes) {
      if (is_vessel_prop(a.key)) {
        vessel_refs_.push_back(Reference{a.key, trimmed(a.value), a.span});
      } else if (a.key == "reagent") {
        reagent_refs_.push_back(Reference{a.key, trimmed(a.value), a.span});
      }
    }

    const ActionSchema* schema = reg_.find(el.tag);
    if (!schema) {
      add(ErrorCategory::ActionDoesNotExist,
          "action '" + el.tag + "' does not exist in the language", el.span);
      return;
    }

    for (const ActionSchema::Property& p : schema->mandatory) {
      bool present = false;
      for (const xml::Attribute& a : el.attributes) {
        if (a.key == p.name) present = true;
      }
      if (!present) {
        add(ErrorCategory::MissingMandatoryProperty,
            "action '" + el.tag + "' is missing mandatory property '" + p.name + "'",
            el.span);
      }
    }

    for (const xml::Attribute& a : el.attributes) {
      if (!schema->is_allowed(a.key)) {
        add(ErrorCategory::PropertyNotAllowed,
            "property '" + a.key + "' is not allowed for action '" + el.tag + "'",
            a.span);
      }
      if (strict_ && is_quantity_prop(a.key) && !looks_like_quantity(a.value)) {
        add(ErrorCategory::InvalidPropertyValue,
            "property '" + a.key + "' of action '" + el.tag +
                "' has value '" + a.value + "', expected a number with a unit",
            a.span);
      }
    }
  }

  void check_resources() {
    bool nothing_declared = hardware_decls_.empty() && reagent_decls_.empty();
    if (!constraints_ && nothing_declared) return;  // access to all resources

    std::set<std::string> vessels, reagents;
    for (const Declaration& d : hardware_decls_) vessels.insert(d.name);
    for (const Declaration& d : reagent_decls_) reagents.insert(d.name);
    if (constraints_) {
      vessels.insert(constraints_->hardware.begin(), constraints_->hardware.end());
      reagents.insert(constraints_->reagents.begin(), constraints_->reagents.end());

      for (const Declaration& d : hardware_decls_) {
        if (!constraints_->hardware.count(d.name)) {
          add(ErrorCategory::UndefinedResource,
              "hardware '" + d.name + "' is declared but not available in the environment",
              d.span);
        }
      }
      for (const Declaration& d : reagent_decls_) {
        if (!constraints_->reagents.count(d.name)) {
          add(ErrorCategory::UndefinedResource,
              "reagent '" + d.name + "' is declared but not available in the environment",
              d.span);
        }
      }
    }

    for (const Reference& r : vessel_refs_) {
      if (!vessels.count(r.name)) {
        add(ErrorCategory::UndefinedResource,
            "vessel '" + r.name + "' (property '" + r.property +
                "') is not defined in the Hardware list or the environment",
            r.span);
      }
    }
    for (const Reference& r : reagent_refs_) {
      if (!reagents.count(r.name)) {
        add(ErrorCategory::UndefinedResource,
            "reagent '" + r.name + "' is not defined in the Reagents list or the environment",
            r.span);
      }
    }
  }

  void sort_errors() {
    auto key = [](const VerificationError& e) {
      // Spanless findings sort after everything with a position.
      int line = e.span ? e.span->line : std::numeric_limits<int>::max();
      int col = e.span ? e.span->column : std::numeric_limits<int>::max();
      return std::tuple(line, col, static_cast<int>(e.category));
    };
    std::stable_sort(errors_.begin(), errors_.end(),
                     [&](const VerificationError& a, const VerificationError& b) {
                       return key(a) < key(b);
                     });
  }

  struct Reference {
    std::string property;
    std::string name;  // trimmed
    SourceSpan span;
  };

  const SchemaRegistry& reg_;
  const std::optional<EnvironmentConstraints>& constraints_;
  bool strict_;
  std::vector<VerificationError> errors_;
  std::vector<Declaration> hardware_decls_;
  std::vector<Declaration> reagent_decls_;
  std::vector<Reference> vessel_refs_;
  std::vector<Reference> reagent_refs_;
};

}  // namespace

std::string_view category_name(ErrorCategory c) {
  return kCategoryNames[static_cast<size_t>(c)];
}

std::optional<ErrorCategory> category_from_name(std::string_view name) {
  for (size_t i = 0; i < kCategoryNames.size(); ++i) {
    if (kCategoryNames[i] == name) return static_cast<ErrorCategory>(i);
  }
  return std::nullopt;
}

VerificationReport verify(std::string_view text, const SchemaRegistry& reg,
                          const std::optional<EnvironmentConstraints>& constraints,
                          bool strict) {
  return Checker(reg, constraints, strict).run(text);
}

std::string format_error(const VerificationError& error) {
  std::ostringstream out;
  out << category_name(error.category) << ": " << error.message;
  if (error.span) {
    out << " (line " << error.span->line << ", col " << error.span->column << ")";
  }
  return out.str();
}

std::vector<std::string> format_errors(const VerificationReport& report) {
  std::vector<std::string> lines;
  lines.reserve(report.errors.size());
  for (const VerificationError& e : report.errors) lines.push_back(format_error(e));
  return lines;
}

std::map<ErrorCategory, int> diff_categories(const VerificationReport& report) {
  std::map<ErrorCategory, int> counts;
  for (const VerificationError& e : report.errors) ++counts[e.category];
  return counts;
}

std::string report_to_json(const VerificationReport& report) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const VerificationError& e : report.errors) {
    nlohmann::ordered_json entry;
    entry["category"] = std::string(category_name(e.category));
    entry["message"] = e.message;
    entry["line"] = e.span ? nlohmann::ordered_json(e.span->line)
                           : nlohmann::ordered_json(nullptr);
    entry["column"] = e.span ? nlohmann::ordered_json(e.span->column)
                             : nlohmann::ordered_json(nullptr);
    arr.push_back(std::move(entry));
  }
  return arr.dump(2);
}

EnvironmentConstraints constraints_from_json(std::string_view json_text) {
  nlohmann::json parsed;
  try {
    parsed = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(std::string("constraints are not valid JSON: ") +
                             e.what());
  }
  if (!parsed.is_object()) {
    throw std::runtime_error(
        "constraints must be a JSON object with \"hardware\" and \"reagents\" arrays");
  }
  EnvironmentConstraints constraints;
  for (const auto& [key, value] : parsed.items()) {
    std::set<std::string>* target = nullptr;
    if (key == "hardware") target = &constraints.hardware;
    else if (key == "reagents") target = &constraints.reagents;
    else throw std::runtime_error("unknown constraints key '" + key + "'");
    if (!value.is_array()) {
      throw std::runtime_error("constraints key '" + key + "' must be an array of strings");
    }
    for (const auto& item : value) {
      if (!item.is_string()) {
        throw std::runtime_error("constraints key '" + key + "' must be an array of strings");
      }
      target->insert(trimmed(item.get<std::string>()));
    }
  }
  return constraints;
}

EnvironmentConstraints load_constraints_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read constraints file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return constraints_from_json(buf.str());
}

}  // namespace xdlc
