#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace xdlc {

// One action of the target language: its tag, which properties a step must
// carry, and which it may carry. Property order follows the declaration
// order of the schema source so that rendered text and diagnostics are
// stable.
struct ActionSchema {
  struct Property {
    std::string name;
    std::string doc;  // one line, may be empty
  };

  std::string tag;
  std::vector<Property> mandatory;
  std::vector<Property> optional;

  bool is_mandatory(std::string_view prop) const;
  bool is_allowed(std::string_view prop) const;
};

class SchemaError : public std::runtime_error {
 public:
  SchemaError(const std::string& message, int line)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + message
                                    : message),
        line_(line) {}

  int line() const { return line_; }

 private:
  int line_;
};

// The full language definition. Immutable after load.
class SchemaRegistry {
 public:
  SchemaRegistry(std::string version, std::vector<ActionSchema> actions);

  // nullptr when the tag is not declared; matching is exact and
  // case-sensitive.
  const ActionSchema* find(std::string_view tag) const;

  const std::vector<ActionSchema>& actions() const { return actions_; }
  const std::string& version() const { return version_; }

 private:
  std::string version_;
  std::vector<ActionSchema> actions_;
  std::unordered_map<std::string, size_t> index_;
};

// The built-in action table. Covers the liquid/solid additions, transfers,
// temperature control, stirring, and drying used by bench protocols.
const SchemaRegistry& default_registry();

// Schema definition file format (line oriented):
//
//   # comment
//   version <string>
//   action <Tag>
//   must <prop> -- <one-line doc>
//   may <prop> -- <one-line doc>
//
// "version" is optional and must precede the first "action". "must"/"may"
// lines attach to the most recent "action". The "-- <doc>" part is optional.
// Blank lines are ignored. Throws SchemaError (with a line number) on
// malformed input, duplicate tags, or duplicate properties.
SchemaRegistry load_schema_text(std::string_view text);
SchemaRegistry load_schema_file(const std::string& path);

// Writes a registry back out in the definition format; load_schema_text of
// the result reproduces the registry.
std::string dump_schema(const SchemaRegistry& reg);

// Human-readable description of the language: the document structure
// followed by one block per action listing mandatory then optional
// properties with their docs. Deterministic; equal registries render to
// byte-identical text.
std::string render_language_description(const SchemaRegistry& reg);

}  // namespace xdlc
