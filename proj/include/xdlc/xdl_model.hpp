#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "xdlc/source_span.hpp"
#include "xdlc/xml.hpp"

namespace xdlc {

// One procedure action, e.g. <Add vessel="V1" reagent="water" volume="10 mL"/>.
// Equality is structural: spans are carried for diagnostics but do not take
// part in comparisons.
struct Step {
  struct Attr {
    std::string key;
    std::string value;

    bool operator==(const Attr&) const = default;
  };

  std::string tag;
  std::vector<Attr> attributes;
  SourceSpan span;

  const std::string* attribute(std::string_view key) const;

  bool operator==(const Step& other) const {
    return tag == other.tag && attributes == other.attributes;
  }
};

// A plan: declared hardware ids, declared reagent names, and the ordered
// procedure steps.
struct XdlDocument {
  std::vector<std::string> hardware;
  std::vector<std::string> reagents;
  std::vector<Step> procedure;

  bool operator==(const XdlDocument&) const = default;
};

struct ParseFailure {
  std::string message;                 // human readable, one line
  std::optional<SourceSpan> span;      // absent when there is nothing to point at
};

// Whether the input carried the full <XDL> wrapper or was a bare sequence of
// action elements.
enum class DocumentShape { FullDocument, Fragment };

// Successful parse: the document view plus the raw element forest the view
// was built from. The forest keeps attribute spans and stray content that the
// document model intentionally drops; the verifier walks it.
struct ParsedPlan {
  XdlDocument doc;
  std::vector<xml::Element> forest;
  DocumentShape shape = DocumentShape::Fragment;
};

class ParseResult {
 public:
  static ParseResult success(ParsedPlan plan);
  static ParseResult failure(ParseFailure f);

  bool ok() const { return plan_.has_value(); }
  const ParsedPlan& plan() const { return *plan_; }
  const ParseFailure& error() const { return *failure_; }

 private:
  std::optional<ParsedPlan> plan_;
  std::optional<ParseFailure> failure_;
};

// Parses XDL text. Accepts either a full document rooted at <XDL> (optionally
// with a single <Synthesis> wrapper around the sections) or a fragment: a
// bare sequence of action elements, which yields empty hardware/reagent
// lists. A second root next to <XDL> is a failure; a fragment may have any
// number of roots.
ParseResult parse_xdl(std::string_view text);

// Canonical serialization: full document form, 2-space indentation,
// attributes in stored order, self-closing empty elements. The result has no
// trailing newline. parse_xdl(serialize(d)) reproduces d exactly.
std::string serialize(const XdlDocument& doc);

// True when the plan carries no experimental protocol: no steps at all, or
// nothing but bare section placeholders such as <Procedure/>.
bool is_empty_plan(const XdlDocument& doc);

// Section and declaration tags of the document format itself (as opposed to
// action tags).
bool is_structural_tag(std::string_view tag);

// Container tags that count as placeholders when they appear bare in a step
// position: XDL, Synthesis, Hardware, Reagents, Procedure.
bool is_section_tag(std::string_view tag);

}  // namespace xdlc
