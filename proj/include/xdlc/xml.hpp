#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "xdlc/source_span.hpp"

namespace xdlc::xml {

// Minimal non-validating XML reader for element-and-attribute documents.
// It keeps a source span for every element and attribute so that later
// analysis can point diagnostics at the offending text. Supported: elements,
// quoted attributes, comments, processing instructions, predefined and
// numeric character references, UTF-8 input. Not supported: DOCTYPE and
// CDATA sections (rejected with a parse error).

struct Attribute {
  std::string key;
  std::string value;
  SourceSpan span;  // from the first character of the key through the closing quote
};

// A run of non-whitespace character data inside an element.
struct TextRun {
  std::string text;  // trimmed of surrounding whitespace
  SourceSpan span;
};

struct Element {
  std::string tag;
  std::vector<Attribute> attributes;
  std::vector<Element> children;
  std::vector<TextRun> text;
  SourceSpan span;  // covers the start tag only
};

class ParseError : public std::runtime_error {
 public:
  ParseError(std::string message, std::optional<SourceSpan> span)
      : std::runtime_error(message), span_(span) {}

  const std::optional<SourceSpan>& span() const { return span_; }

 private:
  std::optional<SourceSpan> span_;
};

// Parses a sequence of root elements ("forest"); a conventional document has
// exactly one. Throws ParseError on ill-formed input, including an empty or
// element-free string. Duplicate attribute keys within one element are an
// error.
std::vector<Element> parse_forest(std::string_view text);

// Escapes &, <, >, " and control characters for use inside a double-quoted
// attribute value.
std::string escape_attribute(std::string_view value);

}  // namespace xdlc::xml
