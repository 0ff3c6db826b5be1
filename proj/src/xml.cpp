#include "xdlc/xml.hpp"

#include <cctype>
#include <cstdint>

namespace xdlc::xml {

namespace {

bool is_name_start(char c) {
  return std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == ':';
}

bool is_name_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == ':' ||
         c == '-' || c == '.';
}

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; }

// One byte of a UTF-8 sequence that does not start a new code point.
bool is_continuation_byte(char c) {
  return (static_cast<unsigned char>(c) & 0xC0) == 0x80;
}

void append_utf8(std::string& out, uint32_t cp) {
  if (cp <= 0x7F) {
    out.push_back(static_cast<char>(cp));
  } else if (cp <= 0x7FF) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp <= 0xFFFF) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

class Reader {
 public:
  explicit Reader(std::string_view text) : text_(text) {
    // Skip a UTF-8 byte order mark if present.
    if (text_.substr(0, 3) == "\xEF\xBB\xBF") pos_ = 3;
  }

  std::vector<Element> parse_forest() {
    std::vector<Element> roots;
    while (true) {
      skip_intertag_space();
      if (eof()) break;
      roots.push_back(parse_element());
    }
    if (roots.empty()) {
      throw ParseError("input contains no XML elements", std::nullopt);
    }
    return roots;
  }

 private:
  struct Mark {
    size_t pos;
    int line;
    int column;
    long codepoints;
  };

  Mark mark() const { return {pos_, line_, column_, codepoints_}; }

  SourceSpan span_from(const Mark& m) const {
    return SourceSpan{m.line, m.column, static_cast<int>(codepoints_ - m.codepoints)};
  }

  SourceSpan span_here() const { return SourceSpan{line_, column_, 1}; }

  bool eof() const { return pos_ >= text_.size(); }

  char peek() const { return text_[pos_]; }

  bool lookahead(std::string_view s) const { return text_.substr(pos_, s.size()) == s; }

  void advance() {
    char c = text_[pos_++];
    if (c == '\n') {
      ++line_;
      column_ = 1;
      ++codepoints_;
    } else if (!is_continuation_byte(c)) {
      ++column_;
      ++codepoints_;
    }
  }

  void advance(size_t n) {
    for (size_t i = 0; i < n; ++i) advance();
  }

  [[noreturn]] void fail(std::string message) const {
    throw ParseError(std::move(message), eof() ? std::nullopt
                                               : std::optional<SourceSpan>(span_here()));
  }

  // Whitespace between top-level elements. Markup other than elements is
  // skipped; stray character data is an error because a plan has no text
  // outside its elements.
  void skip_intertag_space() {
    while (!eof()) {
      if (is_space(peek())) {
        advance();
      } else if (lookahead("<!--")) {
        skip_comment();
      } else if (lookahead("<?")) {
        skip_processing_instruction();
      } else if (lookahead("<!")) {
        fail("unsupported markup '<!...' (DOCTYPE and CDATA are not accepted)");
      } else if (peek() == '<') {
        if (text_.size() > pos_ + 1 && text_[pos_ + 1] == '/') {
          fail("closing tag without a matching open element");
        }
        return;
      } else {
        fail("character data is not allowed outside of elements");
      }
    }
  }

  void skip_comment() {
    Mark start = mark();
    advance(4);
    while (!eof()) {
      if (lookahead("-->")) {
        advance(3);
        return;
      }
      advance();
    }
    throw ParseError("comment is never closed", span_from_start(start));
  }

  void skip_processing_instruction() {
    Mark start = mark();
    advance(2);
    while (!eof()) {
      if (lookahead("?>")) {
        advance(2);
        return;
      }
      advance();
    }
    throw ParseError("processing instruction is never closed", span_from_start(start));
  }

  SourceSpan span_from_start(const Mark& m) const {
    return SourceSpan{m.line, m.column, 1};
  }

  std::string read_name() {
    if (eof() || !is_name_start(peek())) fail("expected a name");
    std::string name;
    while (!eof() && is_name_char(peek())) {
      name.push_back(peek());
      advance();
    }
    return name;
  }

  void skip_ws() {
    while (!eof() && is_space(peek())) advance();
  }

  Element parse_element() {
    Mark open_mark = mark();
    advance();  // '<'
    Element el;
    el.tag = read_name();

    // Attributes up to '>' or '/>'.
    while (true) {
      bool had_space = !eof() && is_space(peek());
      skip_ws();
      if (eof()) {
        throw ParseError("element '" + el.tag + "' is never closed (end of input)",
                         start_tag_span(open_mark));
      }
      if (peek() == '>') {
        advance();
        el.span = span_from(open_mark);
        parse_content(el);
        return el;
      }
      if (peek() == '/') {
        advance();
        if (eof() || peek() != '>') fail("expected '>' after '/'");
        advance();
        el.span = span_from(open_mark);
        return el;
      }
      if (!had_space) fail("expected whitespace before attribute in element '" + el.tag + "'");
      parse_attribute(el);
    }
  }

  // Span of a start tag whose end was never reached: point at '<name'.
  SourceSpan start_tag_span(const Mark& open_mark) const {
    return SourceSpan{open_mark.line, open_mark.column,
                      static_cast<int>(codepoints_ - open_mark.codepoints)};
  }

  void parse_attribute(Element& el) {
    Mark attr_mark = mark();
    Attribute attr;
    attr.key = read_name();
    skip_ws();
    if (eof() || peek() != '=') fail("expected '=' after attribute '" + attr.key + "'");
    advance();
    skip_ws();
    if (eof() || (peek() != '"' && peek() != '\'')) {
      fail("attribute '" + attr.key + "' value must be quoted");
    }
    char quote = peek();
    advance();
    while (true) {
      if (eof()) {
        throw ParseError("attribute '" + attr.key + "' value is never closed",
                         span_from(attr_mark));
      }
      char c = peek();
      if (c == quote) {
        advance();
        break;
      }
      if (c == '<') fail("'<' is not allowed inside an attribute value");
      if (c == '&') {
        attr.value += read_reference();
      } else {
        attr.value.push_back(c);
        advance();
      }
    }
    attr.span = span_from(attr_mark);
    for (const Attribute& existing : el.attributes) {
      if (existing.key == attr.key) {
        throw ParseError(
            "duplicate attribute '" + attr.key + "' in element '" + el.tag + "'",
            attr.span);
      }
    }
    el.attributes.push_back(std::move(attr));
  }

  void parse_content(Element& el) {
    std::string run;
    Mark run_mark = mark();
    bool run_open = false;

    auto flush_run = [&]() {
      if (!run_open) return;
      while (!run.empty() && is_space(run.back())) run.pop_back();
      long cps = 0;
      for (char c : run) {
        if (!is_continuation_byte(c)) ++cps;
      }
      el.text.push_back(TextRun{
          run, SourceSpan{run_mark.line, run_mark.column, static_cast<int>(cps)}});
      run.clear();
      run_open = false;
    };

    while (true) {
      if (eof()) {
        throw ParseError("element '" + el.tag + "' is never closed (end of input)",
                         el.span);
      }
      char c = peek();
      if (c == '<') {
        flush_run();
        if (lookahead("<!--")) {
          skip_comment();
          continue;
        }
        if (lookahead("<?")) {
          skip_processing_instruction();
          continue;
        }
        if (lookahead("<![")) {
          fail("unsupported markup '<![...' (CDATA is not accepted)");
        }
        if (lookahead("</")) {
          advance(2);
          std::string closing = read_name();
          if (closing != el.tag) {
            throw ParseError("element '" + el.tag + "' is never closed (found '</" +
                                 closing + ">')",
                             el.span);
          }
          skip_ws();
          if (eof() || peek() != '>') fail("expected '>' in closing tag");
          advance();
          return;
        }
        el.children.push_back(parse_element());
      } else if (is_space(c)) {
        if (run_open) run.push_back(c);
        advance();
      } else if (c == '&') {
        if (!run_open) {
          run_mark = mark();
          run_open = true;
        }
        run += read_reference();
      } else {
        if (!run_open) {
          run_mark = mark();
          run_open = true;
        }
        run.push_back(c);
        advance();
      }
    }
  }

  std::string read_reference() {
    Mark start = mark();
    advance();  // '&'
    std::string body;
    while (!eof() && peek() != ';') {
      if (body.size() > 10 || is_space(peek()) || peek() == '<' || peek() == '&') {
        throw ParseError("malformed character reference", span_from(start));
      }
      body.push_back(peek());
      advance();
    }
    if (eof()) throw ParseError("malformed character reference", span_from(start));
    advance();  // ';'

    if (body == "amp") return "&";
    if (body == "lt") return "<";
    if (body == "gt") return ">";
    if (body == "quot") return "\"";
    if (body == "apos") return "'";
    if (!body.empty() && body[0] == '#') {
      uint32_t cp = 0;
      bool ok = body.size() > 1;
      if (body.size() > 2 && (body[1] == 'x' || body[1] == 'X')) {
        for (size_t i = 2; i < body.size() && ok; ++i) {
          char c = body[i];
          int digit;
          if (c >= '0' && c <= '9') digit = c - '0';
          else if (c >= 'a' && c <= 'f') digit = c - 'a' + 10;
          else if (c >= 'A' && c <= 'F') digit = c - 'A' + 10;
          else { ok = false; break; }
          cp = cp * 16 + static_cast<uint32_t>(digit);
        }
        ok = ok && body.size() > 2;
      } else {
        for (size_t i = 1; i < body.size() && ok; ++i) {
          char c = body[i];
          if (c < '0' || c > '9') { ok = false; break; }
          cp = cp * 10 + static_cast<uint32_t>(c - '0');
        }
      }
      if (!ok || cp == 0 || cp > 0x10FFFF) {
        throw ParseError("malformed character reference '&" + body + ";'",
                         span_from(start));
      }
      std::string out;
      append_utf8(out, cp);
      return out;
    }
    throw ParseError("unknown entity '&" + body + ";'", span_from(start));
  }

  std::string_view text_;
  size_t pos_ = 0;
  int line_ = 1;
  int column_ = 1;
  long codepoints_ = 0;
};

}  // namespace

std::vector<Element> parse_forest(std::string_view text) {
  return Reader(text).parse_forest();
}

std::string escape_attribute(std::string_view value) {
  std::string out;
  out.reserve(value.size());
  for (char c : value) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\n': out += "&#10;"; break;
      case '\r': out += "&#13;"; break;
      case '\t': out += "&#9;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

}  // namespace xdlc::xml
