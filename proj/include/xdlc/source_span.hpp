#pragma once

namespace xdlc {

// Position of a construct in the text it was parsed from. Lines and columns
// are 1-based; columns and lengths count Unicode code points, not bytes.
struct SourceSpan {
  int line = 1;
  int column = 1;
  int length = 0;

  bool operator==(const SourceSpan&) const = default;
};

}  // namespace xdlc
