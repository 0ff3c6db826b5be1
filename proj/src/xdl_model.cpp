#include "xdlc/xdl_model.hpp"

#include <sstream>

namespace xdlc {

namespace {

constexpr std::string_view kRootTag = "XDL";
constexpr std::string_view kSynthesisTag = "Synthesis";
constexpr std::string_view kHardwareTag = "Hardware";
constexpr std::string_view kReagentsTag = "Reagents";
constexpr std::string_view kProcedureTag = "Procedure";
constexpr std::string_view kComponentTag = "Component";
constexpr std::string_view kReagentTag = "Reagent";

Step step_from_element(const xml::Element& el) {
  Step step;
  step.tag = el.tag;
  step.span = el.span;
  step.attributes.reserve(el.attributes.size());
  for (const xml::Attribute& a : el.attributes) {
    step.attributes.push_back(Step::Attr{a.key, a.value});
  }
  return step;
}

// The sections live either directly under <XDL> or under a single
// <Synthesis> child wrapping them.
const std::vector<xml::Element>& section_container(const xml::Element& root) {
  if (root.children.size() == 1 && root.children[0].tag == kSynthesisTag) {
    return root.children[0].children;
  }
  return root.children;
}

void collect_document(const xml::Element& root, XdlDocument& doc) {
  for (const xml::Element& section : section_container(root)) {
    if (section.tag == kHardwareTag) {
      for (const xml::Element& item : section.children) {
        if (item.tag != kComponentTag) continue;
        for (const xml::Attribute& a : item.attributes) {
          if (a.key == "id") doc.hardware.push_back(a.value);
        }
      }
    } else if (section.tag == kReagentsTag) {
      for (const xml::Element& item : section.children) {
        if (item.tag != kReagentTag) continue;
        for (const xml::Attribute& a : item.attributes) {
          if (a.key == "name") doc.reagents.push_back(a.value);
        }
      }
    } else if (section.tag == kProcedureTag) {
      for (const xml::Element& step : section.children) {
        doc.procedure.push_back(step_from_element(step));
      }
    }
    // Unknown sections are not a parse concern; the verifier reports them.
  }
}

}  // namespace

const std::string* Step::attribute(std::string_view key) const {
  for (const Attr& a : attributes) {
    if (a.key == key) return &a.value;
  }
  return nullptr;
}

ParseResult ParseResult::success(ParsedPlan plan) {
  ParseResult r;
  r.plan_ = std::move(plan);
  return r;
}

ParseResult ParseResult::failure(ParseFailure f) {
  ParseResult r;
  r.failure_ = std::move(f);
  return r;
}

ParseResult parse_xdl(std::string_view text) {
  std::vector<xml::Element> forest;
  try {
    forest = xml::parse_forest(text);
  } catch (const xml::ParseError& e) {
    return ParseResult::failure(ParseFailure{e.what(), e.span()});
  }

  ParsedPlan plan;
  if (forest.front().tag == kRootTag) {
    if (forest.size() > 1) {
      return ParseResult::failure(ParseFailure{
          "multiple root elements next to '<XDL>'", forest[1].span});
    }
    plan.shape = DocumentShape::FullDocument;
    collect_document(forest.front(), plan.doc);
  } else {
    plan.shape = DocumentShape::Fragment;
    for (const xml::Element& el : forest) {
      plan.doc.procedure.push_back(step_from_element(el));
    }
  }
  plan.forest = std::move(forest);
  return ParseResult::success(std::move(plan));
}

std::string serialize(const XdlDocument& doc) {
  std::ostringstream out;
  out << "<XDL>\n";

  if (doc.hardware.empty()) {
    out << "  <Hardware/>\n";
  } else {
    out << "  <Hardware>\n";
    for (const std::string& id : doc.hardware) {
      out << "    <Component id=\"" << xml::escape_attribute(id) << "\"/>\n";
    }
    out << "  </Hardware>\n";
  }

  if (doc.reagents.empty()) {
    out << "  <Reagents/>\n";
  } else {
    out << "  <Reagents>\n";
    for (const std::string& name : doc.reagents) {
      out << "    <Reagent name=\"" << xml::escape_attribute(name) << "\"/>\n";
    }
    out << "  </Reagents>\n";
  }

  if (doc.procedure.empty()) {
    out << "  <Procedure/>\n";
  } else {
    out << "  <Procedure>\n";
    for (const Step& step : doc.procedure) {
      out << "    <" << step.tag;
      for (const Step::Attr& a : step.attributes) {
        out << ' ' << a.key << "=\"" << xml::escape_attribute(a.value) << '"';
      }
      out << "/>\n";
    }
    out << "  </Procedure>\n";
  }

  out << "</XDL>";
  return out.str();
}

bool is_empty_plan(const XdlDocument& doc) {
  for (const Step& step : doc.procedure) {
    if (!step.attributes.empty() || !is_section_tag(step.tag)) return false;
  }
  return true;
}

bool is_section_tag(std::string_view tag) {
  return tag == kRootTag || tag == kSynthesisTag || tag == kHardwareTag ||
         tag == kReagentsTag || tag == kProcedureTag;
}

bool is_structural_tag(std::string_view tag) {
  return is_section_tag(tag) || tag == kComponentTag || tag == kReagentTag;
}

}  // namespace xdlc
