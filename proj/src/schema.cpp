#include "xdlc/schema.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

namespace xdlc {

namespace {

// The built-in table, expressed in the schema definition format so the
// format itself has a permanent in-tree exercise.
constexpr std::string_view kDefaultSchemaText = R"(# Built-in action table.
version xdl-default-1

action Add
must vessel -- Vessel that receives the reagent.
must reagent -- Name of the reagent to dispense.
may volume -- Volume of liquid, e.g. 10 mL.
may mass -- Mass to weigh out, e.g. 200 mg.
may amount -- Amount with a unit, e.g. 5 g or 10 mmol.
may dropwise -- Set to true to dispense drop by drop.
may stir -- Set to true to keep the contents agitated while dispensing.
may time -- Duration of the operation, e.g. 3 min.

action AddSolid
must vessel -- Vessel that receives the solid.
must reagent -- Name of the solid reagent.
must mass -- Mass to weigh out, e.g. 31.92 g.
may time -- Duration of the operation.

action Transfer
must from_vessel -- Vessel the material is moved out of.
must to_vessel -- Vessel the material is moved into.
may volume -- Volume to move.
may amount -- Amount to move.

action HeatChill
must vessel -- Vessel to heat or chill.
must temp -- Target temperature, e.g. 0 °C.
may time -- How long to hold the temperature.
may stir -- Set to true to keep the contents agitated.

action Stir
must vessel -- Vessel whose contents are agitated.
must time -- How long to keep going, e.g. 10 s.
may stir_speed -- Rotation speed, e.g. 600 rpm.

action Dry
must vessel -- Vessel whose contents are dried.
may time -- How long to keep drying.
may temp -- Temperature while drying.
)";

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) {
    s.remove_prefix(1);
  }
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) {
    s.remove_suffix(1);
  }
  return s;
}

bool valid_name(std::string_view s) {
  if (s.empty()) return false;
  if (!std::isalpha(static_cast<unsigned char>(s[0])) && s[0] != '_') return false;
  for (char c : s) {
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_' && c != '-' &&
        c != '.') {
      return false;
    }
  }
  return true;
}

// Splits "name -- doc" into the name token and the optional doc text.
ActionSchema::Property parse_property(std::string_view rest, int line_no) {
  ActionSchema::Property prop;
  size_t sep = rest.find(" -- ");
  if (sep == std::string_view::npos) {
    prop.name = std::string(trim(rest));
  } else {
    prop.name = std::string(trim(rest.substr(0, sep)));
    prop.doc = std::string(trim(rest.substr(sep + 4)));
  }
  if (!valid_name(prop.name)) {
    throw SchemaError("invalid property name '" + prop.name + "'", line_no);
  }
  return prop;
}

}  // namespace

bool ActionSchema::is_mandatory(std::string_view prop) const {
  for (const Property& p : mandatory) {
    if (p.name == prop) return true;
  }
  return false;
}

bool ActionSchema::is_allowed(std::string_view prop) const {
  if (is_mandatory(prop)) return true;
  for (const Property& p : optional) {
    if (p.name == prop) return true;
  }
  return false;
}

SchemaRegistry::SchemaRegistry(std::string version, std::vector<ActionSchema> actions)
    : version_(std::move(version)), actions_(std::move(actions)) {
  for (size_t i = 0; i < actions_.size(); ++i) {
    index_.emplace(actions_[i].tag, i);
  }
}

const ActionSchema* SchemaRegistry::find(std::string_view tag) const {
  auto it = index_.find(std::string(tag));
  return it == index_.end() ? nullptr : &actions_[it->second];
}

SchemaRegistry load_schema_text(std::string_view text) {
  std::string version = "unversioned";
  bool version_seen = false;
  std::vector<ActionSchema> actions;

  std::istringstream in{std::string(text)};
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = trim(raw);
    if (line.empty() || line.front() == '#') continue;

    size_t space = line.find(' ');
    std::string_view keyword = line.substr(0, space);
    std::string_view rest =
        space == std::string_view::npos ? std::string_view{} : trim(line.substr(space + 1));

    if (keyword == "version") {
      if (version_seen) throw SchemaError("duplicate 'version' directive", line_no);
      if (!actions.empty()) {
        throw SchemaError("'version' must precede the first action", line_no);
      }
      if (rest.empty()) throw SchemaError("'version' needs a value", line_no);
      version = std::string(rest);
      version_seen = true;
    } else if (keyword == "action") {
      if (!valid_name(rest)) {
        throw SchemaError("invalid action tag '" + std::string(rest) + "'", line_no);
      }
      for (const ActionSchema& a : actions) {
        if (a.tag == rest) {
          throw SchemaError("duplicate action tag '" + std::string(rest) + "'",
                            line_no);
        }
      }
      actions.push_back(ActionSchema{std::string(rest), {}, {}});
    } else if (keyword == "must" || keyword == "may") {
      if (actions.empty()) {
        throw SchemaError("'" + std::string(keyword) + "' before any 'action'",
                          line_no);
      }
      ActionSchema::Property prop = parse_property(rest, line_no);
      ActionSchema& action = actions.back();
      if (action.is_allowed(prop.name)) {
        throw SchemaError("duplicate property '" + prop.name + "' in action '" +
                              action.tag + "'",
                          line_no);
      }
      if (keyword == "must") {
        action.mandatory.push_back(std::move(prop));
      } else {
        action.optional.push_back(std::move(prop));
      }
    } else {
      throw SchemaError("unknown directive '" + std::string(keyword) + "'", line_no);
    }
  }

  return SchemaRegistry(std::move(version), std::move(actions));
}

SchemaRegistry load_schema_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SchemaError("cannot read schema file '" + path + "'", 0);
  std::ostringstream buf;
  buf << in.rdbuf();
  return load_schema_text(buf.str());
}

const SchemaRegistry& default_registry() {
  static const SchemaRegistry reg = load_schema_text(kDefaultSchemaText);
  return reg;
}

std::string dump_schema(const SchemaRegistry& reg) {
  std::ostringstream out;
  out << "version " << reg.version() << "\n";
  for (const ActionSchema& action : reg.actions()) {
    out << "\naction " << action.tag << "\n";
    for (const ActionSchema::Property& p : action.mandatory) {
      out << "must " << p.name;
      if (!p.doc.empty()) out << " -- " << p.doc;
      out << "\n";
    }
    for (const ActionSchema::Property& p : action.optional) {
      out << "may " << p.name;
      if (!p.doc.empty()) out << " -- " << p.doc;
      out << "\n";
    }
  }
  return out.str();
}

std::string render_language_description(const SchemaRegistry& reg) {
  std::ostringstream out;
  out << "XDL is an XML language for chemistry protocols.\n"
         "A document has the root element <XDL> containing three sections, in "
         "order:\n"
         "  <Hardware> declares the available vessels, one <Component id=\"...\"/> "
         "per vessel.\n"
         "  <Reagents> declares the chemicals, one <Reagent name=\"...\"/> per "
         "chemical.\n"
         "  <Procedure> lists the protocol steps in chronological order.\n"
         "Each step is a single self-closing element: the tag is the action name "
         "and the\n"
         "attributes are the action's properties, as in <ActionName "
         "property=\"value\"/>.\n"
         "Mandatory properties must always be present; optional properties may be "
         "omitted.\n";

  if (reg.actions().empty()) return out.str();

  out << "\nThe available actions and their properties are:\n";
  for (const ActionSchema& action : reg.actions()) {
    out << "\n" << action.tag << ": mandatory: ";
    for (size_t i = 0; i < action.mandatory.size(); ++i) {
      if (i) out << ", ";
      out << action.mandatory[i].name;
    }
    if (action.mandatory.empty()) out << "(none)";
    out << "; optional: ";
    for (size_t i = 0; i < action.optional.size(); ++i) {
      if (i) out << ", ";
      out << action.optional[i].name;
    }
    if (action.optional.empty()) out << "(none)";
    out << "\n";
    for (const ActionSchema::Property& p : action.mandatory) {
      out << "  - " << p.name << (p.doc.empty() ? "" : ": " + p.doc) << "\n";
    }
    for (const ActionSchema::Property& p : action.optional) {
      out << "  - " << p.name << (p.doc.empty() ? "" : ": " + p.doc) << "\n";
    }
  }
  return out.str();
}

}  // namespace xdlc
