#include <doctest.h>

#include <cctype>
#include <set>

#include "support/test_util.hpp"
#include "xdlc/schema.hpp"

using namespace xdlc;

namespace {

std::set<std::string> names(const std::vector<ActionSchema::Property>& props) {
  std::set<std::string> out;
  for (const auto& p : props) out.insert(p.name);
  return out;
}

// Counts occurrences of `word` as a whole token (case-sensitive; token chars
// are alphanumerics and '_').
int token_count(const std::string& text, const std::string& word) {
  int count = 0;
  size_t pos = 0;
  auto is_token_char = [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
  };
  while ((pos = text.find(word, pos)) != std::string::npos) {
    bool left_ok = pos == 0 || !is_token_char(text[pos - 1]);
    size_t end = pos + word.size();
    bool right_ok = end >= text.size() || !is_token_char(text[end]);
    if (left_ok && right_ok) ++count;
    pos = end;
  }
  return count;
}

}  // namespace

TEST_CASE("default registry holds exactly the six built-in actions") {
  const SchemaRegistry& reg = default_registry();
  std::set<std::string> tags;
  for (const ActionSchema& a : reg.actions()) tags.insert(a.tag);
  CHECK(tags == std::set<std::string>{"Add", "AddSolid", "Transfer", "HeatChill",
                                      "Stir", "Dry"});

  const ActionSchema* add = reg.find("Add");
  REQUIRE(add);
  CHECK(names(add->mandatory) == std::set<std::string>{"vessel", "reagent"});
  CHECK(names(add->optional) == std::set<std::string>{"volume", "mass", "amount",
                                                      "dropwise", "stir", "time"});

  const ActionSchema* add_solid = reg.find("AddSolid");
  REQUIRE(add_solid);
  CHECK(names(add_solid->mandatory) ==
        std::set<std::string>{"vessel", "reagent", "mass"});
  CHECK(names(add_solid->optional) == std::set<std::string>{"time"});

  const ActionSchema* transfer = reg.find("Transfer");
  REQUIRE(transfer);
  CHECK(names(transfer->mandatory) ==
        std::set<std::string>{"from_vessel", "to_vessel"});
  CHECK(names(transfer->optional) == std::set<std::string>{"volume", "amount"});

  const ActionSchema* heat_chill = reg.find("HeatChill");
  REQUIRE(heat_chill);
  CHECK(names(heat_chill->mandatory) == std::set<std::string>{"vessel", "temp"});
  CHECK(names(heat_chill->optional) == std::set<std::string>{"time", "stir"});

  const ActionSchema* stir = reg.find("Stir");
  REQUIRE(stir);
  CHECK(names(stir->mandatory) == std::set<std::string>{"vessel", "time"});
  CHECK(names(stir->optional) == std::set<std::string>{"stir_speed"});

  const ActionSchema* dry = reg.find("Dry");
  REQUIRE(dry);
  CHECK(names(dry->mandatory) == std::set<std::string>{"vessel"});
  CHECK(names(dry->optional) == std::set<std::string>{"time", "temp"});
}

TEST_CASE("lookup is exact and case-sensitive") {
  const SchemaRegistry& reg = default_registry();
  CHECK(reg.find("HeatChill") != nullptr);
  CHECK(reg.find("heatchill") == nullptr);
  CHECK(reg.find("Evaporate") == nullptr);
  CHECK(reg.find("") == nullptr);
}

TEST_CASE("definitions read back") {
  SchemaRegistry reg = load_schema_text(
      "action Add\nmust vessel -- target\nmust reagent\nmay volume\n");
  const ActionSchema* add = reg.find("Add");
  REQUIRE(add);
  CHECK(names(add->mandatory) == std::set<std::string>{"vessel", "reagent"});
  CHECK(names(add->optional) == std::set<std::string>{"volume"});
  CHECK(add->mandatory[0].doc == "target");
  CHECK(add->mandatory[1].doc.empty());
  CHECK(reg.version() == "unversioned");
}

TEST_CASE("schema file fixture loads") {
  SchemaRegistry reg =
      load_schema_file(testutil::fixture_path("schemas/pipetting.schema"));
  CHECK(reg.version() == "pipetting-v1");
  CHECK(reg.actions().size() == 2);
  REQUIRE(reg.find("Aspirate"));
  CHECK(reg.find("Aspirate")->mandatory.size() == 2);
}

TEST_CASE("schema errors carry line numbers") {
  CHECK_THROWS_WITH_AS(load_schema_text("action Add\nmust vessel\naction Add\n"),
                       doctest::Contains("duplicate action tag 'Add'"), SchemaError);

  try {
    load_schema_text("action Add\nmust vessel\naction Add\n");
    FAIL("expected SchemaError");
  } catch (const SchemaError& e) {
    CHECK(e.line() == 3);
  }

  CHECK_THROWS_AS(load_schema_text("must vessel -- no action\n"), SchemaError);
  CHECK_THROWS_AS(load_schema_text("action Add\nmust vessel\nmay vessel\n"),
                  SchemaError);
  CHECK_THROWS_AS(load_schema_text("bogus directive\n"), SchemaError);
  CHECK_THROWS_AS(load_schema_text("action Add\nversion too-late\n"), SchemaError);
  CHECK_THROWS_AS(load_schema_text("action 9bad\n"), SchemaError);
  CHECK_THROWS_AS(load_schema_file("does-not-exist.schema"), SchemaError);
}

TEST_CASE("comments and blank lines are ignored") {
  SchemaRegistry reg = load_schema_text(
      "# heading\n\nversion v2\n\naction Wash\nmust vessel -- what to rinse\n\n"
      "# trailing note\n");
  CHECK(reg.version() == "v2");
  CHECK(reg.actions().size() == 1);
}

TEST_CASE("rendered description lists the table") {
  std::string text = render_language_description(default_registry());
  CHECK(text.find("Add: mandatory: vessel, reagent") != std::string::npos);
  CHECK(text.find("optional: volume, mass, amount, dropwise, stir, time") !=
        std::string::npos);
  CHECK(text.find("<XDL>") != std::string::npos);

  // Deterministic output.
  CHECK(text == render_language_description(default_registry()));

  // Every tag is mentioned exactly once.
  for (const ActionSchema& action : default_registry().actions()) {
    CHECK_MESSAGE(token_count(text, action.tag) == 1, "tag ", action.tag);
  }
}

TEST_CASE("empty registry renders only the structure preamble") {
  SchemaRegistry reg = load_schema_text("");
  std::string text = render_language_description(reg);
  CHECK(text.find("<XDL>") != std::string::npos);
  CHECK(text.find("mandatory:") == std::string::npos);
}

TEST_CASE("dump and reload reproduces a registry") {
  auto same = [](const SchemaRegistry& a, const SchemaRegistry& b) {
    CHECK(a.version() == b.version());
    REQUIRE(a.actions().size() == b.actions().size());
    for (size_t i = 0; i < a.actions().size(); ++i) {
      const ActionSchema& x = a.actions()[i];
      const ActionSchema& y = b.actions()[i];
      CHECK(x.tag == y.tag);
      REQUIRE(x.mandatory.size() == y.mandatory.size());
      REQUIRE(x.optional.size() == y.optional.size());
      for (size_t p = 0; p < x.mandatory.size(); ++p) {
        CHECK(x.mandatory[p].name == y.mandatory[p].name);
        CHECK(x.mandatory[p].doc == y.mandatory[p].doc);
      }
      for (size_t p = 0; p < x.optional.size(); ++p) {
        CHECK(x.optional[p].name == y.optional[p].name);
        CHECK(x.optional[p].doc == y.optional[p].doc);
      }
    }
  };

  same(default_registry(), load_schema_text(dump_schema(default_registry())));

  SchemaRegistry custom =
      load_schema_file(testutil::fixture_path("schemas/pipetting.schema"));
  same(custom, load_schema_text(dump_schema(custom)));
}
