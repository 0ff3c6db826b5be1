#include <doctest.h>

#include "support/doc_gen.hpp"
#include "support/test_util.hpp"
#include "xdlc/xdl_model.hpp"

using namespace xdlc;

TEST_CASE("fragment parse keeps step order and attributes") {
  std::string text = testutil::read_fixture("plans/mcpba.xdl");
  ParseResult result = parse_xdl(text);
  REQUIRE(result.ok());
  const XdlDocument& doc = result.plan().doc;

  CHECK(result.plan().shape == DocumentShape::Fragment);
  CHECK(doc.hardware.empty());
  CHECK(doc.reagents.empty());
  REQUIRE(doc.procedure.size() == 6);
  CHECK(doc.procedure[0].tag == "Add");
  CHECK(doc.procedure[5].tag == "Transfer");
  CHECK(*doc.procedure[5].attribute("from_vessel") == "V2");
  CHECK(*doc.procedure[5].attribute("to_vessel") == "V1");
  CHECK(*doc.procedure[2].attribute("temp") == "0 °C");
  CHECK(*doc.procedure[3].attribute("reagent") ==
        "5-chloro-10-oxa-3-thia-tricyclo[5,2,1,0*1,5*]dec-8-ene");

  // Order preservation: spans advance monotonically with the source.
  for (size_t i = 1; i < doc.procedure.size(); ++i) {
    CHECK(doc.procedure[i - 1].span.line < doc.procedure[i].span.line);
  }
}

TEST_CASE("empty input is a parse failure") {
  ParseResult result = parse_xdl("");
  REQUIRE_FALSE(result.ok());
  CHECK(result.error().message.find("no XML") != std::string::npos);
}

TEST_CASE("unclosed element fails at the opening tag") {
  // Confirmed ill-formed with a conformant XML parser; the span contract
  // points at the element that never closes.
  std::string text =
      "<XDL><Hardware/><Reagents/><Procedure>"
      "<Add vessel=\"V1\" reagent=\"water\" volume=\"10 mL\"></Procedure></XDL>";
  ParseResult result = parse_xdl(text);
  REQUIRE_FALSE(result.ok());
  REQUIRE(result.error().span.has_value());
  CHECK(result.error().span->line == 1);
  CHECK(result.error().span->column == 39);  // the '<' of <Add
  CHECK(result.error().message.find("Add") != std::string::npos);
}

TEST_CASE("xml failure modes") {
  CHECK_FALSE(parse_xdl("<Add vessel=V1/>").ok());            // unquoted value
  CHECK_FALSE(parse_xdl("<Add vessel=\"V1\" vessel=\"V2\"/>").ok());  // dup attr
  CHECK_FALSE(parse_xdl("<Add a=\"1\"></Stir>").ok());        // mismatched close
  CHECK_FALSE(parse_xdl("just words").ok());                  // no elements
  CHECK_FALSE(parse_xdl("hello <Add a=\"1\"/>").ok());        // stray top text
  CHECK_FALSE(parse_xdl("<XDL/><Add a=\"1\"/>").ok());        // root + sibling
  CHECK_FALSE(parse_xdl("<Add a=\"1\" a2=\"&unknown;\"/>").ok());
}

TEST_CASE("parse failure spans stay inside the input") {
  const char* bad[] = {
      "<Add vessel=V1/>",
      "<Add vessel=\"V1\" vessel=\"V2\"/>",
      "<Add a=\"1\"></Stir>",
      "<XDL><Procedure><Add a=\"1\"></Procedure></XDL>",
      "<Add a=\"unterminated/>",
  };
  for (const char* text : bad) {
    ParseResult result = parse_xdl(text);
    REQUIRE_FALSE(result.ok());
    if (result.error().span) {
      int lines = 1;
      for (const char* p = text; *p; ++p) lines += *p == '\n';
      CHECK(result.error().span->line >= 1);
      CHECK(result.error().span->line <= lines);
      CHECK(result.error().span->column >= 1);
    }
  }
}

TEST_CASE("full document parse fills sections") {
  std::string text = R"(<XDL>
  <Hardware>
    <Component id="V1"/>
    <Component id="V2"/>
  </Hardware>
  <Reagents>
    <Reagent name="water"/>
  </Reagents>
  <Procedure>
    <Add vessel="V1" reagent="water" volume="10 mL"/>
  </Procedure>
</XDL>)";
  ParseResult result = parse_xdl(text);
  REQUIRE(result.ok());
  const XdlDocument& doc = result.plan().doc;
  CHECK(result.plan().shape == DocumentShape::FullDocument);
  CHECK(doc.hardware == std::vector<std::string>{"V1", "V2"});
  CHECK(doc.reagents == std::vector<std::string>{"water"});
  REQUIRE(doc.procedure.size() == 1);
  CHECK(doc.procedure[0].tag == "Add");
}

TEST_CASE("synthesis wrapper is accepted") {
  std::string text =
      "<XDL><Synthesis><Hardware><Component id=\"V1\"/></Hardware>"
      "<Reagents/><Procedure><Dry vessel=\"V1\"/></Procedure></Synthesis></XDL>";
  ParseResult result = parse_xdl(text);
  REQUIRE(result.ok());
  CHECK(result.plan().doc.hardware == std::vector<std::string>{"V1"});
  REQUIRE(result.plan().doc.procedure.size() == 1);
  CHECK(result.plan().doc.procedure[0].tag == "Dry");
}

TEST_CASE("serialize emits the canonical empty document") {
  XdlDocument doc;
  CHECK(serialize(doc) == "<XDL>\n  <Hardware/>\n  <Reagents/>\n  <Procedure/>\n</XDL>");
}

TEST_CASE("one-step document round-trips") {
  XdlDocument doc;
  doc.procedure.push_back(Step{
      "Add", {{"vessel", "V1"}, {"reagent", "water"}, {"volume", "10 mL"}}, {}});
  ParseResult reparsed = parse_xdl(serialize(doc));
  REQUIRE(reparsed.ok());
  CHECK(reparsed.plan().doc == doc);
}

TEST_CASE("four-step plan survives serialization") {
  std::string text = testutil::read_fixture("plans/lornithine.xdl");
  ParseResult first = parse_xdl(text);
  REQUIRE(first.ok());

  ParseResult second = parse_xdl(serialize(first.plan().doc));
  REQUIRE(second.ok());
  const XdlDocument& doc = second.plan().doc;
  REQUIRE(doc.procedure.size() == 4);
  std::vector<std::string> reagents;
  for (const Step& step : doc.procedure) {
    CHECK(step.tag == "Add");
    reagents.push_back(*step.attribute("reagent"));
  }
  CHECK(reagents == std::vector<std::string>{"L-Ornithine", "KOH", "Water", "THF"});

  // Declared reagent names survive the same way.
  XdlDocument declared = first.plan().doc;
  declared.reagents = reagents;
  declared.hardware = {"V1"};
  ParseResult third = parse_xdl(serialize(declared));
  REQUIRE(third.ok());
  CHECK(third.plan().doc.reagents == reagents);
}

TEST_CASE("attribute values keep unicode and entities") {
  XdlDocument doc;
  doc.reagents = {"5-chloro-10-oxa-3-thia-tricyclo[5,2,1,0*1,5*]dec-8-ene"};
  doc.procedure.push_back(Step{
      "HeatChill",
      {{"vessel", "V1"}, {"temp", "0 °C"}, {"time", "a & b <c> \"d\"\nnext"}},
      {}});
  ParseResult reparsed = parse_xdl(serialize(doc));
  REQUIRE(reparsed.ok());
  CHECK(reparsed.plan().doc == doc);
}

TEST_CASE("empty plan detection") {
  CHECK(is_empty_plan(XdlDocument{}));

  ParseResult mcpba = parse_xdl(testutil::read_fixture("plans/mcpba.xdl"));
  REQUIRE(mcpba.ok());
  CHECK_FALSE(is_empty_plan(mcpba.plan().doc));

  ParseResult placeholder = parse_xdl("<Procedure/>");
  REQUIRE(placeholder.ok());
  REQUIRE(placeholder.plan().doc.procedure.size() == 1);
  CHECK(is_empty_plan(placeholder.plan().doc));

  ParseResult empty_doc = parse_xdl("<XDL><Hardware/><Reagents/><Procedure/></XDL>");
  REQUIRE(empty_doc.ok());
  CHECK(is_empty_plan(empty_doc.plan().doc));

  ParseResult bare_action = parse_xdl("<Add/>");
  REQUIRE(bare_action.ok());
  CHECK_FALSE(is_empty_plan(bare_action.plan().doc));
}

TEST_CASE("randomized round-trip over the default schema") {
  testutil::DocumentGenerator gen(20240817);
  for (int i = 0; i < 1000; ++i) {
    XdlDocument doc = gen.generate();
    std::string text = serialize(doc);
    ParseResult reparsed = parse_xdl(text);
    REQUIRE_MESSAGE(reparsed.ok(), "case ", i, ": ", reparsed.error().message,
                    "\n", text);
    REQUIRE_MESSAGE(reparsed.plan().doc == doc, "case ", i, " differs:\n", text);
  }
}
