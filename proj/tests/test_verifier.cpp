#include <doctest.h>

#include <algorithm>

#include "support/corpus.hpp"
#include "support/doc_gen.hpp"
#include "support/test_util.hpp"
#include "xdlc/verifier.hpp"

using namespace xdlc;

namespace {

const SchemaRegistry& reg() { return default_registry(); }

VerificationReport check(const std::string& text,
                         std::optional<EnvironmentConstraints> constraints = {},
                         bool strict = false) {
  return verify(text, reg(), constraints, strict);
}

int count(const VerificationReport& report, ErrorCategory category) {
  int n = 0;
  for (const auto& e : report.errors) n += e.category == category;
  return n;
}

}  // namespace

TEST_CASE("six-step plan verifies clean, with and without constraints") {
  std::string text = testutil::read_fixture("plans/mcpba.xdl");

  VerificationReport bare = check(text);
  CHECK(bare.clean());
  CHECK_FALSE(bare.constraints_applied);
  CHECK(bare.checked_against == "xdl-default-1");

  EnvironmentConstraints constraints;
  constraints.hardware = {"V1", "V2"};
  constraints.reagents = {"m-CPBA", "dichloromethane",
                          "5-chloro-10-oxa-3-thia-tricyclo[5,2,1,0*1,5*]dec-8-ene"};
  VerificationReport constrained = check(text, constraints);
  CHECK(constrained.clean());
  CHECK(constrained.constraints_applied);
}

TEST_CASE("four-step plan verifies clean without constraints") {
  CHECK(check(testutil::read_fixture("plans/lornithine.xdl")).clean());
}

TEST_CASE("extra property is the only finding without constraints") {
  std::string text = testutil::read_fixture("plans/synthreader_add.xdl");
  VerificationReport report = check(text);
  REQUIRE(report.errors.size() == 1);
  CHECK(report.errors[0].category == ErrorCategory::PropertyNotAllowed);
  CHECK(report.errors[0].message.find("speed") != std::string::npos);

  // Constraints that exclude the vessel and reagent surface two more.
  EnvironmentConstraints constraints;
  constraints.hardware = {"beaker"};
  constraints.reagents = {"water"};
  VerificationReport constrained = check(text, constraints);
  CHECK(constrained.errors.size() == 3);
  CHECK(count(constrained, ErrorCategory::PropertyNotAllowed) == 1);
  CHECK(count(constrained, ErrorCategory::UndefinedResource) == 2);
}

TEST_CASE("unparseable text reports exactly one XmlParse error") {
  VerificationReport report = check("");
  REQUIRE(report.errors.size() == 1);
  CHECK(report.errors[0].category == ErrorCategory::XmlParse);

  VerificationReport garbled = check("<Add vessel=\"V1\" reagent=\"x\"");
  REQUIRE(garbled.errors.size() == 1);
  CHECK(garbled.errors[0].category == ErrorCategory::XmlParse);
}

TEST_CASE("conditional values: lenient by default, strict adds value findings") {
  std::string text = testutil::read_fixture("plans/heatchill_conditional.xdl");

  VerificationReport lenient = check(text);
  REQUIRE(lenient.errors.size() == 1);
  CHECK(lenient.errors[0].category == ErrorCategory::MissingMandatoryProperty);
  CHECK(lenient.errors[0].message ==
        "action 'HeatChill' is missing mandatory property 'vessel'");

  VerificationReport strict = check(text, {}, true);
  CHECK(strict.errors.size() == 3);
  CHECK(count(strict, ErrorCategory::MissingMandatoryProperty) == 1);
  CHECK(count(strict, ErrorCategory::InvalidPropertyValue) == 2);
}

TEST_CASE("formatted lines carry category, message and position") {
  VerificationReport report =
      check(testutil::read_fixture("plans/heatchill_conditional.xdl"));
  std::vector<std::string> lines = format_errors(report);
  REQUIRE(lines.size() == 1);
  CHECK(lines[0] ==
        "MissingMandatoryProperty: action 'HeatChill' is missing mandatory "
        "property 'vessel' (line 1, col 1)");

  CHECK(format_errors(VerificationReport{}).empty());

  VerificationReport three = check("<Transfer volume=\"5 mL\"/>\n<Mix a=\"1\"/>");
  CHECK(three.errors.size() == 3);
  CHECK(format_errors(three).size() == 3);
}

TEST_CASE("wrong-tag findings cover structural misuse") {
  // Unknown section element.
  VerificationReport meta = check(
      "<XDL><Hardware/><Reagents/><Metadata/>"
      "<Procedure><Add vessel=\"V1\" reagent=\"x\"/></Procedure></XDL>");
  REQUIRE(meta.errors.size() == 1);
  CHECK(meta.errors[0].category == ErrorCategory::WrongTag);
  CHECK(meta.errors[0].message.find("Metadata") != std::string::npos);

  // Action element outside <Procedure>.
  VerificationReport outside = check(
      "<XDL><Hardware/><Reagents/><Add vessel=\"V1\" reagent=\"x\"/>"
      "<Procedure><Stir vessel=\"V1\" time=\"1 min\"/></Procedure></XDL>");
  REQUIRE(outside.errors.size() == 1);
  CHECK(outside.errors[0].category == ErrorCategory::WrongTag);

  // Declaration element inside <Procedure>; nested element inside a step.
  CHECK(count(check("<XDL><Hardware/><Reagents/><Procedure><Component id=\"V2\"/>"
                    "<Add vessel=\"V1\" reagent=\"x\"/></Procedure></XDL>"),
              ErrorCategory::WrongTag) == 1);
  CHECK(count(check("<Add vessel=\"V1\" reagent=\"x\"><Stir vessel=\"V1\" "
                    "time=\"1 s\"/></Add>"),
              ErrorCategory::WrongTag) == 1);

  // Section element with content in a step position.
  VerificationReport section_as_step =
      check("<Hardware><Component id=\"V1\"/></Hardware>");
  CHECK(count(section_as_step, ErrorCategory::WrongTag) == 1);

  // Duplicate section.
  CHECK(count(check("<XDL><Hardware/><Hardware/><Reagents/>"
                    "<Procedure><Dry vessel=\"V1\"/></Procedure></XDL>"),
              ErrorCategory::WrongTag) == 1);

  // Stray prose inside a section.
  VerificationReport prose =
      check("<XDL><Hardware/><Reagents/><Procedure>do the thing"
            "<Dry vessel=\"V1\"/></Procedure></XDL>");
  REQUIRE(count(prose, ErrorCategory::WrongTag) == 1);
  CHECK(prose.errors[0].message.find("do the thing") != std::string::npos);
}

TEST_CASE("unknown actions") {
  VerificationReport fragment = check("<Mix vessel=\"V1\" time=\"1 min\"/>");
  REQUIRE(fragment.errors.size() == 1);
  CHECK(fragment.errors[0].category == ErrorCategory::ActionDoesNotExist);
  CHECK(fragment.errors[0].message.find("'Mix'") != std::string::npos);

  // Unknown tag skips property checks; only the action finding remains.
  VerificationReport no_props = check("<Mix bogus_prop=\"1\"/>");
  REQUIRE(no_props.errors.size() == 1);
  CHECK(no_props.errors[0].category == ErrorCategory::ActionDoesNotExist);
}

TEST_CASE("case sensitivity: lowercase tag is not the declared action") {
  VerificationReport report = check("<add vessel=\"V1\" reagent=\"x\"/>");
  REQUIRE(report.errors.size() == 1);
  CHECK(report.errors[0].category == ErrorCategory::ActionDoesNotExist);
}

TEST_CASE("resource analysis against document declarations") {
  std::string text = testutil::read_fixture("corpus/undefined_resource_doc.xdl");
  VerificationReport report = check(text);
  REQUIRE(report.errors.size() == 1);
  CHECK(report.errors[0].category == ErrorCategory::UndefinedResource);
  CHECK(report.errors[0].message.find("'V2'") != std::string::npos);
}

TEST_CASE("constraint scenario: unavailable vessel, then none") {
  std::string text = "<Stir vessel=\"flask\" time=\"5 min\"/>";

  EnvironmentConstraints constraints;
  constraints.hardware = {"beaker"};
  VerificationReport constrained = check(text, constraints);
  REQUIRE(constrained.errors.size() == 1);
  CHECK(constrained.errors[0].category == ErrorCategory::UndefinedResource);
  CHECK(constrained.errors[0].message.find("'flask'") != std::string::npos);

  CHECK(check(text).clean());
}

TEST_CASE("declared items outside the environment are reported") {
  std::string text =
      "<XDL><Hardware><Component id=\"flask\"/></Hardware>"
      "<Reagents><Reagent name=\"water\"/></Reagents>"
      "<Procedure><Stir vessel=\"flask\" time=\"1 min\"/></Procedure></XDL>";

  EnvironmentConstraints constraints;
  constraints.hardware = {"beaker"};
  constraints.reagents = {"water"};
  VerificationReport report = check(text, constraints);
  // The declaration is flagged once; the reference resolves against the
  // declaration itself.
  REQUIRE(report.errors.size() == 1);
  CHECK(report.errors[0].category == ErrorCategory::UndefinedResource);
  CHECK(report.errors[0].message.find("'flask'") != std::string::npos);
}

TEST_CASE("constraint monotonicity: adding items never adds findings") {
  std::string text = testutil::read_fixture("plans/mcpba.xdl");
  EnvironmentConstraints constraints;
  constraints.hardware = {"V1"};
  int previous = count(check(text, constraints), ErrorCategory::UndefinedResource);
  const char* additions_hw[] = {"V2", "V3"};
  for (const char* item : additions_hw) {
    constraints.hardware.insert(item);
    int now = count(check(text, constraints), ErrorCategory::UndefinedResource);
    CHECK(now <= previous);
    previous = now;
  }
  const char* additions_re[] = {"m-CPBA", "dichloromethane",
                                "5-chloro-10-oxa-3-thia-tricyclo[5,2,1,0*1,5*]dec-8-ene"};
  for (const char* item : additions_re) {
    constraints.reagents.insert(item);
    int now = count(check(text, constraints), ErrorCategory::UndefinedResource);
    CHECK(now <= previous);
    previous = now;
  }
  CHECK(previous == 0);
}

TEST_CASE("resource names are trimmed, not case-folded") {
  EnvironmentConstraints constraints;
  constraints.hardware = {"beaker"};
  CHECK(check("<Dry vessel=\" beaker \"/>", constraints).clean());
  CHECK(count(check("<Dry vessel=\"Beaker\"/>", constraints),
              ErrorCategory::UndefinedResource) == 1);
}

TEST_CASE("empty plans") {
  VerificationReport doc = check("<XDL><Hardware/><Reagents/><Procedure/></XDL>");
  REQUIRE(doc.errors.size() == 1);
  CHECK(doc.errors[0].category == ErrorCategory::EmptyPlan);
  CHECK_FALSE(doc.errors[0].span.has_value());

  VerificationReport placeholder = check("<Procedure/>");
  REQUIRE(placeholder.errors.size() == 1);
  CHECK(placeholder.errors[0].category == ErrorCategory::EmptyPlan);
}

TEST_CASE("strict quantity grammar") {
  auto strict_count = [&](const std::string& value) {
    return count(check("<Dry vessel=\"V1\" time=\"" + value + "\"/>", {}, true),
                 ErrorCategory::InvalidPropertyValue);
  };
  CHECK(strict_count("10 mL") == 0);
  CHECK(strict_count("40.0") == 0);
  CHECK(strict_count("0 °C") == 0);
  CHECK(strict_count("-78 °C") == 0);
  CHECK(strict_count("31.92 g") == 0);
  CHECK(strict_count("100C") == 0);
  CHECK(strict_count("boiling point") == 1);
  CHECK(strict_count("until it becomes white") == 1);
  CHECK(strict_count("") == 1);
  CHECK(strict_count("ten") == 1);
}

TEST_CASE("report ordering is by position, then category") {
  std::string text =
      "<Transfer volume=\"5 mL\"/>\n"
      "<Add vessel=\"V1\" reagent=\"x\" speed=\"40.0\"/>\n"
      "<Mix vessel=\"V1\"/>";
  VerificationReport report = check(text);
  REQUIRE(report.errors.size() == 4);
  CHECK(report.errors[0].message.find("from_vessel") != std::string::npos);
  CHECK(report.errors[1].message.find("to_vessel") != std::string::npos);
  CHECK(report.errors[2].category == ErrorCategory::PropertyNotAllowed);
  CHECK(report.errors[3].category == ErrorCategory::ActionDoesNotExist);
  REQUIRE(report.errors[2].span.has_value());
  CHECK(report.errors[2].span->line == 2);

  // Same inputs, same report.
  VerificationReport again = check(text);
  REQUIRE(again.errors.size() == report.errors.size());
  for (size_t i = 0; i < report.errors.size(); ++i) {
    CHECK(again.errors[i].category == report.errors[i].category);
    CHECK(again.errors[i].message == report.errors[i].message);
  }
}

TEST_CASE("category histogram") {
  CHECK(diff_categories(VerificationReport{}).empty());

  VerificationReport report;
  report.errors = {
      {ErrorCategory::MissingMandatoryProperty, "m", {}},
      {ErrorCategory::PropertyNotAllowed, "p1", {}},
      {ErrorCategory::PropertyNotAllowed, "p2", {}},
  };
  auto counts = diff_categories(report);
  CHECK(counts.size() == 2);
  CHECK(counts[ErrorCategory::MissingMandatoryProperty] == 1);
  CHECK(counts[ErrorCategory::PropertyNotAllowed] == 2);
}

TEST_CASE("labeled corpus produces exactly the labeled categories") {
  auto cases = testutil::load_corpus();
  REQUIRE(cases.size() >= 12);

  std::map<ErrorCategory, int> totals;
  std::map<ErrorCategory, int> expected_totals;
  for (const auto& c : cases) {
    VerificationReport report = verify(c.text, reg(), c.constraints, c.strict);
    auto actual = diff_categories(report);
    CHECK_MESSAGE(actual == c.expected, "file ", c.file);
    for (const auto& [category, n] : actual) totals[category] += n;
    for (const auto& [category, n] : c.expected) expected_totals[category] += n;
  }
  CHECK(totals == expected_totals);

  // Every primary taxonomy category is exercised by the corpus.
  for (ErrorCategory category :
       {ErrorCategory::XmlParse, ErrorCategory::WrongTag,
        ErrorCategory::ActionDoesNotExist, ErrorCategory::MissingMandatoryProperty,
        ErrorCategory::PropertyNotAllowed, ErrorCategory::UndefinedResource}) {
    CHECK_MESSAGE(expected_totals[category] > 0,
                  "category not covered: ", category_name(category));
  }
}

TEST_CASE("acceptance soundness: generated consistent documents verify clean") {
  testutil::DocumentGenerator gen(7, /*valid_references=*/true);
  for (int i = 0; i < 200; ++i) {
    XdlDocument doc = gen.generate();
    std::string text = serialize(doc);
    VerificationReport report = check(text);
    CAPTURE(text);
    REQUIRE_MESSAGE(report.clean(), format_errors(report).empty()
                                        ? "?"
                                        : format_errors(report)[0]);
  }
}

TEST_CASE("report JSON export") {
  VerificationReport report =
      check(testutil::read_fixture("plans/heatchill_conditional.xdl"));
  std::string json_text = report_to_json(report);
  auto parsed = nlohmann::json::parse(json_text);
  REQUIRE(parsed.is_array());
  REQUIRE(parsed.size() == 1);
  CHECK(parsed[0]["category"] == "MissingMandatoryProperty");
  CHECK(parsed[0]["line"] == 1);

  auto clean = nlohmann::json::parse(report_to_json(check(
      testutil::read_fixture("plans/mcpba.xdl"))));
  CHECK(clean.empty());
}

TEST_CASE("constraints JSON parsing") {
  EnvironmentConstraints c =
      constraints_from_json(R"({"hardware": ["beaker"], "reagents": ["vinegar"]})");
  CHECK(c.hardware == std::set<std::string>{"beaker"});
  CHECK(c.reagents == std::set<std::string>{"vinegar"});

  CHECK(constraints_from_json(R"({"hardware": []})").hardware.empty());
  CHECK_THROWS_AS(constraints_from_json("[1,2]"), std::runtime_error);
  CHECK_THROWS_AS(constraints_from_json(R"({"Hardware": []})"), std::runtime_error);
  CHECK_THROWS_AS(constraints_from_json(R"({"hardware": [1]})"), std::runtime_error);
  CHECK_THROWS_AS(constraints_from_json("not json"), std::runtime_error);
  CHECK_THROWS_AS(load_constraints_file("missing.json"), std::runtime_error);

  EnvironmentConstraints fixture =
      load_constraints_file(testutil::fixture_path("constraints/beaker.json"));
  CHECK(fixture.hardware == std::set<std::string>{"beaker"});
}
