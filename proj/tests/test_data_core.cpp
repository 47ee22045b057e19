#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "paired_gof/io.hpp"
#include "paired_gof/types.hpp"

using namespace paired_gof;

static const char* kJsonTwoGroups = R"({
  "groups": [
    {"label": "a", "bilateral": [21, 9, 14], "unilateral": [38, 24]},
    {"label": "b", "bilateral": [13, 3, 15], "unilateral": [27, 39]}
  ]
})";

TEST_CASE("json parse keeps counts and labels") {
  const auto table = parse_frequency_table(kJsonTwoGroups, TableFormat::Json);
  REQUIRE(table.g() == 2);
  CHECK(table.labels[0] == "a");
  CHECK(table.groups[0].m0 == 21);
  CHECK(table.groups[0].m1 == 9);
  CHECK(table.groups[0].m2 == 14);
  CHECK(table.groups[0].n0 == 38);
  CHECK(table.groups[0].n1 == 24);
  CHECK(table.groups[1].n1 == 39);
  CHECK(table.groups[0].m_plus() == 44);
  CHECK(table.groups[0].n_plus() == 62);
}

TEST_CASE("missing unilateral block means zero unilateral subjects") {
  const auto table = parse_frequency_table(
      R"({"groups": [{"label": "x", "bilateral": [3, 2, 14]}]})",
      TableFormat::Json);
  REQUIRE(table.g() == 1);
  CHECK(table.groups[0].n0 == 0);
  CHECK(table.groups[0].n1 == 0);
  CHECK(table.groups[0].n_plus() == 0);
}

TEST_CASE("csv parse") {
  const auto table = parse_frequency_table("a,21,9,14,38,24\nb,13,3,15,27,39\n",
                                           TableFormat::Csv);
  REQUIRE(table.g() == 2);
  CHECK(table.groups[1].m2 == 15);
  CHECK(table.labels[1] == "b");
}

TEST_CASE("validation rejects bad tables") {
  FrequencyTable empty;
  CHECK_THROWS_AS(validate(empty), invalid_input);

  FrequencyTable negative;
  negative.groups.push_back({1, 2, -3, 0, 1});
  negative.labels.push_back("g1");
  CHECK_THROWS_AS(validate(negative), invalid_input);

  FrequencyTable degenerate;
  degenerate.groups.push_back({1, 1, 1, 1, 1});
  degenerate.groups.push_back({0, 0, 0, 0, 0});
  degenerate.labels = {"g1", "g2"};
  try {
    validate(degenerate);
    FAIL("expected throw");
  } catch (const invalid_input& e) {
    CHECK(std::string(e.what()).find("2") != std::string::npos);
  }
}

TEST_CASE("json round trip preserves every field") {
  const auto table = parse_frequency_table(kJsonTwoGroups, TableFormat::Json);
  const auto text = serialize_json(table);
  const auto back = parse_frequency_table(text, TableFormat::Json);
  REQUIRE(back.g() == table.g());
  for (std::size_t i = 0; i < table.g(); ++i) {
    CHECK(back.labels[i] == table.labels[i]);
    CHECK(back.groups[i].m0 == table.groups[i].m0);
    CHECK(back.groups[i].m1 == table.groups[i].m1);
    CHECK(back.groups[i].m2 == table.groups[i].m2);
    CHECK(back.groups[i].n0 == table.groups[i].n0);
    CHECK(back.groups[i].n1 == table.groups[i].n1);
  }
}

TEST_CASE("csv round trip") {
  const auto table = parse_frequency_table(kJsonTwoGroups, TableFormat::Json);
  const auto back = parse_frequency_table(serialize_csv(table), TableFormat::Csv);
  REQUIRE(back.g() == 2);
  CHECK(back.groups[1].n1 == 39);
}

TEST_CASE("malformed input reports a useful error") {
  CHECK_THROWS_AS(parse_frequency_table("{", TableFormat::Json), invalid_input);
  CHECK_THROWS_AS(parse_frequency_table(R"({"groups": "no"})", TableFormat::Json),
                  invalid_input);
  CHECK_THROWS_AS(parse_frequency_table("a,1,2\n", TableFormat::Csv), invalid_input);
  CHECK_THROWS_AS(parse_frequency_table("a,1,2,x,0,0\n", TableFormat::Csv),
                  invalid_input);
}
