#include <sstream>

#include <gtest/gtest.h>

#include "icmup/codecs/schema.hpp"
#include "support/generators.hpp"

using namespace icmup;

namespace {

Schema menu() {
  std::istringstream in(
      "schema Menu1\n"
      "fixed Appetiser\n"
      "slot S : soup | melon | prawn-cocktail | pate | smoked-salmon\n"
      "fixed sorbet\n"
      "slot M : roast-beef | chicken | lamb | nut-roast | salmon\n"
      "slot P : cheesecake | fruit-salad | ice-cream\n"
      "fixed coffee-and-mints\n");
  return parse_schema(in);
}

const Sequence menu_meal =
    split_symbols("Appetiser prawn-cocktail sorbet salmon cheesecake coffee-and-mints");

}  // namespace

TEST(Schema, MenuEncodesAsThreeChoices) {
  const auto s = menu();
  const auto enc = spc_encode(menu_meal, s, CostModel::fit(CostMode::uniform, menu_meal));
  EXPECT_EQ(enc.payload.schema_name, "Menu1");
  const std::vector<SlotChoice> want{{"S", 3}, {"M", 5}, {"P", 1}};
  EXPECT_EQ(enc.payload.choices, want);
  // name (fresh, log2 6 bits) + 3 + 3 + 2 index bits
  EXPECT_DOUBLE_EQ(enc.encoded_bits, std::log2(6.0) + 8.0);
  EXPECT_LT(enc.encoded_bits, enc.original_bits);
}

TEST(Schema, MenuDecodes) {
  const std::vector<SlotChoice> c{{"S", 3}, {"M", 5}, {"P", 1}};
  EXPECT_EQ(spc_decode(menu(), c), menu_meal);
}

TEST(Schema, ZeroSlots) {
  Schema s{"Fixed", {std::string("a"), std::string("b")}};
  const Sequence seq{"a", "b"};
  const auto enc = spc_encode(seq, s, CostModel::fit(CostMode::uniform, seq));
  EXPECT_TRUE(enc.payload.choices.empty());
  EXPECT_EQ(spc_decode(s, {}), seq);
}

TEST(Schema, SingleFillerSlotIsFree) {
  Schema s{"One", {std::string("a"), Slot{"X", {{"b"}}}}};
  EXPECT_EQ(slot_index_bits(1), 0u);
  const Sequence seq{"a", "b"};
  const auto cost = CostModel::fit(CostMode::uniform, seq);
  EXPECT_DOUBLE_EQ(spc_encode(seq, s, cost).encoded_bits, cost.cost_or_fresh("One"));
}

TEST(Schema, MismatchReportsPosition) {
  const auto bad = split_symbols("Appetiser soup sorbet tofu cheesecake coffee-and-mints");
  try {
    spc_encode(bad, menu(), CostModel::fit(CostMode::uniform, bad));
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("position 3"), std::string::npos) << e.what();
  }
}

TEST(Schema, AmbiguousMatchNamesSlots) {
  Schema s{"Amb", {Slot{"A", {{"x"}, {"x", "x"}}}, Slot{"B", {{"x"}, {"x", "x"}}}}};
  const auto seq = split_symbols("x x x");
  try {
    spc_encode(seq, s, CostModel::fit(CostMode::uniform, seq));
    FAIL();
  } catch (const Error& e) {
    const std::string what = e.what();
    EXPECT_NE(what.find("A (slot 1)"), std::string::npos) << what;
    EXPECT_NE(what.find("B (slot 2)"), std::string::npos) << what;
  }
}

TEST(Schema, DecodeRejectsBadChoices) {
  const auto s = menu();
  EXPECT_THROW(spc_decode(s, std::vector<SlotChoice>{{"S", 9}, {"M", 1}, {"P", 1}}), Error);
  EXPECT_THROW(spc_decode(s, std::vector<SlotChoice>{{"M", 1}, {"S", 1}, {"P", 1}}), Error);
  EXPECT_THROW(spc_decode(s, std::vector<SlotChoice>{{"S", 1}}), Error);
}

TEST(Schema, RandomRoundTrip) {
  gen::Rng rng(8);
  for (int i = 0; i < 300; ++i) {
    auto [schema, choices] = gen::schema_instance(rng);
    const auto seq = spc_decode(schema, choices);
    const auto enc = spc_encode(seq, schema, CostModel::fit(CostMode::uniform, seq));
    EXPECT_EQ(enc.payload.choices, choices);
    EXPECT_EQ(spc_decode(schema, enc.payload.choices), seq);
  }
}

TEST(SchemaFile, ParseErrors) {
  std::istringstream no_name("fixed a\n");
  EXPECT_THROW(parse_schema(no_name), ParseError);
  std::istringstream bad("schema X\nslot A b | c\n");
  try {
    parse_schema(bad);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
}
