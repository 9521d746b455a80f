#include <gtest/gtest.h>

#include "icmup/codecs/encoded_stream.hpp"
#include "support/generators.hpp"

using namespace icmup;

TEST(EncodedStream, TextRoundTripForEveryCodec) {
  gen::Rng rng(21);
  for (int i = 0; i < 200; ++i) {
    const auto s = gen::structured_sequence(rng, 30, rng.between(1, 4));
    const auto cost = CostModel::fit(CostMode::frequency, s);
    const EncodedStream chunk = chunk_encode(s, {}, cost);
    const EncodedStream rle = rle_encode(s, 3, cost);
    auto [schema, choices] = gen::schema_instance(rng);
    const auto seq = spc_decode(schema, choices);
    const EncodedStream spc = spc_encode(seq, schema, CostModel::fit(CostMode::uniform, seq));
    for (const auto* e : {&chunk, &rle, &spc}) {
      const auto text = serialize(*e);
      const auto back = parse_encoded_stream(text);
      EXPECT_EQ(back, *e);
      EXPECT_EQ(serialize(back), text);
    }
  }
}

TEST(EncodedStream, ParseErrorsCarryLines) {
  try {
    parse_encoded_stream("codec rle\noriginal_bits 12\nencoded_bits x\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
  EXPECT_THROW(parse_encoded_stream("codec zip\noriginal_bits 1\nencoded_bits 1\n"), ParseError);
  EXPECT_THROW(parse_encoded_stream("codec rle\noriginal_bits 1\nencoded_bits 1\nruns 2\n1\ta\n"), ParseError);
}
