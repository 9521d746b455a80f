#include <gtest/gtest.h>

#include "icmup/alignment/multiple_alignment.hpp"

using namespace icmup;

namespace {

PatternStore store_of(std::initializer_list<const char*> lines, CostMode mode = CostMode::uniform) {
  std::vector<PatternSpec> specs;
  for (const char* l : lines) specs.push_back({split_symbols(l), 1});
  return build_store(specs, mode);
}

MultipleAlignment with_links(Sequence new_row, std::vector<std::size_t> rows, std::vector<Link> links) {
  MultipleAlignment ma;
  ma.new_row = std::move(new_row);
  ma.old_rows = std::move(rows);
  ma.links = std::move(links);
  std::sort(ma.links.begin(), ma.links.end());
  return ma;
}

Link L(std::uint32_t r1, std::uint32_t i1, std::uint32_t r2, std::uint32_t i2) {
  return make_link({r1, i1}, {r2, i2});
}

}  // namespace

TEST(MultipleAlignment, EmptyAlignmentScoresZero) {
  const auto store = store_of({"D 11 a #D"});
  const auto ma = with_links({"a"}, {}, {});
  EXPECT_EQ(score_alignment(ma, store), (AlignmentScore{0, 0, 0}));
  EXPECT_TRUE(derive_encoding(ma, store).symbols.empty());
}

// Uniform over {D, 11, a, #D}: 2 bits each. B_new = 2 (a), B_code = 6
// (D 11 #D), CD = -4.
TEST(MultipleAlignment, SingleRowHandScore) {
  const auto store = store_of({"D 11 a #D"});
  const auto ma = with_links({"a"}, {0}, {L(0, 0, 1, 2)});
  EXPECT_FALSE(check_alignment(ma, store).has_value());
  EXPECT_EQ(derive_encoding(ma, store).symbols, split_symbols("D 11 #D"));
  EXPECT_EQ(score_alignment(ma, store), (AlignmentScore{2, 6, -4}));
}

TEST(MultipleAlignment, MoreLinkedNewRaisesCd) {
  const auto store = store_of({"N 1 x y #N"});
  const auto one = with_links({"x", "y"}, {0}, {L(0, 0, 1, 2)});
  const auto two = with_links({"x", "y"}, {0}, {L(0, 0, 1, 2), L(0, 1, 1, 3)});
  EXPECT_EQ(derive_encoding(one, store), derive_encoding(two, store));
  EXPECT_GT(score_alignment(two, store).compression_difference, score_alignment(one, store).compression_difference);
}

TEST(MultipleAlignment, CodeOfFullyMatchedContents) {
  const auto store = store_of({"TFEU Treaty on the Functioning of the European Union"});
  const auto words = split_symbols("Treaty on the Functioning of the European Union");
  std::vector<Link> links;
  for (std::uint32_t i = 0; i < words.size(); ++i) links.push_back(L(0, i, 1, i + 1));
  const auto ma = with_links(words, {0}, links);
  EXPECT_EQ(derive_encoding(ma, store).symbols, Sequence{"TFEU"});
}

// Two-level tree: N row references class A through its frame.
TEST(MultipleAlignment, EncodingFollowsColumnOrder) {
  const auto store = store_of({"NP 2 A #A N #N #NP", "A 12 fruit #A", "N 7 flies #N"});
  const auto ma = with_links({"fruit", "flies"}, {0, 1, 2},
                             {L(0, 0, 2, 2), L(0, 1, 3, 2), L(1, 2, 2, 0), L(1, 3, 2, 3), L(1, 4, 3, 0),
                              L(1, 5, 3, 3)});
  EXPECT_FALSE(check_alignment(ma, store).has_value()) << *check_alignment(ma, store);
  EXPECT_EQ(join_symbols(derive_encoding(ma, store).symbols), "NP 2 12 7 #NP");
  EXPECT_EQ(unmatched_content(ma, store), Sequence{});
}

TEST(MultipleAlignment, CheckRejectsIllegalLinks) {
  const auto store = store_of({"NP 2 A #A N #N #NP", "A 12 fruit #A", "N 7 flies #N", "N 5 banana #N"});
  // Frame to frame: both N rows' class symbols.
  EXPECT_TRUE(check_alignment(with_links({"flies", "banana"}, {2, 3}, {L(0, 0, 1, 2), L(0, 1, 2, 2), L(1, 0, 2, 0)}),
                              store)
                  .has_value());
  // Different text.
  EXPECT_TRUE(check_alignment(with_links({"fruit"}, {1}, {L(0, 0, 1, 0)}), store).has_value());
  // Crossing: New order fruit flies, rows force flies before fruit.
  EXPECT_TRUE(check_alignment(with_links({"flies", "fruit"}, {0, 1, 2},
                                         {L(0, 0, 3, 2), L(0, 1, 2, 2), L(1, 2, 2, 0), L(1, 3, 2, 3), L(1, 4, 3, 0)}),
                              store)
                  .has_value());
  // Disconnected second row.
  EXPECT_TRUE(check_alignment(with_links({"fruit"}, {1, 2}, {L(0, 0, 1, 2)}), store).has_value());
  // Symbol in two links.
  EXPECT_TRUE(check_alignment(with_links({"fruit", "fruit"}, {1}, {L(0, 0, 1, 2), L(0, 1, 1, 2)}), store).has_value());
}

TEST(MultipleAlignment, CheckRejectsLinksBetweenCopies) {
  const auto store = store_of({"A 1 A #A #A"});
  EXPECT_TRUE(check_alignment(with_links({"A"}, {0, 0}, {L(0, 0, 1, 0), L(1, 2, 2, 0)}), store).has_value());
}

TEST(Probabilities, Contract) {
  std::vector<MultipleAlignment> v(1);
  EXPECT_EQ(alignment_probabilities(v), std::vector<double>{1.0});
  v.resize(2);
  v[0].score.compression_difference = v[1].score.compression_difference = -7.5;
  EXPECT_EQ(alignment_probabilities(v), (std::vector<double>{0.5, 0.5}));
  v[0].score.compression_difference = 3;
  v[1].score.compression_difference = 1;
  EXPECT_EQ(alignment_probabilities(v), (std::vector<double>{0.8, 0.2}));
  v[0].score.compression_difference = 1000;
  v[1].score.compression_difference = -1000;
  const auto p = alignment_probabilities(v);
  EXPECT_EQ(p[0], 1.0);
  EXPECT_GE(p[1], 0.0);
  EXPECT_THROW(alignment_probabilities(std::vector<MultipleAlignment>{}), Error);
}
