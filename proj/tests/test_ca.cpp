#include <gtest/gtest.h>

#include <bit>
#include <random>

#include "caedge/ca.hpp"
#include "oracle.hpp"

using namespace caedge;

TEST(EncodeWindow, Examples) {
  EXPECT_EQ(encode_window(BinaryGrid(3, 3), 1, 1), 0);
  EXPECT_EQ(encode_window(BinaryGrid(3, 3, std::uint8_t{1}), 1, 1), 511);
  const BinaryGrid diag(3, 3, {1, 0, 0, 0, 1, 0, 0, 0, 1});
  EXPECT_EQ(encode_window(diag, 1, 1), 0b100010001);
  EXPECT_EQ(encode_window(diag, 1, 1), 273);
  EXPECT_EQ(encode_window(BinaryGrid(1, 1, std::uint8_t{1}), 0, 0), 16);
}

TEST(EncodeWindow, ZeroPaddingOnAllOnesGrid) {
  const BinaryGrid ones(5, 4, std::uint8_t{1});
  EXPECT_EQ(encode_window(ones, 0, 0), 0b000011011);
  EXPECT_EQ(encode_window(ones, 0, 4), 0b000110110);
  EXPECT_EQ(encode_window(ones, 3, 0), 0b011011000);
  EXPECT_EQ(encode_window(ones, 3, 4), 0b110110000);
  EXPECT_EQ(encode_window(ones, 0, 2), 0b000111111);
  EXPECT_EQ(encode_window(ones, 3, 2), 0b111111000);
  EXPECT_EQ(encode_window(ones, 1, 0), 0b011011011);
  EXPECT_EQ(encode_window(ones, 2, 4), 0b110110110);
  EXPECT_EQ(encode_window(ones, 1, 2), 511);
  for (std::size_t r = 0; r < 4; ++r)
    for (std::size_t c = 0; c < 5; ++c) {
      const bool edge_r = r == 0 || r == 3;
      const bool edge_c = c == 0 || c == 4;
      const int expected = edge_r && edge_c ? 4 : (edge_r || edge_c ? 6 : 9);
      EXPECT_EQ(std::popcount(static_cast<unsigned>(encode_window(ones, r, c))), expected);
    }
}

TEST(EncodeWindow, MatchesOracle) {
  std::mt19937 gen(1);
  for (int i = 0; i < 50; ++i) {
    const auto g = testutil::random_grid(7, 6, gen);
    const std::vector<std::uint8_t> raw(g.cells().begin(), g.cells().end());
    for (std::size_t r = 0; r < 6; ++r)
      for (std::size_t c = 0; c < 7; ++c)
        ASSERT_EQ(encode_window(g, r, c),
                  oracle::window(raw, 7, 6, static_cast<long>(r), static_cast<long>(c)));
  }
}

TEST(Step, ConstantRules) {
  std::mt19937 gen(2);
  const auto g = testutil::random_grid(9, 9, gen);
  EXPECT_EQ(step(g, RuleTable{}), BinaryGrid(9, 9));
  EXPECT_EQ(step(g, RuleTable::filled(1)), BinaryGrid(9, 9, std::uint8_t{1}));
}

TEST(Step, IdentityRuleFixesEverySingleWindow) {
  const auto id = RuleTable::identity();
  for (std::size_t code = 0; code < kRuleCount; ++code) {
    std::vector<std::uint8_t> cells(9);
    for (std::size_t b = 0; b < 9; ++b) cells[b] = (code >> (8 - b)) & 1u;
    const BinaryGrid g(3, 3, cells);
    ASSERT_EQ(encode_window(g, 1, 1), code);
    ASSERT_EQ(step(g, id), g) << "code " << code;
  }
}

TEST(Step, IdentityRuleFixesRandomGrids) {
  std::mt19937 gen(3);
  std::uniform_int_distribution<std::size_t> side(1, 33);
  for (int i = 0; i < 100; ++i) {
    const auto g = testutil::random_grid(side(gen), side(gen), gen);
    EXPECT_EQ(step(g, RuleTable::identity()), g);
  }
}

TEST(Step, MatchesNaiveOracle) {
  std::mt19937 gen(4);
  for (int i = 0; i < 100; ++i) {
    const auto g = testutil::random_grid(8, 8, gen);
    const auto t = testutil::random_table(gen);
    ASSERT_EQ(step(g, t), oracle::step(g, t));
  }
  // Degenerate shapes exercise the first/last column and row paths.
  std::uniform_int_distribution<std::size_t> side(1, 4);
  for (int i = 0; i < 200; ++i) {
    const auto g = testutil::random_grid(side(gen), side(gen), gen);
    const auto t = testutil::random_table(gen);
    ASSERT_EQ(step(g, t), oracle::step(g, t));
  }
}

TEST(Step, PreservesShapeAndIsReferentiallyTransparent) {
  std::mt19937 gen(5);
  const auto g = testutil::random_grid(13, 5, gen);
  const auto t = testutil::random_table(gen);
  const auto a = step(g, t);
  EXPECT_EQ(a.width(), 13u);
  EXPECT_EQ(a.height(), 5u);
  for (auto c : a.cells()) EXPECT_LE(c, 1);
  EXPECT_EQ(step(g, t), a);
}

TEST(Step, IntoRejectsAliasingAndShapeMismatch) {
  BinaryGrid g(4, 4);
  EXPECT_THROW(step_into(g, RuleTable{}, g), std::invalid_argument);
  BinaryGrid other(4, 5);
  EXPECT_THROW(step_into(g, RuleTable{}, other), DimensionMismatch);
}

TEST(Run, ComposesStep) {
  std::mt19937 gen(6);
  for (int i = 0; i < 50; ++i) {
    const auto g = testutil::random_grid(10, 7, gen);
    const auto t = testutil::random_table(gen);
    EXPECT_EQ(run(g, t, 1), step(g, t));
    EXPECT_EQ(run(g, t, 3), step(step(step(g, t), t), t));
    EXPECT_EQ(run(g, t, 4), oracle::run(g, t, 4));
  }
}

TEST(Run, AllZeroRuleIsAbsorbing) {
  std::mt19937 gen(7);
  const auto g = testutil::random_grid(6, 6, gen);
  for (unsigned k = 1; k <= 5; ++k) EXPECT_EQ(run(g, RuleTable{}, k), BinaryGrid(6, 6));
}

TEST(Run, RejectsZeroPasses) { EXPECT_THROW(run(BinaryGrid(2, 2), RuleTable{}, 0), std::invalid_argument); }

TEST(RandomRule, DeterministicPerSeed) {
  Rng a(42), b(42), c(43);
  const auto ta = random_rule(a);
  EXPECT_EQ(ta, random_rule(b));
  EXPECT_NE(ta, random_rule(c));
}

TEST(RandomRule, OnesCountNearHalf) {
  Rng rng(9);
  double total = 0;
  for (int i = 0; i < 1000; ++i) {
    const auto ones = random_rule(rng).count_ones();
    EXPECT_GT(ones, 128u);
    EXPECT_LT(ones, 384u);
    total += static_cast<double>(ones);
  }
  EXPECT_NEAR(total / 1000.0, 256.0, 25.0);
}

TEST(RuleTable, RejectsNonBinaryEntries) {
  RuleTable::Entries e{};
  e[7] = 2;
  EXPECT_THROW(RuleTable{e}, std::invalid_argument);
  RuleTable t;
  EXPECT_THROW(t.set(0, 5), std::invalid_argument);
  EXPECT_THROW(t.set(512, 1), std::out_of_range);
}
