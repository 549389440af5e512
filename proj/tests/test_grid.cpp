#include <gtest/gtest.h>

#include <random>
#include <string>

#include "caedge/grid.hpp"
#include "oracle.hpp"

using namespace caedge;
using namespace std::string_literals;

TEST(LoadImage, PlainPbm) {
  const auto g = parse_image("P1\n2 2\n0 1\n1 0\n");
  EXPECT_EQ(g, BinaryGrid(2, 2, {0, 1, 1, 0}));
}

TEST(LoadImage, PlainPbmWithoutSeparatorsAndComments) {
  const auto g = parse_image("P1 # comment\n# another\n3 1\n101");
  EXPECT_EQ(g, BinaryGrid(3, 1, {1, 0, 1}));
}

TEST(LoadImage, PlainPgmAllWhiteIsAllOnes) {
  const auto g = parse_image("P2\n3 2\n255\n255 255 255\n255 255 255\n");
  EXPECT_EQ(g, BinaryGrid(3, 2, std::uint8_t{1}));
}

TEST(LoadImage, RawPgmThresholdAt128) {
  const auto g = parse_image("P5\n3 1\n255\n"s + std::string{'\x00', '\x7f', '\x80'});
  EXPECT_EQ(g, BinaryGrid(3, 1, {0, 0, 1}));
}

TEST(LoadImage, RawPbmUnpacksMsbFirst) {
  // width 9: each row is two bytes, the ninth pixel in the top bit of byte two.
  const auto g = parse_image("P4\n9 2\n"s + std::string{'\xA0', '\x80', '\x01', '\x00'});
  EXPECT_EQ(g, BinaryGrid(9, 2, {1, 0, 1, 0, 0, 0, 0, 0, 1,  //
                                 0, 0, 0, 0, 0, 0, 0, 1, 0}));
}

TEST(LoadImage, ErrorsCarryByteOffsets) {
  try {
    parse_image("P3\n1 1\n255\n0 0 0\n");
    FAIL() << "P3 accepted";
  } catch (const ImageError& e) {
    EXPECT_EQ(e.offset(), 0u);
    EXPECT_NE(std::string(e.what()).find("unsupported magic"), std::string::npos);
  }
  try {
    parse_image("P1\n2 x\n");
    FAIL() << "bad height accepted";
  } catch (const ImageError& e) {
    EXPECT_EQ(e.offset(), 5u);
  }
  try {
    parse_image("P4\n9 2\n"s + std::string{'\xff', '\x80', '\xff'});
    FAIL() << "truncated raster accepted";
  } catch (const ImageError& e) {
    EXPECT_EQ(e.offset(), 10u);
  }
  try {
    parse_image("P1\n2 2\n0 1\n1");
    FAIL() << "truncated plain raster accepted";
  } catch (const ImageError& e) {
    EXPECT_EQ(e.offset(), 12u);
  }
  EXPECT_THROW(parse_image("P1\n2 2\n0 1\n1 2\n"), ImageError);
  EXPECT_THROW(parse_image("P2\n1 1\n65535\n0\n"), ImageError);
  EXPECT_THROW(parse_image("P2\n1 1\n255\n256\n"), ImageError);
  EXPECT_THROW(parse_image("P1\n0 3\n"), ImageError);
  EXPECT_THROW(parse_image(""), ImageError);
}

TEST(SaveImage, PlainSmallestGrid) {
  EXPECT_EQ(encode_image(BinaryGrid(1, 1, std::uint8_t{1}), PbmFormat::plain), "P1\n1 1\n1\n");
}

TEST(SaveImage, PlainRowsAreSpaceSeparated) {
  EXPECT_EQ(encode_image(BinaryGrid(3, 2, {1, 0, 1, 0, 1, 1}), PbmFormat::plain),
            "P1\n3 2\n1 0 1\n0 1 1\n");
}

TEST(SaveImage, RawRowsPadToWholeBytes) {
  const auto bytes = encode_image(BinaryGrid(9, 2, std::uint8_t{1}), PbmFormat::raw);
  EXPECT_EQ(bytes, "P4\n9 2\n"s + "\xff\x80\xff\x80"s);
}

TEST(SaveImage, RoundTripsRandomGrids) {
  std::mt19937 gen(11);
  std::uniform_int_distribution<std::size_t> side(1, 40);
  for (int i = 0; i < 100; ++i) {
    const auto g = testutil::random_grid(side(gen), side(gen), gen);
    EXPECT_EQ(parse_image(encode_image(g, PbmFormat::plain)), g);
    EXPECT_EQ(parse_image(encode_image(g, PbmFormat::raw)), g);
  }
}

TEST(SaveImage, FileRoundTripAndIoErrors) {
  testutil::TempDir dir("grid");
  std::mt19937 gen(3);
  const auto g = testutil::random_grid(16, 16, gen);
  save_image(g, dir / "a.pbm", PbmFormat::raw);
  EXPECT_EQ(load_image(dir / "a.pbm"), g);
  EXPECT_FALSE(std::filesystem::exists(dir / "a.pbm.tmp"));
  EXPECT_THROW(load_image(dir / "missing.pbm"), IoError);
  EXPECT_THROW(save_image(g, dir / "no" / "such" / "dir.pbm", PbmFormat::plain), IoError);
}

TEST(Hamming, Examples) {
  std::mt19937 gen(5);
  const auto g = testutil::random_grid(7, 5, gen);
  EXPECT_EQ(hamming(g, g), 0u);
  EXPECT_EQ(hamming(g, complement(g)), 35u);
  EXPECT_EQ(hamming(BinaryGrid(2, 2, {0, 1, 1, 0}), BinaryGrid(2, 2, {0, 0, 1, 1})), 2u);
}

TEST(Hamming, MetricProperties) {
  std::mt19937 gen(6);
  for (int i = 0; i < 200; ++i) {
    const auto a = testutil::random_grid(6, 4, gen);
    const auto b = testutil::random_grid(6, 4, gen, 0.2);
    const auto d = hamming(a, b);
    EXPECT_EQ(d, hamming(b, a));
    EXPECT_EQ(d == 0, a == b);
    EXPECT_LE(d, a.size());
    EXPECT_EQ(d, oracle::mismatches(a, b));
  }
}

TEST(Hamming, DimensionMismatch) {
  EXPECT_THROW(hamming(BinaryGrid(2, 3), BinaryGrid(3, 2)), DimensionMismatch);
}

TEST(Binarize, IdempotentOnBinaryImages) {
  std::mt19937 gen(8);
  for (int i = 0; i < 20; ++i) {
    const auto g = testutil::random_grid(9, 4, gen);
    const auto once = binarize(9, 4, to_gray(g));
    EXPECT_EQ(once, g);
    EXPECT_EQ(binarize(9, 4, to_gray(once)), once);
  }
}

TEST(BinaryGrid, RejectsInvalidConstruction) {
  EXPECT_THROW(BinaryGrid(0, 1), std::invalid_argument);
  EXPECT_THROW(BinaryGrid(2, 2, std::vector<std::uint8_t>{0, 1, 0}), std::invalid_argument);
  EXPECT_THROW(BinaryGrid(1, 1, std::vector<std::uint8_t>{2}), std::invalid_argument);
  BinaryGrid g(2, 2);
  EXPECT_THROW(g.set(0, 0, 3), std::invalid_argument);
}
