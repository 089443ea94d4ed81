// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The tsica authors

#include <gtest/gtest.h>

#include <fstream>

#include "oracles.hpp"
#include "tsica/random.hpp"
#include "tsica/text_io.hpp"

namespace tsica {
namespace {

TEST(TextIo, TableRoundTripIsExact) {
  testing::TempDir dir("table");
  Table t{{"a", "b"}, testing::seeded_gaussian(17, 2, 1)};
  t.values(0, 0) = 1e-300;
  t.values(1, 1) = -0.1;
  write_table(dir / "t.tsv", t);
  const Table back = read_table(dir / "t.tsv");
  EXPECT_EQ(back.names, t.names);
  EXPECT_EQ(back.values, t.values);
}

TEST(TextIo, FormatDoubleShortestForm) {
  EXPECT_EQ(format_double(0.1), "0.1");
  EXPECT_EQ(format_double(2.0), "2");
  EXPECT_EQ(std::stod(format_double(1.0 / 3.0)), 1.0 / 3.0);
}

TEST(TextIo, KeyValuesSkipCommentsAndBlanks) {
  testing::TempDir dir("kv");
  {
    std::ofstream out(dir / "c.txt");
    out << "# comment\n\nseed=3\norientation = spatial\n";
  }
  const auto map = to_map(read_key_values(dir / "c.txt"));
  EXPECT_EQ(map.at("seed"), "3");
  EXPECT_EQ(map.at("orientation"), "spatial");
  write_key_values(dir / "d.txt", {{"x", "1"}, {"y", "two"}});
  EXPECT_EQ(read_key_values(dir / "d.txt"), (KeyValues{{"x", "1"}, {"y", "two"}}));
}

TEST(Rng, DeterministicAndInRange) {
  Rng a(42), b(42);
  for (int i = 0; i < 1000; ++i) {
    const double u = a.uniform();
    EXPECT_EQ(u, b.uniform());
    EXPECT_GE(u, 0.0);
    EXPECT_LT(u, 1.0);
  }
  Rng c(42), d(43);
  EXPECT_NE(c.next_u64(), d.next_u64());
}

TEST(Rng, NormalMoments) {
  Rng rng(7);
  double sum = 0, sq = 0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double x = rng.normal();
    sum += x;
    sq += x * x;
  }
  EXPECT_NEAR(sum / n, 0.0, 0.01);
  EXPECT_NEAR(sq / n, 1.0, 0.01);
}

}  // namespace
}  // namespace tsica
