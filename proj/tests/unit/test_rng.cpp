#include <gtest/gtest.h>

#include <cmath>
#include <set>
#include <vector>

#include "hdlab/model.hpp"
#include "hdlab/rng.hpp"

using namespace hdlab;

// Known-answer vectors from the Random123 distribution (kat_vectors).
TEST(Philox, KnownAnswers) {
  EXPECT_EQ(Philox4x32::apply({0, 0, 0, 0}, {0, 0}),
            (Philox4x32::Counter{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u}));
  EXPECT_EQ(Philox4x32::apply({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
                              {0xffffffffu, 0xffffffffu}),
            (Philox4x32::Counter{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu}));
  EXPECT_EQ(Philox4x32::apply({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u},
                              {0xa4093822u, 0x299f31d0u}),
            (Philox4x32::Counter{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u}));
}

TEST(RngStream, DrawIsPureFunctionOfIndex) {
  const RngStream s(42, 7);
  RngCursor cursor(s);
  for (std::uint64_t i = 0; i < 1000; ++i) {
    const double u = cursor.next_uniform();
    EXPECT_EQ(u, s.uniform(i));
  }
  RngCursor offset(s, 501);
  EXPECT_EQ(offset.next_normal(), s.normal(501));
  EXPECT_EQ(offset.next_normal(), s.normal(502));
}

TEST(RngStream, UniformStaysInOpenInterval) {
  const RngStream s(1, 2);
  double lo = 1.0, hi = 0.0, sum = 0.0;
  constexpr int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = s.uniform(i);
    lo = std::min(lo, u);
    hi = std::max(hi, u);
    sum += u;
  }
  EXPECT_GT(lo, 0.0);
  EXPECT_LT(hi, 1.0);
  // Mean within 4 standard errors of 1/2 (sd 1/sqrt(12)).
  EXPECT_NEAR(sum / n, 0.5, 4.0 / std::sqrt(12.0 * n));
}

TEST(RngStream, ChildrenAreDistinctAndUncorrelated) {
  const RngStream parent(123, 0);
  std::set<std::uint64_t> ids;
  for (std::uint64_t i = 0; i < 10000; ++i) ids.insert(parent.child(i).stream_id());
  EXPECT_EQ(ids.size(), 10000u);
  EXPECT_NE(parent.child(0), parent);
  EXPECT_NE(RngStream(1, 0).child(3).uniform(0), RngStream(2, 0).child(3).uniform(0));

  // Correlation between paired draws of two sibling streams.
  const auto a = parent.child(1), b = parent.child(2);
  constexpr int n = 100000;
  double sxy = 0.0;
  for (int i = 0; i < n; ++i) sxy += a.normal(i) * b.normal(i);
  EXPECT_LT(std::fabs(sxy / n), 4.0 / std::sqrt(double(n)));
}

TEST(RngStream, NormalMomentsOverManyDraws) {
  const RngStream s(99, 3);
  constexpr int n = 200000;
  double m1 = 0.0, m2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double z = s.normal(i);
    m1 += z;
    m2 += z * z;
  }
  m1 /= n;
  m2 /= n;
  EXPECT_LT(std::fabs(m1), 4.0 / std::sqrt(double(n)));
  EXPECT_LT(std::fabs(m2 - 1.0), 4.0 * std::sqrt(2.0 / n));
}
