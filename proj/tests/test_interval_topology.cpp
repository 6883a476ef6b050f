#include "hyperrigid/interval_topology.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace hyperrigid;

namespace {

Rational q(long a, long b = 1) { return Rational(a, b); }
IntervalSet set(std::vector<Interval> v) { return IntervalSet::normalize(std::move(v)); }
IntervalSet unit() { return set({Interval::closed(0, 1)}); }

PiecewiseAffineMap affine(Interval dom, Rational slope, Rational offset, IntervalSet target) {
  return PiecewiseAffineMap::make({{dom, slope, offset}}, set({dom}), std::move(target));
}

// Random finite union of intervals with endpoints in {0, 1/2, ..., 4}.
IntervalSet random_set(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> n(0, 4), end(0, 8), flag(0, 3);
  std::vector<Interval> out;
  int k = n(rng);
  for (int i = 0; i < k; ++i) {
    int a = end(rng), b = end(rng);
    if (a > b) std::swap(a, b);
    int f = flag(rng);
    out.push_back(Interval::make(Bound::at(q(a, 2)), Bound::at(q(b, 2)), f & 1, f & 2));
  }
  return set(out);
}

}  // namespace

TEST(Normalize, WorkedExamples) {
  EXPECT_EQ(set({Interval::closed(0, 1), Interval::closed(1, 2)}), set({Interval::closed(0, 2)}));
  IntervalSet gap = set({Interval::open(0, 1), Interval::open(1, 2)});
  EXPECT_EQ(gap.pieces().size(), 2u);
  EXPECT_FALSE(gap.contains(q(1)));
  EXPECT_TRUE(set({}).empty());
}

TEST(Normalize, RejectsReversedEndpoints) {
  EXPECT_THROW(Interval::closed(1, 0), MalformedInput);
  EXPECT_THROW(Interval::make(Bound::pos_inf(), Bound::at(0), false, false), MalformedInput);
}

TEST(Normalize, HalfOpenAdjacencyMerges) {
  EXPECT_EQ(set({Interval::right_open(0, 1), Interval::closed(1, 2)}), set({Interval::closed(0, 2)}));
  EXPECT_EQ(set({Interval::right_open(0, 1), Interval::left_open(1, 2)}).pieces().size(), 2u);
  EXPECT_EQ(set({Interval::point(q(1)), Interval::open(0, 1)}), set({Interval::left_open(0, 1)}));
}

TEST(Normalize, InfiniteEndsAreOpen) {
  auto iv = Interval::make(Bound::neg_inf(), Bound::at(0), true, true);
  EXPECT_FALSE(iv.lo_closed);
  EXPECT_TRUE(iv.contains(q(-1000000)));
  EXPECT_FALSE(set({iv}).is_bounded());
}

TEST(ClosureInterior, WorkedExamples) {
  EXPECT_EQ(interior(set({Interval::closed(0, q(1, 2))}), unit()), set({Interval::right_open(0, q(1, 2))}));
  EXPECT_EQ(closure(set({Interval::open(0, 1)}), unit()), unit());
  EXPECT_TRUE(interior(closure(set({}), unit()), unit()).empty());
}

TEST(ClosureInterior, OutsideAmbientIsDomainError) {
  EXPECT_THROW(closure(set({Interval::closed(0, 2)}), unit()), DomainError);
  EXPECT_THROW(interior(set({Interval::closed(-1, 0)}), unit()), DomainError);
}

TEST(ClosureInterior, RelativeToDisconnectedAmbient) {
  IntervalSet amb = set({Interval::closed(0, 1), Interval::closed(2, 3)});
  IntervalSet s = set({Interval::closed(2, 3)});
  EXPECT_TRUE(is_open_in(s, amb));
  EXPECT_TRUE(is_closed_in(s, amb));
  EXPECT_FALSE(is_open_in(s, IntervalSet::real_line()));
}

TEST(ClosureInterior, RandomProperties) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 300; ++trial) {
    IntervalSet amb = random_set(rng);
    IntervalSet s = intersect(random_set(rng), amb);
    IntervalSet cl = closure(s, amb), in = interior(s, amb);
    EXPECT_EQ(closure(cl, amb), cl);
    EXPECT_EQ(interior(in, amb), in);
    EXPECT_TRUE(cl.contains(s));
    EXPECT_TRUE(s.contains(in));
    // De Morgan inside the ambient set.
    EXPECT_EQ(in, subtract(amb, closure(subtract(amb, s), amb)));
    EXPECT_EQ(IntervalSet::normalize(s.pieces()), s);
  }
}

TEST(ClosureInterior, PiecesAreCanonical) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    IntervalSet s = random_set(rng);
    const auto& p = s.pieces();
    for (std::size_t i = 0; i + 1 < p.size(); ++i) {
      EXPECT_FALSE(p[i].empty());
      EXPECT_TRUE(p[i].hi <= p[i + 1].lo);
      // Touching pieces must both exclude the common endpoint.
      if (p[i].hi == p[i + 1].lo) EXPECT_FALSE(p[i].hi_closed || p[i + 1].lo_closed);
    }
  }
}

TEST(Image, WorkedExamples) {
  auto half = Interval::closed(0, q(1, 2));
  EXPECT_EQ(image(affine(half, 1, 0, unit()), set({half})), set({half}));
  auto dbl = affine(Interval::closed(0, 1), 2, 0, set({Interval::closed(0, 2)}));
  EXPECT_EQ(image(dbl, set({Interval::closed(0, q(1, 4))})), set({half}));
  auto zero = affine(Interval::closed(0, 1), 0, 0, unit());
  EXPECT_EQ(image(zero, unit()), set({Interval::point(0)}));
}

TEST(Image, NegativeSlopeFlipsFlags) {
  auto f = affine(Interval::closed(0, 1), -1, 1, unit());
  EXPECT_EQ(image(f, set({Interval::right_open(0, q(1, 2))})), set({Interval::left_open(q(1, 2), 1)}));
}

TEST(Image, RespectsUnions) {
  std::mt19937_64 rng(3);
  IntervalSet src = set({Interval::closed(0, 4)});
  auto f = PiecewiseAffineMap::make({{Interval::closed(0, 2), 1, 0}, {Interval::left_open(2, 4), -1, 4}}, src,
                                    set({Interval::closed(0, 2)}));
  for (int trial = 0; trial < 200; ++trial) {
    IntervalSet a = intersect(random_set(rng), src), b = intersect(random_set(rng), src);
    EXPECT_EQ(image(f, unite(a, b)), unite(image(f, a), image(f, b)));
  }
}

TEST(Maps, RejectIllFormedPieces) {
  EXPECT_THROW(PiecewiseAffineMap::make({{Interval::closed(0, 1), 1, 0}, {Interval::closed(q(1, 2), 2), 1, 0}},
                                        set({Interval::closed(0, 2)}), set({Interval::closed(0, 2)})),
               MalformedInput);
  EXPECT_THROW(PiecewiseAffineMap::make({{Interval::closed(0, 1), 1, 0}, {Interval::closed(1, 2), 1, 1}},
                                        set({Interval::closed(0, 2)}), set({Interval::closed(0, 4)})),
               MalformedInput);
  EXPECT_THROW(affine(Interval::closed(0, 1), 2, 0, unit()), MalformedInput);
  EXPECT_THROW(PiecewiseAffineMap::make({{Interval::closed(0, 1), 1, 0}}, set({Interval::closed(0, 2)}),
                                        set({Interval::closed(0, 2)})),
               MalformedInput);
}

TEST(Proper, WorkedExamples) {
  auto half = Interval::closed(0, q(1, 2));
  EXPECT_TRUE(is_proper(affine(half, 1, 0, unit())));
  EXPECT_FALSE(is_proper(affine(Interval::left_open(0, 1), 1, 0, unit())));
  auto ray = Interval::make(Bound::at(0), Bound::pos_inf(), true, false);
  EXPECT_TRUE(is_proper(affine(ray, 1, 0, set({ray}))));
}

TEST(Proper, ConstantOnRayIsNotProper) {
  auto ray = Interval::make(Bound::at(0), Bound::pos_inf(), true, false);
  EXPECT_FALSE(is_proper(affine(ray, 0, 0, unit())));
}

TEST(Proper, CompactSourceAlwaysProper) {
  std::mt19937_64 rng(9);
  std::uniform_int_distribution<int> v(-4, 4);
  for (int trial = 0; trial < 100; ++trial) {
    Rational s(v(rng)), o(v(rng));
    auto dom = Interval::closed(0, 1);
    IntervalSet tgt = set({Interval::closed(-20, 20)});
    EXPECT_TRUE(is_proper(affine(dom, s, o, tgt)));
  }
}

TEST(LocalHomeomorphism, WorkedExamples) {
  EXPECT_TRUE(is_local_homeomorphism(affine(Interval::closed(0, 1), 1, 0, unit())));
  EXPECT_FALSE(is_local_homeomorphism(affine(Interval::closed(0, 1), 0, 0, unit())));
  auto fold = PiecewiseAffineMap::make({{Interval::closed(0, q(1, 2)), -1, q(1, 2)}, {Interval::closed(q(1, 2), 1), 1, q(-1, 2)}},
                                       unit(), unit());
  EXPECT_FALSE(is_local_homeomorphism(fold));
}

TEST(LocalHomeomorphism, KinkWithoutFoldIsFine) {
  auto kink = PiecewiseAffineMap::make({{Interval::closed(0, q(1, 2)), 1, 0}, {Interval::closed(q(1, 2), 1), 2, q(-1, 2)}},
                                       unit(), set({Interval::closed(0, 2)}));
  EXPECT_TRUE(is_local_homeomorphism(kink));
}

TEST(LocalHomeomorphism, InteriorMustLandInOpenPart) {
  // (0,1) onto a single point piece of the target would need slope 0; a piece
  // whose interior image touches the target boundary from inside is allowed.
  auto inclusion = affine(Interval::closed(0, q(1, 2)), 1, 0, unit());
  EXPECT_TRUE(is_local_homeomorphism(inclusion));
}

TEST(RangeCondition, WorkedExamples) {
  EXPECT_FALSE(range_condition(affine(Interval::closed(0, q(1, 2)), 1, 0, unit())));
  EXPECT_TRUE(range_condition(affine(Interval::closed(0, 1), 1, 0, unit())));
  EXPECT_TRUE(range_condition(affine(Interval::open(0, q(1, 2)), 1, 0, unit())));
}

TEST(SamplePoint, LiesInSet) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 200; ++trial) {
    IntervalSet s = random_set(rng);
    if (s.empty()) {
      EXPECT_THROW(sample_point(s), DomainError);
      continue;
    }
    EXPECT_TRUE(s.contains(sample_point(s)));
  }
}
