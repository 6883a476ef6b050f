#include "corpus.hpp"
#include "fuzz.hpp"

#include <gtest/gtest.h>

using namespace hyperrigid;
using namespace corpus;

namespace {

std::vector<std::string> names(const IdealSpec& i) { return i.names(); }

std::optional<IntervalGraphPresentation> try_interval(std::mt19937_64& rng, const fuzz::IntervalLimits& lim = {}) {
  try {
    return fuzz::random_interval(rng, lim);
  } catch (const MalformedInput&) {
    return std::nullopt;
  }
}

}  // namespace

TEST(Presentation, Validation) {
  EXPECT_THROW(DiscreteGraphPresentation::make({{"v", Count::finite(1)}}, {{"e", "v", "w", Count::finite(1)}}),
               MalformedInput);
  EXPECT_THROW(DiscreteGraphPresentation::make({{"v", Count::finite(1)}},
                                               {{"e", "v", "v", Count::finite(1)}, {"e", "v", "v", Count::finite(1)}}),
               MalformedInput);
  IntervalSet g0 = IntervalSet::of({Interval::closed(0, 1)});
  auto fold = PiecewiseAffineMap::make(
      {{Interval::closed(0, Rational(1, 2)), -1, Rational(1, 2)}, {Interval::closed(Rational(1, 2), 1), 1, Rational(-1, 2)}},
      g0, g0);
  EXPECT_THROW(IntervalGraphPresentation::make(g0, g0, PiecewiseAffineMap::identity(g0, g0), fold), MalformedInput);
}

TEST(Classify, DiscreteExamples) {
  auto a = classify_vertices(arrow());
  EXPECT_EQ(names(a.sce), std::vector<std::string>{"u"});
  EXPECT_EQ(names(a.fin), (std::vector<std::string>{"u", "v"}));
  EXPECT_EQ(names(a.reg), std::vector<std::string>{"v"});
  auto s = classify_vertices(omega_star());
  EXPECT_EQ(names(s.sce), std::vector<std::string>{"W"});
  EXPECT_EQ(names(s.fin), std::vector<std::string>{"W"});
  EXPECT_TRUE(s.reg.empty());
}

TEST(Classify, IntervalExample) {
  auto c = classify_vertices(i1());
  EXPECT_EQ(c.sce, IntervalSet::of({Interval::left_open(Rational(1, 2), 1)}));
  EXPECT_EQ(c.fin, IntervalSet::of({Interval::closed(0, 1)}));
  EXPECT_EQ(c.reg, IntervalSet::of({Interval::right_open(0, Rational(1, 2))}));
}

TEST(Classify, DiscreteRegIsKatsuraIdeal) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    auto g = fuzz::random_discrete(rng);
    EXPECT_EQ(classify_vertices(g).reg, katsura_ideal(build_correspondence(g)));
  }
}

TEST(Decide, CorpusVerdicts) {
  EXPECT_TRUE(decide_hyperrigid(loop()).hyperrigid);
  EXPECT_TRUE(decide_hyperrigid(arrow()).hyperrigid);
  EXPECT_FALSE(decide_hyperrigid(star_plus_arm()).hyperrigid);
  EXPECT_FALSE(decide_hyperrigid(omega_star()).hyperrigid);
  EXPECT_FALSE(decide_hyperrigid(i1()).hyperrigid);
  EXPECT_TRUE(decide_hyperrigid(i2()).hyperrigid);
}

TEST(Decide, CertificateKinds) {
  Verdict yes = decide_hyperrigid(loop());
  EXPECT_EQ(yes.certificate_kind, "theorem-3.1");
  EXPECT_FALSE(yes.witness);
  EXPECT_NE(yes.statement.find("not verified computationally"), std::string::npos);
  Verdict no = decide_hyperrigid(star_plus_arm());
  EXPECT_EQ(no.certificate_kind, "sigma-witness");
  ASSERT_TRUE(no.witness);
  EXPECT_EQ(no.witness->edge, "E");
  EXPECT_EQ(no.witness->vertex, "W#1");
}

TEST(Decide, FiniteGraphsHyperrigid) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 200; ++trial) EXPECT_TRUE(decide_hyperrigid(fuzz::random_finite_discrete(rng)).hyperrigid);
}

TEST(Decide, RowFiniteCharacterizesDiscrete) {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 300; ++trial) {
    auto g = fuzz::random_discrete(rng);
    EXPECT_EQ(decide_hyperrigid(g).hyperrigid, check_row_finite(g));
  }
  EXPECT_FALSE(check_row_finite(omega_star()));
  EXPECT_FALSE(check_row_finite(star_plus_arm()));
  EXPECT_TRUE(check_row_finite(loop()));
}

TEST(Decide, FuzzedIntervalRoutesAgree) {
  std::mt19937_64 rng(7);
  int decided = 0;
  for (int trial = 0; trial < 300; ++trial) {
    auto g = try_interval(rng);
    if (!g) continue;
    Verdict v = decide_hyperrigid(*g);  // throws InternalInconsistency on disagreement
    EXPECT_EQ(v.hyperrigid, v.routes.range_condition());
    EXPECT_EQ(v.hyperrigid, v.routes.reg_preimage);
    ++decided;
  }
  EXPECT_GE(decided, 200);
}

TEST(Decide, PropernessHalves) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 300; ++trial) {
    auto g = try_interval(rng);
    if (!g) continue;
    auto cls = classify_vertices(*g);
    EXPECT_EQ(preimage(g->r(), cls.fin) == g->g1(), is_proper(g->r().corestrict()));
    EXPECT_EQ(preimage(g->r(), closure(cls.sce, g->g0())).empty(), range_condition(g->r()));
  }
}

TEST(Decide, NonProperAndProperEdges) {
  // r: (0,1] -> [0,1] never reaches 0: proper onto its image, not as a map into G0.
  IntervalSet g0 = IntervalSet::of({Interval::closed(0, 1)});
  IntervalSet g1 = IntervalSet::of({Interval::left_open(0, 1)});
  auto id = PiecewiseAffineMap::identity(g1, g0);
  auto g = IntervalGraphPresentation::make(g0, g1, id, id);
  EXPECT_FALSE(is_proper(g.r()));
  EXPECT_TRUE(is_proper(g.r().corestrict()));
  Verdict v = decide_hyperrigid(g);
  EXPECT_TRUE(v.hyperrigid);
  EXPECT_EQ(compact_base_shortcut(g), std::nullopt);
}

TEST(Shortcut, Examples) {
  EXPECT_EQ(compact_base_shortcut(i2()), true);
  EXPECT_EQ(compact_base_shortcut(i1()), false);
  auto ray = Interval::make(Bound::at(0), Bound::pos_inf(), true, false);
  EXPECT_EQ(compact_base_shortcut(identity_graph(ray, ray)), std::nullopt);
}

TEST(Shortcut, FuzzedCompactBases) {
  std::mt19937_64 rng(9);
  fuzz::IntervalLimits lim;
  lim.compact_base = true;
  int applicable = 0;
  for (int trial = 0; trial < 100; ++trial) {
    auto g = try_interval(rng, lim);
    if (!g) continue;
    if (compact_base_shortcut(*g)) ++applicable;
  }
  EXPECT_GE(applicable, 30);
}

TEST(Vanishing, Examples) {
  auto sa = star_plus_arm();
  Correspondence c = build_correspondence(sa);
  IdealSpec j = katsura_ideal(c);
  std::set<std::string> outside;
  for (std::size_t k = 0; k < sa.atoms().size(); ++k)
    if (!j.contains_class(k)) outside.insert(sa.atoms()[k].name);
  EXPECT_EQ(vanishing_submodule(sa, outside, {}).span, ideal_act_submodule(c, j).span);
  EXPECT_TRUE(vanishing_submodule(sa, {}, {}).is_full());
  EXPECT_TRUE(vanishing_submodule(sa, {"V", "W", "U", "Z"}, {}).span.empty());
  EXPECT_EQ(vanishing_submodule(sa, {}, {"E"}).names(), std::vector<std::string>{"F"});
}

TEST(Vanishing, ReproducesIdealAct) {
  std::mt19937_64 rng(10);
  for (int trial = 0; trial < 200; ++trial) {
    auto g = fuzz::random_discrete(rng);
    Correspondence c = build_correspondence(g);
    IdealSpec j = katsura_ideal(c);
    std::set<std::string> outside;
    for (std::size_t k = 0; k < g.atoms().size(); ++k)
      if (!j.contains_class(k)) outside.insert(g.atoms()[k].name);
    EXPECT_EQ(vanishing_submodule(g, outside, {}).span, ideal_act_submodule(c, j).span);
  }
}

TEST(IntervalWitness, I1) {
  IntervalWitness w = interval_sigma_witness(i1());
  EXPECT_FALSE(classify_vertices(i1()).reg.contains(i1().r()(w.edge)));
  EXPECT_EQ(w.norm2, 1);
  EXPECT_EQ(w.pairing_max, 0);
  EXPECT_THROW(interval_sigma_witness(i2()), DomainError);
}
