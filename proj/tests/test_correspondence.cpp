#include "corpus.hpp"
#include "fuzz.hpp"

#include <gtest/gtest.h>

using namespace hyperrigid;
using namespace corpus;

namespace {

std::vector<std::string> span_names(const Submodule& s) { return s.names(); }

Atom atom(const Correspondence& c, const std::string& cls, std::uint64_t i = 1) {
  return {c.algebra().index_of(cls), i};
}

// Random combination of finitely many edge copies (fibres capped at 3).
ModuleElement random_element(std::mt19937_64& rng, const Correspondence& c) {
  std::uniform_int_distribution<int> d(-2, 2);
  ModuleElement x;
  for (std::size_t k = 0; k < c.generators().size(); ++k)
    for (std::uint64_t i = 1; i <= 2; ++i)
      for (std::uint64_t j = 1; j <= 2; ++j) {
        EdgeCopy e{k, i, j, 1};
        if (c.valid(e)) x.add(e, Gaussian(Rational(d(rng)), Rational(d(rng))));
      }
  return x;
}

AlgebraElement random_function(std::mt19937_64& rng, const Correspondence& c) {
  std::uniform_int_distribution<int> d(-2, 2);
  std::map<std::size_t, Gaussian> vals;
  for (std::size_t k = 0; k < c.algebra().size(); ++k) vals[k] = Gaussian(Rational(d(rng)), Rational(d(rng)));
  AlgebraElement f = AlgebraElement::from_classes(vals);
  f.set({0, 1}, Gaussian(Rational(d(rng))));
  return f;
}

std::vector<Atom> probe_atoms(const Correspondence& c) {
  std::vector<Atom> out;
  for (std::size_t k = 0; k < c.algebra().size(); ++k)
    for (std::uint64_t i = 1; i <= 2; ++i)
      if (c.algebra().valid({k, i})) out.push_back({k, i});
  return out;
}

}  // namespace

TEST(KatsuraSets, KernelExamples) {
  EXPECT_TRUE(kernel_of_left_action(C(loop())).empty());
  EXPECT_EQ(kernel_of_left_action(C(arrow())).names(), std::vector<std::string>{"u"});
  EXPECT_EQ(kernel_of_left_action(C(omega_star())).names(), std::vector<std::string>{"W"});
}

TEST(KatsuraSets, KernelMatchesLeftActionOracle) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 100; ++trial) {
    Correspondence c = C(fuzz::random_discrete(rng));
    IdealSpec ker = kernel_of_left_action(c);
    for (std::size_t v = 0; v < c.algebra().size(); ++v) {
      bool kills = true;
      for (std::size_t k = 0; k < c.generators().size(); ++k)
        if (!left_act(c, AlgebraElement::indicator(v), ModuleElement::basis({k, 1, 1, 1})).is_zero()) kills = false;
      EXPECT_EQ(ker.contains_class(v), kills);
    }
  }
}

TEST(KatsuraSets, CompactsPreimageExamples) {
  EXPECT_EQ(compacts_preimage(C(loop())).names(), std::vector<std::string>{"v"});
  EXPECT_EQ(compacts_preimage(C(omega_star())).names(), std::vector<std::string>{"W"});
  EXPECT_EQ(compacts_preimage(C(star_plus_arm())).names(), (std::vector<std::string>{"W", "U", "Z"}));
}

TEST(KatsuraSets, IdealExamples) {
  EXPECT_EQ(katsura_ideal(C(loop())).names(), std::vector<std::string>{"v"});
  EXPECT_TRUE(katsura_ideal(C(omega_star())).empty());
  EXPECT_EQ(katsura_ideal(C(star_plus_arm())).names(), std::vector<std::string>{"U"});
}

TEST(IdealAct, Examples) {
  Correspondence l = C(loop()), sa = C(star_plus_arm()), so = C(omega_star());
  EXPECT_TRUE(ideal_act_submodule(l, IdealSpec::of(l.algebra(), {"v"})).is_full());
  EXPECT_EQ(span_names(ideal_act_submodule(sa, IdealSpec::of(sa.algebra(), {"U"}))), std::vector<std::string>{"F"});
  EXPECT_TRUE(ideal_act_submodule(so, IdealSpec::zero(so.algebra())).span.empty());
}

TEST(Nondegenerate, Examples) {
  EXPECT_TRUE(is_nondegenerate(C(loop())));
  EXPECT_TRUE(is_nondegenerate(C(arrow())));
  EXPECT_FALSE(is_nondegenerate(C(star_plus_arm())));
  EXPECT_FALSE(is_nondegenerate(C(omega_star())));
}

TEST(Nondegenerate, FiniteGraphsAlways) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 200; ++trial) EXPECT_TRUE(is_nondegenerate(C(fuzz::random_finite_discrete(rng))));
}

TEST(OrthogonalComplement, Examples) {
  Correspondence sa = C(star_plus_arm()), l = C(loop());
  Submodule f = ideal_act_submodule(sa, katsura_ideal(sa));
  EXPECT_EQ(span_names(orthogonal_complement(f)), std::vector<std::string>{"E"});
  EXPECT_TRUE(orthogonal_complement(Submodule::full(l)).span.empty());
  EXPECT_EQ(orthogonal_complement(Submodule{sa, {}}).span.size(), 2u);
}

TEST(OrthogonalComplement, GramOrthogonal) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 100; ++trial) {
    Correspondence c = C(fuzz::random_discrete(rng));
    Submodule s = ideal_act_submodule(c, katsura_ideal(c));
    Submodule t = orthogonal_complement(s);
    for (auto a : s.span)
      for (auto b : t.span)
        EXPECT_TRUE(inner(c, ModuleElement::basis({a, 1, 1, 1}), ModuleElement::basis({b, 1, 1, 1})).is_zero());
  }
}

TEST(Bimodule, GramPositivity) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 100; ++trial) {
    Correspondence c = C(fuzz::random_discrete(rng));
    ModuleElement x = random_element(rng, c);
    AlgebraElement g = inner(c, x, x);
    bool all_zero = true;
    for (const auto& a : probe_atoms(c)) {
      Gaussian v = g.at(a);
      EXPECT_EQ(v.im, 0);
      EXPECT_GE(v.re, 0);
      if (!v.is_zero()) all_zero = false;
    }
    EXPECT_EQ(all_zero, x.is_zero());
  }
}

TEST(Bimodule, AdjointableAndRightLinear) {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 100; ++trial) {
    Correspondence c = C(fuzz::random_discrete(rng));
    ModuleElement x = random_element(rng, c), y = random_element(rng, c);
    AlgebraElement f = random_function(rng, c);
    for (const auto& a : probe_atoms(c)) {
      EXPECT_EQ(inner(c, left_act(c, f, x), y).at(a), inner(c, x, left_act(c, f.star(), y)).at(a));
      EXPECT_EQ(inner(c, x, right_act(c, y, f)).at(a), (inner(c, x, y) * f).at(a));
    }
  }
}

TEST(SigmaWitness, Examples) {
  EXPECT_FALSE(sigma_degeneracy_witness(C(loop())));
  Correspondence so = C(omega_star());
  auto w = sigma_degeneracy_witness(so);
  ASSERT_TRUE(w);
  EXPECT_EQ(w->sigma.atoms(), std::vector<Atom>{atom(so, "W")});
  EXPECT_EQ(w->norm2, 1);
  EXPECT_EQ(w->pairings_checked, 0u);
  Correspondence sa = C(star_plus_arm());
  auto v = sigma_degeneracy_witness(sa);
  ASSERT_TRUE(v);
  EXPECT_EQ(sa.edge_class(v->edge.cls).name, "E");
  EXPECT_EQ(v->sigma.atoms(), std::vector<Atom>{atom(sa, "W")});
  EXPECT_EQ(v->norm2, 1);
  EXPECT_EQ(v->pairing_max, 0);
}

TEST(SigmaWitness, ExistsIffDegenerate) {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 200; ++trial) {
    Correspondence c = C(fuzz::random_discrete(rng));
    auto w = sigma_degeneracy_witness(c);
    EXPECT_EQ(w.has_value(), !is_nondegenerate(c));
    if (w) {
      EXPECT_GT(w->norm2, 0);
      EXPECT_EQ(w->pairing_max, 0);
    }
  }
}

TEST(InteriorTensor, Examples) {
  Correspondence so = C(omega_star()), sa = C(star_plus_arm()), a = C(arrow());
  auto at_w = EvaluationRep::make(so.algebra(), {atom(so, "W")});
  auto full = interior_tensor(Submodule::full(so), at_w);
  ASSERT_EQ(full.basis.size(), 1u);
  EXPECT_EQ(full.gram, Matrix::identity(1));
  auto sa_w = EvaluationRep::make(sa.algebra(), {atom(sa, "W")});
  EXPECT_TRUE(interior_tensor(ideal_act_submodule(sa, katsura_ideal(sa)), sa_w).basis.empty());
  auto at_v = EvaluationRep::make(a.algebra(), {atom(a, "v")});
  EXPECT_TRUE(interior_tensor(Submodule::full(a), at_v).basis.empty());
}

TEST(InteriorTensor, InfiniteFiberIsSymbolicOnly) {
  auto g = DiscreteGraphPresentation::make({{"v", Count::finite(1)}}, {{"e", "v", "v", Count::omega()}});
  Correspondence c = C(g);
  auto sigma = EvaluationRep::make(c.algebra(), {{0, 1}});
  EXPECT_THROW(interior_tensor(Submodule::full(c), sigma), SymbolicOnly);
}

TEST(InteriorTensor, GramTwoWays) {
  // Definition recursion vs. explicit basis: distinct composable paths are
  // orthonormal, and the recursion must agree entry by entry.
  std::mt19937_64 rng(31);
  int checked = 0;
  for (int trial = 0; trial < 100; ++trial) {
    Correspondence c = C(fuzz::random_discrete(rng));
    auto sigma = EvaluationRep::make(c.algebra(), {{0, 1}});
    std::vector<TensorPath> paths;
    try {
      paths = tensor_power_basis(c, sigma, 2, 200);
    } catch (const SymbolicOnly&) {
      continue;
    } catch (const ResourceError&) {
      continue;
    }
    for (std::size_t i = 0; i < paths.size(); ++i)
      for (std::size_t j = 0; j < paths.size(); ++j) {
        Gaussian g = tensor_inner(c, sigma, elementary(c, sigma, paths[i]), elementary(c, sigma, paths[j]));
        EXPECT_EQ(g, Gaussian(i == j ? 1 : 0));
        ++checked;
      }
  }
  EXPECT_GT(checked, 0);
}

TEST(TensorPower, Examples) {
  Correspondence l = C(loop()), sa = C(star_plus_arm());
  auto at_v = EvaluationRep::make(l.algebra(), {{0, 1}});
  auto one = tensor_power_reduction(l, 1, at_v);
  EXPECT_EQ(one.k_basis.size(), 1u);
  EXPECT_TRUE(one.k_basis.front().edges.empty());
  auto sa_w = EvaluationRep::make(sa.algebra(), {atom(sa, "W")});
  auto two = tensor_power_reduction(sa, 2, sa_w);
  EXPECT_EQ(two.k_basis.size(), 1u);
  EXPECT_EQ(two.dim_x_tensor_k, 0u);
  EXPECT_TRUE(two.identity_holds());
  auto three = tensor_power_reduction(l, 3, at_v);
  EXPECT_EQ(three.k_basis.size(), 1u);
  EXPECT_EQ(three.k_basis.front().edges.size(), 2u);
  EXPECT_EQ(three.dim_x_tensor_k, 1u);
  EXPECT_TRUE(three.identity_holds());
  EXPECT_THROW(tensor_power_reduction(l, 0, at_v), DomainError);
}

TEST(Compacts, Examples) {
  Correspondence sa = C(star_plus_arm()), l = C(loop());
  auto k = left_action_as_compacts(sa, AlgebraElement::delta(atom(sa, "U")));
  ASSERT_EQ(k.size(), 1u);
  EXPECT_EQ(sa.edge_class(k[0].x.coeffs().begin()->first.cls).name, "F");
  ModuleElement e1 = ModuleElement::basis({0, 1, 1, 1}), f = ModuleElement::basis({1, 1, 1, 1});
  EXPECT_TRUE(apply(sa, k, e1).is_zero());
  EXPECT_EQ(apply(sa, k, f), f);
  auto kl = left_action_as_compacts(l, AlgebraElement::delta({0, 1}));
  ASSERT_EQ(kl.size(), 1u);
  EXPECT_TRUE(left_action_as_compacts(l, AlgebraElement()).empty());
}

TEST(Compacts, OutsideFinIsDomainError) {
  Correspondence so = C(omega_star());
  EXPECT_THROW(left_action_as_compacts(so, AlgebraElement::delta(atom(so, "V"))), DomainError);
}
