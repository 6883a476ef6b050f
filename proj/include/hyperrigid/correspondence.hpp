#pragma once

// Graph-type C*-correspondences over C0(V) for presented discrete vertex
// sets: Gram data, left action, Katsura's ideal, degeneracy detectors,
// interior tensor products and rank-one decompositions.

#include "hyperrigid/cstar_base.hpp"
#include "hyperrigid/exact.hpp"
#include "hyperrigid/linalg.hpp"

#include <compare>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace hyperrigid {

/// Edge class e: source -> range with multiplicity. Copies are
/// complete-bipartite: one edge per (source copy, range copy, unit of
/// multiplicity).
struct EdgeClass {
  std::string name;
  std::size_t source = 0;
  std::size_t range = 0;
  Count mult = Count::finite(1);

  friend bool operator==(const EdgeClass&, const EdgeClass&) = default;
};

struct EdgeCopy {
  std::size_t cls = 0;
  std::uint64_t src = 1;
  std::uint64_t rng = 1;
  std::uint64_t mult = 1;

  friend auto operator<=>(const EdgeCopy&, const EdgeCopy&) = default;
};

class Correspondence {
 public:
  Correspondence() : data_(std::make_shared<Data>()) {}

  static Correspondence make(AtomSet algebra, std::vector<EdgeClass> generators) {
    std::set<std::string> seen;
    for (const auto& e : generators) {
      if (e.name.empty()) throw MalformedInput("edge class with empty name");
      if (!seen.insert(e.name).second) throw MalformedInput("duplicate edge class '" + e.name + "'");
      // A range class outside the algebra would make phi(C)X a proper submodule.
      if (e.source >= algebra.size() || e.range >= algebra.size())
        throw MalformedInput("edge class '" + e.name + "' references a missing vertex class");
      if (e.mult.is_zero()) throw MalformedInput("edge class '" + e.name + "' has multiplicity 0");
    }
    Correspondence c;
    c.data_ = std::make_shared<Data>(Data{std::move(algebra), std::move(generators)});
    return c;
  }

  const AtomSet& algebra() const { return data_->algebra; }
  const std::vector<EdgeClass>& generators() const { return data_->generators; }
  const EdgeClass& edge_class(std::size_t i) const { return data_->generators.at(i); }

  Atom source(const EdgeCopy& e) const { return {edge_class(e.cls).source, e.src}; }
  Atom range(const EdgeCopy& e) const { return {edge_class(e.cls).range, e.rng}; }

  bool valid(const EdgeCopy& e) const {
    if (e.cls >= generators().size() || e.mult == 0) return false;
    const auto& ec = edge_class(e.cls);
    return algebra().valid(source(e)) && algebra().valid(range(e)) &&
           (ec.mult.is_omega() || e.mult <= ec.mult.value());
  }

  // Edges of class `cls` leaving one fixed source copy.
  Count fiber_count(std::size_t cls) const {
    const auto& ec = edge_class(cls);
    return algebra()[ec.range].count * ec.mult;
  }
  // Total number of edges received by one copy of vertex class `cls`.
  Count in_degree(std::size_t cls) const {
    Count total = Count::finite(0);
    for (const auto& ec : generators())
      if (ec.range == cls) total = total + algebra()[ec.source].count * ec.mult;
    return total;
  }

  std::vector<EdgeCopy> edges_from(const Atom& v) const {
    std::vector<EdgeCopy> out;
    for (std::size_t k = 0; k < generators().size(); ++k) {
      const auto& ec = edge_class(k);
      if (ec.source != v.cls) continue;
      if (fiber_count(k).is_omega())
        throw SymbolicOnly("edge class '" + ec.name + "' has infinitely many edges sourced at " + algebra().name(v));
      for (std::uint64_t j = 1; j <= algebra()[ec.range].count.value(); ++j)
        for (std::uint64_t m = 1; m <= ec.mult.value(); ++m) out.push_back({k, v.index, j, m});
    }
    return out;
  }

  std::vector<EdgeCopy> edges_into(const Atom& v) const {
    if (in_degree(v.cls).is_omega())
      throw DomainError("vertex " + algebra().name(v) + " receives infinitely many edges");
    std::vector<EdgeCopy> out;
    for (std::size_t k = 0; k < generators().size(); ++k) {
      const auto& ec = edge_class(k);
      if (ec.range != v.cls) continue;
      for (std::uint64_t i = 1; i <= algebra()[ec.source].count.value(); ++i)
        for (std::uint64_t m = 1; m <= ec.mult.value(); ++m) out.push_back({k, i, v.index, m});
    }
    return out;
  }

  std::string edge_name(const EdgeCopy& e) const {
    return edge_class(e.cls).name + "#" + std::to_string(e.src) + "." + std::to_string(e.rng) + "." +
           std::to_string(e.mult);
  }

  friend bool operator==(const Correspondence& a, const Correspondence& b) {
    return a.algebra() == b.algebra() && a.generators() == b.generators();
  }

 private:
  struct Data {
    AtomSet algebra;
    std::vector<EdgeClass> generators;
  };
  std::shared_ptr<const Data> data_;
};

/// Finitely supported element of X: a Q(i)-combination of edge copies.
class ModuleElement {
 public:
  ModuleElement() = default;
  static ModuleElement basis(const EdgeCopy& e) {
    ModuleElement x;
    x.coeffs_[e] = Gaussian(1);
    return x;
  }

  const std::map<EdgeCopy, Gaussian>& coeffs() const { return coeffs_; }
  Gaussian at(const EdgeCopy& e) const {
    auto it = coeffs_.find(e);
    return it == coeffs_.end() ? Gaussian() : it->second;
  }
  bool is_zero() const { return coeffs_.empty(); }

  void add(const EdgeCopy& e, const Gaussian& v) {
    auto& slot = coeffs_[e];
    slot += v;
    if (slot.is_zero()) coeffs_.erase(e);
  }

  friend ModuleElement operator+(ModuleElement a, const ModuleElement& b) {
    for (const auto& [e, v] : b.coeffs_) a.add(e, v);
    return a;
  }
  friend ModuleElement operator-(ModuleElement a, const ModuleElement& b) {
    for (const auto& [e, v] : b.coeffs_) a.add(e, -v);
    return a;
  }
  friend ModuleElement operator*(const Gaussian& c, const ModuleElement& x) {
    ModuleElement y;
    for (const auto& [e, v] : x.coeffs_) y.add(e, c * v);
    return y;
  }
  friend bool operator==(const ModuleElement&, const ModuleElement&) = default;

 private:
  std::map<EdgeCopy, Gaussian> coeffs_;
};

/// <x, y>(v) = sum over edges e with s(e) = v of conj(x(e)) y(e).
inline AlgebraElement inner(const Correspondence& c, const ModuleElement& x, const ModuleElement& y) {
  AlgebraElement g;
  for (const auto& [e, v] : x.coeffs()) {
    Gaussian w = y.at(e);
    if (!w.is_zero()) g.add(c.source(e), v.conj() * w);
  }
  return g;
}

/// phi(f)x: (f o r) x.
inline ModuleElement left_act(const Correspondence& c, const AlgebraElement& f, const ModuleElement& x) {
  ModuleElement y;
  for (const auto& [e, v] : x.coeffs()) y.add(e, f.at(c.range(e)) * v);
  return y;
}

/// x . g: x (g o s).
inline ModuleElement right_act(const Correspondence& c, const ModuleElement& x, const AlgebraElement& g) {
  ModuleElement y;
  for (const auto& [e, v] : x.coeffs()) y.add(e, v * g.at(c.source(e)));
  return y;
}

/// Closed submodule spanned by whole edge classes.
struct Submodule {
  Correspondence parent;
  std::set<std::size_t> span;

  static Submodule full(const Correspondence& c) {
    Submodule s{c, {}};
    for (std::size_t k = 0; k < c.generators().size(); ++k) s.span.insert(k);
    return s;
  }
  bool is_full() const { return span.size() == parent.generators().size(); }
  bool contains(const ModuleElement& x) const {
    for (const auto& [e, v] : x.coeffs())
      if (!span.contains(e.cls)) return false;
    return true;
  }
  std::vector<std::string> names() const {
    std::vector<std::string> out;
    for (auto k : span) out.push_back(parent.edge_class(k).name);
    return out;
  }

  friend bool operator==(const Submodule&, const Submodule&) = default;
};

/// ker phi: classes receiving no edges.
inline IdealSpec kernel_of_left_action(const Correspondence& c) {
  std::set<std::size_t> out;
  for (std::size_t v = 0; v < c.algebra().size(); ++v)
    if (c.in_degree(v).is_zero()) out.insert(v);
  return IdealSpec(c.algebra(), std::move(out));
}

/// phi^{-1}(K(X)): classes with finite total in-degree.
inline IdealSpec compacts_preimage(const Correspondence& c) {
  std::set<std::size_t> out;
  for (std::size_t v = 0; v < c.algebra().size(); ++v)
    if (c.in_degree(v).is_finite()) out.insert(v);
  return IdealSpec(c.algebra(), std::move(out));
}

inline IdealSpec katsura_ideal(const Correspondence& c) {
  return ideal_intersect(ideal_complement(kernel_of_left_action(c)), compacts_preimage(c));
}

/// phi(J)X: edge classes whose range lies in the ideal.
inline Submodule ideal_act_submodule(const Correspondence& c, const IdealSpec& j) {
  if (!(j.parent() == c.algebra())) throw DomainError("ideal_act_submodule: ideal of a different algebra");
  Submodule s{c, {}};
  for (std::size_t k = 0; k < c.generators().size(); ++k)
    if (j.contains_class(c.edge_class(k).range)) s.span.insert(k);
  return s;
}

inline bool is_nondegenerate(const Correspondence& c) { return ideal_act_submodule(c, katsura_ideal(c)).is_full(); }

/// Distinct edge classes are Gram-orthogonal, so the complement is exact at
/// class granularity.
inline Submodule orthogonal_complement(const Submodule& s) {
  Submodule out{s.parent, {}};
  for (std::size_t k = 0; k < s.parent.generators().size(); ++k)
    if (!s.span.contains(k)) out.span.insert(k);
  return out;
}

// ---------------------------------------------------------------------------
// Interior tensor products X^{(x)n} (x)_sigma H.

/// Elementary tensor e_1 (x) ... (x) e_n (x) h_basis.
struct TensorPath {
  std::vector<EdgeCopy> edges;
  std::size_t basis = 0;

  friend auto operator<=>(const TensorPath&, const TensorPath&) = default;
};

struct TensorVector {
  std::size_t level = 0;
  std::map<TensorPath, Gaussian> terms;

  bool is_zero() const { return terms.empty(); }
};

inline bool composable(const Correspondence& c, const EvaluationRep& sigma, const TensorPath& p) {
  if (p.basis >= sigma.dimension()) return false;
  for (std::size_t i = 0; i + 1 < p.edges.size(); ++i)
    if (c.source(p.edges[i]) != c.range(p.edges[i + 1])) return false;
  return p.edges.empty() || c.source(p.edges.back()) == sigma.atoms()[p.basis];
}

/// Non-composable elementary tensors are zero.
inline TensorVector elementary(const Correspondence& c, const EvaluationRep& sigma, TensorPath p,
                               const Gaussian& coef = Gaussian(1)) {
  TensorVector t{p.edges.size(), {}};
  if (!coef.is_zero() && composable(c, sigma, p)) t.terms[std::move(p)] = coef;
  return t;
}

/// Where the next left factor must start: r(e_1), or the atom under h.
inline Atom head(const Correspondence& c, const EvaluationRep& sigma, const TensorPath& p) {
  return p.edges.empty() ? sigma.atoms().at(p.basis) : c.range(p.edges.front());
}

/// <x_1(x)..(x)x_n(x)h, y_1(x)..(x)y_n(x)h'> from the defining recursion
/// <x(x)xi, y(x)eta> = <xi, phi(<x,y>) eta>, ending in <h, sigma(g) h'>.
inline Gaussian tensor_inner(const Correspondence& c, const EvaluationRep& sigma, const TensorVector& a,
                             const TensorVector& b) {
  if (a.level != b.level) return {};
  Gaussian acc;
  for (const auto& [p, u] : a.terms)
    for (const auto& [q, w] : b.terms) {
      if (p.basis != q.basis) continue;
      AlgebraElement g;
      bool first = true;
      for (std::size_t k = 0; k < p.edges.size(); ++k) {
        ModuleElement x = ModuleElement::basis(p.edges[k]);
        ModuleElement y = ModuleElement::basis(q.edges[k]);
        g = first ? inner(c, x, y) : inner(c, x, left_act(c, g, y));
        first = false;
        if (g.is_zero()) break;
      }
      Gaussian val = first ? Gaussian(1) : g.at(sigma.atoms()[p.basis]);
      acc += u.conj() * w * val;
    }
  return acc;
}

struct InteriorTensor {
  std::vector<TensorPath> basis;
  Matrix gram;
};

/// Basis of s (x)_sigma H: e (x) h_k with e in s sourced at atom k.
inline InteriorTensor interior_tensor(const Submodule& s, const EvaluationRep& sigma) {
  const Correspondence& c = s.parent;
  InteriorTensor out;
  for (std::size_t k = 0; k < sigma.dimension(); ++k)
    for (const auto& e : c.edges_from(sigma.atoms()[k]))
      if (s.span.contains(e.cls)) out.basis.push_back({{e}, k});
  out.gram = Matrix(out.basis.size(), out.basis.size());
  for (std::size_t i = 0; i < out.basis.size(); ++i)
    for (std::size_t j = 0; j < out.basis.size(); ++j)
      out.gram(i, j) = tensor_inner(c, sigma, elementary(c, sigma, out.basis[i]), elementary(c, sigma, out.basis[j]));
  return out;
}

/// Composable paths of length n ending over sigma's atoms, enumerated by
/// prepending edges to shorter paths.
inline std::vector<TensorPath> tensor_power_basis(const Correspondence& c, const EvaluationRep& sigma, std::size_t n,
                                                  std::size_t budget = 10000) {
  std::vector<TensorPath> level;
  for (std::size_t k = 0; k < sigma.dimension(); ++k) level.push_back({{}, k});
  for (std::size_t step = 0; step < n; ++step) {
    std::vector<TensorPath> next;
    for (const auto& p : level)
      for (const auto& e : c.edges_from(head(c, sigma, p))) {
        TensorPath q{{e}, p.basis};
        q.edges.insert(q.edges.end(), p.edges.begin(), p.edges.end());
        next.push_back(std::move(q));
        if (next.size() > budget) throw ResourceError("tensor power basis exceeds budget of " + std::to_string(budget));
      }
    level = std::move(next);
  }
  return level;
}

/// True when every path of length <= depth from `v` crosses only finite fibers.
inline bool witness_finite(const Correspondence& c, const Atom& v, std::size_t depth) {
  try {
    std::set<Atom> frontier{v};
    for (std::size_t d = 0; d < depth && !frontier.empty(); ++d) {
      std::set<Atom> next;
      for (const auto& a : frontier)
        for (const auto& e : c.edges_from(a)) next.insert(c.range(e));
      frontier = std::move(next);
    }
    return true;
  } catch (const SymbolicOnly&) {
    return false;
  }
}

struct SigmaWitness {
  EvaluationRep sigma;
  EdgeCopy edge;
  TensorVector vector;      // f (x) h with f the edge indicator
  Rational norm2;           // <f(x)h, f(x)h>
  Rational pairing_max;     // max |<f(x)h, b>| over the spanning set of phi(J)X (x)_sigma H
  std::size_t pairings_checked = 0;
  bool fiber_finite = true;  // phi(J)X (x)_sigma H is finite-dimensional
};

/// For a degenerate correspondence: an evaluation sigma and a nonzero
/// f (x) h orthogonal to phi(J)X (x)_sigma H. Among admissible edge classes
/// the first whose paths of length <= depth stay finite is preferred.
inline std::optional<SigmaWitness> sigma_degeneracy_witness(const Correspondence& c, std::size_t depth = 3) {
  IdealSpec j = katsura_ideal(c);
  Submodule ideal_part = ideal_act_submodule(c, j);
  if (ideal_part.is_full()) return std::nullopt;
  Submodule outside = orthogonal_complement(ideal_part);
  std::size_t chosen = *outside.span.begin();
  for (auto k : outside.span)
    if (witness_finite(c, {c.edge_class(k).source, 1}, depth)) {
      chosen = k;
      break;
    }
  SigmaWitness w;
  Atom at{c.edge_class(chosen).source, 1};
  w.sigma = EvaluationRep::make(c.algebra(), {at});
  w.edge = EdgeCopy{chosen, 1, 1, 1};
  w.vector = elementary(c, w.sigma, {{w.edge}, 0});
  w.norm2 = tensor_inner(c, w.sigma, w.vector, w.vector).re;

  std::vector<TensorPath> spanning;
  try {
    spanning = interior_tensor(ideal_part, w.sigma).basis;
  } catch (const SymbolicOnly&) {
    // Infinite fiber: pair against the first copies of each class instead.
    w.fiber_finite = false;
    for (auto k : ideal_part.span) {
      const auto& ec = c.edge_class(k);
      if (ec.source != at.cls) continue;
      for (std::uint64_t r = 1; r <= 4; ++r) {
        EdgeCopy e{k, 1, r, 1};
        if (c.valid(e)) spanning.push_back({{e}, 0});
      }
    }
  }
  for (const auto& p : spanning) {
    Rational m = tensor_inner(c, w.sigma, w.vector, elementary(c, w.sigma, p)).max_abs();
    if (w.pairing_max < m) w.pairing_max = m;
    ++w.pairings_checked;
  }
  return w;
}

/// K := X^{(x)(n-1)} (x)_sigma H, on which C acts through the leftmost
/// range; degeneracy of phi(J)(x)id at power n becomes level-one degeneracy
/// over K.
struct PowerReduction {
  std::size_t n = 1;
  std::vector<TensorPath> k_basis;
  std::vector<Atom> anchors;          // point of C acting on each K-vector
  std::size_t dim_power = 0;          // dim X^{(x)n} (x)_sigma H
  std::size_t dim_x_tensor_k = 0;     // dim X (x) K
  std::size_t dim_ideal_power = 0;    // dim (phi(J)(x)id) X^{(x)n} (x)_sigma H
  std::size_t dim_ideal_reduced = 0;  // dim phi(J)X (x) K
  bool degenerate() const { return dim_ideal_power < dim_power; }
  bool identity_holds() const { return dim_power == dim_x_tensor_k && dim_ideal_power == dim_ideal_reduced; }
};

inline PowerReduction tensor_power_reduction(const Correspondence& c, std::size_t n, const EvaluationRep& sigma,
                                             std::size_t budget = 10000) {
  if (n == 0) throw DomainError("tensor_power_reduction needs n >= 1");
  IdealSpec j = katsura_ideal(c);
  PowerReduction out;
  out.n = n;
  out.k_basis = tensor_power_basis(c, sigma, n - 1, budget);
  for (const auto& xi : out.k_basis) {
    out.anchors.push_back(head(c, sigma, xi));
    for (const auto& e : c.edges_from(out.anchors.back())) {
      ++out.dim_x_tensor_k;
      if (j.contains(c.range(e))) ++out.dim_ideal_reduced;
    }
  }
  // Independent count: rank of the Gram matrix of the level-n paths, all of
  // which are pairwise orthonormal exactly when the identity holds.
  std::vector<TensorPath> power = tensor_power_basis(c, sigma, n, budget);
  Subspace span(power.size());
  for (std::size_t i = 0; i < power.size(); ++i) {
    SparseVec row;
    TensorVector vi = elementary(c, sigma, power[i]);
    for (std::size_t k = 0; k < power.size(); ++k) {
      Gaussian g = tensor_inner(c, sigma, elementary(c, sigma, power[k]), vi);
      if (!g.is_zero()) row[k] = g;
    }
    span.insert(row);
  }
  out.dim_power = span.dim();
  for (const auto& p : power)
    if (j.contains(c.range(p.edges.front()))) ++out.dim_ideal_power;
  return out;
}

// ---------------------------------------------------------------------------
// Rank-one operators.

/// coef * theta_{x,y}, theta_{x,y}(z) = x <y, z>.
struct ThetaTerm {
  Gaussian coef = Gaussian(1);
  ModuleElement x;
  ModuleElement y;
};
using CompactOperator = std::vector<ThetaTerm>;

inline ModuleElement theta(const Correspondence& c, const ModuleElement& x, const ModuleElement& y,
                           const ModuleElement& z) {
  return right_act(c, x, inner(c, y, z));
}

inline ModuleElement apply(const Correspondence& c, const CompactOperator& k, const ModuleElement& z) {
  ModuleElement out;
  for (const auto& t : k) out = out + t.coef * theta(c, t.x, t.y, z);
  return out;
}

/// phi(f) = sum over edges e into supp f of f(r(e)) theta_{e,e}, checked
/// exactly against phi(f) on the generators it can touch.
inline CompactOperator left_action_as_compacts(const Correspondence& c, const AlgebraElement& f) {
  IdealSpec fin = compacts_preimage(c);
  for (auto cls : f.class_support())
    if (!fin.contains_class(cls))
      throw DomainError("element is supported on class '" + c.algebra()[cls].name +
                        "' of infinite in-degree; phi(f) is not compact");
  std::vector<Atom> atoms;
  for (const auto& [cls, v] : f.class_values()) {
    if (v.is_zero() || c.in_degree(cls).is_zero()) continue;
    const Count& n = c.algebra()[cls].count;
    if (n.is_omega())
      throw DomainError("phi of a class constant on omega class '" + c.algebra()[cls].name +
                        "' needs infinitely many rank-one terms");
    for (std::uint64_t i = 1; i <= n.value(); ++i) atoms.push_back({cls, i});
  }
  for (const auto& [a, v] : f.atom_values()) atoms.push_back(a);
  std::set<Atom> unique(atoms.begin(), atoms.end());

  CompactOperator out;
  std::vector<EdgeCopy> probes;
  for (const auto& a : unique) {
    Gaussian v = f.at(a);
    for (const auto& e : c.edges_into(a)) {
      probes.push_back(e);
      if (!v.is_zero()) out.push_back({v, ModuleElement::basis(e), ModuleElement::basis(e)});
    }
  }
  for (std::size_t k = 0; k < c.generators().size(); ++k) probes.push_back({k, 1, 1, 1});
  for (const auto& e : probes) {
    ModuleElement z = ModuleElement::basis(e);
    if (!(apply(c, out, z) == left_act(c, f, z)))
      throw InternalInconsistency("rank-one decomposition disagrees with phi(f) on " + c.edge_name(e));
  }
  return out;
}

}  // namespace hyperrigid
