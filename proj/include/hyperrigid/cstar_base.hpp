#pragma once

// Commutative coefficient algebras C0(V) over presented discrete vertex
// sets, their ideals (at class granularity) and finite direct sums of
// point evaluations.

#include "hyperrigid/exact.hpp"
#include "hyperrigid/linalg.hpp"

#include <algorithm>
#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace hyperrigid {

struct VertexClass {
  std::string name;
  Count count;  // copies in the class, in N+ u {omega}

  friend bool operator==(const VertexClass&, const VertexClass&) = default;
};

/// One point of the spectrum: copy `index` (1-based) of class `cls`.
struct Atom {
  std::size_t cls = 0;
  std::uint64_t index = 1;

  friend auto operator<=>(const Atom&, const Atom&) = default;
};

class AtomSet {
 public:
  AtomSet() = default;

  static AtomSet make(std::vector<VertexClass> classes) {
    std::set<std::string> seen;
    for (const auto& c : classes) {
      if (c.name.empty()) throw MalformedInput("vertex class with empty name");
      if (!seen.insert(c.name).second) throw MalformedInput("duplicate vertex class '" + c.name + "'");
      if (c.count.is_zero()) throw MalformedInput("vertex class '" + c.name + "' has count 0");
    }
    AtomSet s;
    s.classes_ = std::move(classes);
    return s;
  }

  const std::vector<VertexClass>& classes() const { return classes_; }
  std::size_t size() const { return classes_.size(); }
  const VertexClass& operator[](std::size_t i) const { return classes_.at(i); }

  std::optional<std::size_t> find(const std::string& name) const {
    for (std::size_t i = 0; i < classes_.size(); ++i)
      if (classes_[i].name == name) return i;
    return std::nullopt;
  }
  std::size_t index_of(const std::string& name) const {
    if (auto i = find(name)) return *i;
    throw DomainError("unknown vertex class '" + name + "'");
  }

  bool valid(const Atom& a) const {
    if (a.cls >= classes_.size() || a.index == 0) return false;
    const Count& n = classes_[a.cls].count;
    return n.is_omega() || a.index <= n.value();
  }

  std::string name(const Atom& a) const { return classes_.at(a.cls).name + "#" + std::to_string(a.index); }

  friend bool operator==(const AtomSet&, const AtomSet&) = default;

 private:
  std::vector<VertexClass> classes_;
};

/// Ideal C0(U) with U a union of whole vertex classes.
class IdealSpec {
 public:
  IdealSpec() = default;
  IdealSpec(AtomSet parent, std::set<std::size_t> support) : parent_(std::move(parent)), support_(std::move(support)) {
    for (auto i : support_)
      if (i >= parent_.size()) throw DomainError("ideal support names a class outside its algebra");
  }

  static IdealSpec zero(const AtomSet& parent) { return IdealSpec(parent, {}); }
  static IdealSpec full(const AtomSet& parent) {
    std::set<std::size_t> all;
    for (std::size_t i = 0; i < parent.size(); ++i) all.insert(i);
    return IdealSpec(parent, std::move(all));
  }
  static IdealSpec of(const AtomSet& parent, const std::vector<std::string>& names) {
    std::set<std::size_t> s;
    for (const auto& n : names) s.insert(parent.index_of(n));
    return IdealSpec(parent, std::move(s));
  }

  const AtomSet& parent() const { return parent_; }
  const std::set<std::size_t>& support() const { return support_; }
  bool contains_class(std::size_t cls) const { return support_.contains(cls); }
  bool contains(const Atom& a) const { return contains_class(a.cls); }
  bool empty() const { return support_.empty(); }

  std::vector<std::string> names() const {
    std::vector<std::string> out;
    for (auto i : support_) out.push_back(parent_[i].name);
    return out;
  }

  friend bool operator==(const IdealSpec&, const IdealSpec&) = default;

 private:
  AtomSet parent_;
  std::set<std::size_t> support_;
};

/// Annihilator of the ideal: functions supported on the complementary classes.
inline IdealSpec ideal_complement(const IdealSpec& i) {
  std::set<std::size_t> out;
  for (std::size_t k = 0; k < i.parent().size(); ++k)
    if (!i.contains_class(k)) out.insert(k);
  return IdealSpec(i.parent(), std::move(out));
}

inline IdealSpec ideal_intersect(const IdealSpec& a, const IdealSpec& b) {
  if (!(a.parent() == b.parent())) throw DomainError("ideal_intersect: ideals of different algebras");
  std::set<std::size_t> out;
  std::set_intersection(a.support().begin(), a.support().end(), b.support().begin(), b.support().end(),
                        std::inserter(out, out.end()));
  return IdealSpec(a.parent(), std::move(out));
}

/// Function on atoms: a constant per class, overridden on finitely many
/// atoms. Class constants on omega classes live in the multiplier algebra;
/// everything the toolkit builds from them acts strictly.
class AlgebraElement {
 public:
  AlgebraElement() = default;

  static AlgebraElement delta(const Atom& a) {
    AlgebraElement f;
    f.by_atom_[a] = Gaussian(1);
    return f;
  }
  static AlgebraElement indicator(std::size_t cls) {
    AlgebraElement f;
    f.by_class_[cls] = Gaussian(1);
    return f;
  }
  static AlgebraElement from_classes(std::map<std::size_t, Gaussian> values) {
    AlgebraElement f;
    for (auto& [k, v] : values)
      if (!v.is_zero()) f.by_class_[k] = std::move(v);
    return f;
  }

  Gaussian at(const Atom& a) const {
    if (auto it = by_atom_.find(a); it != by_atom_.end()) return it->second;
    if (auto it = by_class_.find(a.cls); it != by_class_.end()) return it->second;
    return {};
  }

  void set(const Atom& a, Gaussian v) { by_atom_[a] = std::move(v); }
  void add(const Atom& a, const Gaussian& v) { by_atom_[a] = at(a) + v; }

  const std::map<std::size_t, Gaussian>& class_values() const { return by_class_; }
  const std::map<Atom, Gaussian>& atom_values() const { return by_atom_; }

  bool is_zero() const {
    return std::all_of(by_class_.begin(), by_class_.end(), [](const auto& kv) { return kv.second.is_zero(); }) &&
           std::all_of(by_atom_.begin(), by_atom_.end(), [](const auto& kv) { return kv.second.is_zero(); });
  }

  AlgebraElement star() const {
    AlgebraElement f = *this;
    for (auto& [k, v] : f.by_class_) v = v.conj();
    for (auto& [k, v] : f.by_atom_) v = v.conj();
    return f;
  }

  // Pointwise product; atoms overridden in either factor stay overridden.
  friend AlgebraElement operator*(const AlgebraElement& f, const AlgebraElement& g) {
    AlgebraElement h;
    for (const auto& [k, v] : f.by_class_)
      if (auto it = g.by_class_.find(k); it != g.by_class_.end()) h.by_class_[k] = v * it->second;
    for (const auto& [a, v] : f.by_atom_) h.by_atom_[a] = v * g.at(a);
    for (const auto& [a, v] : g.by_atom_) h.by_atom_[a] = f.at(a) * v;
    return h;
  }
  friend AlgebraElement operator+(const AlgebraElement& f, const AlgebraElement& g) {
    AlgebraElement h;
    for (const auto& [k, v] : f.by_class_) h.by_class_[k] += v;
    for (const auto& [k, v] : g.by_class_) h.by_class_[k] += v;
    for (const auto& [a, v] : f.by_atom_) h.by_atom_[a] = f.at(a) + g.at(a);
    for (const auto& [a, v] : g.by_atom_) h.by_atom_[a] = f.at(a) + g.at(a);
    return h;
  }
  friend AlgebraElement operator*(const Gaussian& c, const AlgebraElement& f) {
    AlgebraElement h = f;
    for (auto& [k, v] : h.by_class_) v = c * v;
    for (auto& [a, v] : h.by_atom_) v = c * v;
    return h;
  }

  // Classes on which the function is somewhere nonzero.
  std::set<std::size_t> class_support() const {
    std::set<std::size_t> s;
    for (const auto& [k, v] : by_class_)
      if (!v.is_zero()) s.insert(k);
    for (const auto& [a, v] : by_atom_)
      if (!v.is_zero()) s.insert(a.cls);
    return s;
  }

 private:
  std::map<std::size_t, Gaussian> by_class_;
  std::map<Atom, Gaussian> by_atom_;
};

/// Direct sum of evaluations at distinct atoms; the Hilbert space is C^dim
/// with basis vector k sitting over atoms()[k].
class EvaluationRep {
 public:
  EvaluationRep() = default;

  static EvaluationRep make(const AtomSet& parent, std::vector<Atom> atoms) {
    std::set<Atom> seen;
    for (const auto& a : atoms) {
      if (!parent.valid(a)) throw DomainError("evaluation at an atom outside the algebra");
      if (!seen.insert(a).second) throw DomainError("evaluation lists atom " + parent.name(a) + " twice");
    }
    EvaluationRep r;
    r.parent_ = parent;
    r.atoms_ = std::move(atoms);
    return r;
  }

  const AtomSet& parent() const { return parent_; }
  const std::vector<Atom>& atoms() const { return atoms_; }
  std::size_t dimension() const { return atoms_.size(); }

  friend bool operator==(const EvaluationRep&, const EvaluationRep&) = default;

 private:
  AtomSet parent_;
  std::vector<Atom> atoms_;
};

/// sigma(f) as a diagonal matrix.
inline Matrix evaluate(const EvaluationRep& rep, const AlgebraElement& f) {
  Matrix m(rep.dimension(), rep.dimension());
  for (std::size_t k = 0; k < rep.dimension(); ++k) {
    if (!rep.parent().valid(rep.atoms()[k])) throw DomainError("evaluation at an atom outside the algebra");
    m(k, k) = f.at(rep.atoms()[k]);
  }
  return m;
}

}  // namespace hyperrigid
