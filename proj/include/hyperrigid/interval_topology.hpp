#pragma once

// Exact topology on finite unions of intervals with rational (or infinite)
// endpoints, and piecewise-affine maps between such sets. No floating point.

#include "hyperrigid/exact.hpp"

#include <algorithm>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace hyperrigid {

/// Interval endpoint: a rational or one of the two symbolic infinities.
struct Bound {
  enum class Kind { NegInf, Finite, PosInf };
  Kind kind = Kind::Finite;
  Rational value;

  static Bound neg_inf() { return {Kind::NegInf, Rational(0)}; }
  static Bound pos_inf() { return {Kind::PosInf, Rational(0)}; }
  static Bound at(Rational v) { return {Kind::Finite, std::move(v)}; }

  bool is_finite() const { return kind == Kind::Finite; }

  friend bool operator==(const Bound& a, const Bound& b) {
    return a.kind == b.kind && (a.kind != Kind::Finite || a.value == b.value);
  }
  friend bool operator<(const Bound& a, const Bound& b) {
    if (a.kind != b.kind) return static_cast<int>(a.kind) < static_cast<int>(b.kind);
    return a.kind == Kind::Finite && a.value < b.value;
  }
  friend bool operator<=(const Bound& a, const Bound& b) { return !(b < a); }

  // Strict comparisons against a point of the line.
  bool below(const Rational& x) const { return kind == Kind::NegInf || (is_finite() && value < x); }
  bool above(const Rational& x) const { return kind == Kind::PosInf || (is_finite() && x < value); }
};

inline std::string to_string(const Bound& b) {
  switch (b.kind) {
    case Bound::Kind::NegInf: return "-inf";
    case Bound::Kind::PosInf: return "inf";
    default: return to_string(b.value);
  }
}

struct Interval {
  Bound lo;
  Bound hi;
  bool lo_closed = true;
  bool hi_closed = true;

  // Infinite ends are always open; a closed flag on them is ignored.
  static Interval make(Bound lo, Bound hi, bool lo_closed, bool hi_closed) {
    Interval iv{std::move(lo), std::move(hi), lo_closed, hi_closed};
    if (!iv.lo.is_finite()) iv.lo_closed = false;
    if (!iv.hi.is_finite()) iv.hi_closed = false;
    if (iv.lo.kind == Bound::Kind::PosInf || iv.hi.kind == Bound::Kind::NegInf || iv.hi < iv.lo)
      throw MalformedInput("interval with lower endpoint above upper endpoint: " + to_string(iv.lo) +
                           " > " + to_string(iv.hi));
    return iv;
  }
  static Interval closed(Rational a, Rational b) { return make(Bound::at(std::move(a)), Bound::at(std::move(b)), true, true); }
  static Interval open(Rational a, Rational b) { return make(Bound::at(std::move(a)), Bound::at(std::move(b)), false, false); }
  static Interval left_open(Rational a, Rational b) { return make(Bound::at(std::move(a)), Bound::at(std::move(b)), false, true); }
  static Interval right_open(Rational a, Rational b) { return make(Bound::at(std::move(a)), Bound::at(std::move(b)), true, false); }
  static Interval point(const Rational& a) { return closed(a, a); }
  static Interval line() { return make(Bound::neg_inf(), Bound::pos_inf(), false, false); }

  bool empty() const { return hi < lo || (lo == hi && !(lo_closed && hi_closed)); }
  bool is_point() const { return lo == hi && lo_closed && hi_closed; }
  bool is_compact() const { return lo.is_finite() && hi.is_finite() && lo_closed && hi_closed; }

  bool contains(const Rational& x) const {
    bool after_lo = lo.below(x) || (lo_closed && lo.is_finite() && lo.value == x);
    bool before_hi = hi.above(x) || (hi_closed && hi.is_finite() && hi.value == x);
    return after_lo && before_hi;
  }

  friend bool operator==(const Interval& a, const Interval& b) {
    return a.lo == b.lo && a.hi == b.hi && a.lo_closed == b.lo_closed && a.hi_closed == b.hi_closed;
  }
};

inline std::string to_string(const Interval& iv) {
  return std::string(iv.lo_closed ? "[" : "(") + to_string(iv.lo) + "," + to_string(iv.hi) + (iv.hi_closed ? "]" : ")");
}

namespace detail {

// Order by where the interval starts; a closed start precedes an open one.
inline bool starts_before(const Interval& a, const Interval& b) {
  if (a.lo < b.lo) return true;
  if (b.lo < a.lo) return false;
  if (a.lo_closed != b.lo_closed) return a.lo_closed;
  if (a.hi < b.hi) return true;
  if (b.hi < a.hi) return false;
  return !a.hi_closed && b.hi_closed;
}

// Can b (starting no earlier than a) be merged with a into one interval?
inline bool mergeable(const Interval& a, const Interval& b) {
  if (b.lo < a.hi) return true;
  return b.lo == a.hi && b.lo.is_finite() && (a.hi_closed || b.lo_closed);
}

inline Interval intersect(const Interval& a, const Interval& b) {
  Interval out;
  if (a.lo == b.lo) {
    out.lo = a.lo;
    out.lo_closed = a.lo_closed && b.lo_closed;
  } else {
    const Interval& later = a.lo < b.lo ? b : a;
    out.lo = later.lo;
    out.lo_closed = later.lo_closed;
  }
  if (a.hi == b.hi) {
    out.hi = a.hi;
    out.hi_closed = a.hi_closed && b.hi_closed;
  } else {
    const Interval& earlier = a.hi < b.hi ? a : b;
    out.hi = earlier.hi;
    out.hi_closed = earlier.hi_closed;
  }
  return out;
}

}  // namespace detail

/// Finite union of intervals in canonical form: sorted, pairwise disjoint,
/// non-empty and non-adjacent pieces. An optional ambient set fixes the
/// relative topology; without one the ambient is the real line.
class IntervalSet {
 public:
  IntervalSet() = default;

  static IntervalSet normalize(std::vector<Interval> raw) {
    for (const auto& iv : raw)
      if (iv.hi < iv.lo) throw MalformedInput("interval with lower endpoint above upper endpoint: " + to_string(iv));
    std::erase_if(raw, [](const Interval& iv) { return iv.empty(); });
    std::sort(raw.begin(), raw.end(), detail::starts_before);
    IntervalSet out;
    for (auto& iv : raw) {
      if (out.pieces_.empty() || !detail::mergeable(out.pieces_.back(), iv)) {
        out.pieces_.push_back(std::move(iv));
        continue;
      }
      Interval& cur = out.pieces_.back();
      if (cur.hi < iv.hi) {
        cur.hi = iv.hi;
        cur.hi_closed = iv.hi_closed;
      } else if (cur.hi == iv.hi) {
        cur.hi_closed = cur.hi_closed || iv.hi_closed;
      }
    }
    return out;
  }
  static IntervalSet of(std::initializer_list<Interval> raw) { return normalize(std::vector<Interval>(raw)); }
  static IntervalSet real_line() { return of({Interval::line()}); }
  static IntervalSet point(const Rational& x) { return of({Interval::point(x)}); }

  const std::vector<Interval>& pieces() const { return pieces_; }
  bool empty() const { return pieces_.empty(); }

  bool contains(const Rational& x) const {
    return std::any_of(pieces_.begin(), pieces_.end(), [&](const Interval& iv) { return iv.contains(x); });
  }
  bool contains(const IntervalSet& other) const;

  bool is_compact() const {
    return std::all_of(pieces_.begin(), pieces_.end(), [](const Interval& iv) { return iv.is_compact(); });
  }
  bool is_bounded() const {
    return empty() || (pieces_.front().lo.is_finite() && pieces_.back().hi.is_finite());
  }

  // Copy of this set viewed inside `ambient`.
  IntervalSet within(const IntervalSet& ambient) const {
    if (!ambient.contains(*this)) throw DomainError("set " + str() + " is not contained in ambient " + ambient.str());
    IntervalSet out;
    out.pieces_ = pieces_;
    out.ambient_ = std::make_shared<const IntervalSet>(ambient.detached());
    return out;
  }
  bool has_ambient() const { return ambient_ != nullptr; }
  IntervalSet ambient() const { return ambient_ ? *ambient_ : real_line(); }
  IntervalSet detached() const {
    IntervalSet out;
    out.pieces_ = pieces_;
    return out;
  }

  std::string str() const {
    if (pieces_.empty()) return "{}";
    std::string s;
    for (const auto& iv : pieces_) s += (s.empty() ? "" : " u ") + to_string(iv);
    return s;
  }

  // Equality of point sets; the ambient is context, not identity.
  friend bool operator==(const IntervalSet& a, const IntervalSet& b) { return a.pieces_ == b.pieces_; }

 private:
  std::vector<Interval> pieces_;
  std::shared_ptr<const IntervalSet> ambient_;
};

inline IntervalSet unite(const IntervalSet& a, const IntervalSet& b) {
  std::vector<Interval> all = a.pieces();
  all.insert(all.end(), b.pieces().begin(), b.pieces().end());
  return IntervalSet::normalize(std::move(all));
}

inline IntervalSet intersect(const IntervalSet& a, const IntervalSet& b) {
  std::vector<Interval> out;
  for (const auto& x : a.pieces())
    for (const auto& y : b.pieces()) {
      Interval z = detail::intersect(x, y);
      if (!z.empty()) out.push_back(z);
    }
  return IntervalSet::normalize(std::move(out));
}

/// Complement in the real line.
inline IntervalSet complement(const IntervalSet& s) {
  std::vector<Interval> gaps;
  Bound from = Bound::neg_inf();
  bool from_closed = false;
  for (const auto& iv : s.pieces()) {
    Interval gap{from, iv.lo, from_closed, !iv.lo_closed};
    if (!(iv.lo.kind == Bound::Kind::NegInf) && !gap.empty()) gaps.push_back(gap);
    from = iv.hi;
    from_closed = !iv.hi_closed && iv.hi.is_finite();
  }
  if (from.kind != Bound::Kind::PosInf) {
    Interval gap{from, Bound::pos_inf(), from_closed, false};
    if (!gap.empty()) gaps.push_back(gap);
  }
  return IntervalSet::normalize(std::move(gaps));
}

inline IntervalSet subtract(const IntervalSet& a, const IntervalSet& b) { return intersect(a, complement(b)); }

inline bool IntervalSet::contains(const IntervalSet& other) const { return subtract(other, *this).empty(); }

/// Closure and interior in the real line.
inline IntervalSet closure_in_line(const IntervalSet& s) {
  std::vector<Interval> out;
  for (auto iv : s.pieces()) {
    iv.lo_closed = iv.lo.is_finite();
    iv.hi_closed = iv.hi.is_finite();
    out.push_back(iv);
  }
  return IntervalSet::normalize(std::move(out));
}

inline IntervalSet interior_in_line(const IntervalSet& s) {
  std::vector<Interval> out;
  for (auto iv : s.pieces()) {
    iv.lo_closed = false;
    iv.hi_closed = false;
    if (!iv.empty()) out.push_back(iv);
  }
  return IntervalSet::normalize(std::move(out));
}

/// Closure relative to `ambient`: cl(s) n ambient.
inline IntervalSet closure(const IntervalSet& s, const IntervalSet& ambient) {
  if (!ambient.contains(s)) throw DomainError("closure: " + s.str() + " not contained in ambient " + ambient.str());
  return intersect(closure_in_line(s), ambient);
}
inline IntervalSet closure(const IntervalSet& s) { return closure(s, s.ambient()); }

/// Interior relative to `ambient`: points of s with a line neighborhood
/// whose trace on the ambient stays in s.
inline IntervalSet interior(const IntervalSet& s, const IntervalSet& ambient) {
  if (!ambient.contains(s)) throw DomainError("interior: " + s.str() + " not contained in ambient " + ambient.str());
  return intersect(s, interior_in_line(unite(s, complement(ambient))));
}
inline IntervalSet interior(const IntervalSet& s) { return interior(s, s.ambient()); }

inline bool is_open_in(const IntervalSet& s, const IntervalSet& ambient) { return interior(s, ambient) == s; }
inline bool is_closed_in(const IntervalSet& s, const IntervalSet& ambient) { return closure(s, ambient) == s; }

// Some rational point of a non-empty set, chosen deterministically.
inline Rational sample_point(const IntervalSet& s) {
  if (s.empty()) throw DomainError("sample_point of the empty set");
  const Interval& iv = s.pieces().front();
  if (iv.lo.is_finite() && iv.lo_closed) return iv.lo.value;
  if (iv.hi.is_finite() && iv.hi_closed) return iv.hi.value;
  if (iv.lo.is_finite() && iv.hi.is_finite()) return (iv.lo.value + iv.hi.value) / 2;
  if (iv.lo.is_finite()) return iv.lo.value + 1;
  if (iv.hi.is_finite()) return iv.hi.value - 1;
  return Rational(0);
}

struct AffinePiece {
  Interval domain;
  Rational slope;
  Rational offset;

  Rational at(const Rational& x) const { return slope * x + offset; }

  Bound at(const Bound& b) const {
    if (b.is_finite()) return Bound::at(at(b.value));
    if (slope == 0) return Bound::at(offset);
    bool up = (b.kind == Bound::Kind::PosInf) == (slope > 0);
    return up ? Bound::pos_inf() : Bound::neg_inf();
  }

  Interval image_of(const Interval& iv) const {
    if (slope == 0) return Interval::point(offset);
    if (slope > 0) return Interval::make(at(iv.lo), at(iv.hi), iv.lo_closed, iv.hi_closed);
    return Interval::make(at(iv.hi), at(iv.lo), iv.hi_closed, iv.lo_closed);
  }

  // Points of the domain that land in `iv`.
  Interval preimage_of(const Interval& iv) const {
    if (slope == 0) return iv.contains(offset) ? domain : Interval{Bound::at(1), Bound::at(0), false, false};
    AffinePiece inv{Interval::line(), 1 / slope, -offset / slope};
    return detail::intersect(domain, inv.image_of(iv));
  }
};

/// Piecewise-affine map between interval sets. Piece domains cover the
/// source exactly; pieces may share an endpoint only where their formulas
/// agree there.
class PiecewiseAffineMap {
 public:
  PiecewiseAffineMap() = default;

  static PiecewiseAffineMap make(std::vector<AffinePiece> pieces, IntervalSet source, IntervalSet target) {
    PiecewiseAffineMap f;
    for (auto& p : pieces) {
      if (p.domain.empty()) throw MalformedInput("empty piece domain " + to_string(p.domain));
      f.pieces_.push_back(std::move(p));
    }
    std::sort(f.pieces_.begin(), f.pieces_.end(),
              [](const AffinePiece& a, const AffinePiece& b) { return detail::starts_before(a.domain, b.domain); });
    for (std::size_t i = 0; i < f.pieces_.size(); ++i)
      for (std::size_t j = i + 1; j < f.pieces_.size(); ++j) {
        Interval common = detail::intersect(f.pieces_[i].domain, f.pieces_[j].domain);
        if (common.empty()) continue;
        if (!common.is_point())
          throw MalformedInput("overlapping piece domains " + to_string(f.pieces_[i].domain) + " and " +
                               to_string(f.pieces_[j].domain));
        if (f.pieces_[i].at(common.lo.value) != f.pieces_[j].at(common.lo.value))
          throw MalformedInput("pieces disagree at shared point " + to_string(common.lo.value));
      }
    std::vector<Interval> doms;
    for (const auto& p : f.pieces_) doms.push_back(p.domain);
    if (!(IntervalSet::normalize(doms) == source))
      throw MalformedInput("piece domains do not partition the source " + source.str());
    f.source_ = source.detached();
    f.target_ = target.detached();
    for (const auto& p : f.pieces_)
      if (!f.target_.contains(IntervalSet::of({p.image_of(p.domain)})))
        throw MalformedInput("image of piece " + to_string(p.domain) + " leaves the target " + target.str());
    return f;
  }

  static PiecewiseAffineMap identity(const IntervalSet& source, const IntervalSet& target) {
    std::vector<AffinePiece> ps;
    for (const auto& iv : source.pieces()) ps.push_back({iv, Rational(1), Rational(0)});
    return make(std::move(ps), source, target);
  }

  const std::vector<AffinePiece>& pieces() const { return pieces_; }
  const IntervalSet& source() const { return source_; }
  const IntervalSet& target() const { return target_; }

  Rational operator()(const Rational& x) const {
    for (const auto& p : pieces_)
      if (p.domain.contains(x)) return p.at(x);
    throw DomainError("point " + to_string(x) + " outside the source " + source_.str());
  }

  /// Same point map, codomain replaced by the image of the source.
  PiecewiseAffineMap corestrict() const;

  // Piece governing the points just left (right) of x, if any.
  const AffinePiece* piece_left_of(const Rational& x) const {
    for (const auto& p : pieces_)
      if (p.domain.lo.below(x) && !p.domain.hi.below(x)) return &p;
    return nullptr;
  }
  const AffinePiece* piece_right_of(const Rational& x) const {
    for (const auto& p : pieces_)
      if (!p.domain.lo.above(x) && p.domain.hi.above(x)) return &p;
    return nullptr;
  }

  /// Continuity, decided at every point where two pieces meet.
  bool is_continuous() const {
    for (std::size_t i = 0; i < pieces_.size(); ++i)
      for (std::size_t j = 0; j < pieces_.size(); ++j) {
        if (i == j) continue;
        const auto& a = pieces_[i];
        const auto& b = pieces_[j];
        if (!a.domain.hi.is_finite() || !(a.domain.hi == b.domain.lo)) continue;
        const Rational& x = a.domain.hi.value;
        if (!source_.contains(x)) continue;
        if (a.at(x) != b.at(x)) return false;
      }
    return true;
  }

 private:
  std::vector<AffinePiece> pieces_;
  IntervalSet source_;
  IntervalSet target_;
};

/// Exact set image. Slope-zero pieces contribute degenerate points.
inline IntervalSet image(const PiecewiseAffineMap& f, const IntervalSet& s) {
  if (!f.source().contains(s)) throw DomainError("image: " + s.str() + " not contained in source " + f.source().str());
  std::vector<Interval> out;
  for (const auto& p : f.pieces()) {
    IntervalSet within = intersect(s, IntervalSet::of({p.domain}));
    for (const auto& part : within.pieces()) out.push_back(p.image_of(part));
  }
  return IntervalSet::normalize(std::move(out));
}

inline IntervalSet preimage(const PiecewiseAffineMap& f, const IntervalSet& t) {
  std::vector<Interval> out;
  for (const auto& p : f.pieces())
    for (const auto& iv : t.pieces()) {
      Interval back = p.preimage_of(iv);
      if (!back.empty()) out.push_back(back);
    }
  return IntervalSet::normalize(std::move(out));
}

inline PiecewiseAffineMap PiecewiseAffineMap::corestrict() const {
  PiecewiseAffineMap g = *this;
  g.target_ = image(*this, source_);
  return g;
}

/// Limits of f along the non-compact ends of its source (open finite
/// endpoints, and infinite ends mapped by a constant piece). Ends that
/// escape to infinity contribute nothing.
inline std::vector<Rational> end_limits(const PiecewiseAffineMap& f) {
  std::vector<Rational> out;
  for (const auto& iv : f.source().pieces()) {
    if (!iv.lo_closed) {
      for (const auto& p : f.pieces())
        if (p.domain.lo == iv.lo && !p.domain.is_point()) {
          Bound lim = p.at(iv.lo);
          if (lim.is_finite()) out.push_back(lim.value);
          break;
        }
    }
    if (!iv.hi_closed) {
      for (const auto& p : f.pieces())
        if (p.domain.hi == iv.hi && !p.domain.is_point()) {
          Bound lim = p.at(iv.hi);
          if (lim.is_finite()) out.push_back(lim.value);
          break;
        }
    }
  }
  return out;
}

/// Preimages of compact subsets of the target are compact. Decided by the
/// boundary-escape criterion: every non-compact end of the source must run
/// off to infinity or to a point missing from the target.
inline bool is_proper(const PiecewiseAffineMap& f) {
  for (const auto& lim : end_limits(f))
    if (f.target().contains(lim)) return false;
  return true;
}

namespace detail {

inline bool has_left(const IntervalSet& s, const Rational& y) {
  return std::any_of(s.pieces().begin(), s.pieces().end(),
                     [&](const Interval& iv) { return iv.lo.below(y) && !iv.hi.below(y); });
}
inline bool has_right(const IntervalSet& s, const Rational& y) {
  return std::any_of(s.pieces().begin(), s.pieces().end(),
                     [&](const Interval& iv) { return !iv.lo.above(y) && iv.hi.above(y); });
}

}  // namespace detail

/// Nonzero slopes, piece interiors land in the open part of the target, and
/// at every breakpoint the one-sided images are injective and stay inside
/// the target.
inline bool is_local_homeomorphism(const PiecewiseAffineMap& f) {
  if (!f.is_continuous()) return false;
  IntervalSet open_target = interior_in_line(f.target());
  for (const auto& p : f.pieces()) {
    if (p.domain.is_point()) continue;
    if (p.slope == 0) return false;
    Interval inner = p.domain;
    inner.lo_closed = inner.hi_closed = false;
    if (!open_target.contains(IntervalSet::of({p.image_of(inner)}))) return false;
  }
  std::vector<Rational> checkpoints;
  auto add = [&](const Bound& b) {
    if (b.is_finite() && f.source().contains(b.value)) checkpoints.push_back(b.value);
  };
  for (const auto& p : f.pieces()) {
    add(p.domain.lo);
    add(p.domain.hi);
  }
  for (const auto& x : checkpoints) {
    Rational y = f(x);
    bool img_left = false, img_right = false;
    bool src_left = detail::has_left(f.source(), x);
    bool src_right = detail::has_right(f.source(), x);
    if (src_left) {
      const AffinePiece* p = f.piece_left_of(x);
      if (p == nullptr || p->slope == 0) return false;
      (p->slope > 0 ? img_left : img_right) = true;
    }
    if (src_right) {
      const AffinePiece* p = f.piece_right_of(x);
      if (p == nullptr || p->slope == 0) return false;
      bool& side = p->slope > 0 ? img_right : img_left;
      if (side) return false;  // fold: both sides land on one side of y
      side = true;
    }
    // Only sides the source actually has are required in the target: at an
    // end of G1 the map need not be open onto a full neighborhood.
    if ((img_left && !detail::has_left(f.target(), y)) || (img_right && !detail::has_right(f.target(), y))) return false;
  }
  return true;
}

/// r(source) lies in the interior of its own closure, relative to the target.
inline bool range_condition(const PiecewiseAffineMap& r) {
  IntervalSet img = image(r, r.source());
  IntervalSet inner = interior(closure(img, r.target()), r.target());
  return inner.contains(img);
}

}  // namespace hyperrigid
