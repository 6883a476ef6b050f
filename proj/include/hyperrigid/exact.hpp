#pragma once

// Exact scalars shared by every module: rationals, Gaussian rationals Q(i),
// and cardinalities in N u {omega}.

#include <boost/multiprecision/cpp_int.hpp>

#include <compare>
#include <cstdint>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>

namespace hyperrigid {

using Integer = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

// Error taxonomy. Each maps to one failure class of the toolkit.
struct MalformedInput : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};
// A Fock or tensor computation needs an infinite fiber; only the symbolic
// verdict is available for the instance.
struct SymbolicOnly : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ResourceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
// Two routes that must agree did not. Never a user-facing outcome.
struct InternalInconsistency : std::logic_error {
  using std::logic_error::logic_error;
};

inline std::string to_string(const Rational& q) {
  if (denominator(q) == 1) return numerator(q).str();
  return numerator(q).str() + "/" + denominator(q).str();
}

// Accepts "p", "-p", "p/q". Whitespace is not tolerated.
inline Rational parse_rational(std::string_view text) {
  auto parse_int = [&](std::string_view s) -> Integer {
    if (s.empty()) throw MalformedInput("empty integer in rational '" + std::string(text) + "'");
    std::size_t start = (s[0] == '-' || s[0] == '+') ? 1 : 0;
    if (start == s.size()) throw MalformedInput("bad rational '" + std::string(text) + "'");
    for (std::size_t i = start; i < s.size(); ++i)
      if (s[i] < '0' || s[i] > '9') throw MalformedInput("bad rational '" + std::string(text) + "'");
    Integer v(std::string(s.substr(start)));
    return s[0] == '-' ? Integer(-v) : v;
  };
  auto slash = text.find('/');
  if (slash == std::string_view::npos) return Rational(parse_int(text));
  Integer num = parse_int(text.substr(0, slash));
  Integer den = parse_int(text.substr(slash + 1));
  if (den == 0) throw MalformedInput("zero denominator in '" + std::string(text) + "'");
  return Rational(num, den);
}

/// Element of Q(i). All kernel, rank and residual decisions run on these.
struct Gaussian {
  Rational re;
  Rational im;

  Gaussian() = default;
  Gaussian(Rational r) : re(std::move(r)) {}  // NOLINT(google-explicit-constructor)
  Gaussian(int r) : re(r) {}                  // NOLINT(google-explicit-constructor)
  Gaussian(Rational r, Rational i) : re(std::move(r)), im(std::move(i)) {}

  static Gaussian i() { return {Rational(0), Rational(1)}; }

  bool is_zero() const { return re == 0 && im == 0; }
  Gaussian conj() const { return {re, -im}; }
  Rational norm2() const { return re * re + im * im; }
  // Max of |re|, |im|: a rational sup-norm used for exact residuals.
  Rational max_abs() const {
    Rational a = re < 0 ? Rational(-re) : re;
    Rational b = im < 0 ? Rational(-im) : im;
    return a < b ? b : a;
  }

  Gaussian& operator+=(const Gaussian& o) {
    re += o.re;
    im += o.im;
    return *this;
  }
  Gaussian& operator-=(const Gaussian& o) {
    re -= o.re;
    im -= o.im;
    return *this;
  }
  Gaussian& operator*=(const Gaussian& o) {
    Rational r = re * o.re - im * o.im;
    im = re * o.im + im * o.re;
    re = std::move(r);
    return *this;
  }
  Gaussian& operator/=(const Gaussian& o) {
    Rational d = o.norm2();
    if (d == 0) throw DomainError("division by zero in Q(i)");
    *this *= o.conj();
    re /= d;
    im /= d;
    return *this;
  }

  friend Gaussian operator+(Gaussian a, const Gaussian& b) { return a += b; }
  friend Gaussian operator-(Gaussian a, const Gaussian& b) { return a -= b; }
  friend Gaussian operator*(Gaussian a, const Gaussian& b) { return a *= b; }
  friend Gaussian operator/(Gaussian a, const Gaussian& b) { return a /= b; }
  friend Gaussian operator-(const Gaussian& a) { return {-a.re, -a.im}; }
  friend bool operator==(const Gaussian& a, const Gaussian& b) { return a.re == b.re && a.im == b.im; }
  friend bool operator!=(const Gaussian& a, const Gaussian& b) { return !(a == b); }
};

inline std::string to_string(const Gaussian& z) {
  if (z.im == 0) return to_string(z.re);
  if (z.re == 0) return to_string(z.im) + "i";
  return to_string(z.re) + (z.im < 0 ? "" : "+") + to_string(z.im) + "i";
}

inline std::ostream& operator<<(std::ostream& os, const Gaussian& z) { return os << to_string(z); }

/// Cardinality in N u {omega}: omega + n = omega, n * omega = omega (n >= 1),
/// 0 * omega = 0.
class Count {
 public:
  constexpr Count() = default;
  static constexpr Count finite(std::uint64_t n) { return Count(false, n); }
  static constexpr Count omega() { return Count(true, 0); }

  constexpr bool is_omega() const { return omega_; }
  constexpr bool is_finite() const { return !omega_; }
  constexpr bool is_zero() const { return !omega_ && n_ == 0; }
  std::uint64_t value() const {
    if (omega_) throw DomainError("omega has no finite value");
    return n_;
  }

  friend constexpr Count operator+(Count a, Count b) {
    if (a.omega_ || b.omega_) return omega();
    return finite(a.n_ + b.n_);
  }
  friend constexpr Count operator*(Count a, Count b) {
    if (a.is_zero() || b.is_zero()) return finite(0);
    if (a.omega_ || b.omega_) return omega();
    return finite(a.n_ * b.n_);
  }
  friend constexpr bool operator==(Count a, Count b) = default;

  std::string str() const { return omega_ ? "omega" : std::to_string(n_); }

 private:
  constexpr Count(bool omega, std::uint64_t n) : omega_(omega), n_(n) {}
  bool omega_ = false;
  std::uint64_t n_ = 0;
};

}  // namespace hyperrigid
