#pragma once

#include <string>
#include <utility>
#include <vector>

#include "pingpong/exact/rational.hpp"

namespace pingpong::exact {

// Univariate polynomial over Q, coefficients stored low degree first and kept
// trimmed (the zero polynomial has no coefficients).
class QPoly {
 public:
  QPoly() = default;
  explicit QPoly(std::vector<Rational> coefficients);
  QPoly(std::initializer_list<Rational> coefficients)
      : QPoly(std::vector<Rational>(coefficients)) {}

  static QPoly constant(const Rational& c) { return QPoly({c}); }
  static QPoly x() { return QPoly({Rational(0), Rational(1)}); }
  // x - root
  static QPoly linear(const Rational& root) { return QPoly({-root, Rational(1)}); }

  // -1 for the zero polynomial.
  int degree() const { return static_cast<int>(c_.size()) - 1; }
  bool is_zero() const { return c_.empty(); }
  const std::vector<Rational>& coefficients() const { return c_; }
  Rational coefficient(int i) const;
  const Rational& leading() const { return c_.back(); }

  QPoly monic() const;
  QPoly derivative() const;

  template <class T>
  T evaluate(const T& x) const {
    T acc(0);
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * x + T(*it);
    return acc;
  }
  Rational operator()(const Rational& x) const;

  QPoly& operator+=(const QPoly& o);
  QPoly& operator-=(const QPoly& o);
  QPoly& operator*=(const QPoly& o);
  QPoly& operator*=(const Rational& s);
  friend QPoly operator+(QPoly a, const QPoly& b) { return a += b; }
  friend QPoly operator-(QPoly a, const QPoly& b) { return a -= b; }
  friend QPoly operator*(QPoly a, const QPoly& b) { return a *= b; }
  friend QPoly operator*(QPoly a, const Rational& s) { return a *= s; }
  friend QPoly operator-(QPoly a) { return a *= Rational(-1); }
  friend bool operator==(const QPoly&, const QPoly&) = default;

  // Euclidean division; throws on division by zero.
  std::pair<QPoly, QPoly> divmod(const QPoly& divisor) const;
  friend QPoly operator/(const QPoly& a, const QPoly& b) { return a.divmod(b).first; }
  friend QPoly operator%(const QPoly& a, const QPoly& b) { return a.divmod(b).second; }

  QPoly pow(unsigned e) const;
  // p(x) -> p(s x)
  QPoly scale_argument(const Rational& s) const;
  // x^deg p(1/x)
  QPoly reversed() const;
  // Multiplicity of x as a factor.
  int trailing_zeros() const;
  // p / x^k
  QPoly shift_down(int k) const;

  std::string to_string(const std::string& var = "x") const;

 private:
  void trim();
  std::vector<Rational> c_;
};

// Monic gcd; gcd(0,0) = 0.
QPoly gcd(QPoly a, QPoly b);

// Extended Euclid: returns (g, s, t) with s a + t b = g monic.
struct Bezout {
  QPoly g, s, t;
};
Bezout extended_gcd(const QPoly& a, const QPoly& b);

bool is_squarefree(const QPoly& p);
QPoly squarefree_part(const QPoly& p);

// Yun's algorithm: p = lc * prod_i f_i^i with f_i squarefree, pairwise
// coprime and monic.  Entry k-1 holds f_k (possibly constant 1).
std::vector<QPoly> squarefree_decomposition(const QPoly& p);

// n-th cyclotomic polynomial.
QPoly cyclotomic(unsigned n);

// Resultant of two polynomials (Sylvester determinant, exact).
Rational resultant(const QPoly& a, const QPoly& b);

}  // namespace pingpong::exact
