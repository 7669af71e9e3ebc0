#pragma once

#include <optional>
#include <vector>

#include "pingpong/exact/polynomial.hpp"
#include "pingpong/places/interval.hpp"

namespace pingpong::places {

using exact::QPoly;

// A real root isolated to `enclosure`; exact roots carry a point interval.
struct RealRoot {
  Interval enclosure;
  int multiplicity = 1;
};

// Sturm sequence of a squarefree polynomial.
class SturmSequence {
 public:
  explicit SturmSequence(const QPoly& squarefree);
  // Number of sign variations at x.
  int variations(const Rational& x) const;
  // Distinct roots in (a, b].
  int count(const Rational& a, const Rational& b) const { return variations(a) - variations(b); }
  const QPoly& poly() const { return seq_.front(); }

 private:
  std::vector<QPoly> seq_;
};

// All real roots in increasing order, each enclosed in an interval of width at
// most `width` (exact rational roots are detected and returned as points).
std::vector<RealRoot> real_roots(const QPoly& p, const Rational& width);

// Shrinks an isolating interval (a, b] holding exactly one root of the
// squarefree polynomial down to width <= `width`.
Interval refine_root(const SturmSequence& s, Rational a, Rational b, const Rational& width);

// Number of complex roots with |z| < R counted with multiplicity, via the
// Schur-Cohn recursion on p(Rz).  nullopt when a root lies on the circle or
// the enclosures cannot separate |a_0| from |a_n| at the working precision.
std::optional<int> count_in_disk(const QPoly& p, const Rational& radius);

// Moduli of the complex roots, grouped in clusters with relative width at
// most 2^-bits, largest first.  Zero roots form a final cluster with modulus 0.
struct ModulusCluster {
  Interval modulus;
  int count = 0;
};
std::vector<ModulusCluster> root_moduli(const QPoly& p, unsigned long bits);

// Newton polygon of p at the prime p: each segment gives `multiplicity` roots
// of absolute value p^{exponent}.  Largest absolute value first; zero roots
// (if any) are reported with `zero_roots`.
struct NewtonSegment {
  Rational exponent;  // log_p |root|
  int multiplicity = 0;
};
struct NewtonPolygon {
  std::vector<NewtonSegment> segments;
  int zero_roots = 0;
};
NewtonPolygon newton_polygon(const QPoly& poly, unsigned long p);

// Proves x == y where x is the only root of f in the closed enclosure a and y
// the only root of g in b: a common root of f and g must lie in both.  False
// whenever equality is not proven.
bool roots_coincide(const QPoly& f, const Interval& a, const QPoly& g, const Interval& b);

// Simplest rational (smallest denominator) in [a, b].
Rational simplest_rational(const Rational& a, const Rational& b);

// Cauchy bound: every complex root has |z| < bound.
Rational cauchy_bound(const QPoly& p);

}  // namespace pingpong::places
