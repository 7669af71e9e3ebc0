#pragma once

#include <optional>
#include <vector>

#include "pingpong/exact/matrix.hpp"
#include "pingpong/places/interval.hpp"
#include "pingpong/places/padic.hpp"
#include "pingpong/places/place.hpp"

namespace pingpong::projgeom {

using exact::QMatrix;
using exact::QVector;
using exact::Rational;
using places::Interval;
using places::LocalScalar;
using places::PAdic;
using places::Place;

// Coordinates over the completion at `place`: interval entries at infinity,
// p-adic balls at a prime.  Only the vector matching the place is used.
struct LocalVector {
  Place place;
  std::vector<Interval> real;
  std::vector<PAdic> padic;

  static LocalVector from_rational(const QVector& v, Place place);
  std::size_t size() const { return place.is_infinite() ? real.size() : padic.size(); }
  // Exact rational coordinates when every entry is exact.
  std::optional<QVector> exact() const;
  // Midpoints (infinity) or centers (prime).
  QVector centers() const;
};

// |x|_v of a single coordinate.
LocalScalar abs_entry(const LocalVector& v, std::size_t i);
// Euclidean norm at infinity, max norm at a prime.
LocalScalar norm(const LocalVector& v);

// A projective point [v].  The representative is scaled so that its largest
// coordinate has absolute value 1; all metric formulas are scale invariant.
struct ProjPoint {
  LocalVector rep;
  static ProjPoint from_rational(const QVector& v, Place place);
  static ProjPoint from_local(LocalVector v);
  Place place() const { return rep.place; }
  std::size_t dim() const { return rep.size(); }
};

// The hyperplane ker f of a nonzero linear form f, stored by its coefficients.
struct ProjHyperplane {
  LocalVector form;
  static ProjHyperplane from_rational(const QVector& f, Place place);
  static ProjHyperplane from_local(LocalVector f);
  Place place() const { return form.place; }
  std::size_t dim() const { return form.size(); }
};

// ||v ^ w|| / (||v|| ||w||): Euclidean on the wedge square at infinity,
// max of Plücker coordinates at a prime.  Values lie in [0, 1].
LocalScalar proj_dist(const ProjPoint& x, const ProjPoint& y);
// The squared distance at infinity; exact for exact rational points.
Interval proj_dist_sq(const ProjPoint& x, const ProjPoint& y);

// |f(v)| / (||f|| ||v||).
LocalScalar dist_to_hyperplane(const ProjPoint& x, const ProjHyperplane& h);
Interval dist_to_hyperplane_sq(const ProjPoint& x, const ProjHyperplane& h);

// Distance between two hyperplanes as normalised forms, minimised over the
// scalar ambiguity (a sign at infinity, a unit at a prime).
LocalScalar form_distance(const ProjHyperplane& a, const ProjHyperplane& b);

// The image [g v] (the point is moved by the exact matrix).
ProjPoint apply(const QMatrix& g, const ProjPoint& x);
// The image g(H) = ker (f o g^-1); needs g^-1.
ProjHyperplane apply(const QMatrix& g_inverse, const ProjHyperplane& h);

// Rational approximation of a point/form: coordinates rounded to `bits`
// fractional bits after scaling the largest entry to 1 (infinity), or the
// exact centers (prime).
QVector rational_approximation(const LocalVector& v, unsigned long bits);

}  // namespace pingpong::projgeom
