#pragma once

#include <vector>

#include "pingpong/exact/matrix.hpp"
#include "pingpong/places/place.hpp"

namespace pingpong::places {

using exact::QMatrix;

// 2^e as a rational.
Rational two_pow(long e);

// Singular values a_1 >= ... >= a_d at infinity: square roots of the roots of
// the exact characteristic polynomial of a^T a, each enclosed to roughly the
// working precision.  Exact whenever the squared value is a rational square.
std::vector<Interval> singular_values(const QMatrix& a);

// Operator norm at the place: spectral norm at infinity, max entry
// absolute value at a prime.
LocalScalar op_norm(const QMatrix& a, Place v);

// Eigenvalue absolute values at the place, largest first, repeated by
// multiplicity.  At a prime they come exactly from the Newton polygon; at
// infinity from certified root-modulus clusters.
std::vector<LocalScalar> eigen_moduli(const QMatrix& a, Place v);

// Lambda_v(a): largest eigenvalue absolute value.
LocalScalar max_eig_abs(const QMatrix& a, Place v);

struct GlobalLambda {
  Interval value;
  Place place;  // a place attaining the maximum (infinity first on ties)
  std::vector<LocalScalar> per_place;
};
// max over infinity and the support primes.  Throws Error(PrecisionExhausted)
// if the argmax cannot be decided and the values are not provably equal.
GlobalLambda lambda_global(const QMatrix& a, const exact::PrimeSupport& support);

}  // namespace pingpong::places
