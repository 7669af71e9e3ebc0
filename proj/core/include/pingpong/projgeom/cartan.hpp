#pragma once

#include <optional>
#include <vector>

#include "pingpong/projgeom/projective.hpp"

namespace pingpong::projgeom {

// a = k diag(a_1, ..., a_d) k' with k, k' in the maximal compact subgroup.
// `attracting` is [k e_1] and `repelling` is ker of the first row of k'; both
// are present when a_1 > a_2 is certified (they are then well defined).
struct CartanData {
  Place place;
  std::vector<LocalScalar> a;
  std::optional<ProjPoint> attracting;
  std::optional<ProjHyperplane> repelling;

  // a_2 / a_1 (0 in dimension 1).
  LocalScalar ratio() const;
};

// Throws Error(PrecisionExhausted) if the enclosures cannot be made tight
// enough.  Directions are computed only when `directions` is set.
CartanData cartan(const QMatrix& a, Place v, bool directions = false);

// Exact Smith form over Z_(p): a = k diag(p^{j_1}, ..., p^{j_d}) k' with
// j_1 <= ... <= j_d and k, k' in GL_d(Z_(p)).
struct SmithForm {
  std::vector<long> exponents;  // j_i
  QMatrix k;
  QMatrix k_prime;
};
SmithForm smith_form(const QMatrix& a, unsigned long p);

// Bi-Lipschitz constant (a_1 / a_d)^2 of the projective action.
LocalScalar lipschitz_bound(const QMatrix& a, Place v);

}  // namespace pingpong::projgeom
