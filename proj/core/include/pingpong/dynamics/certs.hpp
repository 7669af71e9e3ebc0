#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pingpong/exact/word.hpp"
#include "pingpong/projgeom/cartan.hpp"
#include "pingpong/projgeom/projective.hpp"

namespace pingpong::dynamics {

using exact::QMatrix;
using exact::QVector;
using exact::Rational;
using exact::Word;
using places::LocalScalar;
using places::Place;
using places::Relation;
using places::Verdict;
using projgeom::ProjHyperplane;
using projgeom::ProjPoint;

// One certified inequality lhs rel rhs, with both sides as enclosures.
struct Comparison {
  std::string label;
  LocalScalar lhs;
  Relation relation = Relation::Le;
  LocalScalar rhs;
  Verdict verdict = Verdict::Undecided;
};
using Transcript = std::vector<Comparison>;

Comparison make_comparison(std::string label, LocalScalar lhs, Relation rel, LocalScalar rhs);
bool all_true(const Transcript& t);

enum class Method { CartanCriterion, GridVerified };
std::string_view to_string(Method m);
Method parse_method(std::string_view text);

// Attracting point and repelling hyperplane are exact rational data, so the
// certificate can be serialized and replayed without loss.
struct ContractionCert {
  Place place;
  Rational epsilon;
  QVector attracting;
  QVector repelling;  // coefficients of the linear form
  Method method = Method::CartanCriterion;
  Transcript transcript;
  std::size_t grid_cells = 0;
};

struct ProximalCert {
  ContractionCert contraction;
  Rational r;
  Comparison separation;  // d(attracting, repelling) >= r
};

struct VeryProximalCert {
  ProximalCert forward;   // for g
  ProximalCert backward;  // for g^-1
};

struct PingPongCert {
  Place place;
  Word word_x;
  Word word_y;
  QMatrix x;
  QMatrix y;
  VeryProximalCert cert_x;
  VeryProximalCert cert_y;
  Rational r;
  Rational epsilon;
  Transcript separations;  // the eight cross separations
};

// The comparisons proving that `a` is eps-contracting with data (v, H),
// derived from its Cartan decomposition:
//   d(gx, v_g) <= (a_2/a_1) / d(x, H_g)
// together with the distances from (v, H) to the exact Cartan directions.
// Deterministic for fixed working precision; the replay recomputes it.
Transcript cartan_contraction_transcript(const QMatrix& a, Place place, const Rational& eps,
                                         const QVector& v, const QVector& h);

// Certificate using the Cartan directions of `a` (rounded to rationals).
// Throws CriterionFails unless a_2/a_1 <= eps^2 is certified and the
// criterion closes.
ContractionCert contraction_from_cartan(const QMatrix& a, Place place, const Rational& eps);

// Smallest convenient eps for which the Cartan criterion closes with data
// (v, H), or nullopt when a_1 > a_2 cannot be certified.
struct CartanCandidate {
  QVector attracting;
  QVector repelling;
  Rational epsilon;
};
std::optional<CartanCandidate> cartan_candidate(const QMatrix& a, Place place);

// Certificate with the given data checked by the Cartan criterion.
// Throws CriterionFails when some comparison is not certified.
ContractionCert certify_contraction(const QMatrix& a, Place place, const Rational& eps,
                                    const QVector& v, const QVector& h);

// Adaptive cover of projective space by cells: each cell is either certified
// inside the open eps-neighbourhood of H or certified to map within eps of v.
// Throws VerificationFails with a witness, or PrecisionExhausted after
// `cell_cap` cells.
ContractionCert verify_contracting(const QMatrix& a, Place place, const Rational& eps,
                                   const QVector& v, const QVector& h,
                                   std::size_t cell_cap = std::size_t{1} << 20);

// Proximal certificate: d(v, H) >= r certified; throws CriterionFails
// otherwise and PreconditionViolated unless r > 2 eps.
ProximalCert make_proximal(ContractionCert contraction, const Rational& r);

// Largest convenient r certified below d(v, H) (a power of p at a prime).
Rational separation_lower_bound(Place place, const QVector& v, const QVector& h);

// The eight separations: attracting(x^{+-1}) against repelling(y^{+-1}) and
// attracting(y^{+-1}) against repelling(x^{+-1}).
Transcript ping_pong_transcript(Place place, const VeryProximalCert& cx,
                                const VeryProximalCert& cy, const Rational& r);

// Throws PreconditionViolated when the four proximal certificates do not share
// (r, eps) at one place with r > 2 eps, SeparationFails naming the failing
// pairs.
PingPongCert verify_ping_pong(const QMatrix& x, const QMatrix& y, const VeryProximalCert& cx,
                              const VeryProximalCert& cy, Word word_x = {}, Word word_y = {});

// Builds the four proximal certificates for x^{+-1}, y^{+-1} from Cartan
// candidates with a common eps (the largest needed) and common r (the
// smallest certified separation), then checks the ping-pong conditions.
// Elements whose Cartan criterion does not close are grid verified when
// `grid_cap` is nonzero.  Throws CriterionFails, PreconditionViolated
// (r <= 2 eps) or SeparationFails.
PingPongCert ping_pong_from_cartan(const QMatrix& x, const QMatrix& y, Place place, Word word_x = {},
                                   Word word_y = {}, std::size_t grid_cap = 0);

// Searches reduced words in x^{+-1}, y^{+-1} of length <= L for one that
// evaluates to the identity.  Letters: 0 = x, 1 = x^-1, 2 = y, 3 = y^-1.
struct OracleResult {
  bool free = true;
  std::vector<int> failing_word;  // shortest, then lexicographically first
  std::size_t words_checked = 0;
};
OracleResult free_word_oracle(const QMatrix& x, const QMatrix& y, int L,
                              std::size_t word_cap = 50'000'000);
std::string oracle_word_string(const std::vector<int>& w);

}  // namespace pingpong::dynamics
