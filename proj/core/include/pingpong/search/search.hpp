#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pingpong/exact/ball.hpp"
#include "pingpong/exact/polynomial.hpp"
#include "pingpong/exact/word.hpp"
#include "pingpong/places/place.hpp"

namespace pingpong::search {

using exact::GenSet;
using exact::QMatrix;
using exact::QPoly;
using exact::QVector;
using exact::Rational;
using exact::SMatrix;
using exact::Word;
using places::Place;

// A vector with coordinates in Q[x]/(f), f monic squarefree.  It stands for
// one vector per root alpha of f, obtained by substituting x = alpha.
struct AlgebraicVector {
  QPoly modulus;
  std::vector<QPoly> coords;

  std::size_t size() const { return coords.size(); }
  // Vector at x = value when f(value) = 0 (rational roots only).
  QVector at(const Rational& root) const;
};

// Upper bound on max_i |coord_i(alpha)|_v over all roots alpha of f.
places::LocalScalar norm_bound(const AlgebraicVector& v, Place place);

// Eigenvectors for the roots of one squarefree factor of the characteristic
// polynomial, with functionals dual to them up to a common nonzero scalar:
// dual[s] vanishes on every eigenvector except right[s].
struct EigenPiece {
  QPoly modulus;
  std::vector<AlgebraicVector> right;
  std::vector<AlgebraicVector> dual;
};

struct Eigenbasis {
  std::size_t dim = 0;
  std::vector<EigenPiece> pieces;

  // An explicit rational basis (dual from the inverse matrix).
  static Eigenbasis from_rational(const std::vector<QVector>& basis);
  std::vector<AlgebraicVector> vectors() const;
};

// Exact eigenvectors of a semisimple matrix, coordinates cleared to
// integers.  Each piece's modulus divides the characteristic polynomial and
// the class of x is the eigenvalue.  Throws NotSemisimple.
Eigenbasis integral_eigenvectors(const QMatrix& a);

// (a - x) v = 0 in Q[x]/(f), exactly.
bool is_eigenvector(const QMatrix& a, const AlgebraicVector& v);

struct Found {
  Word word;
  SMatrix matrix;
};

// First element of sigma^n, n <= max_len, in breadth-first order that is not
// torsion.  Throws NoneFound.
Found find_non_torsion(const GenSet& sigma, std::size_t max_len);

// Same, requiring semisimple non-torsion; with `require_gap`, also a
// certified modulus gap at infinity in some wedge power.
Found find_semisimple_nontorsion(const GenSet& sigma, std::size_t max_len, bool require_gap = false);

struct DeterminantRecord {
  std::string label;
  std::string evidence;  // the exact nonzero value that proves it
};

struct GeneralPositionWitness {
  Word word;
  SMatrix element;     // in the original representation
  std::size_t wedge = 1;
  int n_general = 0;   // the N of N-general position
  std::vector<DeterminantRecord> determinants;
};

// Checks both general-position conditions for `b` (already in the
// representation of the basis).  Returns the records, or nullopt with the
// first failing condition in `failure`.
std::optional<std::vector<DeterminantRecord>> general_position_records(const QMatrix& b, const Eigenbasis& basis,
                                                                       int n_general, std::string* failure = nullptr);

// First word B in sigma^n, n <= max_len, whose image under the wedge power
// `wedge` is in N-general position with respect to `basis`:
//  (a) B v_i and B^-1 v_i avoid every hyperplane spanned by all but one basis
//      vector (dual functionals nonzero, tested over all root pairs);
//  (b) det(B^{i_1} v_j, ..., B^{i_n} v_j) != 0 for 1 <= i_1 < ... < i_n <= N.
// Throws NoneFound; PreconditionViolated if the basis is degenerate.
GeneralPositionWitness find_general_position(const GenSet& sigma, const Eigenbasis& basis, int n_general,
                                             std::size_t max_len, std::size_t wedge = 1);

// Replays a witness from scratch.
bool verify_general_position(const GeneralPositionWitness& w, const Eigenbasis& basis);

}  // namespace pingpong::search
