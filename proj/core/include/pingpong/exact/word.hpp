#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "pingpong/exact/matrix.hpp"
#include "pingpong/exact/prime_support.hpp"

namespace pingpong::exact {

struct Letter {
  std::size_t gen = 0;
  int sign = 1;  // +1 or -1
  friend bool operator==(const Letter&, const Letter&) = default;
  friend auto operator<=>(const Letter&, const Letter&) = default;
};

class Word {
 public:
  Word() = default;
  explicit Word(std::vector<Letter> letters) : letters_(std::move(letters)) {}
  Word(std::initializer_list<Letter> letters) : letters_(letters) {}
  static Word letter(std::size_t gen, int sign = 1) { return Word({Letter{gen, sign}}); }

  const std::vector<Letter>& letters() const { return letters_; }
  std::size_t length() const { return letters_.size(); }
  bool empty() const { return letters_.empty(); }

  // Free reduction: cancels adjacent x x^-1 pairs.
  Word reduced() const;
  bool is_reduced() const;
  Word inverse() const;
  Word power(long e) const;

  Word& operator*=(const Word& o);
  friend Word operator*(Word a, const Word& b) { return a *= b; }
  friend bool operator==(const Word&, const Word&) = default;
  friend auto operator<=>(const Word&, const Word&) = default;

  // "g0 g1^-1 ..." ; the empty word prints as "e".
  std::string to_string() const;

 private:
  std::vector<Letter> letters_;
};

// Ordered list of generators.  Identity and inverses are materialised as
// ordinary entries when the flags ask for them; inverse_of() records the
// pairing so words can be rewritten with positive letters only.
class GenSet {
 public:
  GenSet() = default;
  // Validates det = 1 and denominator support (Error(BadMatrix)), then adds
  // the identity first and, with symmetric_closure, any missing inverse.
  GenSet(std::vector<SMatrix> generators, PrimeSupport support, bool symmetric_closure);

  const std::vector<SMatrix>& generators() const { return gens_; }
  const SMatrix& operator[](std::size_t i) const { return gens_.at(i); }
  std::size_t size() const { return gens_.size(); }
  std::size_t dim() const { return dim_; }
  const PrimeSupport& support() const { return support_; }
  bool symmetric() const { return symmetric_; }
  bool contains_identity() const { return has_identity_; }
  // Index of the generator equal to the inverse of gen i, or size() if none.
  std::size_t inverse_of(std::size_t i) const { return inverse_.at(i); }
  std::size_t identity_index() const { return identity_; }
  const SMatrix& inverse_matrix(std::size_t i) const { return inverse_mats_.at(i); }

  // Conjugated copy g^-1 s g for every s; flags preserved.
  GenSet conjugated(const SMatrix& g) const;

 private:
  std::vector<SMatrix> gens_;
  std::vector<SMatrix> inverse_mats_;
  std::vector<std::size_t> inverse_;
  PrimeSupport support_;
  std::size_t dim_ = 0;
  std::size_t identity_ = 0;
  bool symmetric_ = false;
  bool has_identity_ = false;
};

// Throws Error(IndexOutOfRange) on a bad generator index.
SMatrix word_eval(const GenSet& sigma, const Word& w);

// Validates a matrix as a group element for the given support; throws
// Error(BadMatrix) with the reason.
void check_group_element(const SMatrix& a, const PrimeSupport& support);

// Canonical serialisation used as an exact dedup key: lowest-terms entries in
// row-major order.
std::string canonical_key(const QMatrix& a);

}  // namespace pingpong::exact
