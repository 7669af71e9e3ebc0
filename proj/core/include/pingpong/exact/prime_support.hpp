#pragma once

#include <vector>

#include "pingpong/exact/rational.hpp"

namespace pingpong::exact {

// The finite set of primes allowed in denominators.  Together with the
// archimedean place this fixes the place set for a whole run.
class PrimeSupport {
 public:
  PrimeSupport() = default;
  // Sorts and deduplicates; throws Error(ParseError) on a non-prime entry.
  explicit PrimeSupport(std::vector<unsigned long> primes);

  const std::vector<unsigned long>& primes() const { return primes_; }
  bool contains(unsigned long p) const;

  // True iff every prime factor of den(x) lies in the support.
  bool supports(const Rational& x) const;

  friend bool operator==(const PrimeSupport&, const PrimeSupport&) = default;

 private:
  std::vector<unsigned long> primes_;
};

}  // namespace pingpong::exact
