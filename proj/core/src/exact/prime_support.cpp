#include "pingpong/exact/prime_support.hpp"

#include <algorithm>

#include "pingpong/error.hpp"

namespace pingpong::exact {

PrimeSupport::PrimeSupport(std::vector<unsigned long> primes)
    : primes_(std::move(primes)) {
  std::sort(primes_.begin(), primes_.end());
  primes_.erase(std::unique(primes_.begin(), primes_.end()), primes_.end());
  for (auto p : primes_) {
    if (!is_prime(p)) {
      throw Error(ErrorCode::ParseError,
                  std::to_string(p) + " is not a prime");
    }
  }
}

bool PrimeSupport::contains(unsigned long p) const {
  return std::binary_search(primes_.begin(), primes_.end(), p);
}

bool PrimeSupport::supports(const Rational& x) const {
  Integer den = x.get_den();
  for (auto p : primes_) {
    Integer pp(p);
    mpz_remove(den.get_mpz_t(), den.get_mpz_t(), pp.get_mpz_t());
  }
  return den == 1;
}

}  // namespace pingpong::exact
