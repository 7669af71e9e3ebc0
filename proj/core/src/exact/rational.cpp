#include "pingpong/exact/rational.hpp"

#include <cctype>

#include "pingpong/error.hpp"

namespace pingpong::exact {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) {
    s.remove_prefix(1);
  }
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) {
    s.remove_suffix(1);
  }
  return s;
}

Integer parse_integer(std::string_view s, std::string_view whole) {
  s = trim(s);
  std::size_t digits_from = 0;
  if (!s.empty() && (s[0] == '-' || s[0] == '+')) digits_from = 1;
  if (digits_from == s.size()) {
    throw Error(ErrorCode::ParseError,
                "malformed rational '" + std::string(whole) + "'");
  }
  for (std::size_t i = digits_from; i < s.size(); ++i) {
    if (!std::isdigit(static_cast<unsigned char>(s[i]))) {
      throw Error(ErrorCode::ParseError,
                  "malformed rational '" + std::string(whole) + "'");
    }
  }
  std::string text(s[0] == '+' ? s.substr(1) : s);
  return Integer(text, 10);
}

}  // namespace

Rational parse_rational(std::string_view text) {
  auto const s = trim(text);
  auto const slash = s.find('/');
  if (slash == std::string_view::npos) {
    return Rational(parse_integer(s, text));
  }
  Integer num = parse_integer(s.substr(0, slash), text);
  Integer den = parse_integer(s.substr(slash + 1), text);
  if (den == 0) {
    throw Error(ErrorCode::ParseError,
                "zero denominator in '" + std::string(text) + "'");
  }
  Rational q(num, den);
  q.canonicalize();
  return q;
}

std::string to_string(const Integer& x) { return x.get_str(); }

std::string to_string(const Rational& x) { return x.get_str(); }

long valuation(const Integer& x, unsigned long p) {
  if (x == 0) return kInfiniteValuation;
  Integer pp(p);
  return static_cast<long>(mpz_remove(Integer().get_mpz_t(),
                                      Integer(x).get_mpz_t(),
                                      pp.get_mpz_t()));
}

long valuation(const Rational& x, unsigned long p) {
  if (x == 0) return kInfiniteValuation;
  return valuation(Integer(x.get_num()), p) -
         valuation(Integer(x.get_den()), p);
}

Rational unit_part(const Rational& x, unsigned long p) {
  Integer pp(p);
  Integer num, den;
  mpz_remove(num.get_mpz_t(), x.get_num_mpz_t(), pp.get_mpz_t());
  mpz_remove(den.get_mpz_t(), x.get_den_mpz_t(), pp.get_mpz_t());
  Rational u(num, den);
  u.canonicalize();
  return u;
}

Integer power(const Integer& x, unsigned long e) {
  Integer r;
  mpz_pow_ui(r.get_mpz_t(), x.get_mpz_t(), e);
  return r;
}

Rational power(const Rational& x, long e) {
  if (e >= 0) {
    Rational r(power(Integer(x.get_num()), static_cast<unsigned long>(e)),
               power(Integer(x.get_den()), static_cast<unsigned long>(e)));
    r.canonicalize();
    return r;
  }
  return Rational(1) / power(x, -e);
}

Rational abs(const Rational& x) { return x < 0 ? Rational(-x) : x; }

long floor_log2(const Rational& x) {
  Rational a = abs(x);
  long const nb = static_cast<long>(mpz_sizeinbase(a.get_num_mpz_t(), 2));
  long const db = static_cast<long>(mpz_sizeinbase(a.get_den_mpz_t(), 2));
  long e = nb - db;
  // 2^e is now within a factor 2 of |x|; fix up.
  Rational two_e = e >= 0 ? Rational(power(Integer(2), static_cast<unsigned long>(e)))
                          : Rational(Integer(1), power(Integer(2), static_cast<unsigned long>(-e)));
  while (two_e > a) {
    two_e /= 2;
    --e;
  }
  while (two_e * 2 <= a) {
    two_e *= 2;
    ++e;
  }
  return e;
}

bool is_prime(unsigned long p) {
  if (p < 2) return false;
  return mpz_probab_prime_p(Integer(p).get_mpz_t(), 40) > 0;
}

}  // namespace pingpong::exact
