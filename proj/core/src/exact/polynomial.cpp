#include "pingpong/exact/polynomial.hpp"

#include <sstream>

#include "pingpong/error.hpp"

namespace pingpong::exact {

QPoly::QPoly(std::vector<Rational> coefficients) : c_(std::move(coefficients)) {
  trim();
}

void QPoly::trim() {
  while (!c_.empty() && c_.back() == 0) c_.pop_back();
}

Rational QPoly::coefficient(int i) const {
  if (i < 0 || i > degree()) return Rational(0);
  return c_[static_cast<std::size_t>(i)];
}

QPoly QPoly::monic() const {
  if (is_zero()) return *this;
  QPoly m = *this;
  Rational const lc = leading();
  for (auto& c : m.c_) c /= lc;
  return m;
}

QPoly QPoly::derivative() const {
  if (degree() <= 0) return QPoly();
  std::vector<Rational> d(c_.size() - 1);
  for (std::size_t i = 1; i < c_.size(); ++i) d[i - 1] = c_[i] * static_cast<long>(i);
  return QPoly(std::move(d));
}

Rational QPoly::operator()(const Rational& x) const {
  Rational acc(0);
  for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * x + *it;
  return acc;
}

QPoly& QPoly::operator+=(const QPoly& o) {
  if (o.c_.size() > c_.size()) c_.resize(o.c_.size());
  for (std::size_t i = 0; i < o.c_.size(); ++i) c_[i] += o.c_[i];
  trim();
  return *this;
}

QPoly& QPoly::operator-=(const QPoly& o) {
  if (o.c_.size() > c_.size()) c_.resize(o.c_.size());
  for (std::size_t i = 0; i < o.c_.size(); ++i) c_[i] -= o.c_[i];
  trim();
  return *this;
}

QPoly& QPoly::operator*=(const QPoly& o) {
  if (is_zero() || o.is_zero()) {
    c_.clear();
    return *this;
  }
  std::vector<Rational> r(c_.size() + o.c_.size() - 1);
  for (std::size_t i = 0; i < c_.size(); ++i) {
    if (c_[i] == 0) continue;
    for (std::size_t j = 0; j < o.c_.size(); ++j) r[i + j] += c_[i] * o.c_[j];
  }
  c_ = std::move(r);
  trim();
  return *this;
}

QPoly& QPoly::operator*=(const Rational& s) {
  for (auto& c : c_) c *= s;
  trim();
  return *this;
}

std::pair<QPoly, QPoly> QPoly::divmod(const QPoly& divisor) const {
  if (divisor.is_zero()) {
    throw Error(ErrorCode::PreconditionViolated, "polynomial division by zero");
  }
  if (degree() < divisor.degree()) return {QPoly(), *this};
  std::vector<Rational> rem = c_;
  std::vector<Rational> quot(c_.size() - divisor.c_.size() + 1);
  Rational const lc = divisor.leading();
  int const dd = divisor.degree();
  for (int k = degree(); k >= dd; --k) {
    Rational const q = rem[static_cast<std::size_t>(k)] / lc;
    quot[static_cast<std::size_t>(k - dd)] = q;
    if (q == 0) continue;
    for (int j = 0; j <= dd; ++j) {
      rem[static_cast<std::size_t>(k - dd + j)] -= q * divisor.c_[static_cast<std::size_t>(j)];
    }
  }
  rem.resize(static_cast<std::size_t>(dd));
  return {QPoly(std::move(quot)), QPoly(std::move(rem))};
}

QPoly QPoly::pow(unsigned e) const {
  QPoly result = QPoly::constant(1);
  QPoly base = *this;
  while (e > 0) {
    if (e & 1U) result *= base;
    e >>= 1U;
    if (e > 0) base *= base;
  }
  return result;
}

QPoly QPoly::scale_argument(const Rational& s) const {
  std::vector<Rational> r = c_;
  Rational sk(1);
  for (auto& c : r) {
    c *= sk;
    sk *= s;
  }
  return QPoly(std::move(r));
}

QPoly QPoly::reversed() const {
  std::vector<Rational> r(c_.rbegin(), c_.rend());
  return QPoly(std::move(r));
}

int QPoly::trailing_zeros() const {
  int k = 0;
  while (k < static_cast<int>(c_.size()) && c_[static_cast<std::size_t>(k)] == 0) ++k;
  return k;
}

QPoly QPoly::shift_down(int k) const {
  if (k <= 0) return *this;
  if (k > degree()) return QPoly();
  return QPoly(std::vector<Rational>(c_.begin() + k, c_.end()));
}

std::string QPoly::to_string(const std::string& var) const {
  if (is_zero()) return "0";
  std::ostringstream out;
  bool first = true;
  for (int i = degree(); i >= 0; --i) {
    Rational const& c = c_[static_cast<std::size_t>(i)];
    if (c == 0) continue;
    Rational const a = exact::abs(c);
    if (first) {
      if (c < 0) out << "-";
    } else {
      out << (c < 0 ? " - " : " + ");
    }
    first = false;
    bool const show_coefficient = (a != 1) || i == 0;
    if (show_coefficient) out << a.get_str();
    if (i > 0) {
      if (show_coefficient) out << "*";
      out << var;
      if (i > 1) out << "^" << i;
    }
  }
  return out.str();
}

QPoly gcd(QPoly a, QPoly b) {
  while (!b.is_zero()) {
    QPoly r = a % b;
    a = std::move(b);
    b = std::move(r);
  }
  return a.monic();
}

Bezout extended_gcd(const QPoly& a, const QPoly& b) {
  QPoly r0 = a, r1 = b;
  QPoly s0 = QPoly::constant(1), s1;
  QPoly t0, t1 = QPoly::constant(1);
  while (!r1.is_zero()) {
    auto [q, r] = r0.divmod(r1);
    r0 = std::move(r1);
    r1 = std::move(r);
    QPoly s2 = s0 - q * s1;
    s0 = std::move(s1);
    s1 = std::move(s2);
    QPoly t2 = t0 - q * t1;
    t0 = std::move(t1);
    t1 = std::move(t2);
  }
  if (r0.is_zero()) return {r0, s0, t0};
  Rational const lc = r0.leading();
  Rational const inv = 1 / lc;
  return {r0 * inv, s0 * inv, t0 * inv};
}

bool is_squarefree(const QPoly& p) {
  if (p.degree() <= 0) return true;
  return gcd(p, p.derivative()).degree() == 0;
}

QPoly squarefree_part(const QPoly& p) {
  if (p.degree() <= 0) return QPoly::constant(1);
  QPoly g = gcd(p, p.derivative());
  return (p / g).monic();
}

std::vector<QPoly> squarefree_decomposition(const QPoly& p) {
  std::vector<QPoly> out;
  if (p.degree() <= 0) return out;
  QPoly a = p.monic();
  QPoly b = gcd(a, a.derivative());
  QPoly c = a / b;
  QPoly d = a.derivative() / b - c.derivative();
  while (c.degree() > 0) {
    QPoly f = gcd(c, d);
    out.push_back(f);
    c = c / f;
    d = d / f - c.derivative();
  }
  while (!out.empty() && out.back().degree() == 0) out.pop_back();
  return out;
}

QPoly cyclotomic(unsigned n) {
  if (n == 0) throw Error(ErrorCode::PreconditionViolated, "cyclotomic(0)");
  // x^n - 1 = prod_{d | n} Phi_d
  std::vector<Rational> xn(n + 1);
  xn[0] = -1;
  xn[n] = 1;
  QPoly result(std::move(xn));
  for (unsigned d = 1; d < n; ++d) {
    if (n % d == 0) result = result / cyclotomic(d);
  }
  return result;
}

Rational resultant(const QPoly& a, const QPoly& b) {
  if (a.is_zero() || b.is_zero()) return Rational(0);
  int const m = a.degree();
  int const n = b.degree();
  if (n == 0) return power(b.leading(), m);
  if (m == 0) return power(a.leading(), n);
  // res(a, b) = (-1)^{mn} res(b, a) and res(b, a) = lc(b)^{m - deg r} res(b, r)
  QPoly r = a % b;
  if (r.is_zero()) return Rational(0);
  Rational sign = ((m * n) % 2 == 0) ? Rational(1) : Rational(-1);
  return sign * power(b.leading(), m - r.degree()) * resultant(b, r);
}

}  // namespace pingpong::exact
