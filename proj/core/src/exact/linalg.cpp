#include "pingpong/exact/linalg.hpp"

#include <algorithm>
#include <numeric>

#include "pingpong/error.hpp"

namespace pingpong::exact {

Rational det(const QMatrix& a) {
  if (!a.is_square()) throw Error(ErrorCode::PreconditionViolated, "det of non-square");
  std::size_t const n = a.rows();
  QMatrix m = a;
  Rational d(1);
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t pivot = n;
    for (std::size_t r = c; r < n; ++r) {
      if (m(r, c) != 0) {
        pivot = r;
        break;
      }
    }
    if (pivot == n) return Rational(0);
    if (pivot != c) {
      for (std::size_t j = 0; j < n; ++j) std::swap(m(c, j), m(pivot, j));
      d = -d;
    }
    Rational const p = m(c, c);
    d *= p;
    for (std::size_t r = c + 1; r < n; ++r) {
      if (m(r, c) == 0) continue;
      Rational const f = m(r, c) / p;
      for (std::size_t j = c; j < n; ++j) m(r, j) -= f * m(c, j);
    }
  }
  return d;
}

Rational trace(const QMatrix& a) {
  Rational t(0);
  for (std::size_t i = 0; i < a.rows(); ++i) t += a(i, i);
  return t;
}

std::vector<std::size_t> row_reduce(QMatrix& a) {
  std::vector<std::size_t> pivots;
  std::size_t row = 0;
  for (std::size_t c = 0; c < a.cols() && row < a.rows(); ++c) {
    std::size_t pivot = a.rows();
    for (std::size_t r = row; r < a.rows(); ++r) {
      if (a(r, c) != 0) {
        pivot = r;
        break;
      }
    }
    if (pivot == a.rows()) continue;
    if (pivot != row) {
      for (std::size_t j = 0; j < a.cols(); ++j) std::swap(a(row, j), a(pivot, j));
    }
    Rational const p = a(row, c);
    for (std::size_t j = c; j < a.cols(); ++j) a(row, j) /= p;
    for (std::size_t r = 0; r < a.rows(); ++r) {
      if (r == row || a(r, c) == 0) continue;
      Rational const f = a(r, c);
      for (std::size_t j = c; j < a.cols(); ++j) a(r, j) -= f * a(row, j);
    }
    pivots.push_back(c);
    ++row;
  }
  return pivots;
}

std::size_t rank(const QMatrix& a) {
  QMatrix m = a;
  return row_reduce(m).size();
}

std::vector<QVector> nullspace(const QMatrix& a) {
  QMatrix m = a;
  auto const pivots = row_reduce(m);
  std::vector<bool> is_pivot(a.cols(), false);
  for (auto p : pivots) is_pivot[p] = true;
  std::vector<QVector> basis;
  for (std::size_t free = 0; free < a.cols(); ++free) {
    if (is_pivot[free]) continue;
    QVector v(a.cols(), Rational(0));
    v[free] = 1;
    for (std::size_t k = 0; k < pivots.size(); ++k) v[pivots[k]] = -m(k, free);
    basis.push_back(std::move(v));
  }
  return basis;
}

QMatrix inverse(const QMatrix& a) {
  if (!a.is_square()) throw Error(ErrorCode::PreconditionViolated, "inverse of non-square");
  std::size_t const n = a.rows();
  QMatrix aug(n, 2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) aug(i, j) = a(i, j);
    aug(i, n + i) = 1;
  }
  auto const pivots = row_reduce(aug);
  if (pivots.size() < n || pivots[n - 1] != n - 1) {
    throw Error(ErrorCode::PreconditionViolated, "singular matrix");
  }
  QMatrix inv(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) inv(i, j) = aug(i, n + j);
  }
  return inv;
}

QMatrix power(const QMatrix& a, long e) {
  QMatrix base = e < 0 ? inverse(a) : a;
  unsigned long k = e < 0 ? static_cast<unsigned long>(-e) : static_cast<unsigned long>(e);
  QMatrix result = QMatrix::identity(a.rows());
  while (k > 0) {
    if (k & 1UL) result = result * base;
    k >>= 1UL;
    if (k > 0) base = base * base;
  }
  return result;
}

QMatrix submatrix(const QMatrix& a, const std::vector<std::size_t>& rows,
                  const std::vector<std::size_t>& cols) {
  QMatrix s(rows.size(), cols.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < cols.size(); ++j) s(i, j) = a(rows[i], cols[j]);
  }
  return s;
}

namespace {

// Faddeev-LeVerrier: returns the characteristic polynomial and fills the
// adjugate coefficient matrices.
QPoly faddeev_leverrier(const QMatrix& a, std::vector<QMatrix>* adj) {
  if (!a.is_square()) throw Error(ErrorCode::PreconditionViolated, "char_poly of non-square");
  std::size_t const n = a.rows();
  std::vector<Rational> c(n + 1);
  c[n] = 1;
  QMatrix m(n, n);
  std::vector<QMatrix> ms;
  for (std::size_t k = 1; k <= n; ++k) {
    m = a * m;
    for (std::size_t i = 0; i < n; ++i) m(i, i) += c[n - k + 1];
    ms.push_back(m);
    c[n - k] = -trace(a * m) / static_cast<long>(k);
  }
  if (adj != nullptr) {
    // adj(xI - a) = sum_{k=1}^{n} M_k x^{n-k}
    adj->assign(n, QMatrix(n, n));
    for (std::size_t k = 1; k <= n; ++k) (*adj)[n - k] = ms[k - 1];
  }
  return QPoly(std::move(c));
}

}  // namespace

QPoly char_poly(const QMatrix& a) { return faddeev_leverrier(a, nullptr); }

std::vector<QMatrix> adjugate_polynomial(const QMatrix& a) {
  std::vector<QMatrix> adj;
  faddeev_leverrier(a, &adj);
  return adj;
}

QPoly min_poly(const QMatrix& a) {
  std::size_t const n = a.rows();
  // Krylov sequence of matrix powers, flattened as columns.
  std::vector<QMatrix> powers{QMatrix::identity(n)};
  for (std::size_t k = 1; k <= n; ++k) {
    powers.push_back(powers.back() * a);
    QMatrix system(n * n, k + 1);
    for (std::size_t j = 0; j <= k; ++j) {
      for (std::size_t e = 0; e < n * n; ++e) system(e, j) = powers[j].data()[e];
    }
    auto null = nullspace(system);
    if (null.empty()) continue;
    // Dependency involving A^k; normalise to monic.
    QVector v = null.front();
    std::vector<Rational> coeffs(v.begin(), v.end());
    QPoly p(std::move(coeffs));
    return p.monic();
  }
  return char_poly(a);
}

bool is_semisimple(const QMatrix& a) { return is_squarefree(min_poly(a)); }

namespace {

long euler_phi(long m) {
  long result = m;
  for (long p = 2; p * p <= m; ++p) {
    if (m % p == 0) {
      while (m % p == 0) m /= p;
      result -= result / p;
    }
  }
  if (m > 1) result -= result / m;
  return result;
}

// phi(m) >= sqrt(m/2), so phi(m) <= d forces m <= 2 d^2.
std::vector<long> admissible_orders(std::size_t d) {
  std::vector<long> out;
  long const bound = 2 * static_cast<long>(d * d) + 2;
  for (long m = 1; m <= bound; ++m) {
    if (euler_phi(m) <= static_cast<long>(d)) out.push_back(m);
  }
  return out;
}

}  // namespace

long admissible_torsion_exponent(std::size_t d) {
  long l = 1;
  for (long m : admissible_orders(d)) l = std::lcm(l, m);
  return l;
}

bool is_torsion(const QMatrix& a, long* order) {
  QPoly mp = min_poly(a);
  if (!is_squarefree(mp)) return false;
  long ord = 1;
  for (long m : admissible_orders(a.rows())) {
    if (mp.degree() <= 0) break;
    QPoly const phi = cyclotomic(static_cast<unsigned>(m));
    auto [q, r] = mp.divmod(phi);
    if (r.is_zero()) {
      mp = q;
      ord = std::lcm(ord, m);
    }
  }
  if (mp.degree() > 0) return false;
  if (order != nullptr) *order = ord;
  return true;
}

std::size_t binomial(std::size_t n, std::size_t k) {
  if (k > n) return 0;
  std::size_t r = 1;
  for (std::size_t i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

std::vector<std::vector<std::size_t>> index_subsets(std::size_t n, std::size_t k) {
  std::vector<std::vector<std::size_t>> out;
  std::vector<std::size_t> cur(k);
  std::iota(cur.begin(), cur.end(), 0);
  if (k > n) return out;
  while (true) {
    out.push_back(cur);
    std::size_t i = k;
    while (i > 0 && cur[i - 1] == n - k + i - 1) --i;
    if (i == 0) break;
    ++cur[i - 1];
    for (std::size_t j = i; j < k; ++j) cur[j] = cur[j - 1] + 1;
  }
  return out;
}

QMatrix wedge_power(const QMatrix& a, std::size_t i) {
  std::size_t const d = a.rows();
  if (!a.is_square() || i < 1 || i + 1 > d) {
    throw Error(ErrorCode::BadIndex,
                "wedge index " + std::to_string(i) + " outside [1, " +
                    std::to_string(d > 0 ? d - 1 : 0) + "]");
  }
  auto const subsets = index_subsets(d, i);
  QMatrix w(subsets.size(), subsets.size());
  for (std::size_t r = 0; r < subsets.size(); ++r) {
    for (std::size_t c = 0; c < subsets.size(); ++c) {
      w(r, c) = det(submatrix(a, subsets[r], subsets[c]));
    }
  }
  return w;
}

std::vector<QVector> common_rational_eigenvectors(const std::vector<QMatrix>& ms) {
  if (ms.empty()) return {};
  std::size_t const n = ms.front().rows();
  // Running basis of candidate subspace, starting with everything.
  std::vector<QVector> candidates;
  for (std::size_t i = 0; i < n; ++i) {
    QVector e(n, Rational(0));
    e[i] = 1;
    candidates.push_back(e);
  }
  // Collect, for each matrix, the union of its rational eigenspaces; the
  // common eigenvectors lie in one eigenspace per matrix.  We intersect
  // eigenspaces greedily across all choices (dimension stays tiny).
  std::vector<std::vector<QVector>> spaces{candidates};
  for (auto const& m : ms) {
    std::vector<std::vector<QVector>> next;
    QPoly const chi = char_poly(m);
    // Rational roots: test divisors is expensive; use linear factors of the
    // squarefree decomposition found by exact eigenvalue candidates from
    // the diagonal of an echelon form is unreliable, so use the rational
    // root theorem on the primitive integer polynomial.
    std::vector<Rational> roots;
    {
      QPoly sf = squarefree_part(chi);
      Integer lcm_den(1);
      for (auto const& c : sf.coefficients()) {
        mpz_lcm(lcm_den.get_mpz_t(), lcm_den.get_mpz_t(), c.get_den_mpz_t());
      }
      std::vector<Integer> ic;
      for (auto const& c : sf.coefficients()) ic.emplace_back(Rational(c * lcm_den).get_num());
      auto divisors = [](Integer x) {
        std::vector<Integer> ds;
        if (x < 0) x = -x;
        if (x == 0) return ds;
        if (x > Integer(1000000)) return ds;  // diagnostics only
        unsigned long const v = x.get_ui();
        for (unsigned long k = 1; k <= v; ++k) {
          if (v % k == 0) ds.emplace_back(k);
        }
        return ds;
      };
      int const z = sf.trailing_zeros();
      if (z > 0) roots.emplace_back(0);
      auto const num_divs = divisors(ic[static_cast<std::size_t>(z)]);
      auto const den_divs = divisors(ic.back());
      for (auto const& p : num_divs) {
        for (auto const& q : den_divs) {
          for (int s : {1, -1}) {
            Rational cand(p * s, q);
            cand.canonicalize();
            if (sf(cand) == 0 &&
                std::find(roots.begin(), roots.end(), cand) == roots.end()) {
              roots.push_back(cand);
            }
          }
        }
      }
    }
    for (auto const& space : spaces) {
      for (auto const& lambda : roots) {
        // Intersect span(space) with ker(m - lambda).
        std::size_t const k = space.size();
        if (k == 0) continue;
        QMatrix basis(n, k);
        for (std::size_t j = 0; j < k; ++j) {
          for (std::size_t i = 0; i < n; ++i) basis(i, j) = space[j][i];
        }
        QMatrix shifted = m;
        for (std::size_t i = 0; i < n; ++i) shifted(i, i) -= lambda;
        auto coeffs = nullspace(shifted * basis);
        std::vector<QVector> inter;
        for (auto const& c : coeffs) inter.push_back(basis * c);
        if (!inter.empty()) next.push_back(std::move(inter));
      }
    }
    spaces = std::move(next);
    if (spaces.empty()) return {};
  }
  std::vector<QVector> out;
  for (auto& s : spaces) {
    for (auto& v : s) out.push_back(std::move(v));
  }
  return out;
}

}  // namespace pingpong::exact
