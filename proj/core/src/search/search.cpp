#include "pingpong/search/search.hpp"

#include <algorithm>
#include <functional>

#include "pingpong/error.hpp"
#include "pingpong/exact/linalg.hpp"
#include "pingpong/parallel.hpp"
#include "pingpong/places/norms.hpp"
#include "pingpong/places/roots.hpp"

namespace pingpong::search {

using places::LocalScalar;
using places::Relation;
using places::Verdict;

namespace {

QPoly reduce(const QPoly& e, const QPoly& f) { return e.degree() < f.degree() ? e : e % f; }

QPoly mulmod(const QPoly& a, const QPoly& b, const QPoly& f) { return reduce(a * b, f); }

// Inverse of a unit of Q[x]/(f).
QPoly inverse_mod(const QPoly& e, const QPoly& f) {
  auto const b = exact::extended_gcd(e, f);
  if (b.g.degree() != 0) throw Error(ErrorCode::PreconditionViolated, "not a unit in the quotient ring");
  QPoly s = b.s * (Rational(1) / b.g.leading());
  return reduce(s, f);
}

using RMatrix = std::vector<std::vector<QPoly>>;

struct KernelPiece {
  QPoly modulus;
  std::vector<std::vector<QPoly>> basis;
};

// Kernel of m over Q[x]/(f) by elimination, splitting f whenever a pivot
// candidate is a zero divisor (dynamic evaluation).  The product of the
// returned moduli is f.
void kernel_split(RMatrix m, const QPoly& f, std::vector<KernelPiece>& out) {
  std::size_t const rows = m.size();
  std::size_t const cols = rows ? m[0].size() : 0;
  for (auto& row : m) {
    for (auto& e : row) e = reduce(e, f);
  }
  std::vector<std::size_t> pivot_cols;
  std::size_t r = 0;
  for (std::size_t c = 0; c < cols && r < rows; ++c) {
    std::size_t piv = rows;
    for (std::size_t p = r; p < rows; ++p) {
      if (m[p][c].is_zero()) continue;
      QPoly const g = exact::gcd(m[p][c], f);
      if (g.degree() > 0) {
        // Zero divisor: the entry vanishes exactly at the roots of g.
        kernel_split(m, g, out);
        kernel_split(m, f / g, out);
        return;
      }
      piv = p;
      break;
    }
    if (piv == rows) continue;
    std::swap(m[piv], m[r]);
    QPoly const inv = inverse_mod(m[r][c], f);
    for (auto& e : m[r]) e = mulmod(e, inv, f);
    for (std::size_t p = 0; p < rows; ++p) {
      if (p == r || m[p][c].is_zero()) continue;
      QPoly const factor = m[p][c];
      for (std::size_t j = 0; j < cols; ++j) m[p][j] = reduce(m[p][j] - factor * m[r][j], f);
    }
    pivot_cols.push_back(c);
    ++r;
  }
  KernelPiece piece{f, {}};
  for (std::size_t c = 0; c < cols; ++c) {
    if (std::find(pivot_cols.begin(), pivot_cols.end(), c) != pivot_cols.end()) continue;
    std::vector<QPoly> v(cols);
    v[c] = QPoly::constant(Rational(1));
    for (std::size_t k = 0; k < pivot_cols.size(); ++k) v[pivot_cols[k]] = -m[k][c];
    piece.basis.push_back(std::move(v));
  }
  out.push_back(std::move(piece));
}

RMatrix shifted(const QMatrix& a) {
  std::size_t const n = a.rows();
  RMatrix m(n, std::vector<QPoly>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      m[i][j] = QPoly::constant(a(i, j));
      if (i == j) m[i][j] -= QPoly::x();
    }
  }
  return m;
}

// Scales a vector of polynomials so every coefficient is an integer with
// content 1.
std::vector<QPoly> integral(std::vector<QPoly> v) {
  exact::Integer den(1), num(0);
  for (auto const& p : v) {
    for (auto const& c : p.coefficients()) {
      mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), c.get_den_mpz_t());
    }
  }
  for (auto& p : v) p *= Rational(den);
  for (auto const& p : v) {
    for (auto const& c : p.coefficients()) mpz_gcd(num.get_mpz_t(), num.get_mpz_t(), c.get_num_mpz_t());
  }
  if (num != 0 && num != 1) {
    for (auto& p : v) p *= Rational(1) / Rational(num);
  }
  return v;
}

QPoly dot(const std::vector<QPoly>& u, const std::vector<QPoly>& v, const QPoly& f) {
  QPoly acc;
  for (std::size_t i = 0; i < u.size(); ++i) acc += u[i] * v[i];
  return reduce(acc, f);
}

// Determinant over Q[x]/(f) by cofactor expansion (small sizes only).
QPoly det_mod(const RMatrix& m, const QPoly& f) {
  std::size_t const n = m.size();
  if (n == 0) return QPoly::constant(Rational(1));
  if (n == 1) return reduce(m[0][0], f);
  if (n == 2) return reduce(m[0][0] * m[1][1] - m[0][1] * m[1][0], f);
  QPoly acc;
  for (std::size_t j = 0; j < n; ++j) {
    if (m[0][j].is_zero()) continue;
    RMatrix minor;
    for (std::size_t i = 1; i < n; ++i) {
      std::vector<QPoly> row;
      for (std::size_t k = 0; k < n; ++k) {
        if (k != j) row.push_back(m[i][k]);
      }
      minor.push_back(std::move(row));
    }
    QPoly const term = mulmod(m[0][j], det_mod(minor, f), f);
    if (j % 2 == 0) {
      acc += term;
    } else {
      acc -= term;
    }
  }
  return reduce(acc, f);
}

RMatrix adjugate_mod(const RMatrix& g, const QPoly& f) {
  std::size_t const k = g.size();
  RMatrix adj(k, std::vector<QPoly>(k));
  if (k == 1) {
    adj[0][0] = QPoly::constant(Rational(1));
    return adj;
  }
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      RMatrix minor;
      for (std::size_t r = 0; r < k; ++r) {
        if (r == j) continue;
        std::vector<QPoly> row;
        for (std::size_t c = 0; c < k; ++c) {
          if (c != i) row.push_back(g[r][c]);
        }
        minor.push_back(std::move(row));
      }
      QPoly d = det_mod(minor, f);
      if ((i + j) % 2 == 1) d = -d;
      adj[i][j] = d;
    }
  }
  return adj;
}

}  // namespace

QVector AlgebraicVector::at(const Rational& root) const {
  if (modulus(root) != 0) throw Error(ErrorCode::PreconditionViolated, "value is not a root of the modulus");
  QVector out;
  for (auto const& c : coords) out.push_back(c(root));
  return out;
}

LocalScalar norm_bound(const AlgebraicVector& v, Place place) {
  if (place.is_infinite()) {
    Rational const b = places::cauchy_bound(v.modulus);
    Rational best(0);
    for (auto const& c : v.coords) {
      Rational acc(0), bk(1);
      for (auto const& x : c.coefficients()) {
        acc += exact::abs(x) * bk;
        bk *= b;
      }
      best = std::max(best, acc);
    }
    return LocalScalar::at_infinity(places::Interval(best));
  }
  // |alpha|_p <= p^e with e the largest Newton slope (0 for a constant).
  auto const np = places::newton_polygon(v.modulus, place.p);
  Rational e(0);
  if (!np.segments.empty()) e = std::max(e, np.segments.front().exponent);
  std::optional<Rational> best;
  for (auto const& c : v.coords) {
    for (int k = 0; k <= c.degree(); ++k) {
      Rational const x = c.coefficient(k);
      if (x == 0) continue;
      Rational const lg = Rational(-exact::valuation(x, place.p)) + e * k;
      if (!best || lg > *best) best = lg;
    }
  }
  if (!best) return LocalScalar::zero(place);
  return LocalScalar::p_power(place.p, *best);
}

Eigenbasis Eigenbasis::from_rational(const std::vector<QVector>& basis) {
  std::size_t const n = basis.size();
  QMatrix m(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    if (basis[j].size() != n) throw Error(ErrorCode::PreconditionViolated, "basis has the wrong shape");
    for (std::size_t i = 0; i < n; ++i) m(i, j) = basis[j][i];
  }
  if (exact::det(m) == 0) throw Error(ErrorCode::PreconditionViolated, "vectors do not form a basis");
  QMatrix const inv = exact::inverse(m);
  EigenPiece piece{QPoly::x(), {}, {}};
  for (std::size_t j = 0; j < n; ++j) {
    AlgebraicVector v{QPoly::x(), {}}, w{QPoly::x(), {}};
    for (std::size_t i = 0; i < n; ++i) {
      v.coords.push_back(QPoly::constant(basis[j][i]));
      w.coords.push_back(QPoly::constant(inv(j, i)));
    }
    piece.right.push_back(std::move(v));
    piece.dual.push_back(std::move(w));
  }
  return Eigenbasis{n, {std::move(piece)}};
}

std::vector<AlgebraicVector> Eigenbasis::vectors() const {
  std::vector<AlgebraicVector> out;
  for (auto const& p : pieces) out.insert(out.end(), p.right.begin(), p.right.end());
  return out;
}

Eigenbasis integral_eigenvectors(const QMatrix& a) {
  if (!exact::is_semisimple(a)) throw Error(ErrorCode::NotSemisimple, "matrix is not semisimple");
  std::size_t const n = a.rows();
  QPoly const f = exact::squarefree_part(exact::char_poly(a)).monic();
  std::vector<KernelPiece> right;
  kernel_split(shifted(a), f, right);
  Eigenbasis out{n, {}};
  for (auto const& rp : right) {
    std::vector<KernelPiece> left;
    kernel_split(shifted(a.transpose()), rp.modulus, left);
    for (auto const& lp : left) {
      QPoly const g = lp.modulus;
      std::vector<std::vector<QPoly>> vs;
      for (auto const& v : rp.basis) {
        std::vector<QPoly> r;
        for (auto const& c : v) r.push_back(reduce(c, g));
        vs.push_back(integral(std::move(r)));
      }
      std::size_t const k = vs.size();
      if (lp.basis.size() != k) throw Error(ErrorCode::NotSemisimple, "left and right eigenspaces differ");
      RMatrix gram(k, std::vector<QPoly>(k));
      for (std::size_t s = 0; s < k; ++s) {
        for (std::size_t t = 0; t < k; ++t) gram[s][t] = dot(lp.basis[s], vs[t], g);
      }
      QPoly const dg = det_mod(gram, g);
      if (dg.is_zero() || exact::gcd(dg, g).degree() > 0) {
        throw Error(ErrorCode::NotSemisimple, "eigenvectors do not pair with dual vectors");
      }
      RMatrix const adj = adjugate_mod(gram, g);
      EigenPiece piece{g, {}, {}};
      for (std::size_t s = 0; s < k; ++s) {
        std::vector<QPoly> w(n);
        for (std::size_t r = 0; r < k; ++r) {
          for (std::size_t i = 0; i < n; ++i) w[i] = reduce(w[i] + adj[s][r] * lp.basis[r][i], g);
        }
        piece.right.push_back(AlgebraicVector{g, vs[s]});
        piece.dual.push_back(AlgebraicVector{g, integral(std::move(w))});
      }
      out.pieces.push_back(std::move(piece));
    }
  }
  return out;
}

bool is_eigenvector(const QMatrix& a, const AlgebraicVector& v) {
  std::size_t const n = a.rows();
  if (v.coords.size() != n) return false;
  bool nonzero = false;
  for (std::size_t i = 0; i < n; ++i) {
    QPoly acc;
    for (std::size_t j = 0; j < n; ++j) acc += v.coords[j] * a(i, j);
    acc -= QPoly::x() * v.coords[i];
    if (!reduce(acc, v.modulus).is_zero()) return false;
    nonzero = nonzero || !reduce(v.coords[i], v.modulus).is_zero();
  }
  return nonzero;
}

// ---------------------------------------------------------------------------
// Breadth-first finders

namespace {

Found first_in_ball(const GenSet& sigma, std::size_t max_len, const std::function<bool(const QMatrix&)>& pred,
                    const std::string& what) {
  if (max_len < 1) throw Error(ErrorCode::PreconditionViolated, "search length must be >= 1");
  auto const ball = exact::enumerate_ball(sigma, max_len);
  // Elements are in breadth-first order; test one radius at a time.
  std::size_t start = 0;
  while (start < ball.elements.size()) {
    std::size_t end = start;
    while (end < ball.elements.size() && ball.elements[end].radius == ball.elements[start].radius) ++end;
    std::vector<char> hit(end - start, 0);
    parallel_for(end - start, [&](std::size_t i) { hit[i] = pred(ball.elements[start + i].matrix) ? 1 : 0; });
    for (std::size_t i = 0; i < hit.size(); ++i) {
      if (hit[i]) return Found{ball.elements[start + i].word, ball.elements[start + i].matrix};
    }
    start = end;
  }
  throw Error(ErrorCode::NoneFound, "no " + what + " element within length " + std::to_string(max_len));
}

bool has_modulus_gap(const QMatrix& a) {
  auto const m = places::eigen_moduli(a, Place::infinity());
  for (std::size_t i = 1; i < m.size(); ++i) {
    if (places::compare(m[i - 1], m[i], Relation::Gt) == Verdict::True) return true;
  }
  return false;
}

}  // namespace

Found find_non_torsion(const GenSet& sigma, std::size_t max_len) {
  return first_in_ball(sigma, max_len, [](const QMatrix& a) { return !exact::is_torsion(a); }, "non-torsion");
}

Found find_semisimple_nontorsion(const GenSet& sigma, std::size_t max_len, bool require_gap) {
  return first_in_ball(
      sigma, max_len,
      [&](const QMatrix& a) {
        if (!exact::is_semisimple(a) || exact::is_torsion(a)) return false;
        return !require_gap || has_modulus_gap(a);
      },
      "semisimple non-torsion");
}

// ---------------------------------------------------------------------------
// General position

namespace {

// Companion matrix of the monic f (multiplication by x on 1, x, ...).
QMatrix companion(const QPoly& f) {
  std::size_t const m = static_cast<std::size_t>(f.degree());
  QMatrix c(m, m);
  for (std::size_t i = 1; i < m; ++i) c(i, i - 1) = 1;
  for (std::size_t i = 0; i < m; ++i) c(i, m - 1) = -f.coefficient(static_cast<int>(i)) / f.leading();
  return c;
}

QMatrix kron(const QMatrix& a, const QMatrix& b) {
  QMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) {
      if (a(i, j) == 0) continue;
      for (std::size_t k = 0; k < b.rows(); ++k) {
        for (std::size_t l = 0; l < b.cols(); ++l) out(i * b.rows() + k, j * b.cols() + l) = a(i, j) * b(k, l);
      }
    }
  }
  return out;
}

// sum_{i,j} w_i(x) m_ij v_j(y) as a coefficient array c[a][b] of x^a y^b.
QMatrix pairing(const AlgebraicVector& w, const QMatrix& m, const AlgebraicVector& v) {
  std::size_t const dx = static_cast<std::size_t>(std::max(1, w.modulus.degree()));
  std::size_t const dy = static_cast<std::size_t>(std::max(1, v.modulus.degree()));
  QMatrix c(dx, dy);
  std::size_t const n = m.rows();
  for (std::size_t j = 0; j < n; ++j) {
    // (w^T m)_j
    std::vector<Rational> wm(dx, Rational(0));
    for (std::size_t i = 0; i < n; ++i) {
      if (m(i, j) == 0) continue;
      auto const& wc = w.coords[i].coefficients();
      for (std::size_t a = 0; a < wc.size() && a < dx; ++a) wm[a] += wc[a] * m(i, j);
    }
    auto const& vc = v.coords[j].coefficients();
    for (std::size_t a = 0; a < dx; ++a) {
      if (wm[a] == 0) continue;
      for (std::size_t b = 0; b < vc.size() && b < dy; ++b) c(a, b) += wm[a] * vc[b];
    }
  }
  return c;
}

// Determinant of multiplication by c on Q[x]/(f) (x) Q[y]/(g); nonzero iff
// c(alpha, beta) != 0 for every pair of roots.
Rational norm_of_pairing(const QMatrix& c, const QPoly& f, const QPoly& g) {
  QMatrix const cx = companion(f.degree() > 0 ? f : QPoly::x());
  QMatrix const cy = companion(g.degree() > 0 ? g : QPoly::x());
  std::size_t const dx = cx.rows(), dy = cy.rows();
  QMatrix total(dx * dy, dx * dy);
  QMatrix xa = QMatrix::identity(dx);
  for (std::size_t a = 0; a < dx; ++a) {
    QMatrix yb = QMatrix::identity(dy);
    for (std::size_t b = 0; b < dy; ++b) {
      if (c(a, b) != 0) total += kron(xa, yb) * c(a, b);
      yb = yb * cy;
    }
    xa = xa * cx;
  }
  return exact::det(total);
}

std::vector<QPoly> apply(const QMatrix& m, const std::vector<QPoly>& v, const QPoly& f) {
  std::vector<QPoly> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    QPoly acc;
    for (std::size_t j = 0; j < v.size(); ++j) {
      if (m(i, j) != 0) acc += v[j] * m(i, j);
    }
    out[i] = reduce(acc, f);
  }
  return out;
}

void combinations(int n, int k, int start, std::vector<int>& cur, std::vector<std::vector<int>>& out) {
  if (static_cast<int>(cur.size()) == k) {
    out.push_back(cur);
    return;
  }
  for (int i = start; i <= n; ++i) {
    cur.push_back(i);
    combinations(n, k, i + 1, cur, out);
    cur.pop_back();
  }
}

}  // namespace

std::optional<std::vector<DeterminantRecord>> general_position_records(const QMatrix& b, const Eigenbasis& basis,
                                                                       int n_general, std::string* failure) {
  std::size_t const n = basis.dim;
  if (b.rows() != n) throw Error(ErrorCode::PreconditionViolated, "element and basis dimensions differ");
  QMatrix const bi = exact::inverse(b);
  std::vector<DeterminantRecord> recs;
  auto fail = [&](const std::string& why) -> std::optional<std::vector<DeterminantRecord>> {
    if (failure) *failure = why;
    return std::nullopt;
  };
  // (a) every dual functional is nonzero on every B^{+-1} v.
  for (std::size_t pp = 0; pp < basis.pieces.size(); ++pp) {
    for (std::size_t s = 0; s < basis.pieces[pp].dual.size(); ++s) {
      for (std::size_t qq = 0; qq < basis.pieces.size(); ++qq) {
        for (std::size_t t = 0; t < basis.pieces[qq].right.size(); ++t) {
          for (int sign : {1, -1}) {
            auto const& w = basis.pieces[pp].dual[s];
            auto const& v = basis.pieces[qq].right[t];
            Rational const nv = norm_of_pairing(pairing(w, sign > 0 ? b : bi, v), w.modulus, v.modulus);
            std::string const label = "dual(" + std::to_string(pp) + "." + std::to_string(s) + ") on B" +
                                      (sign > 0 ? "" : "^-1") + " v(" + std::to_string(qq) + "." +
                                      std::to_string(t) + ")";
            if (nv == 0) return fail(label + " vanishes at some pair of eigenvalues");
            recs.push_back({label, "norm " + exact::to_string(nv)});
          }
        }
      }
    }
  }
  // (b) orbit determinants.
  std::vector<std::vector<int>> tuples;
  std::vector<int> cur;
  combinations(n_general, static_cast<int>(n), 1, cur, tuples);
  for (std::size_t pp = 0; pp < basis.pieces.size(); ++pp) {
    auto const& piece = basis.pieces[pp];
    QPoly const& f = piece.modulus;
    for (std::size_t t = 0; t < piece.right.size(); ++t) {
      // Orbit B^i v for i = 1..N.
      std::vector<std::vector<QPoly>> orbit{piece.right[t].coords};
      for (int i = 1; i <= n_general; ++i) orbit.push_back(apply(b, orbit.back(), f));
      for (auto const& tup : tuples) {
        RMatrix m(n, std::vector<QPoly>(n));
        for (std::size_t c = 0; c < n; ++c) {
          for (std::size_t r = 0; r < n; ++r) m[r][c] = orbit[static_cast<std::size_t>(tup[c])][r];
        }
        QPoly const d = det_mod(m, f);
        std::string label = "det(B^{";
        for (std::size_t c = 0; c < tup.size(); ++c) label += (c ? "," : "") + std::to_string(tup[c]);
        label += "} v(" + std::to_string(pp) + "." + std::to_string(t) + "))";
        if (d.is_zero() || exact::gcd(d, f).degree() > 0) return fail(label + " vanishes at some eigenvalue");
        recs.push_back({label, d.to_string() + " mod " + f.to_string()});
      }
    }
  }
  return recs;
}

GeneralPositionWitness find_general_position(const GenSet& sigma, const Eigenbasis& basis, int n_general,
                                             std::size_t max_len, std::size_t wedge) {
  std::size_t const d = sigma.dim();
  auto rep = [&](const QMatrix& m) { return d == basis.dim && wedge == 1 ? m : exact::wedge_power(m, wedge); };
  if (rep(QMatrix::identity(d)).rows() != basis.dim) {
    throw Error(ErrorCode::PreconditionViolated, "basis does not match the representation");
  }
  // The basis itself must be nondegenerate: duals pair with their vectors.
  for (auto const& p : basis.pieces) {
    for (std::size_t s = 0; s < p.right.size(); ++s) {
      QMatrix const id = QMatrix::identity(basis.dim);
      if (norm_of_pairing(pairing(p.dual[s], id, p.right[s]), p.modulus, p.modulus) == 0 &&
          p.modulus.degree() <= 1) {
        throw Error(ErrorCode::PreconditionViolated, "vectors do not form a basis");
      }
    }
  }
  auto const found = first_in_ball(
      sigma, max_len, [&](const QMatrix& m) { return general_position_records(rep(m), basis, n_general).has_value(); },
      "general-position");
  GeneralPositionWitness w{found.word, found.matrix, wedge, n_general, {}};
  w.determinants = *general_position_records(rep(found.matrix), basis, n_general);
  return w;
}

bool verify_general_position(const GeneralPositionWitness& w, const Eigenbasis& basis) {
  QMatrix const b = w.wedge == 1 && w.element.rows() == basis.dim ? w.element : exact::wedge_power(w.element, w.wedge);
  auto const recs = general_position_records(b, basis, w.n_general);
  if (!recs || recs->size() != w.determinants.size()) return false;
  for (std::size_t i = 0; i < recs->size(); ++i) {
    if ((*recs)[i].label != w.determinants[i].label || (*recs)[i].evidence != w.determinants[i].evidence) return false;
  }
  return true;
}

}  // namespace pingpong::search
