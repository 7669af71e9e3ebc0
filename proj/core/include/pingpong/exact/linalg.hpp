#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "pingpong/exact/matrix.hpp"
#include "pingpong/exact/polynomial.hpp"

namespace pingpong::exact {

Rational det(const QMatrix& a);
Rational trace(const QMatrix& a);
// Throws Error(PreconditionViolated) when singular.
QMatrix inverse(const QMatrix& a);
std::size_t rank(const QMatrix& a);
// Reduced row echelon form; returns pivot columns.
std::vector<std::size_t> row_reduce(QMatrix& a);
// Basis of {v : a v = 0}.
std::vector<QVector> nullspace(const QMatrix& a);
// a^e for integer e (negative e uses the inverse).
QMatrix power(const QMatrix& a, long e);
QMatrix submatrix(const QMatrix& a, const std::vector<std::size_t>& rows,
                  const std::vector<std::size_t>& cols);

// det(xI - a), monic of degree d.
QPoly char_poly(const QMatrix& a);
// Coefficient matrices C_0..C_{d-1} with adj(xI - a) = sum_k C_k x^k.
std::vector<QMatrix> adjugate_polynomial(const QMatrix& a);
QPoly min_poly(const QMatrix& a);

bool is_semisimple(const QMatrix& a);

// Finite order test through the cyclotomic factorisation of the minimal
// polynomial.  When torsion, `order` receives the multiplicative order.
bool is_torsion(const QMatrix& a, long* order = nullptr);
// lcm of every element order that can occur in GL_d(Q).
long admissible_torsion_exponent(std::size_t d);

// Matrix of the i-th exterior power in the lexicographically ordered basis
// e_{j1} ^ ... ^ e_{ji}, j1 < ... < ji.  Throws Error(BadIndex) unless
// 1 <= i <= d - 1.
QMatrix wedge_power(const QMatrix& a, std::size_t i);
std::vector<std::vector<std::size_t>> index_subsets(std::size_t n, std::size_t k);
std::size_t binomial(std::size_t n, std::size_t k);

// Common eigenvectors with rational eigenvalues shared by all matrices, as a
// basis of their intersection.  Used only for diagnostics.
std::vector<QVector> common_rational_eigenvectors(const std::vector<QMatrix>& ms);

}  // namespace pingpong::exact
