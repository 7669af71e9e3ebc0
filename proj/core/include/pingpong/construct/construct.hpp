#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pingpong/dynamics/certs.hpp"
#include "pingpong/error.hpp"
#include "pingpong/exact/word.hpp"
#include "pingpong/search/search.hpp"

namespace pingpong::construct {

using dynamics::ContractionCert;
using dynamics::PingPongCert;
using dynamics::ProximalCert;
using dynamics::Transcript;
using dynamics::VeryProximalCert;
using exact::GenSet;
using exact::QMatrix;
using exact::QVector;
using exact::Rational;
using exact::SMatrix;
using exact::Word;
using places::LocalScalar;
using places::Place;
using places::Verdict;

struct Config {
  std::size_t search_len = 4;        // pivot and general-position word length
  std::size_t max_word_len = 50;     // longest acceptable output word
  long exponent_cap = 1L << 16;      // doubling loops stop here
  std::size_t grid_cap = 1u << 16;   // cells per grid verification, 0 = off
  int oracle_depth = 10;
  std::size_t fallback_len = 4;      // word length of the direct pair scan
  long padic_digits = 64;            // truncation of p-adic approximations
  unsigned long approx_bits = 64;    // rounding of real approximations
  std::vector<Place> places;         // empty: infinity then the support
};

struct PivotSelection {
  Word word;
  SMatrix a0;
  Place place;
  std::size_t wedge = 1;     // exterior power index i
  std::size_t rep_dim = 0;   // n = binom(d, i)
  LocalScalar lambda;        // top eigenvalue modulus in the wedge
  LocalScalar gap;           // |alpha_1 / alpha_2| in the wedge
  LocalScalar sigma_norm;    // max over generators of ||s||_v (wedge)
  Verdict inequality = Verdict::Undecided;  // gap^{d^2} >= ||Sigma||
  std::size_t scanned = 0;   // semisimple non-torsion candidates looked at
};

// Scans words of length <= search_len for the semisimple non-torsion element
// with the largest top eigenvalue modulus over the places, then the wedge
// index at its largest certified modulus gap.  Throws NoGap.
PivotSelection select_pivot(const GenSet& sigma, std::size_t search_len, const std::vector<Place>& places);

struct SpectralFrame {
  PivotSelection pivot;
  QMatrix rep;                    // the pivot in the wedge representation
  search::Eigenbasis basis;       // exact eigenvectors of rep
  QVector top_vector;             // rational approximation of u_1
  QVector top_form;               // form whose kernel approximates u_1^perp
  bool top_exact = false;         // both are the exact eigen data
  LocalScalar separation;         // d(u_1, u_1^perp)
  LocalScalar residual;           // d(rep u_1, u_1)
  std::optional<QMatrix> diagonalizer;  // D, when every eigenvalue is local
  std::optional<LocalScalar> d_norm_sq;
  std::optional<LocalScalar> d_inv_norm_sq;
  std::vector<LocalScalar> separations;  // d(u_i, u_i^perp) with D
};

// Throws NotSemisimple, PrecisionExhausted.
SpectralFrame build_spectral_frame(const PivotSelection& sel, const Config& cfg);

struct ProximalStage {
  long e1 = 1;
  QMatrix a1;
  Word word;
  ProximalCert cert;
};

// Doubles e1 until A_0^{e1} is certified proximal with the frame's data and
// r > 2 eps.  Throws ExponentCapExceeded, BudgetExceeded (word too long).
ProximalStage build_proximal(const SpectralFrame& frame, const Config& cfg);

struct VeryContractingStage {
  search::GeneralPositionWitness b1;
  long e2 = 1;
  QMatrix a2;
  Word word;
  ContractionCert forward;
  ContractionCert backward;
  Transcript proximity;  // both attracting points near u_1
};

// Target eps defaults to the proximal stage's.  Throws GeneralPositionFails,
// ExponentCapExceeded, BudgetExceeded.
VeryContractingStage build_very_contracting(const ProximalStage& a1, const SpectralFrame& frame,
                                            const GenSet& sigma, const Config& cfg,
                                            std::optional<Rational> eps2 = std::nullopt);

struct VeryProximalStage {
  std::size_t k = 1;
  QMatrix x;
  Word word;
  VeryProximalCert cert;
};

// X = B_1^k A_2 for the first k <= 2n - 1 that certifies.  Throws
// PigeonholeFails.
VeryProximalStage build_very_proximal(const VeryContractingStage& a2, const SpectralFrame& frame,
                                      const Config& cfg);

struct PartnerStage {
  search::GeneralPositionWitness b2;
  std::size_t k_prime = 1;
  long t = 1;
  QMatrix y;
  Word word_x;
  Word word_y;
  PingPongCert cert;
};

// Y = B_2^{k'} X^t B_2^{-k'}.  Throws NotSemisimple, GeneralPositionFails,
// PigeonholeFails, ExponentCapExceeded, BudgetExceeded.
PartnerStage build_partner(const VeryProximalStage& x, const SpectralFrame& frame, const GenSet& sigma,
                           const Config& cfg);

struct PipelineTrace {
  std::optional<SpectralFrame> frame;
  std::optional<ProximalStage> proximal;
  std::optional<VeryContractingStage> very_contracting;
  std::optional<VeryProximalStage> very_proximal;
  std::optional<PartnerStage> partner;
  std::vector<std::string> notes;  // stage failures, in order
};

struct FreePairResult {
  Word word_x;  // original generators
  Word word_y;
  std::size_t wedge = 1;     // the certificate lives in this exterior power
  std::string method;        // "pipeline" or "direct-scan"
  PingPongCert cert;
  PipelineTrace trace;
  int oracle_depth = 0;
  std::size_t oracle_words = 0;
};

// NotFound with the reasons the budgets ran out.
class NotFoundError : public Error {
 public:
  explicit NotFoundError(std::vector<std::string> diagnoses);
  const std::vector<std::string>& diagnoses() const { return diagnoses_; }

 private:
  std::vector<std::string> diagnoses_;
};

// Structural reasons a generating set cannot contain a free pair within
// reach: no modulus gap, a common rational eigenvector, commuting
// generators, a finite ball.
std::vector<std::string> diagnose(const GenSet& sigma, const Config& cfg);

// Pipeline first, then the direct scan.  Words are in the original alphabet
// and the pair has passed the word oracle at cfg.oracle_depth.  Throws
// NotFoundError.
FreePairResult certify_free(const GenSet& sigma, const Config& cfg = {});

// Direct scan over pairs of short hyperbolic words and their powers.
std::optional<FreePairResult> direct_pair_scan(const GenSet& sigma, const Config& cfg,
                                               std::vector<std::string>* notes = nullptr);

std::vector<Place> effective_places(const GenSet& sigma, const Config& cfg);

}  // namespace pingpong::construct
