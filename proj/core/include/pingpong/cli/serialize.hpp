#pragma once

#include <nlohmann/json.hpp>
#include <string>
#include <vector>

#include "pingpong/construct/construct.hpp"
#include "pingpong/dynamics/certs.hpp"
#include "pingpong/exact/word.hpp"

namespace pingpong::cli {

using nlohmann::json;

inline constexpr const char* kInputSchema = "pingpong.input/1";
inline constexpr const char* kCertificateSchema = "pingpong.certificate/1";
inline constexpr const char* kReportSchema = "pingpong.report/1";

// {"dim", "primes", "generators": [[["p/q", ...], ...], ...], "symmetric_closure"}
struct InputSpec {
  std::size_t dim = 0;
  std::vector<unsigned long> primes;
  std::vector<exact::QMatrix> generators;
  bool symmetric_closure = true;
};

// Throws ParseError on a malformed document.
InputSpec parse_input(const json& doc);
json to_json(const InputSpec& in);
// Identity added; throws BadMatrix.
exact::GenSet make_genset(const InputSpec& in);

json matrix_to_json(const exact::QMatrix& m);
exact::QMatrix matrix_from_json(const json& j);
json vector_to_json(const exact::QVector& v);
exact::QVector vector_from_json(const json& j);
exact::Rational rational_from_json(const json& j);

// "g1 g3^-1", "e" for the empty word.
json word_to_json(const exact::Word& w);
exact::Word word_from_json(const json& j);

// At infinity a dyadic center c and radius rho with the true value inside
// [c - rho, c + rho] and |c - mid| <= rho / 2; at a prime the exact exponent
// when known.
json scalar_to_json(const places::LocalScalar& s);
// True when `recomputed` is consistent with the stored scalar: exact
// exponents agree, or the recomputed enclosure lies in the stored ball and
// its midpoint within half the radius of the stored center.
bool scalar_matches(const json& stored, const places::LocalScalar& recomputed);

json comparison_to_json(const dynamics::Comparison& c);
json transcript_to_json(const dynamics::Transcript& t);
json contraction_to_json(const dynamics::ContractionCert& c);
dynamics::ContractionCert contraction_from_json(const json& j);
json proximal_to_json(const dynamics::ProximalCert& c);
dynamics::ProximalCert proximal_from_json(const json& j);
json very_proximal_to_json(const dynamics::VeryProximalCert& c);
dynamics::VeryProximalCert very_proximal_from_json(const json& j);
json ping_pong_to_json(const dynamics::PingPongCert& c);
dynamics::PingPongCert ping_pong_from_json(const json& j);

json trace_to_json(const construct::PipelineTrace& t);

// The certificate file for a free pair, including the input and the oracle
// depth that the replay re-runs.
json certificate_file(const InputSpec& in, const construct::FreePairResult& r);

}  // namespace pingpong::cli
