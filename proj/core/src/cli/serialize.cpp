#include "pingpong/cli/serialize.hpp"

#include <sstream>

#include "pingpong/error.hpp"
#include "pingpong/exact/linalg.hpp"
#include "pingpong/places/interval.hpp"

namespace pingpong::cli {

using exact::QMatrix;
using exact::QVector;
using exact::Rational;
using places::Interval;
using places::LocalScalar;
using places::Place;

namespace {

[[noreturn]] void parse_error(const std::string& what) { throw Error(ErrorCode::ParseError, what); }

const json& field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) parse_error(std::string("missing field '") + key + "'");
  return j.at(key);
}

std::string str(const json& j, const char* key) {
  const json& v = field(j, key);
  if (!v.is_string()) parse_error(std::string("field '") + key + "' must be a string");
  return v.get<std::string>();
}

Place place_from_json(const json& j) {
  if (!j.is_string()) parse_error("place must be a string");
  try {
    return Place::parse(j.get<std::string>());
  } catch (const Error& e) {
    parse_error(e.what());
  }
}

Rational scalar_center(const LocalScalar& s) { return places::round_down(s.value.mid(), 64); }

}  // namespace

// ---------------------------------------------------------------------------
// Input

Rational rational_from_json(const json& j) {
  if (j.is_number_integer()) return Rational(j.get<long>());
  if (!j.is_string()) parse_error("rationals must be strings like \"p/q\"");
  try {
    return exact::parse_rational(j.get<std::string>());
  } catch (const Error& e) {
    parse_error(e.what());
  }
}

json matrix_to_json(const QMatrix& m) {
  json rows = json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (std::size_t k = 0; k < m.cols(); ++k) row.push_back(exact::to_string(m(i, k)));
    rows.push_back(std::move(row));
  }
  return rows;
}

QMatrix matrix_from_json(const json& j) {
  if (!j.is_array() || j.empty()) parse_error("a matrix must be a non-empty array of rows");
  std::size_t const rows = j.size();
  if (!j[0].is_array() || j[0].empty()) parse_error("matrix rows must be non-empty arrays");
  std::size_t const cols = j[0].size();
  QMatrix m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    if (!j[i].is_array() || j[i].size() != cols) parse_error("ragged matrix");
    for (std::size_t k = 0; k < cols; ++k) m(i, k) = rational_from_json(j[i][k]);
  }
  return m;
}

json vector_to_json(const QVector& v) {
  json out = json::array();
  for (auto const& x : v) out.push_back(exact::to_string(x));
  return out;
}

QVector vector_from_json(const json& j) {
  if (!j.is_array()) parse_error("a vector must be an array");
  QVector v;
  for (auto const& x : j) v.push_back(rational_from_json(x));
  return v;
}

InputSpec parse_input(const json& doc) {
  if (!doc.is_object()) parse_error("input must be a JSON object");
  InputSpec in;
  const json& dim = field(doc, "dim");
  if (!dim.is_number_integer() || dim.get<long>() < 1) parse_error("'dim' must be a positive integer");
  in.dim = dim.get<std::size_t>();
  if (doc.contains("primes")) {
    if (!doc["primes"].is_array()) parse_error("'primes' must be an array");
    for (auto const& p : doc["primes"]) {
      if (!p.is_number_integer() || p.get<long>() < 2) parse_error("primes must be integers >= 2");
      in.primes.push_back(p.get<unsigned long>());
    }
  }
  const json& gens = field(doc, "generators");
  if (!gens.is_array() || gens.empty()) parse_error("'generators' must be a non-empty array");
  for (auto const& g : gens) {
    QMatrix m = matrix_from_json(g);
    if (m.rows() != in.dim || m.cols() != in.dim) parse_error("generator shape does not match 'dim'");
    in.generators.push_back(std::move(m));
  }
  if (doc.contains("symmetric_closure")) {
    if (!doc["symmetric_closure"].is_boolean()) parse_error("'symmetric_closure' must be a boolean");
    in.symmetric_closure = doc["symmetric_closure"].get<bool>();
  }
  return in;
}

json to_json(const InputSpec& in) {
  json gens = json::array();
  for (auto const& g : in.generators) gens.push_back(matrix_to_json(g));
  return json{{"dim", in.dim}, {"primes", in.primes}, {"generators", gens}, {"symmetric_closure", in.symmetric_closure}};
}

exact::GenSet make_genset(const InputSpec& in) {
  exact::PrimeSupport support;
  try {
    support = exact::PrimeSupport(in.primes);
  } catch (const Error& e) {
    parse_error(e.what());
  }
  return exact::GenSet(in.generators, support, in.symmetric_closure);
}

// ---------------------------------------------------------------------------
// Words

json word_to_json(const exact::Word& w) { return w.to_string(); }

exact::Word word_from_json(const json& j) {
  if (!j.is_string()) parse_error("a word must be a string");
  std::string const text = j.get<std::string>();
  if (text == "e") return {};
  std::istringstream is(text);
  std::string tok;
  std::vector<exact::Letter> letters;
  while (is >> tok) {
    int sign = 1;
    if (tok.size() > 3 && tok.compare(tok.size() - 3, 3, "^-1") == 0) {
      sign = -1;
      tok.resize(tok.size() - 3);
    }
    if (tok.size() < 2 || tok[0] != 'g') parse_error("bad letter '" + tok + "'");
    std::size_t gen = 0;
    for (std::size_t i = 1; i < tok.size(); ++i) {
      if (tok[i] < '0' || tok[i] > '9') parse_error("bad letter '" + tok + "'");
      gen = gen * 10 + static_cast<std::size_t>(tok[i] - '0');
    }
    letters.push_back({gen, sign});
  }
  return exact::Word(std::move(letters));
}

// ---------------------------------------------------------------------------
// Scalars

json scalar_to_json(const LocalScalar& s) {
  json j{{"place", s.place.to_string()}};
  if (!s.place.is_infinite() && s.log_p) {
    j["log_p"] = exact::to_string(*s.log_p);
    return j;
  }
  Rational const mid = s.value.mid();
  Rational const c = scalar_center(s);
  Rational const off = exact::abs(c - mid);
  Rational const rho = places::round_up(std::max<Rational>(s.value.radius() + off, 2 * off), 32);
  j["center"] = exact::to_string(c);
  j["radius"] = exact::to_string(rho);
  return j;
}

namespace {

LocalScalar scalar_from_json(const json& j) {
  Place const place = place_from_json(field(j, "place"));
  if (j.contains("log_p")) {
    if (place.is_infinite()) parse_error("log_p at infinity");
    return LocalScalar::p_power(place.p, rational_from_json(j["log_p"]));
  }
  Rational const c = rational_from_json(field(j, "center"));
  Rational const rho = rational_from_json(field(j, "radius"));
  if (rho < 0) parse_error("negative radius");
  return LocalScalar{place, Interval(c - rho, c + rho), {}};
}

}  // namespace

bool scalar_matches(const json& stored, const LocalScalar& recomputed) {
  if (!stored.is_object()) return false;
  try {
    if (place_from_json(field(stored, "place")) != recomputed.place) return false;
    if (stored.contains("log_p")) {
      return recomputed.log_p && rational_from_json(stored["log_p"]) == *recomputed.log_p;
    }
    if (!recomputed.place.is_infinite() && recomputed.log_p) return false;
    Rational const c = rational_from_json(field(stored, "center"));
    Rational const rho = rational_from_json(field(stored, "radius"));
    if (rho < 0) return false;
    Interval const& v = recomputed.value;
    if (v.lo() < c - rho || v.hi() > c + rho) return false;
    return 2 * exact::abs(c - v.mid()) <= rho;
  } catch (const Error&) {
    return false;
  }
}

// ---------------------------------------------------------------------------
// Certificates

json comparison_to_json(const dynamics::Comparison& c) {
  return json{{"label", c.label},
              {"lhs", scalar_to_json(c.lhs)},
              {"relation", std::string(places::to_string(c.relation))},
              {"rhs", scalar_to_json(c.rhs)},
              {"verdict", std::string(places::to_string(c.verdict))}};
}

namespace {

places::Verdict verdict_from_json(const json& j) {
  std::string const s = j.get<std::string>();
  if (s == "true") return places::Verdict::True;
  if (s == "false") return places::Verdict::False;
  if (s == "undecided") return places::Verdict::Undecided;
  parse_error("bad verdict '" + s + "'");
}

dynamics::Comparison comparison_from_json(const json& j) {
  dynamics::Comparison c;
  c.label = str(j, "label");
  c.lhs = scalar_from_json(field(j, "lhs"));
  try {
    c.relation = places::parse_relation(str(j, "relation"));
  } catch (const Error& e) {
    parse_error(e.what());
  }
  c.rhs = scalar_from_json(field(j, "rhs"));
  c.verdict = verdict_from_json(field(j, "verdict"));
  return c;
}

dynamics::Transcript transcript_from_json(const json& j) {
  if (!j.is_array()) parse_error("a transcript must be an array");
  dynamics::Transcript t;
  for (auto const& c : j) t.push_back(comparison_from_json(c));
  return t;
}

}  // namespace

json transcript_to_json(const dynamics::Transcript& t) {
  json out = json::array();
  for (auto const& c : t) out.push_back(comparison_to_json(c));
  return out;
}

json contraction_to_json(const dynamics::ContractionCert& c) {
  return json{{"place", c.place.to_string()},
              {"epsilon", exact::to_string(c.epsilon)},
              {"attracting", vector_to_json(c.attracting)},
              {"repelling", vector_to_json(c.repelling)},
              {"method", std::string(dynamics::to_string(c.method))},
              {"transcript", transcript_to_json(c.transcript)},
              {"grid_cells", c.grid_cells}};
}

dynamics::ContractionCert contraction_from_json(const json& j) {
  dynamics::ContractionCert c;
  c.place = place_from_json(field(j, "place"));
  c.epsilon = rational_from_json(field(j, "epsilon"));
  c.attracting = vector_from_json(field(j, "attracting"));
  c.repelling = vector_from_json(field(j, "repelling"));
  try {
    c.method = dynamics::parse_method(str(j, "method"));
  } catch (const Error& e) {
    parse_error(e.what());
  }
  c.transcript = transcript_from_json(field(j, "transcript"));
  const json& cells = field(j, "grid_cells");
  if (!cells.is_number_unsigned() && !cells.is_number_integer()) parse_error("grid_cells must be an integer");
  c.grid_cells = cells.get<std::size_t>();
  return c;
}

json proximal_to_json(const dynamics::ProximalCert& c) {
  return json{{"contraction", contraction_to_json(c.contraction)},
              {"r", exact::to_string(c.r)},
              {"separation", comparison_to_json(c.separation)}};
}

dynamics::ProximalCert proximal_from_json(const json& j) {
  return dynamics::ProximalCert{contraction_from_json(field(j, "contraction")), rational_from_json(field(j, "r")),
                                comparison_from_json(field(j, "separation"))};
}

json very_proximal_to_json(const dynamics::VeryProximalCert& c) {
  return json{{"forward", proximal_to_json(c.forward)}, {"backward", proximal_to_json(c.backward)}};
}

dynamics::VeryProximalCert very_proximal_from_json(const json& j) {
  return dynamics::VeryProximalCert{proximal_from_json(field(j, "forward")), proximal_from_json(field(j, "backward"))};
}

json ping_pong_to_json(const dynamics::PingPongCert& c) {
  return json{{"place", c.place.to_string()},
              {"word_x", word_to_json(c.word_x)},
              {"word_y", word_to_json(c.word_y)},
              {"x", matrix_to_json(c.x)},
              {"y", matrix_to_json(c.y)},
              {"cert_x", very_proximal_to_json(c.cert_x)},
              {"cert_y", very_proximal_to_json(c.cert_y)},
              {"r", exact::to_string(c.r)},
              {"epsilon", exact::to_string(c.epsilon)},
              {"separations", transcript_to_json(c.separations)}};
}

dynamics::PingPongCert ping_pong_from_json(const json& j) {
  dynamics::PingPongCert c;
  c.place = place_from_json(field(j, "place"));
  c.word_x = word_from_json(field(j, "word_x"));
  c.word_y = word_from_json(field(j, "word_y"));
  c.x = matrix_from_json(field(j, "x"));
  c.y = matrix_from_json(field(j, "y"));
  c.cert_x = very_proximal_from_json(field(j, "cert_x"));
  c.cert_y = very_proximal_from_json(field(j, "cert_y"));
  c.r = rational_from_json(field(j, "r"));
  c.epsilon = rational_from_json(field(j, "epsilon"));
  c.separations = transcript_from_json(field(j, "separations"));
  return c;
}

// ---------------------------------------------------------------------------
// Trace and file

json trace_to_json(const construct::PipelineTrace& t) {
  json j{{"notes", t.notes}};
  if (t.frame) {
    auto const& p = t.frame->pivot;
    j["pivot"] = json{{"word", word_to_json(p.word)},
                      {"a0", matrix_to_json(p.a0)},
                      {"place", p.place.to_string()},
                      {"wedge", p.wedge},
                      {"rep_dim", p.rep_dim},
                      {"lambda", scalar_to_json(p.lambda)},
                      {"gap", scalar_to_json(p.gap)},
                      {"sigma_norm", scalar_to_json(p.sigma_norm)},
                      {"inequality", std::string(places::to_string(p.inequality))},
                      {"scanned", p.scanned}};
    json fr{{"top_vector", vector_to_json(t.frame->top_vector)},
            {"top_form", vector_to_json(t.frame->top_form)},
            {"top_exact", t.frame->top_exact},
            {"separation", scalar_to_json(t.frame->separation)},
            {"residual", scalar_to_json(t.frame->residual)}};
    if (t.frame->diagonalizer) {
      fr["diagonalizer"] = matrix_to_json(*t.frame->diagonalizer);
      fr["d_norm_sq"] = scalar_to_json(*t.frame->d_norm_sq);
      fr["d_inv_norm_sq"] = scalar_to_json(*t.frame->d_inv_norm_sq);
      json seps = json::array();
      for (auto const& s : t.frame->separations) seps.push_back(scalar_to_json(s));
      fr["separations"] = seps;
    }
    json moduli = json::array();
    for (auto const& piece : t.frame->basis.pieces) moduli.push_back(piece.modulus.to_string());
    fr["eigen_moduli_polynomials"] = moduli;
    j["frame"] = fr;
  }
  if (t.proximal) {
    j["proximal"] = json{{"e1", t.proximal->e1},
                         {"word", word_to_json(t.proximal->word)},
                         {"cert", proximal_to_json(t.proximal->cert)}};
  }
  if (t.very_contracting) {
    auto const& v = *t.very_contracting;
    j["very_contracting"] = json{{"b1", word_to_json(v.b1.word)},
                                 {"b1_general", v.b1.n_general},
                                 {"b1_determinants", v.b1.determinants.size()},
                                 {"e2", v.e2},
                                 {"word", word_to_json(v.word)},
                                 {"forward", contraction_to_json(v.forward)},
                                 {"backward", contraction_to_json(v.backward)},
                                 {"proximity", transcript_to_json(v.proximity)}};
  }
  if (t.very_proximal) {
    j["very_proximal"] = json{{"k", t.very_proximal->k},
                              {"word", word_to_json(t.very_proximal->word)},
                              {"cert", very_proximal_to_json(t.very_proximal->cert)}};
  }
  if (t.partner) {
    j["partner"] = json{{"b2", word_to_json(t.partner->b2.word)},
                        {"b2_general", t.partner->b2.n_general},
                        {"k_prime", t.partner->k_prime},
                        {"t", t.partner->t}};
  }
  return j;
}

json certificate_file(const InputSpec& in, const construct::FreePairResult& r) {
  return json{{"schema", kCertificateSchema},
              {"kind", "free-pair"},
              {"input", to_json(in)},
              {"method", r.method},
              {"wedge", r.wedge},
              {"word_x", word_to_json(r.word_x)},
              {"word_y", word_to_json(r.word_y)},
              {"length_x", r.word_x.length()},
              {"length_y", r.word_y.length()},
              {"oracle", json{{"depth", r.oracle_depth}, {"words_checked", r.oracle_words}}},
              {"certificate", ping_pong_to_json(r.cert)},
              {"trace", trace_to_json(r.trace)}};
}

}  // namespace pingpong::cli
