#include "pingpong/cli/commands.hpp"

#include <cmath>
#include <optional>

#include "pingpong/comparison/comparison.hpp"
#include "pingpong/error.hpp"
#include "pingpong/exact/ball.hpp"
#include "pingpong/exact/linalg.hpp"
#include "pingpong/places/interval.hpp"
#include "pingpong/places/norms.hpp"

namespace pingpong::cli {

using exact::QMatrix;
using exact::Rational;
using places::LocalScalar;
using places::Place;
using places::Relation;
using places::Verdict;

namespace {

QMatrix rep_of(const QMatrix& m, std::size_t wedge) { return wedge == 1 ? m : exact::wedge_power(m, wedge); }

LocalScalar magnitude(Place place, const Rational& q) {
  if (!place.is_infinite() && q > 0) {
    long const k = exact::valuation(q, place.p);
    if (exact::power(Rational(static_cast<long>(place.p)), k) == q) return LocalScalar::p_power(place.p, Rational(k));
  }
  return LocalScalar{place, places::Interval(q), {}};
}

json header(const char* kind) { return json{{"schema", kReportSchema}, {"kind", kind}}; }

std::vector<Place> places_for(const exact::GenSet& sigma, const RunConfig& cfg) {
  if (!cfg.places.empty()) return cfg.places;
  return places::places_of(sigma.support());
}

// Scoped precision override (0 keeps the library default).
struct Precision {
  std::optional<places::PrecisionScope> scope;
  explicit Precision(unsigned long bits) {
    if (bits > 0) scope.emplace(bits);
  }
};

[[noreturn]] void mismatch(const std::string& what) { throw Error(ErrorCode::ReplayMismatch, what); }

const json& at(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw Error(ErrorCode::ParseError, std::string("missing field '") + key + "'");
  return j.at(key);
}

// Recomputed comparison against its stored form.
void check_comparison(const dynamics::Comparison& fresh, const json& stored, const std::string& where,
                      std::size_t& count) {
  ++count;
  if (!stored.is_object() || at(stored, "label") != fresh.label) {
    mismatch(where + ": comparison '" + fresh.label + "' not found in the file");
  }
  if (at(stored, "relation") != std::string(places::to_string(fresh.relation))) {
    mismatch(where + ": relation of '" + fresh.label + "' differs");
  }
  if (!scalar_matches(at(stored, "lhs"), fresh.lhs)) {
    mismatch(where + ": '" + fresh.label + "' left side " + fresh.lhs.to_string() + " does not match the stored value");
  }
  if (!scalar_matches(at(stored, "rhs"), fresh.rhs)) {
    mismatch(where + ": '" + fresh.label + "' right side " + fresh.rhs.to_string() +
             " does not match the stored value");
  }
  if (fresh.verdict != Verdict::True) mismatch(where + ": '" + fresh.label + "' is not certified on replay");
  if (at(stored, "verdict") != "true") mismatch(where + ": stored verdict of '" + fresh.label + "' is not true");
}

void check_transcript(const dynamics::Transcript& fresh, const json& stored, const std::string& where,
                      std::size_t& count) {
  if (!stored.is_array() || stored.size() != fresh.size()) mismatch(where + ": transcript length differs");
  for (std::size_t i = 0; i < fresh.size(); ++i) check_comparison(fresh[i], stored[i], where, count);
}

void replay_contraction(const QMatrix& g, const json& stored, const std::string& where, std::size_t& count) {
  auto const c = contraction_from_json(stored);
  if (c.method == dynamics::Method::CartanCriterion) {
    auto const t = dynamics::cartan_contraction_transcript(g, c.place, c.epsilon, c.attracting, c.repelling);
    check_transcript(t, at(stored, "transcript"), where, count);
    return;
  }
  try {
    auto const fresh = dynamics::verify_contracting(g, c.place, c.epsilon, c.attracting, c.repelling,
                                                    std::max<std::size_t>(c.grid_cells, 1) + 1);
    ++count;
    if (fresh.grid_cells != c.grid_cells) mismatch(where + ": grid cell count differs");
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ReplayMismatch) throw;
    mismatch(where + ": grid verification fails on replay (" + e.what() + ")");
  }
}

void replay_proximal(const QMatrix& g, const json& stored, const std::string& where, std::size_t& count) {
  replay_contraction(g, at(stored, "contraction"), where, count);
  auto const pc = proximal_from_json(stored);
  auto const& c = pc.contraction;
  auto const d = projgeom::dist_to_hyperplane(projgeom::ProjPoint::from_rational(c.attracting, c.place),
                                              projgeom::ProjHyperplane::from_rational(c.repelling, c.place));
  auto fresh = dynamics::make_comparison(pc.separation.label, d, Relation::Ge, magnitude(c.place, pc.r));
  check_comparison(fresh, at(stored, "separation"), where, count);
  if (!(pc.r > 2 * c.epsilon)) mismatch(where + ": r <= 2 eps");
}

void replay_trace(const exact::GenSet& sigma, std::size_t wedge, const json& trace, std::size_t& count) {
  if (!trace.is_object()) return;
  auto element = [&](const json& w) { return rep_of(exact::word_eval(sigma, word_from_json(w)), wedge); };
  if (trace.contains("proximal")) {
    auto const& s = trace["proximal"];
    replay_proximal(element(at(s, "word")), at(s, "cert"), "trace A_1", count);
  }
  if (trace.contains("very_contracting")) {
    auto const& s = trace["very_contracting"];
    QMatrix const a2 = element(at(s, "word"));
    replay_contraction(a2, at(s, "forward"), "trace A_2", count);
    replay_contraction(exact::inverse(a2), at(s, "backward"), "trace A_2^-1", count);
    if (trace.contains("frame")) {
      auto const top = vector_from_json(at(trace["frame"], "top_vector"));
      auto const fwd = contraction_from_json(at(s, "forward"));
      auto const bwd = contraction_from_json(at(s, "backward"));
      auto const u1 = projgeom::ProjPoint::from_rational(top, fwd.place);
      dynamics::Transcript t;
      t.push_back(dynamics::make_comparison(
          "attracting(A_2) to u_1", projgeom::proj_dist(projgeom::ProjPoint::from_rational(fwd.attracting, fwd.place), u1),
          Relation::Le, magnitude(fwd.place, fwd.epsilon)));
      t.push_back(dynamics::make_comparison(
          "attracting(A_2^-1) to u_1",
          projgeom::proj_dist(projgeom::ProjPoint::from_rational(bwd.attracting, bwd.place), u1), Relation::Le,
          magnitude(fwd.place, fwd.epsilon)));
      check_transcript(t, at(s, "proximity"), "trace A_2 proximity", count);
    }
  }
  if (trace.contains("very_proximal")) {
    auto const& s = trace["very_proximal"];
    QMatrix const x = element(at(s, "word"));
    replay_proximal(x, at(at(s, "cert"), "forward"), "trace X", count);
    replay_proximal(exact::inverse(x), at(at(s, "cert"), "backward"), "trace X^-1", count);
  }
}

double to_double(const Rational& q) { return q.get_d(); }

}  // namespace

construct::Config RunConfig::construct_config() const {
  construct::Config c;
  c.max_word_len = max_word_len;
  c.exponent_cap = exponent_cap;
  c.grid_cap = grid_cap;
  c.oracle_depth = oracle_depth;
  c.padic_digits = padic_digits;
  c.places = places;
  return c;
}

void RunConfig::validate() const {
  if (padic_digits <= 0 || max_word_len == 0 || exponent_cap <= 0 || oracle_depth < 0) {
    throw Error(ErrorCode::ParseError, "budgets must be positive");
  }
}

int exit_code(ErrorCode code) {
  switch (code) {
    case ErrorCode::NotFound: return 2;
    case ErrorCode::ParseError: return 3;
    case ErrorCode::BadMatrix: return 4;
    case ErrorCode::ReplayMismatch: return 5;
    case ErrorCode::BudgetExceeded:
    case ErrorCode::ExponentCapExceeded: return 6;
    case ErrorCode::PrecisionExhausted: return 7;
    default: return 1;
  }
}

std::size_t free_ball_size(std::size_t rank, std::size_t n) {
  if (rank == 0) return 1;
  if (rank == 1) return 1 + 2 * n;
  std::size_t pw = 1;
  for (std::size_t i = 0; i < n; ++i) pw *= 2 * rank - 1;
  return 1 + 2 * rank * (pw - 1) / (2 * rank - 2);
}

json not_found_report(const InputSpec& in, const std::vector<std::string>& diagnoses) {
  json j = header("certify-free");
  j["status"] = "NotFound";
  j["input"] = to_json(in);
  j["diagnoses"] = diagnoses;
  return j;
}

json error_report(ErrorCode code, const std::string& message) {
  json j = header("error");
  j["status"] = std::string(to_string(code));
  j["message"] = message;
  return j;
}

// ---------------------------------------------------------------------------

json cmd_analyze(const InputSpec& in, const RunConfig& cfg) {
  cfg.validate();
  Precision prec(cfg.precision_bits);
  auto const sigma = make_genset(in);
  auto const plc = places_for(sigma, cfg);
  json j = header("analyze");
  j["input"] = to_json(in);
  json per_place = json::array();
  for (auto const& place : plc) {
    json gens = json::array();
    for (std::size_t i = 0; i < sigma.size(); ++i) {
      gens.push_back(json{{"generator", "g" + std::to_string(i)},
                          {"lambda", scalar_to_json(places::max_eig_abs(sigma[i], place))},
                          {"norm", scalar_to_json(places::op_norm(sigma[i], place))}});
    }
    per_place.push_back(json{{"place", place.to_string()}, {"generators", gens}});
  }
  j["places"] = per_place;
  auto const cc = cfg.construct_config();
  try {
    auto const sel = construct::select_pivot(sigma, cc.search_len, plc);
    j["status"] = "ok";
    j["pivot"] = json{{"word", word_to_json(sel.word)},
                      {"a0", matrix_to_json(sel.a0)},
                      {"place", sel.place.to_string()},
                      {"wedge", sel.wedge},
                      {"rep_dim", sel.rep_dim},
                      {"lambda", scalar_to_json(sel.lambda)},
                      {"gap", scalar_to_json(sel.gap)},
                      {"sigma_norm", scalar_to_json(sel.sigma_norm)},
                      {"gap_power_vs_norm", std::string(places::to_string(sel.inequality))},
                      {"scanned", sel.scanned}};
  } catch (const Error& e) {
    if (e.code() != ErrorCode::NoGap) throw;
    j["status"] = "NoGap";
    j["message"] = e.what();
  }
  // Shortest words with a gap, one per trace value.
  auto const ball = exact::enumerate_ball(sigma, cc.search_len);
  json cands = json::array();
  std::vector<Rational> seen;
  for (auto const& el : ball.elements) {
    if (cands.size() >= 16) break;
    if (!exact::is_semisimple(el.matrix) || exact::is_torsion(el.matrix)) continue;
    Rational const tr = exact::trace(el.matrix);
    if (std::find(seen.begin(), seen.end(), tr) != seen.end()) continue;
    for (auto const& place : plc) {
      auto const m = places::eigen_moduli(el.matrix, place);
      if (m.size() < 2 || places::compare(m[0], m[1], Relation::Gt) != Verdict::True) continue;
      seen.push_back(tr);
      cands.push_back(json{{"word", word_to_json(el.word)},
                           {"trace", exact::to_string(tr)},
                           {"place", place.to_string()},
                           {"gap", scalar_to_json(m[0] / m[1])}});
      break;
    }
  }
  j["gap_candidates"] = cands;
  return j;
}

json cmd_certify_free(const InputSpec& in, const RunConfig& cfg) {
  cfg.validate();
  Precision prec(cfg.precision_bits);
  auto const sigma = make_genset(in);
  auto const result = construct::certify_free(sigma, cfg.construct_config());
  json j = certificate_file(in, result);
  j["config"] = json{{"precision_bits", places::working_precision()},
                     {"padic_digits", cfg.padic_digits},
                     {"max_word_len", cfg.max_word_len},
                     {"exponent_cap", cfg.exponent_cap},
                     {"grid_cap", cfg.grid_cap},
                     {"oracle_depth", cfg.oracle_depth},
                     {"seed", cfg.seed}};
  return j;
}

json cmd_verify_cert(const json& file, const RunConfig& cfg) {
  if (!file.is_object() || !file.contains("schema") || file["schema"] != kCertificateSchema) {
    throw Error(ErrorCode::ParseError, std::string("not a certificate file (expected schema ") + kCertificateSchema + ")");
  }
  unsigned long bits = cfg.precision_bits;
  if (file.contains("config") && file["config"].contains("precision_bits")) {
    bits = file["config"]["precision_bits"].get<unsigned long>();
  }
  Precision prec(bits);
  auto const in = parse_input(at(file, "input"));
  auto const sigma = make_genset(in);
  auto const cert = ping_pong_from_json(at(file, "certificate"));
  std::size_t const wedge = at(file, "wedge").get<std::size_t>();
  if (wedge < 1 || wedge >= in.dim) mismatch("wedge index out of range");
  std::size_t count = 0;

  auto const wx = word_from_json(at(file, "word_x"));
  auto const wy = word_from_json(at(file, "word_y"));
  if (wx != cert.word_x || wy != cert.word_y) mismatch("words differ between the summary and the certificate");
  QMatrix x0, y0;
  try {
    x0 = exact::word_eval(sigma, wx);
    y0 = exact::word_eval(sigma, wy);
  } catch (const Error& e) {
    mismatch(std::string("words do not evaluate: ") + e.what());
  }
  if (rep_of(x0, wedge) != cert.x) mismatch("word_x does not evaluate to x");
  if (rep_of(y0, wedge) != cert.y) mismatch("word_y does not evaluate to y");

  auto const& cj = at(file, "certificate");
  std::vector<QMatrix> const gs{cert.x, exact::inverse(cert.x), cert.y, exact::inverse(cert.y)};
  std::vector<const json*> const stored{&at(at(cj, "cert_x"), "forward"), &at(at(cj, "cert_x"), "backward"),
                                        &at(at(cj, "cert_y"), "forward"), &at(at(cj, "cert_y"), "backward")};
  std::vector<dynamics::ProximalCert> const parsed{cert.cert_x.forward, cert.cert_x.backward, cert.cert_y.forward,
                                                   cert.cert_y.backward};
  char const* names[] = {"x", "x^-1", "y", "y^-1"};
  for (std::size_t i = 0; i < 4; ++i) {
    if (parsed[i].r != cert.r || parsed[i].contraction.epsilon != cert.epsilon ||
        parsed[i].contraction.place != cert.place) {
      mismatch(std::string("proximal data of ") + names[i] + " do not share (r, eps, place)");
    }
    replay_proximal(gs[i], *stored[i], names[i], count);
  }
  if (!(cert.r > 2 * cert.epsilon)) mismatch("r <= 2 eps");
  auto const seps = dynamics::ping_pong_transcript(cert.place, cert.cert_x, cert.cert_y, cert.r);
  check_transcript(seps, at(cj, "separations"), "separations", count);
  if (file.contains("trace")) replay_trace(sigma, wedge, file["trace"], count);

  int const depth = at(at(file, "oracle"), "depth").get<int>();
  std::size_t words = 0;
  if (depth > 0) {
    auto const o = dynamics::free_word_oracle(x0, y0, depth);
    if (!o.free) mismatch("word oracle finds the relation " + dynamics::oracle_word_string(o.failing_word));
    words = o.words_checked;
  }
  json j = header("verify-cert");
  j["status"] = "pass";
  j["comparisons_replayed"] = count;
  j["oracle"] = json{{"depth", depth}, {"words_checked", words}};
  return j;
}

json cmd_compare(const InputSpec& in, const RunConfig& cfg) {
  cfg.validate();
  Precision prec(cfg.precision_bits);
  auto const sigma = make_genset(in);  // validates the matrices
  json j = header("compare");
  j["input"] = to_json(in);
  comparison::DeltaBudget budget;
  budget.seed = cfg.seed;
  json out = json::array();
  bool all_pass = true;
  for (auto const& place : places_for(sigma, cfg)) {
    comparison::CompactSet const q{in.generators, place};
    auto const rep = comparison::comparison_experiment(q, budget);
    auto const geo = comparison::geometric_comparison(q, budget);
    json lambdas = json::array();
    for (auto const& l : rep.lambdas) lambdas.push_back(scalar_to_json(l));
    bool const pass = dynamics::all_true(rep.checks) && dynamics::all_true(geo.checks);
    all_pass = all_pass && pass;
    out.push_back(json{
        {"place", place.to_string()},
        {"lambdas", lambdas},
        {"i_star", rep.i_star},
        {"lambda_root", scalar_to_json(LocalScalar::at_infinity(rep.lambda_root))},
        {"delta", scalar_to_json(rep.delta.value)},
        {"conjugator", matrix_to_json(rep.delta.state.conjugator)},
        {"search", json{{"seed", rep.delta.state.seed},
                        {"restarts", rep.delta.state.restarts},
                        {"best_restart", rep.delta.state.best_restart},
                        {"sweeps", rep.delta.state.sweeps},
                        {"final_step", rep.delta.state.final_step}}},
        {"ratio", scalar_to_json(LocalScalar::at_infinity(rep.ratio))},
        {"checks", transcript_to_json(rep.checks)},
        {"nilpotent", comparison::nilpotency_test(q)},
        {"geometric", json{{"d_q", scalar_to_json(LocalScalar::at_infinity(geo.d_q))},
                           {"best_log_lambda", scalar_to_json(LocalScalar::at_infinity(geo.best_log_lambda))},
                           {"best_element", matrix_to_json(geo.best_element)},
                           {"best_power", geo.best_power},
                           {"lower_gap", scalar_to_json(LocalScalar::at_infinity(geo.lower_gap))},
                           {"checks", transcript_to_json(geo.checks)}}},
        {"invariants_pass", pass}});
  }
  j["places"] = out;
  j["invariants_pass"] = all_pass;
  return j;
}

InputSpec growth_input(const json& doc) {
  if (doc.is_object() && doc.contains("schema") && doc["schema"] == kCertificateSchema) {
    auto const in = parse_input(at(doc, "input"));
    auto const sigma = make_genset(in);
    InputSpec out;
    out.dim = in.dim;
    out.primes = in.primes;
    out.symmetric_closure = true;
    out.generators = {exact::word_eval(sigma, word_from_json(at(doc, "word_x"))),
                      exact::word_eval(sigma, word_from_json(at(doc, "word_y")))};
    return out;
  }
  return parse_input(doc);
}

json cmd_growth(const json& doc, std::size_t n) {
  if (n == 0) throw Error(ErrorCode::ParseError, "growth radius must be >= 1");
  bool const from_cert = doc.is_object() && doc.contains("schema") && doc["schema"] == kCertificateSchema;
  auto const in = growth_input(doc);
  auto const sigma = make_genset(in);
  auto const ball = exact::enumerate_ball(sigma, n);
  auto const& sizes = ball.sizes;
  json j = header("growth");
  j["input"] = to_json(in);
  j["radius"] = n;
  j["ball_sizes"] = sizes;
  json spheres = json::array();
  for (std::size_t k = 0; k < sizes.size(); ++k) spheres.push_back(sizes[k] - (k == 0 ? 1 : sizes[k - 1]));
  j["sphere_sizes"] = spheres;
  bool increasing = true;
  for (std::size_t k = 1; k < sizes.size(); ++k) increasing = increasing && sizes[k] > sizes[k - 1];
  j["strictly_increasing"] = increasing;
  double lambda_hat = 1;
  bool have = false;
  double const base = static_cast<double>(sizes[0]);
  for (std::size_t k = 2; k <= sizes.size(); ++k) {
    double const v = std::pow(static_cast<double>(sizes[k - 1]) / base, 1.0 / static_cast<double>(k - 1));
    if (!have || v < lambda_hat) lambda_hat = v;
    have = true;
  }
  if (!have) lambda_hat = 1;
  j["lambda_hat"] = lambda_hat;
  // Boundary ratios min_s |sA xor A| / |A| for A = S^k.
  json boundary = json::array();
  for (std::size_t k = 1; k <= sizes.size(); ++k) {
    std::size_t const a = sizes[k - 1];
    double best = -1;
    for (std::size_t g = 0; g < sigma.size(); ++g) {
      if (sigma.contains_identity() && g == sigma.identity_index()) continue;
      std::size_t inside = 0;
      for (std::size_t e = 0; e < a; ++e) {
        auto const it = ball.index.find(exact::canonical_key(sigma[g] * ball.elements[e].matrix));
        if (it != ball.index.end() && ball.elements[it->second].radius <= k) ++inside;
      }
      double const ratio = 2.0 * static_cast<double>(a - inside) / static_cast<double>(a);
      if (best < 0 || ratio < best) best = ratio;
    }
    boundary.push_back(best < 0 ? 0.0 : best);
  }
  j["boundary_ratios"] = boundary;
  if (from_cert) {
    json expected = json::array();
    bool match = true;
    for (std::size_t k = 1; k <= sizes.size(); ++k) {
      std::size_t const f = free_ball_size(2, k);
      expected.push_back(f);
      match = match && f == sizes[k - 1];
    }
    j["free_group_ball_sizes"] = expected;
    j["matches_free_group"] = match;
  }
  return j;
}

}  // namespace pingpong::cli
