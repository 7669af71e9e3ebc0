#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "pingpong/dynamics/certs.hpp"
#include "pingpong/exact/matrix.hpp"
#include "pingpong/places/place.hpp"

namespace pingpong::comparison {

using dynamics::Comparison;
using dynamics::Transcript;
using exact::QMatrix;
using exact::Rational;
using places::Interval;
using places::LocalScalar;
using places::Place;

struct CompactSet {
  std::vector<QMatrix> elements;
  Place place;
};

// The distinct products a_1 ... a_i with a_k in Q.  Throws BudgetExceeded
// beyond `cap` distinct products at any level.
std::vector<QMatrix> power_set(const std::vector<QMatrix>& q, int i, std::size_t cap = 200'000);

// Lambda_v(Q^i): the largest eigenvalue modulus over the products.
LocalScalar lambda_of_power_set(const CompactSet& q, int i, std::size_t cap = 200'000);

struct DeltaBudget {
  int restarts = 16;
  int max_sweeps = 200;
  std::uint64_t seed = 0x5eed;
};

struct ConjugatorSearchState {
  QMatrix conjugator;     // exact rational g; the bound is max ||g a g^-1||
  LocalScalar achieved;   // certified
  std::uint64_t seed = 0;
  int restarts = 0;
  int best_restart = -1;  // -1: the warm start, -2: the identity
  long sweeps = 0;        // total over all restarts
  double final_step = 0;  // step size when the best restart stopped
};

struct DeltaResult {
  LocalScalar value;  // certified upper bound on Delta_v(Q)
  ConjugatorSearchState state;
};

// Upper bound on the minimal displacement inf_g max_{a in Q} ||g a g^-1||_v.
// Local search over upper-triangular conjugators (log-diagonal and
// off-diagonal coordinates) at infinity, over p-power diagonals and unit
// shears at a prime.  Candidates are re-evaluated exactly; the result never
// exceeds ||Q|| nor the value at `warm_start`.
DeltaResult delta_upper(const CompactSet& q, const DeltaBudget& budget = {},
                        const std::optional<QMatrix>& warm_start = std::nullopt);

struct ComparisonReport {
  std::size_t dim = 0;
  std::vector<LocalScalar> lambdas;  // Lambda(Q^i), i = 1..max_i
  int i_star = 1;
  Interval lambda_root;              // Lambda(Q^{i*})^{1/i*}
  DeltaResult delta;
  Interval ratio;                    // lambda_root / delta
  Transcript checks;                 // Lambda(Q^i) <= delta^i
};

// max_i defaults to d^2.
ComparisonReport comparison_experiment(const CompactSet& q, const DeltaBudget& budget = {}, int max_i = 0,
                                       std::size_t cap = 200'000);

// The algebra spanned by products of elements of Q is nilpotent.
bool nilpotency_test(const CompactSet& q);
// Every product in Q^i has only zero eigenvalues (exact).
bool lambda_zero(const std::vector<QMatrix>& q, int i);

// sqrt(sum_i (log a_i)^2) from the Cartan decomposition; at a prime the
// logarithms are in base p.
LocalScalar displacement(const QMatrix& g, Place v);

// log ||h|| <= displacement <= sqrt(d) log ||h||, i.e. the norm sandwich
// ||h|| <= e^disp <= ||h||^sqrt(d) (base p at a prime).
Transcript sandwich_checks(const QMatrix& h, Place v);

struct GeometricReport {
  Interval d_q;              // max displacement of Q at the base point
  Interval best_log_lambda;  // max log Lambda(g) over the union of Q^i
  QMatrix best_element;
  int best_power = 0;
  Interval lower_gap;        // d_q / sqrt(d) - best_log_lambda (an empirical C)
  Transcript checks;         // log Lambda(g) <= d^2 d_q
  DeltaResult delta;
};

GeometricReport geometric_comparison(const CompactSet& q, const DeltaBudget& budget = {},
                                     std::size_t cap = 200'000);

}  // namespace pingpong::comparison
