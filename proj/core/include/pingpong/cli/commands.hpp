#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pingpong/cli/serialize.hpp"
#include "pingpong/construct/construct.hpp"

namespace pingpong::cli {

struct RunConfig {
  unsigned long precision_bits = 128;
  long padic_digits = 64;
  std::size_t max_word_len = 50;   // growth: the ball radius, default 8
  bool max_word_len_set = false;
  long exponent_cap = 1L << 16;
  std::size_t grid_cap = 1u << 16;
  int oracle_depth = 10;
  std::uint64_t seed = 0x5eed;
  std::vector<places::Place> places;  // empty: infinity then the support

  construct::Config construct_config() const;
  // Throws ParseError on a non-positive budget.
  void validate() const;
};

// Pivot diagnostics without running the pipeline.
json cmd_analyze(const InputSpec& in, const RunConfig& cfg);

// The certificate file; throws construct::NotFoundError.
json cmd_certify_free(const InputSpec& in, const RunConfig& cfg);

// Replays every stored comparison from the exact data in the file and reruns
// the word oracle at the stored depth.  Returns a pass report; throws
// ReplayMismatch naming the first failure.
json cmd_verify_cert(const json& file, const RunConfig& cfg);

// Comparison experiment and geometric comparison at every place.
json cmd_compare(const InputSpec& in, const RunConfig& cfg);

// Ball and sphere sizes up to n, the fitted growth rate and boundary ratios.
// A certificate file as input uses its certified pair as the generators.
json cmd_growth(const json& doc, std::size_t n);

// Input document, or the pair of a certificate file, as generators.
InputSpec growth_input(const json& doc);

// The report written when certify-free finds nothing.
json not_found_report(const InputSpec& in, const std::vector<std::string>& diagnoses);
// Report for any other error.
json error_report(ErrorCode code, const std::string& message);

// 0 ok, 2 NotFound, 3 ParseError, 4 BadMatrix, 5 ReplayMismatch,
// 6 BudgetExceeded, 7 PrecisionExhausted, 1 anything else.
int exit_code(ErrorCode code);

// Exact free-group ball size |S^n| for a free basis of rank k with inverses
// and identity: 1 + 2k ((2k-1)^n - 1) / (2k - 2).
std::size_t free_ball_size(std::size_t rank, std::size_t n);

}  // namespace pingpong::cli
