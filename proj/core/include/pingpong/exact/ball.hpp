#pragma once

#include <cstddef>
#include <string>
#include <unordered_map>
#include <vector>

#include "pingpong/exact/word.hpp"

namespace pingpong::exact {

struct BallElement {
  SMatrix matrix;
  Word word;           // first word reaching it in breadth-first order
  std::size_t radius;  // smallest n with the element in sigma^n
};

struct Ball {
  std::vector<BallElement> elements;  // ordered by discovery
  std::vector<std::size_t> sizes;     // sizes[j-1] = |sigma^j|, j = 1..n
  std::unordered_map<std::string, std::size_t> index;  // canonical key -> slot
};

// Exact breadth-first enumeration of sigma^1 .. sigma^n.  Throws
// Error(BudgetExceeded) once more than `element_cap` distinct elements appear.
Ball enumerate_ball(const GenSet& sigma, std::size_t n, std::size_t element_cap = 2'000'000);

}  // namespace pingpong::exact
