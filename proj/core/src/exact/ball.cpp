#include "pingpong/exact/ball.hpp"

#include "pingpong/error.hpp"

namespace pingpong::exact {

Ball enumerate_ball(const GenSet& sigma, std::size_t n, std::size_t element_cap) {
  Ball ball;
  SMatrix const id = SMatrix::identity(sigma.dim());
  ball.elements.push_back(BallElement{id, Word(), 0});
  ball.index.emplace(canonical_key(id), 0);
  std::vector<std::size_t> frontier{0};
  for (std::size_t radius = 1; radius <= n; ++radius) {
    std::vector<std::size_t> next;
    for (std::size_t slot : frontier) {
      for (std::size_t g = 0; g < sigma.size(); ++g) {
        SMatrix y = ball.elements[slot].matrix * sigma[g];
        std::string key = canonical_key(y);
        if (ball.index.contains(key)) continue;
        if (ball.elements.size() >= element_cap) {
          throw Error(ErrorCode::BudgetExceeded,
                      "ball exceeds " + std::to_string(element_cap) + " elements at radius " +
                          std::to_string(radius));
        }
        Word w = ball.elements[slot].word * Word::letter(g);
        ball.index.emplace(std::move(key), ball.elements.size());
        next.push_back(ball.elements.size());
        ball.elements.push_back(BallElement{std::move(y), std::move(w), radius});
      }
    }
    ball.sizes.push_back(ball.elements.size());
    frontier = std::move(next);
  }
  return ball;
}

}  // namespace pingpong::exact
