#include "stgarch/special.hpp"

#include <cmath>
#include <stdexcept>

namespace stgarch {

double digamma(double x) {
  if (!(x > 0.0)) throw std::domain_error("digamma: x must be positive");
  double acc = 0.0;
  // shift into the asymptotic regime
  while (x < 8.0) {
    acc -= 1.0 / x;
    x += 1.0;
  }
  // psi(x) ~ ln x - 1/(2x) - sum B_{2k}/(2k x^{2k})
  const double inv = 1.0 / x;
  const double inv2 = inv * inv;
  double series = inv2 * (1.0 / 12.0 -
                  inv2 * (1.0 / 120.0 -
                  inv2 * (1.0 / 252.0 -
                  inv2 * (1.0 / 240.0 -
                  inv2 * (1.0 / 132.0 -
                  inv2 * (691.0 / 32760.0 -
                  inv2 * (1.0 / 12.0)))))));
  return acc + std::log(x) - 0.5 * inv - series;
}

double trigamma(double x) {
  if (!(x > 0.0)) throw std::domain_error("trigamma: x must be positive");
  double acc = 0.0;
  while (x < 8.0) {
    acc += 1.0 / (x * x);
    x += 1.0;
  }
  // psi'(x) ~ 1/x + 1/(2x^2) + sum B_{2k}/x^{2k+1}
  const double inv = 1.0 / x;
  const double inv2 = inv * inv;
  double series = inv * inv2 * (1.0 / 6.0 -
                  inv2 * (1.0 / 30.0 -
                  inv2 * (1.0 / 42.0 -
                  inv2 * (1.0 / 30.0 -
                  inv2 * (5.0 / 66.0 -
                  inv2 * (691.0 / 2730.0 -
                  inv2 * (7.0 / 6.0)))))));
  return acc + inv + 0.5 * inv2 + series;
}

}  // namespace stgarch
