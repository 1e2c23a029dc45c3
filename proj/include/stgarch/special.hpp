#pragma once

namespace stgarch {

/// Digamma function psi(x) = d log Gamma(x) / dx, x > 0.
/// Recurrence shift to x >= 8 followed by the asymptotic series;
/// absolute error below 1e-12 on [1e-3, 1e6].
double digamma(double x);

/// Trigamma function psi'(x), x > 0. Same scheme as digamma.
double trigamma(double x);

}  // namespace stgarch
