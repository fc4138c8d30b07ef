#pragma once

#include <cstddef>

namespace lpir {

/// Fixed point of the discounted scalar Riccati map
///   P <- q + alpha a^2 P - (alpha a b P)^2 / (r + alpha b^2 P),
/// iterated from P = 0 until successive values differ by at most tol.
/// Throws ConvergenceError after max_iters.
double riccati_oracle(double a, double b, double q, double r, double alpha, double tol = 1e-12,
                      std::size_t max_iters = 1'000'000);

}  // namespace lpir
