#include "lpir/riccati.hpp"

#include <cmath>

#include "lpir/errors.hpp"

namespace lpir {

double riccati_oracle(double a, double b, double q, double r, double alpha, double tol, std::size_t max_iters) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw ParameterError("alpha must lie in (0, 1)");
  if (!(r > 0.0) || q < 0.0) throw ParameterError("need r > 0 and q >= 0");
  double P = 0.0;
  for (std::size_t i = 0; i < max_iters; ++i) {
    const double gain = alpha * a * b * P;
    const double next = q + alpha * a * a * P - gain * gain / (r + alpha * b * b * P);
    if (std::abs(next - P) <= tol) return next;
    P = next;
  }
  throw ConvergenceError("Riccati iteration did not converge");
}

}  // namespace lpir
