#pragma once

#include <Eigen/Core>
#include <vector>

namespace lpir {

/**
 * State-dependent step weights w_l(x), l >= 1, with sum_l w_l(x) = 1.
 *
 * Closed forms:
 *   - geometric(lambda):      w_l = (1 - lambda) lambda^(l-1)
 *   - unit_step():            w_1 = 1
 *   - delayed_geometric(b):   w_l(x) = 0 for l <= d(x), (1 - b) b^(l - d(x) - 1) after,
 *                             with delay d(x) = x + first_label
 * Explicit tables list w_1..w_N(x) per state; the remaining mass is spread
 * over l > N(x) as a geometric tail with the given rate, so tail_mass() is
 * exact for every profile kind.
 */
class WeightProfile {
 public:
  enum class Kind { Geometric, UnitStep, DelayedGeometric, Explicit };

  static WeightProfile geometric(double lambda);
  static WeightProfile unit_step();
  static WeightProfile delayed_geometric(double beta, Eigen::Index first_label = 1);
  static WeightProfile explicit_table(std::vector<std::vector<double>> rows, double tail_rate = 0.0);

  Kind kind() const { return kind_; }
  double rate() const { return rate_; }

  /// w_step(x) for step >= 1.
  double weight(Eigen::Index x, Eigen::Index step) const;

  /// sum over l > n of w_l(x), for n >= 0.
  double tail_mass(Eigen::Index x, Eigen::Index n) const;

  /// Throws ParameterError unless weights are nonnegative and sum to one
  /// within tol at every state in [0, num_states).
  void validate(Eigen::Index num_states, double tol = 1e-12) const;

 private:
  WeightProfile(Kind kind, double rate) : kind_(kind), rate_(rate) {}

  Eigen::Index delay(Eigen::Index x) const { return x + first_label_; }
  double explicit_remainder(Eigen::Index x) const;

  Kind kind_;
  double rate_;
  Eigen::Index first_label_ = 1;
  std::vector<std::vector<double>> rows_;
};

}  // namespace lpir
