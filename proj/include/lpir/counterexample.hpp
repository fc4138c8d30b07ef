#pragma once

#include <Eigen/Core>

#include "lpir/contractive_model.hpp"

namespace lpir {

/**
 * The weighted operator whose partial sums converge pointwise but not in norm.
 *
 * States carry labels 1..window with v(x) = x and (T_mu J)(x) = (1 - alpha) x + alpha J(x),
 * so J_mu(x) = x. Weights vanish for l <= x and follow a geometric tail of
 * rate tail_rate afterwards.
 */
struct CounterexampleParams {
  double tail_rate = 0.5;
  double alpha = 0.9;
  Eigen::Index window = 50;      // M, number of retained states
  Eigen::Index truncation = 20;  // n, number of summed steps
};

/// The single-policy model of the counterexample on labels 1..window.
class CounterexampleModel final : public ContractiveModel<double> {
 public:
  CounterexampleModel(double alpha, Eigen::Index window);

  Eigen::Index num_states() const override { return weight_.size(); }
  Eigen::Index num_controls(Eigen::Index) const override { return 1; }
  double evaluate(Eigen::Index x, Eigen::Index u, const CostTableXd& J) const override;
  double discount() const override { return alpha_; }
  const CostTableXd& weight() const override { return weight_; }

  /// J_mu(x) = x, equal to the weight.
  const CostTableXd& fixed_point() const { return weight_; }

 private:
  double alpha_;
  CostTableXd weight_;
};

struct CounterexampleResult {
  double norm_gap = 0.0;      // ||T^(w_n) J_mu - J_mu|| over labels 1..window
  CostTableXd pointwise_gap;  // |T^(w_n) J_mu (x) - J_mu(x)|, index = label - 1

  /// Gap at state label x (1-based).
  double gap_at(Eigen::Index label) const { return pointwise_gap(label - 1); }
};

/// Throws ParameterError unless window > truncation >= 0.
CounterexampleResult counterexample_norm_gap(const CounterexampleParams& params);

}  // namespace lpir
