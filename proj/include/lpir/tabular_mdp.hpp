#pragma once

#include <Eigen/Dense>
#include <vector>

#include "lpir/contractive_model.hpp"

namespace lpir {

using PolicyTable = Policy;

/**
 * Finite MDP with the linear mapping
 *   H(x, u, J) = sum_y P(y | x, u) (g(x, u, y) + alpha J(y)),
 * and weight v = 1.
 */
class TabularMdp final : public ContractiveModel<double> {
 public:
  struct Action {
    Eigen::VectorXd probability;  // P(. | x, u), length n_states
    Eigen::VectorXd cost;         // g(x, u, .), length n_states
  };

  /// Validates sum_y P = 1 (to 1e-12), P >= 0, finite costs, alpha in (0, 1).
  TabularMdp(double alpha, std::vector<std::vector<Action>> actions);

  Eigen::Index num_states() const override { return static_cast<Eigen::Index>(actions_.size()); }
  Eigen::Index num_controls(Eigen::Index x) const override {
    return static_cast<Eigen::Index>(actions_[static_cast<std::size_t>(x)].size());
  }
  double evaluate(Eigen::Index x, Eigen::Index u, const CostTableXd& J) const override;
  double discount() const override { return alpha_; }
  const CostTableXd& weight() const override { return weight_; }

  const Action& action(Eigen::Index x, Eigen::Index u) const {
    return actions_[static_cast<std::size_t>(x)][static_cast<std::size_t>(u)];
  }
  /// sum_y P(y | x, u) g(x, u, y)
  double expected_cost(Eigen::Index x, Eigen::Index u) const { return expected_cost_(x, u); }
  /// max over (x, u, y) with P > 0 of |g(x, u, y)|
  double stage_cost_bound() const;

 private:
  double alpha_;
  std::vector<std::vector<Action>> actions_;
  CostTableXd weight_;
  Eigen::MatrixXd expected_cost_;  // n_states x max_actions
};

/// P_mu, row x = P(. | x, mu(x)).
Eigen::MatrixXd policy_transition(const TabularMdp& mdp, const PolicyTable& mu);

/// g_mu(x) = sum_y P(y | x, mu(x)) g(x, mu(x), y).
Eigen::VectorXd policy_cost(const TabularMdp& mdp, const PolicyTable& mu);

/// g_mu + alpha P_mu J.
CostTableXd bellman_mu_linear(const TabularMdp& mdp, const PolicyTable& mu, const CostTableXd& J);

/// Exact lambda operator for linear H: J + (I - lambda alpha P_mu)^(-1) (T_mu J - J).
CostTableXd t_lambda_closed_form(const TabularMdp& mdp, const PolicyTable& mu, const CostTableXd& J, double lambda);

/// Solves (I - alpha P_mu) J = g_mu.
CostTableXd solve_J_mu(const TabularMdp& mdp, const PolicyTable& mu);

/// Every policy of the MDP, in lexicographic order. Only sensible for tiny models.
std::vector<PolicyTable> enumerate_policies(const TabularMdp& mdp);

}  // namespace lpir
