#include "lpir/tabular_mdp.hpp"

#include <cmath>
#include <string>

#include "lpir/errors.hpp"
#include "lpir/operators.hpp"

namespace lpir {

namespace {

// Solves A d = rhs and rejects solutions whose residual is not small.
Eigen::VectorXd checked_solve(const Eigen::MatrixXd& A, const Eigen::VectorXd& rhs) {
  const Eigen::PartialPivLU<Eigen::MatrixXd> lu(A);
  Eigen::VectorXd d = lu.solve(rhs);
  const double scale = std::max(1.0, rhs.cwiseAbs().maxCoeff());
  const double residual = rhs.size() == 0 ? 0.0 : (A * d - rhs).cwiseAbs().maxCoeff();
  if (!d.allFinite() || residual > 1e-8 * scale) {
    throw ConditioningError("linear solve residual " + std::to_string(residual) + " exceeds threshold");
  }
  return d;
}

}  // namespace

TabularMdp::TabularMdp(double alpha, std::vector<std::vector<Action>> actions)
    : alpha_(alpha), actions_(std::move(actions)) {
  if (!(alpha_ > 0.0 && alpha_ < 1.0)) throw ParameterError("alpha must lie in (0, 1)");
  const auto n = static_cast<Eigen::Index>(actions_.size());
  if (n == 0) throw ModelError("an MDP needs at least one state");
  std::size_t widest = 0;
  for (Eigen::Index x = 0; x < n; ++x) {
    const auto& list = actions_[static_cast<std::size_t>(x)];
    if (list.empty()) throw ModelError("empty action list at state " + std::to_string(x));
    widest = std::max(widest, list.size());
    for (std::size_t u = 0; u < list.size(); ++u) {
      const auto where = " at (x=" + std::to_string(x) + ", u=" + std::to_string(u) + ")";
      const Action& a = list[u];
      if (a.probability.size() != n || a.cost.size() != n) throw ModelError("row length mismatch" + where);
      if (!a.cost.allFinite()) throw ModelError("non-finite stage cost" + where);
      if (!a.probability.allFinite() || (a.probability.array() < 0.0).any()) {
        throw ModelError("negative or non-finite probability" + where);
      }
      if (std::abs(a.probability.sum() - 1.0) > 1e-12) throw ModelError("probabilities do not sum to one" + where);
    }
  }
  weight_ = CostTableXd::Ones(n);
  expected_cost_ = Eigen::MatrixXd::Zero(n, static_cast<Eigen::Index>(widest));
  for (Eigen::Index x = 0; x < n; ++x) {
    for (Eigen::Index u = 0; u < num_controls(x); ++u) {
      const Action& a = action(x, u);
      expected_cost_(x, u) = a.probability.dot(a.cost);
    }
  }
}

double TabularMdp::evaluate(Eigen::Index x, Eigen::Index u, const CostTableXd& J) const {
  const Action& a = action(x, u);
  return expected_cost_(x, u) + alpha_ * a.probability.dot(J);
}

double TabularMdp::stage_cost_bound() const {
  double bound = 0.0;
  for (const auto& list : actions_) {
    for (const Action& a : list) {
      for (Eigen::Index y = 0; y < a.cost.size(); ++y) {
        if (a.probability(y) > 0.0) bound = std::max(bound, std::abs(a.cost(y)));
      }
    }
  }
  return bound;
}

Eigen::MatrixXd policy_transition(const TabularMdp& mdp, const PolicyTable& mu) {
  validate_policy(mdp, mu);
  const Eigen::Index n = mdp.num_states();
  Eigen::MatrixXd P(n, n);
  for (Eigen::Index x = 0; x < n; ++x) P.row(x) = mdp.action(x, mu[static_cast<std::size_t>(x)]).probability.transpose();
  return P;
}

Eigen::VectorXd policy_cost(const TabularMdp& mdp, const PolicyTable& mu) {
  validate_policy(mdp, mu);
  Eigen::VectorXd g(mdp.num_states());
  for (Eigen::Index x = 0; x < g.size(); ++x) g(x) = mdp.expected_cost(x, mu[static_cast<std::size_t>(x)]);
  return g;
}

CostTableXd bellman_mu_linear(const TabularMdp& mdp, const PolicyTable& mu, const CostTableXd& J) {
  if (J.size() != mdp.num_states()) throw ParameterError("cost table size does not match the model");
  return policy_cost(mdp, mu) + mdp.discount() * (policy_transition(mdp, mu) * J);
}

CostTableXd t_lambda_closed_form(const TabularMdp& mdp, const PolicyTable& mu, const CostTableXd& J, double lambda) {
  if (!(lambda >= 0.0 && lambda < 1.0)) throw ParameterError("lambda must lie in [0, 1)");
  const CostTableXd step = bellman_mu_linear(mdp, mu, J);
  if (lambda == 0.0) return step;
  const Eigen::Index n = mdp.num_states();
  const Eigen::MatrixXd A =
      Eigen::MatrixXd::Identity(n, n) - (lambda * mdp.discount()) * policy_transition(mdp, mu);
  return J + checked_solve(A, step - J);
}

CostTableXd solve_J_mu(const TabularMdp& mdp, const PolicyTable& mu) {
  const Eigen::Index n = mdp.num_states();
  const Eigen::MatrixXd A = Eigen::MatrixXd::Identity(n, n) - mdp.discount() * policy_transition(mdp, mu);
  return checked_solve(A, policy_cost(mdp, mu));
}

std::vector<PolicyTable> enumerate_policies(const TabularMdp& mdp) {
  std::vector<PolicyTable> out;
  PolicyTable mu(static_cast<std::size_t>(mdp.num_states()), 0);
  while (true) {
    out.push_back(mu);
    Eigen::Index x = 0;
    for (; x < mdp.num_states(); ++x) {
      auto& u = mu[static_cast<std::size_t>(x)];
      if (++u < mdp.num_controls(x)) break;
      u = 0;
    }
    if (x == mdp.num_states()) break;
  }
  return out;
}

}  // namespace lpir
