#include "lpir/simulation.hpp"

#include <cmath>

#include "lpir/errors.hpp"

namespace lpir {

std::size_t Trajectory::first_index(const std::function<bool(const Eigen::VectorXd&)>& predicate) const {
  for (std::size_t k = 0; k < states.size(); ++k) {
    if (predicate(states[k])) return k;
  }
  return states.size();
}

Trajectory simulate_adp(const ControlProblem& problem, const QuadraticValue& theta, const Eigen::VectorXd& x0,
                        std::size_t horizon) {
  if (!problem.state_box.contains(x0)) throw ParameterError("initial state lies outside the state box");
  Trajectory out;
  out.states.reserve(horizon + 1);
  out.states.push_back(x0);
  double discount = 1.0;
  for (std::size_t k = 0; k < horizon; ++k) {
    const Eigen::VectorXd& x = out.states.back();
    const GreedyControl greedy = greedy_control(problem, theta, x);
    if (greedy.used_line_search) ++out.line_searches;
    const double cost = problem.stage_cost(x, greedy.control);
    out.controls.push_back(greedy.control);
    out.stage_costs.push_back(cost);
    out.discounted_cost += discount * cost;
    discount *= problem.discount;
    Eigen::VectorXd next = problem.step(x, greedy.control);
    if (!problem.state_box.contains(next)) {
      ++out.clip_events;
      next = problem.state_box.clamp(next);
    }
    out.states.push_back(std::move(next));
  }
  return out;
}

Trajectory simulate_sampled(const ControlProblem& problem, const ContinuousDynamics& plant, const FeedbackPolicy& policy,
                            const Eigen::VectorXd& x0, std::size_t steps, double sample_time, double dt) {
  Trajectory out;
  out.sample_time = sample_time;
  out.states.push_back(x0);
  double discount = 1.0;
  for (std::size_t k = 0; k < steps; ++k) {
    const Eigen::VectorXd& x = out.states.back();
    const double u = policy(x);
    const double cost = problem.stage_cost(x, u);
    out.controls.push_back(u);
    out.stage_costs.push_back(cost);
    out.discounted_cost += discount * cost;
    discount *= problem.discount;
    out.states.push_back(integrate_held(plant, x, u, sample_time, dt));
  }
  return out;
}

FeedbackPolicy adp_policy(const ControlProblem& problem, const QuadraticValue& theta) {
  return [problem, theta](const Eigen::VectorXd& x) { return greedy_control(problem, theta, x).control; };
}

std::vector<double> linspace(double lo, double hi, std::size_t n) {
  std::vector<double> out(n);
  if (n == 1) {
    out[0] = lo;
    return out;
  }
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  }
  if (n > 1) out.back() = hi;
  return out;
}

std::vector<std::pair<double, double>> cost_slice(const QuadraticValue& theta, Eigen::Index axis,
                                                  const std::vector<double>& grid) {
  if (axis < 0 || axis >= theta.dimension()) throw ParameterError("slice axis out of range");
  std::vector<std::pair<double, double>> out;
  out.reserve(grid.size());
  Eigen::VectorXd x = Eigen::VectorXd::Zero(theta.dimension());
  for (double c : grid) {
    x(axis) = c;
    out.emplace_back(c, theta(x));
  }
  return out;
}

double slice_sup_distance(const std::vector<std::pair<double, double>>& a, const std::vector<std::pair<double, double>>& b) {
  if (a.size() != b.size()) throw ParameterError("slices are on different grids");
  double sup = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sup = std::max(sup, std::abs(a[i].second - b[i].second));
  return sup;
}

}  // namespace lpir
