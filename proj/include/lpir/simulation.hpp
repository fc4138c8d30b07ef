#pragma once

#include <Eigen/Dense>
#include <functional>
#include <utility>
#include <vector>

#include "lpir/benchmarks.hpp"
#include "lpir/control_problem.hpp"
#include "lpir/quadratic_value.hpp"

namespace lpir {

struct Trajectory {
  std::vector<Eigen::VectorXd> states;  // horizon + 1 entries
  std::vector<double> controls;         // horizon entries
  std::vector<double> stage_costs;      // horizon entries
  double discounted_cost = 0.0;
  std::size_t clip_events = 0;          // steps whose successor left the state box
  std::size_t line_searches = 0;        // greedy steps that fell back to line search
  double sample_time = 1.0;

  /// First step index k with predicate(states[k]), or states.size() when never.
  std::size_t first_index(const std::function<bool(const Eigen::VectorXd&)>& predicate) const;
};

/// Closed loop of the greedy controller on the problem's discrete dynamics,
/// clipping successors to the state box.
Trajectory simulate_adp(const ControlProblem& problem, const QuadraticValue& theta, const Eigen::VectorXd& x0,
                        std::size_t horizon);

/// State feedback u = policy(x).
using FeedbackPolicy = std::function<double(const Eigen::VectorXd&)>;

/**
 * Sampled-data closed loop on a continuous plant: u is recomputed every
 * sample_time and held while RK4 integrates with step dt. Costs use the
 * problem's stage cost and discount; no clipping is applied.
 */
Trajectory simulate_sampled(const ControlProblem& problem, const ContinuousDynamics& plant, const FeedbackPolicy& policy,
                            const Eigen::VectorXd& x0, std::size_t steps, double sample_time = 0.1, double dt = 1e-3);

/// The greedy controller as a FeedbackPolicy.
FeedbackPolicy adp_policy(const ControlProblem& problem, const QuadraticValue& theta);

/// n evenly spaced points on [lo, hi].
std::vector<double> linspace(double lo, double hi, std::size_t n);

/// J(x, theta) along coordinate `axis` with every other coordinate 0.
std::vector<std::pair<double, double>> cost_slice(const QuadraticValue& theta, Eigen::Index axis,
                                                  const std::vector<double>& grid);

/// sup over the grid of |a - b| for two slices on the same grid.
double slice_sup_distance(const std::vector<std::pair<double, double>>& a, const std::vector<std::pair<double, double>>& b);

}  // namespace lpir
