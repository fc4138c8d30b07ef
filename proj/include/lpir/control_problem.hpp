#pragma once

#include <Eigen/Dense>
#include <functional>
#include <string>

#include "lpir/quadratic_value.hpp"

namespace lpir {

/// Axis-aligned box [lower, upper].
struct Box {
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;

  Eigen::Index dimension() const { return lower.size(); }
  bool empty() const { return lower.size() != upper.size() || (lower.array() > upper.array()).any(); }
  bool contains(const Eigen::VectorXd& x) const {
    return x.size() == lower.size() && (x.array() >= lower.array()).all() && (x.array() <= upper.array()).all();
  }
  Eigen::VectorXd clamp(const Eigen::VectorXd& x) const { return x.cwiseMax(lower).cwiseMin(upper); }
};

/// Closed interval of admissible scalar controls.
struct ControlInterval {
  double lower = -1.0;
  double upper = 1.0;
  bool empty() const { return !(lower <= upper); }
};

/**
 * Deterministic control problem with a scalar control:
 *   x+ = f(x, u),   g(x, u) = x' Q x + R (u - u_ref(x))^2,   H(x, u, J) = g(x, u) + alpha J(f(x, u)).
 *
 * When `affine` is set, f(x, u) = drift(x) + input_gain(x) u and the greedy
 * problem is an exact scalar quadratic; otherwise `dynamics` is used with a
 * line search.
 */
struct ControlProblem {
  using VectorMap = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

  std::string name;
  Eigen::Index state_dim = 1;
  bool affine = true;
  VectorMap drift;
  VectorMap input_gain;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&, double)> dynamics;  // required when !affine
  Eigen::MatrixXd state_cost;                                               // Q
  double control_cost = 1.0;                                                // R
  std::function<double(const Eigen::VectorXd&)> reference_control;         // u_ref; zero when empty
  double discount = 0.95;
  Box state_box;
  ControlInterval control_box;
  Box initial_box;  // X0 is uniform on this box

  Eigen::VectorXd step(const Eigen::VectorXd& x, double u) const;
  double stage_cost(const Eigen::VectorXd& x, double u) const;
  double reference(const Eigen::VectorXd& x) const { return reference_control ? reference_control(x) : 0.0; }

  /// Throws ParameterError when boxes are empty or dimensions disagree.
  void validate() const;
};

struct GreedyControl {
  double control = 0.0;
  double objective = 0.0;      // g(x, u) + alpha J(f(x, u), theta)
  bool used_line_search = false;
};

/**
 * u in argmin over the control interval of g(x, u) + alpha J(f(x, u), theta).
 *
 * Affine dynamics give a scalar quadratic: its vertex is clipped to the
 * interval; a curvature <= 1e-12 compares the endpoints (lower wins ties).
 */
GreedyControl greedy_control(const ControlProblem& problem, const QuadraticValue& theta, const Eigen::VectorXd& x);

}  // namespace lpir
