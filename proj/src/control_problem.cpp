#include "lpir/control_problem.hpp"

#include <algorithm>
#include <cmath>

#include "lpir/errors.hpp"

namespace lpir {

Eigen::VectorXd ControlProblem::step(const Eigen::VectorXd& x, double u) const {
  if (affine) return drift(x) + input_gain(x) * u;
  return dynamics(x, u);
}

double ControlProblem::stage_cost(const Eigen::VectorXd& x, double u) const {
  const double du = u - reference(x);
  return x.dot(state_cost * x) + control_cost * du * du;
}

void ControlProblem::validate() const {
  if (state_box.empty() || state_box.dimension() != state_dim) throw ParameterError("state box is empty or mis-sized");
  if (initial_box.empty() || initial_box.dimension() != state_dim) throw ParameterError("initial box is empty or mis-sized");
  if (control_box.empty()) throw ParameterError("control box is empty");
  if (!(discount > 0.0 && discount < 1.0)) throw ParameterError("discount must lie in (0, 1)");
  if (state_cost.rows() != state_dim || state_cost.cols() != state_dim) throw ParameterError("Q has the wrong shape");
  if (affine ? !(drift && input_gain) : !dynamics) throw ParameterError("dynamics are not set");
}

namespace {

double objective(const ControlProblem& problem, const QuadraticValue& theta, const Eigen::VectorXd& x, double u) {
  return problem.stage_cost(x, u) + problem.discount * theta(problem.step(x, u));
}

// Grid scan followed by golden-section refinement around the best grid point.
double line_search(const ControlProblem& problem, const QuadraticValue& theta, const Eigen::VectorXd& x) {
  const double lo = problem.control_box.lower, hi = problem.control_box.upper;
  if (lo == hi) return lo;
  constexpr int kGrid = 2000;
  const double h = (hi - lo) / kGrid;
  int best = 0;
  double best_value = objective(problem, theta, x, lo);
  for (int i = 1; i <= kGrid; ++i) {
    const double value = objective(problem, theta, x, lo + i * h);
    if (value < best_value) {
      best_value = value;
      best = i;
    }
  }
  double a = lo + std::max(best - 1, 0) * h;
  double b = lo + std::min(best + 1, kGrid) * h;
  const double ratio = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - ratio * (b - a), d = a + ratio * (b - a);
  double fc = objective(problem, theta, x, c), fd = objective(problem, theta, x, d);
  while (b - a > 1e-8) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - ratio * (b - a);
      fc = objective(problem, theta, x, c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + ratio * (b - a);
      fd = objective(problem, theta, x, d);
    }
  }
  const double refined = 0.5 * (a + b);
  return objective(problem, theta, x, refined) < best_value ? refined : lo + best * h;
}

}  // namespace

GreedyControl greedy_control(const ControlProblem& problem, const QuadraticValue& theta, const Eigen::VectorXd& x) {
  if (problem.control_box.empty()) throw ControlError("empty control interval");
  const double lo = problem.control_box.lower, hi = problem.control_box.upper;
  GreedyControl out;
  if (!problem.affine) {
    out.control = line_search(problem, theta, x);
    out.used_line_search = true;
  } else {
    const Eigen::VectorXd a = problem.drift(x);
    const Eigen::VectorXd b = problem.input_gain(x);
    const Eigen::MatrixXd P = theta.symmetric_part();
    const double curvature = problem.control_cost + problem.discount * b.dot(P * b);
    const double slope = -2.0 * problem.control_cost * problem.reference(x) + 2.0 * problem.discount * b.dot(P * a);
    if (curvature <= 1e-12) {
      const double f_lo = objective(problem, theta, x, lo);
      const double f_hi = objective(problem, theta, x, hi);
      out.control = f_hi < f_lo ? hi : lo;
    } else {
      out.control = std::clamp(-slope / (2.0 * curvature), lo, hi);
    }
  }
  out.objective = objective(problem, theta, x, out.control);
  return out;
}

}  // namespace lpir
