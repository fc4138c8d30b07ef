#include "lpir/feedback_linearization.hpp"

#include <cmath>

#include "lpir/errors.hpp"

namespace lpir {

std::pair<double, double> pole_placement_gains(double p1, double p2) { return {p1 * p2, -(p1 + p2)}; }

double feedback_lin_control(const FeedbackLinController& ctrl, const Eigen::VectorXd& x) {
  const double error = x(0);
  const double y = error + ctrl.target;
  const double z = x(1);
  const double c = std::cos(z);
  if (c <= 1e-9 || std::abs(ctrl.a) <= 1e-12) throw SingularityError("feedback linearization is singular at this state");
  return y * y - (ctrl.l1 * error + ctrl.l2 * ctrl.a * std::sin(z)) / (ctrl.a * c);
}

}  // namespace lpir
