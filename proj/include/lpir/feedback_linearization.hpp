#pragma once

#include <Eigen/Core>
#include <utility>

namespace lpir {

/**
 * Feedback-linearizing set-point law for y' = a sin z, z' = -y^2 + v:
 *   v = y^2 - (l1 (y - target) + l2 a sin z) / (a cos z),
 * which imposes e'' + l2 e' + l1 e = 0 on e = y - target.
 */
struct FeedbackLinController {
  double l1 = 1.0;
  double l2 = 2.0;
  double a = 1.0;
  double target = 1.0;
};

/// Gains placing the error poles at p1 and p2: (s - p1)(s - p2) = s^2 + l2 s + l1.
std::pair<double, double> pole_placement_gains(double p1, double p2);

/// v for state x = [y - target, z]. Throws SingularityError when cos z <= 1e-9.
double feedback_lin_control(const FeedbackLinController& ctrl, const Eigen::VectorXd& x);

}  // namespace lpir
