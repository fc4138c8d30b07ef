#pragma once

#include <Eigen/Dense>
#include <functional>

#include "lpir/control_problem.hpp"

namespace lpir {

/// Torsional pendulum constants. Inertia M = (4/3) m l^2.
struct PendulumParams {
  double mass = 1.0 / 3.0;
  double length = 1.5;
  double friction = 0.2;
  double gravity = 9.8;
  double sample_time = 0.1;

  double inertia() const { return 4.0 / 3.0 * mass * length * length; }
  double gravity_torque() const { return mass * gravity * length; }
};

/// x+ = x - 0.5 u.
Eigen::VectorXd step_linear_example(const Eigen::VectorXd& x, double u);

/// Forward Euler of the pendulum: phi+ = phi + dt w, w+ = w + dt (-mgl sin phi - gamma w + tau) / M.
Eigen::VectorXd step_pendulum(const Eigen::VectorXd& x, double u, const PendulumParams& params = {});

/// Forward Euler (dt = 0.1) of y' = a sin z, z' = -y^2 + v in coordinates x = [y - 1, z].
Eigen::VectorXd step_sincos(const Eigen::VectorXd& x, double u, double a = 1.0, double sample_time = 0.1);

/// Scalar problem: X = [-100, 100], U = [-1, 1], g = x^2 + u^2, alpha = 0.95.
ControlProblem linear_example();

/// Pendulum problem: Q = I, R = 0.1, alpha = 0.95, phi in [-pi/2, pi/2], w in [-2, 2], tau in [-1, 1].
ControlProblem pendulum_example(const PendulumParams& params = {});

/**
 * Set-point problem for y' = a sin z, z' = -y^2 + v with target y = 1.
 *
 * State x = [y - 1, z] with y in [-2, 2], z in [-pi/2, pi/2], v in [-1, 1].
 * The control penalty is taken relative to the equilibrium input y^2, so
 * the target is a zero-cost equilibrium: g = x' x + 0.1 (v - y^2)^2.
 */
ControlProblem sincos_example(double a = 1.0);

/// Continuous-time right-hand side dx/dt = F(x, u).
using ContinuousDynamics = std::function<Eigen::VectorXd(const Eigen::VectorXd&, double)>;

ContinuousDynamics pendulum_rhs(const PendulumParams& params = {});
ContinuousDynamics sincos_rhs(double a = 1.0);

/// One classical Runge-Kutta step of size dt with u held constant.
Eigen::VectorXd rk4_step(const ContinuousDynamics& rhs, const Eigen::VectorXd& x, double u, double dt);

/// Integrates over `duration` with u held constant using RK4 substeps of at most dt.
Eigen::VectorXd integrate_held(const ContinuousDynamics& rhs, const Eigen::VectorXd& x, double u, double duration,
                               double dt = 1e-3);

}  // namespace lpir
