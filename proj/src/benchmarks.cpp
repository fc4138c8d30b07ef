#include "lpir/benchmarks.hpp"

#include <cmath>
#include <numbers>

#include "lpir/errors.hpp"

namespace lpir {

namespace {

constexpr double kHalfPi = std::numbers::pi / 2.0;

Box box2(double lo0, double hi0, double lo1, double hi1) {
  return {Eigen::Vector2d(lo0, lo1), Eigen::Vector2d(hi0, hi1)};
}

}  // namespace

Eigen::VectorXd step_linear_example(const Eigen::VectorXd& x, double u) {
  return (Eigen::VectorXd(1) << x(0) - 0.5 * u).finished();
}

Eigen::VectorXd step_pendulum(const Eigen::VectorXd& x, double u, const PendulumParams& p) {
  const double phi = x(0), w = x(1);
  const double accel = (-p.gravity_torque() * std::sin(phi) - p.friction * w + u) / p.inertia();
  return Eigen::Vector2d(phi + p.sample_time * w, w + p.sample_time * accel);
}

Eigen::VectorXd step_sincos(const Eigen::VectorXd& x, double u, double a, double dt) {
  const double y = x(0) + 1.0, z = x(1);
  return Eigen::Vector2d(x(0) + dt * a * std::sin(z), z + dt * (-y * y + u));
}

ControlProblem linear_example() {
  ControlProblem p;
  p.name = "linear";
  p.state_dim = 1;
  p.drift = [](const Eigen::VectorXd& x) { return Eigen::VectorXd(x); };
  p.input_gain = [](const Eigen::VectorXd&) { return Eigen::VectorXd::Constant(1, -0.5); };
  p.state_cost = Eigen::MatrixXd::Identity(1, 1);
  p.control_cost = 1.0;
  p.discount = 0.95;
  p.state_box = {Eigen::VectorXd::Constant(1, -100.0), Eigen::VectorXd::Constant(1, 100.0)};
  p.control_box = {-1.0, 1.0};
  p.initial_box = p.state_box;
  return p;
}

ControlProblem pendulum_example(const PendulumParams& params) {
  ControlProblem p;
  p.name = "pendulum";
  p.state_dim = 2;
  p.drift = [params](const Eigen::VectorXd& x) { return step_pendulum(x, 0.0, params); };
  p.input_gain = [params](const Eigen::VectorXd&) {
    return Eigen::VectorXd(Eigen::Vector2d(0.0, params.sample_time / params.inertia()));
  };
  p.state_cost = Eigen::MatrixXd::Identity(2, 2);
  p.control_cost = 0.1;
  p.discount = 0.95;
  p.state_box = box2(-kHalfPi, kHalfPi, -2.0, 2.0);
  p.control_box = {-1.0, 1.0};
  p.initial_box = p.state_box;
  return p;
}

ControlProblem sincos_example(double a) {
  ControlProblem p;
  p.name = "sincos";
  p.state_dim = 2;
  p.drift = [a](const Eigen::VectorXd& x) { return step_sincos(x, 0.0, a); };
  p.input_gain = [](const Eigen::VectorXd&) { return Eigen::VectorXd(Eigen::Vector2d(0.0, 0.1)); };
  p.state_cost = Eigen::MatrixXd::Identity(2, 2);
  p.control_cost = 0.1;
  p.reference_control = [](const Eigen::VectorXd& x) { return (x(0) + 1.0) * (x(0) + 1.0); };
  p.discount = 0.95;
  p.state_box = box2(-3.0, 1.0, -kHalfPi, kHalfPi);
  p.control_box = {-1.0, 1.0};
  p.initial_box = p.state_box;
  return p;
}

ContinuousDynamics pendulum_rhs(const PendulumParams& params) {
  return [params](const Eigen::VectorXd& x, double u) -> Eigen::VectorXd {
    const double accel = (-params.gravity_torque() * std::sin(x(0)) - params.friction * x(1) + u) / params.inertia();
    return Eigen::Vector2d(x(1), accel);
  };
}

ContinuousDynamics sincos_rhs(double a) {
  return [a](const Eigen::VectorXd& x, double u) -> Eigen::VectorXd {
    const double y = x(0) + 1.0;
    return Eigen::Vector2d(a * std::sin(x(1)), -y * y + u);
  };
}

Eigen::VectorXd rk4_step(const ContinuousDynamics& rhs, const Eigen::VectorXd& x, double u, double dt) {
  const Eigen::VectorXd k1 = rhs(x, u);
  const Eigen::VectorXd k2 = rhs(x + 0.5 * dt * k1, u);
  const Eigen::VectorXd k3 = rhs(x + 0.5 * dt * k2, u);
  const Eigen::VectorXd k4 = rhs(x + dt * k3, u);
  return x + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

Eigen::VectorXd integrate_held(const ContinuousDynamics& rhs, const Eigen::VectorXd& x, double u, double duration,
                               double dt) {
  if (!(dt > 0.0) || duration < 0.0) throw ParameterError("integration step must be positive");
  const auto steps = static_cast<long>(std::ceil(duration / dt - 1e-9));
  if (steps <= 0) return x;
  const double h = duration / static_cast<double>(steps);
  Eigen::VectorXd state = x;
  for (long i = 0; i < steps; ++i) state = rk4_step(rhs, state, u, h);
  return state;
}

}  // namespace lpir
