#include <doctest.h>

#include <cmath>
#include <numbers>

#include "lpir/benchmarks.hpp"
#include "lpir/control_problem.hpp"
#include "lpir/feedback_linearization.hpp"
#include "lpir/gridded_model.hpp"
#include "lpir/operators.hpp"
#include "lpir/riccati.hpp"
#include "lpir/simulation.hpp"

using namespace lpir;

namespace {

/// f = 0 and g(u) = (u - target)^2, so the greedy objective is that parabola.
ControlProblem parabola(double target) {
  ControlProblem p = linear_example();
  p.drift = [](const Eigen::VectorXd&) { return Eigen::VectorXd::Zero(1); };
  p.input_gain = [](const Eigen::VectorXd&) { return Eigen::VectorXd::Zero(1); };
  p.state_cost = Eigen::MatrixXd::Zero(1, 1);
  p.reference_control = [target](const Eigen::VectorXd&) { return target; };
  return p;
}

}  // namespace

TEST_CASE("greedy control on scalar parabolas") {
  const QuadraticValue zero = QuadraticValue::zero(1);
  const Eigen::VectorXd x = Eigen::VectorXd::Zero(1);
  CHECK(greedy_control(parabola(2.0), zero, x).control == 1.0);
  CHECK(greedy_control(parabola(0.0), zero, x).control == doctest::Approx(0.0));

  // u^2 + 0.95 (1 - 0.5 u)^2 has its vertex at 0.95 / (2 (1 + 0.95 / 4)) after dividing out the factor 2.
  const GreedyControl g = greedy_control(linear_example(), QuadraticValue(Eigen::MatrixXd::Ones(1, 1), 0.0),
                                         Eigen::VectorXd::Ones(1));
  const double vertex = 0.95 / (2.0 * (1.0 + 0.95 * 0.25));
  CHECK(g.control == doctest::Approx(vertex).epsilon(1e-14));
  CHECK(std::abs(g.control) < 1.0);
  CHECK(g.objective == doctest::Approx(1.0 + vertex * vertex + 0.95 * std::pow(1.0 - 0.5 * vertex, 2)).epsilon(1e-14));

  // Degenerate curvature: R = 0 and J flat gives equal endpoints, the lower one wins.
  ControlProblem flat = parabola(0.0);
  flat.control_cost = 0.0;
  CHECK(greedy_control(flat, zero, x).control == -1.0);
}

TEST_CASE("greedy control is optimal against a fine grid") {
  const ControlProblem pendulum = pendulum_example();
  Rng rng = make_stream(17, "greedy-grid", {});
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  const double alpha = pendulum.discount;
  double worst = 0.0;
  for (int trial = 0; trial < 10000; ++trial) {
    const Eigen::Vector2d xv(unit(rng) * std::numbers::pi / 2, 2.0 * unit(rng));
    const Eigen::VectorXd x = xv;
    Eigen::Matrix2d L;
    L << unit(rng), 0.0, unit(rng), unit(rng);
    const QuadraticValue theta(5.0 * L * L.transpose(), unit(rng));
    const GreedyControl g = greedy_control(pendulum, theta, x);

    const Eigen::VectorXd a = step_pendulum(x, 0.0);
    const Eigen::VectorXd b = step_pendulum(x, 1.0) - a;
    const double xQx = x.squaredNorm();
    auto q = [&](double u) {
      const Eigen::Vector2d next = a + u * b;
      return xQx + 0.1 * u * u + alpha * (next.dot(theta.P() * next) + theta.offset());
    };
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= 20000; ++i) best = std::min(best, q(-1.0 + 1e-4 * i));
    worst = std::max(worst, q(g.control) - best);
    CHECK(g.control >= -1.0);
    CHECK(g.control <= 1.0);
  }
  CHECK(worst <= 1e-6);
}

TEST_CASE("non-affine dynamics fall back to a line search") {
  ControlProblem generic = linear_example();
  generic.affine = false;
  generic.dynamics = [](const Eigen::VectorXd& x, double u) { return step_linear_example(x, u); };
  const QuadraticValue theta(Eigen::MatrixXd::Constant(1, 1, 2.0), 1.0);
  for (double x0 : {-80.0, -1.0, 0.3, 4.0}) {
    const Eigen::VectorXd x = Eigen::VectorXd::Constant(1, x0);
    const GreedyControl exact = greedy_control(linear_example(), theta, x);
    const GreedyControl searched = greedy_control(generic, theta, x);
    CHECK(searched.used_line_search);
    CHECK_FALSE(exact.used_line_search);
    CHECK(searched.control == doctest::Approx(exact.control).epsilon(1e-7));
  }
}

TEST_CASE("benchmark dynamics") {
  CHECK(step_linear_example(Eigen::VectorXd::Constant(1, 2.0), 1.0)(0) == 1.5);
  CHECK(step_pendulum(Eigen::Vector2d::Zero(), 0.0).isZero());
  const Eigen::VectorXd p = step_pendulum(Eigen::Vector2d(std::numbers::pi / 4, 0.0), 0.0);
  CHECK(p(0) == doctest::Approx(std::numbers::pi / 4));
  CHECK(p(1) == doctest::Approx(0.1 * (-4.9 * std::sin(std::numbers::pi / 4))).epsilon(1e-14));
  PendulumParams params;
  CHECK(params.inertia() == doctest::Approx(1.0));
  CHECK(params.gravity_torque() == doctest::Approx(4.9));
  // y = 1, z = 0, u = y^2 is an equilibrium of the sin-cos system.
  CHECK(step_sincos(Eigen::Vector2d::Zero(), 1.0).isZero());
  CHECK_NOTHROW(linear_example().validate());
  CHECK_NOTHROW(pendulum_example().validate());
  CHECK_NOTHROW(sincos_example().validate());
  ControlProblem bad = linear_example();
  bad.control_box = {1.0, -1.0};
  CHECK_THROWS_AS(bad.validate(), ParameterError);
}

TEST_CASE("ADP simulation") {
  ControlProblem frozen = linear_example();
  frozen.control_box = {0.0, 0.0};
  const Trajectory t = simulate_adp(frozen, QuadraticValue(Eigen::MatrixXd::Ones(1, 1), 0.0),
                                    Eigen::VectorXd::Constant(1, 7.0), 20);
  REQUIRE(t.states.size() == 21);
  for (const auto& x : t.states) CHECK(x(0) == 7.0);
  CHECK(t.discounted_cost == doctest::Approx(49.0 * (1.0 - std::pow(0.95, 20)) / 0.05));
  CHECK_THROWS_AS(simulate_adp(frozen, QuadraticValue::zero(1), Eigen::VectorXd::Constant(1, 500.0), 5),
                  ParameterError);

  // Leaving the box is clipped and counted.
  ControlProblem tight = linear_example();
  tight.state_box = {Eigen::VectorXd::Constant(1, -1.0), Eigen::VectorXd::Constant(1, 1.0)};
  tight.initial_box = tight.state_box;
  tight.reference_control = [](const Eigen::VectorXd&) { return 1.0; };
  const Trajectory clipped = simulate_adp(tight, QuadraticValue::zero(1), Eigen::VectorXd::Constant(1, -1.0), 3);
  CHECK(clipped.clip_events == 3);
  for (const auto& x : clipped.states) CHECK(tight.state_box.contains(x));
}

TEST_CASE("feedback linearization") {
  const FeedbackLinController ctrl;
  CHECK(feedback_lin_control(ctrl, Eigen::Vector2d(0.0, 0.0)) == doctest::Approx(1.0));
  CHECK(feedback_lin_control(ctrl, Eigen::Vector2d(0.0, std::numbers::pi / 6)) ==
        doctest::Approx(1.0 - (2.0 * 0.5) / std::cos(std::numbers::pi / 6)).epsilon(1e-14));
  CHECK(pole_placement_gains(-1.0, -1.0) == std::pair{1.0, 2.0});
  CHECK_THROWS_AS(feedback_lin_control(ctrl, Eigen::Vector2d(0.0, std::numbers::pi / 2)), SingularityError);
}

TEST_CASE("feedback-linearized closed loop follows (s + 1)^2") {
  const ControlProblem problem = sincos_example();
  const FeedbackLinController ctrl;
  const FeedbackPolicy policy = [&](const Eigen::VectorXd& x) { return feedback_lin_control(ctrl, x); };
  const Eigen::Vector2d x0(-1.0, 0.0);

  // Nearly continuous feedback: e(t) = -(1 + t) e^(-t).
  const Trajectory fine = simulate_sampled(problem, sincos_rhs(), policy, x0, 8000, 1e-3, 1e-3);
  for (std::size_t k = 0; k < fine.states.size(); k += 100) {
    const double t = 1e-3 * static_cast<double>(k);
    CHECK(fine.states[k](0) == doctest::Approx(-(1.0 + t) * std::exp(-t)).epsilon(1e-3));
  }

  // Sample-and-hold at 0.1 s: the tracking error shrinks monotonically.
  const Trajectory held = simulate_sampled(problem, sincos_rhs(), policy, x0, 150);
  for (std::size_t k = 1; k < held.states.size(); ++k) {
    CHECK(std::abs(held.states[k](0)) <= std::abs(held.states[k - 1](0)) + 1e-12);
  }
  double max_u = 0.0;
  for (double u : held.controls) max_u = std::max(max_u, std::abs(u));
  CHECK(max_u <= 1.0 + 1e-12);
}

TEST_CASE("RK4 integration") {
  const ContinuousDynamics decay = [](const Eigen::VectorXd& x, double) -> Eigen::VectorXd { return -x; };
  const Eigen::VectorXd x = integrate_held(decay, Eigen::VectorXd::Ones(1), 0.0, 1.0);
  CHECK(x(0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
  CHECK_THROWS_AS(integrate_held(decay, Eigen::VectorXd::Ones(1), 0.0, 1.0, 0.0), ParameterError);
}

TEST_CASE("discounted scalar Riccati oracle") {
  CHECK(riccati_oracle(1.0, -0.5, 0.0, 1.0, 0.95) == 0.0);
  CHECK(riccati_oracle(1.0, -0.5, 3.0, 1.0, 1e-9) == doctest::Approx(3.0).epsilon(1e-8));
  CHECK(riccati_oracle(1.0, -0.5, 1.0, 1.0, 0.95) == doctest::Approx(2.4843165822212052).epsilon(1e-12));
  CHECK_THROWS_AS(riccati_oracle(1.0, -0.5, 1.0, 1.0, 1.0), ParameterError);
}

TEST_CASE("cost slices") {
  const std::vector<double> grid = linspace(-std::numbers::pi / 2, std::numbers::pi / 2, 101);
  const auto quad = cost_slice(QuadraticValue(Eigen::MatrixXd::Identity(2, 2), 0.0), 0, grid);
  for (const auto& [c, v] : quad) CHECK(v == doctest::Approx(c * c));
  const auto flat = cost_slice(QuadraticValue(Eigen::MatrixXd::Zero(2, 2), 5.0), 1, grid);
  for (const auto& [c, v] : flat) CHECK(v == 5.0);
  CHECK(slice_sup_distance(quad, quad) == 0.0);
  CHECK_THROWS_AS(cost_slice(QuadraticValue::zero(2), 2, grid), ParameterError);
}

TEST_CASE("gridded truncations of the benchmarks contract with modulus alpha") {
  for (const ControlProblem& problem : {pendulum_example(), sincos_example()}) {
    const GriddedControlModel model(problem, {9, 9}, 5);
    Policy mu(static_cast<std::size_t>(model.num_states()));
    for (std::size_t x = 0; x < mu.size(); ++x) mu[x] = static_cast<Eigen::Index>(x % 5);
    CHECK(estimate_contraction(model, mu, OperatorKind::policy_evaluation(), 20, 1) <= 0.95 + 1e-9);
    CHECK(estimate_contraction(model, mu, OperatorKind::bellman(), 20, 1) <= 0.95 + 1e-9);
    CHECK(check_monotone(model, mu, WeightProfile::unit_step(), 5, 2));
  }
  const GriddedControlModel line(linear_example(), {5}, 3);
  CostTableXd J(5);
  J << 4.0, 3.0, 2.0, 1.0, 0.0;
  // Grid nodes are -100, -50, 0, 50, 100; the midpoint -25 interpolates to 2.5.
  CHECK(line.interpolate(J, Eigen::VectorXd::Constant(1, -25.0)) == doctest::Approx(2.5));
  CHECK(line.interpolate(J, Eigen::VectorXd::Constant(1, 500.0)) == 0.0);
}
