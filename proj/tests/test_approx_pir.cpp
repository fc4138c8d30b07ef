#include <doctest.h>

#include <cmath>

#include "lpir/approx_pir.hpp"
#include "lpir/benchmarks.hpp"
#include "lpir/operators.hpp"
#include "lpir/serialization.hpp"
#include "support/generators.hpp"

using namespace lpir;

namespace {

ControlProblem interior_linear() {
  ControlProblem p = linear_example();
  p.initial_box = {Eigen::VectorXd::Constant(1, -1.0), Eigen::VectorXd::Constant(1, 1.0)};
  return p;
}

std::vector<SamplePair> samples_from(const QuadraticValue& truth, std::size_t count, double noise, std::uint64_t seed) {
  Rng rng = make_stream(seed, "fit-data", {});
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::normal_distribution<double> eps(0.0, noise > 0.0 ? noise : 1.0);
  std::vector<SamplePair> out;
  for (std::size_t s = 0; s < count; ++s) {
    SamplePair pair;
    pair.x0 = Eigen::VectorXd::NullaryExpr(truth.dimension(), [&] { return unit(rng); });
    pair.target = truth(pair.x0) + (noise > 0.0 ? eps(rng) : 0.0);
    out.push_back(std::move(pair));
  }
  return out;
}

}  // namespace

TEST_CASE("geometric horizons") {
  const int draws = 100000;
  SUBCASE("paper mode has mean 1 / lambda") {
    Rng rng = make_stream(1, "horizon", {});
    double sum = 0.0;
    for (int i = 0; i < draws; ++i) sum += static_cast<double>(draw_horizon(0.1, HorizonMode::Paper, rng));
    CHECK(std::abs(sum / draws - 10.0) <= 0.3);
  }
  SUBCASE("unbiased mode has mean 1 / (1 - lambda)") {
    Rng rng = make_stream(2, "horizon", {});
    double sum = 0.0;
    for (int i = 0; i < draws; ++i) sum += static_cast<double>(draw_horizon(0.5, HorizonMode::Unbiased, rng));
    const double sd = std::sqrt(0.5) / 0.5;
    CHECK(std::abs(sum / draws - 2.0) <= 3.0 * sd / std::sqrt(draws));
  }
  SUBCASE("small lambda collapses to one step") {
    Rng rng = make_stream(3, "horizon", {});
    int ones = 0;
    for (int i = 0; i < draws; ++i) ones += draw_horizon(0.01, HorizonMode::Unbiased, rng) == 1 ? 1 : 0;
    CHECK(static_cast<double>(ones) / draws >= 0.99 - 3.0 * std::sqrt(0.99 * 0.01 / draws));
  }
  Rng rng = make_stream(4, "horizon", {});
  CHECK_THROWS_AS(draw_horizon(0.0, HorizonMode::Paper, rng), ParameterError);
  CHECK_THROWS_AS(draw_horizon(1.0, HorizonMode::Unbiased, rng), ParameterError);
}

TEST_CASE("unbiased horizons reproduce the lambda operator in expectation") {
  const TabularMdp one = lpir::testing::single_state_mdp(1.0, 0.5);
  const double lambda = 0.5;
  const double target = apply_T_lambda(one, Policy{0}, CostTableXd::Zero(1), lambda, 1e-14)(0);
  Rng rng = make_stream(8, "unbiased", {});
  const int draws = 100000;
  double sum = 0.0, sum_sq = 0.0;
  for (int i = 0; i < draws; ++i) {
    const std::size_t L = draw_horizon(lambda, HorizonMode::Unbiased, rng);
    CostTableXd J = CostTableXd::Zero(1);
    for (std::size_t l = 0; l < L; ++l) J = bellman_mu_linear(one, Policy{0}, J);
    sum += J(0);
    sum_sq += J(0) * J(0);
  }
  const double mean = sum / draws;
  const double se = std::sqrt((sum_sq / draws - mean * mean) / draws);
  CHECK(std::abs(mean - target) <= 3.0 * se);
}

TEST_CASE("rollout targets") {
  const ControlProblem linear = linear_example();
  const QuadraticValue unit(Eigen::MatrixXd::Ones(1, 1), 0.0);
  const Eigen::VectorXd x0 = Eigen::VectorXd::Ones(1);

  CHECK(rollout_target(linear, unit, x0, 1).value == doctest::Approx(greedy_control(linear, unit, x0).objective));

  ControlProblem free = linear;
  free.state_cost.setZero();
  free.control_cost = 0.0;
  const QuadraticValue offset(Eigen::MatrixXd::Zero(1, 1), 4.0);
  CHECK(rollout_target(free, offset, x0, 3).value == doctest::Approx(std::pow(0.95, 3) * 4.0));

  // Two greedy steps unrolled by hand. With J = x^2 the greedy law is u = k x.
  const double k = 0.95 * 0.5 / (1.0 + 0.95 * 0.25);
  const double u0 = k * 1.0;
  const double x1 = 1.0 - 0.5 * u0;
  const double u1 = k * x1;
  const double x2 = x1 - 0.5 * u1;
  const double expected = (1.0 + u0 * u0) + 0.95 * (x1 * x1 + u1 * u1) + 0.95 * 0.95 * x2 * x2;
  CHECK(rollout_target(linear, unit, x0, 2).value == doctest::Approx(expected).epsilon(1e-14));
  CHECK_THROWS_AS(rollout_target(linear, unit, x0, 0), ParameterError);
}

TEST_CASE("sample collection") {
  const ControlProblem problem = interior_linear();
  const QuadraticValue theta(Eigen::MatrixXd::Ones(1, 1), 0.0);
  TrainConfig c;
  c.samples = 3;
  c.seed = 4;

  c.probability = constant_probability(1.0);
  for (const auto& s : collect_samples(problem, theta, c, 1)) {
    CHECK(s.branch == SampleBranch::OneStep);
    CHECK(s.horizon == 1);
    CHECK(problem.initial_box.contains(s.x0));
  }

  c.probability = constant_probability(0.5);
  const auto a = collect_samples(problem, theta, c, 2);
  const auto b = collect_samples(problem, theta, c, 2);
  REQUIRE(a.size() == 3);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].x0(0) == b[i].x0(0));
    CHECK(a[i].target == b[i].target);
    CHECK(a[i].horizon == b[i].horizon);
    CHECK(a[i].branch == a[0].branch);
  }

  c.samples = 1;
  c.lambda = 0.9;
  int one_step = 0;
  const int iterations = 10000;
  for (int k = 1; k <= iterations; ++k) {
    one_step += collect_samples(problem, theta, c, static_cast<std::size_t>(k))[0].branch == SampleBranch::OneStep;
  }
  CHECK(std::abs(static_cast<double>(one_step) / iterations - 0.5) <= 0.02);

  c.samples = 200;
  c.per_sample_branch = true;
  const auto mixed = collect_samples(problem, theta, c, 1);
  std::size_t mixed_one_step = 0;
  for (const auto& s : mixed) mixed_one_step += s.branch == SampleBranch::OneStep;
  CHECK(mixed_one_step > 0);
  CHECK(mixed_one_step < mixed.size());
}

TEST_CASE("fitting quadratic values") {
  SUBCASE("consistent data is recovered") {
    Eigen::Matrix2d P0;
    P0 << 2.0, 0.5, 0.5, 1.0;
    const QuadraticValue truth(P0, -0.7);
    const FitResult fit = fit_theta(samples_from(truth, 50, 0.0, 1), QuadraticValue::zero(2));
    CHECK((fit.theta.P() - P0).cwiseAbs().maxCoeff() <= 1e-8);
    CHECK(std::abs(fit.theta.offset() + 0.7) <= 1e-8);
    CHECK_FALSE(fit.projected);
  }
  SUBCASE("a concave fit is clipped to a = 0 with b the mean target") {
    const QuadraticValue concave(Eigen::MatrixXd::Constant(1, 1, -1.0), 3.0);
    const auto samples = samples_from(concave, 40, 0.0, 2);
    const FitResult fit = fit_theta(samples, QuadraticValue::zero(1));
    double mean = 0.0;
    for (const auto& s : samples) mean += s.target / static_cast<double>(samples.size());
    CHECK(fit.projected);
    CHECK(fit.theta.P()(0, 0) == 0.0);
    CHECK(fit.theta.offset() == doctest::Approx(mean).epsilon(1e-12));
  }
  SUBCASE("noisy data gives errors of the noise order") {
    Eigen::Matrix2d P0;
    P0 << 1.0, -0.3, -0.3, 0.8;
    const QuadraticValue truth(P0, 0.4);
    const FitResult fit = fit_theta(samples_from(truth, 200, 1e-3, 3), QuadraticValue::zero(2));
    CHECK((fit.theta.P() - P0).cwiseAbs().maxCoeff() <= 5e-3);
    CHECK(std::abs(fit.theta.offset() - 0.4) <= 5e-3);
  }
  SUBCASE("rank deficiency and too few samples are fit errors") {
    std::vector<SamplePair> degenerate(10);
    for (auto& s : degenerate) {
      s.x0 = Eigen::Vector2d::Zero();
      s.target = 1.0;
    }
    CHECK_THROWS_AS(fit_theta(degenerate, QuadraticValue::zero(2), 0.0), FitError);
    CHECK_THROWS_AS(fit_theta(samples_from(QuadraticValue::zero(2), 3, 0.0, 4), QuadraticValue::zero(2)), FitError);
  }
  SUBCASE("the returned objective never exceeds the incumbent's") {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
      Rng rng = make_stream(seed, "incumbent", {});
      std::uniform_real_distribution<double> unit(-1.0, 1.0);
      Eigen::Matrix2d A = Eigen::Matrix2d::NullaryExpr([&] { return unit(rng); });
      const QuadraticValue indefinite(A + A.transpose(), unit(rng));
      Eigen::Matrix2d L = Eigen::Matrix2d::NullaryExpr([&] { return unit(rng); });
      const QuadraticValue incumbent(L * L.transpose(), unit(rng));
      const auto samples = samples_from(indefinite, 30, 0.1, seed);
      const FitResult fit = fit_theta(samples, incumbent);
      CHECK(fit.objective <= regression_objective(samples, incumbent) + 1e-9);
      CHECK(fit.theta.is_admissible());
    }
  }
}

TEST_CASE("training") {
  const ControlProblem problem = interior_linear();
  TrainConfig c;
  c.lambda = 0.5;

  SUBCASE("K = 0 returns theta0") {
    c.iterations = 0;
    const QuadraticValue theta0(Eigen::MatrixXd::Constant(1, 1, 0.3), 1.0);
    const auto [theta, log] = train(problem, c, theta0);
    CHECK(theta.P() == theta0.P());
    CHECK(theta.offset() == theta0.offset());
    CHECK(log.records.empty());
  }
  SUBCASE("invalid configurations are rejected") {
    TrainConfig bad = c;
    bad.samples = 1;
    CHECK_THROWS_AS(train(problem, bad, QuadraticValue::zero(1)), ParameterError);
    bad = c;
    bad.lambda = 1.0;
    CHECK_THROWS_AS(train(problem, bad, QuadraticValue::zero(1)), ParameterError);
    CHECK_THROWS_AS(train(problem, c, QuadraticValue(Eigen::MatrixXd::Constant(1, 1, -1.0), 0.0)), ParameterError);
  }
  SUBCASE("identical inputs give identical logs, and every iterate is admissible") {
    const ControlProblem pendulum = pendulum_example();
    TrainConfig p;
    p.seed = 3;
    const auto first = train(pendulum, p, QuadraticValue::zero(2));
    const auto second = train(pendulum, p, QuadraticValue::zero(2));
    CHECK(trainlog_to_json(first.second).dump() == trainlog_to_json(second.second).dump());
    for (const auto& r : first.second.records) CHECK(r.theta.min_eigenvalue() >= -1e-10);
  }
  SUBCASE("two iterations shrink the grid sup-difference unless a rollout follows a one-step start") {
    int checked = 0;
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
      c.seed = seed;
      c.iterations = 2;
      const auto [theta, log] = train(problem, c, QuadraticValue::zero(1));
      if (log.records[0].branch == "one-step" && log.records[1].branch == "rollout") continue;
      CHECK(log.records[1].grid_sup_diff < log.records[0].grid_sup_diff);
      ++checked;
    }
    CHECK(checked >= 20);
  }
}

TEST_CASE("serialization") {
  CHECK(format_number(0.1) == "0.1");
  CHECK(format_number(-2.5e-300) == "-2.5e-300");
  CHECK(format_number(3.0) == "3");

  const QuadraticValue theta((Eigen::Matrix2d() << 1.0, 0.25, 0.25, 2.0).finished(), -0.5);
  const QuadraticValue back = quadratic_from_json(quadratic_to_json(theta));
  CHECK(back.P() == theta.P());
  CHECK(back.offset() == theta.offset());
  CHECK_THROWS_AS(quadratic_from_json(Json{{"dim", 2}, {"P", {1.0}}, {"b", 0.0}}), ModelError);

  std::ostringstream records;
  IterateRecord r;
  r.k = 3;
  r.branch = Branch::LambdaStep;
  r.error_norm = 0.125;
  r.upper_ok = false;
  write_records_csv(records, {r});
  CHECK(records.str() == "k,branch,err_norm,sandwich_lower_ok,sandwich_upper_ok\n3,lambda,0.125,1,0\n");

  Trajectory t;
  t.sample_time = 0.1;
  t.states = {Eigen::Vector2d(1.0, 0.0), Eigen::Vector2d(0.5, -0.25)};
  t.controls = {0.75};
  t.stage_costs = {1.5};
  std::ostringstream csv;
  write_trajectory_csv(csv, t);
  CHECK(csv.str() == "t,x0,x1,u,stage_cost\n0,1,0,0.75,1.5\n0.1,0.5,-0.25,,\n");
}
