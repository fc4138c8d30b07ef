#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "lpir/counterexample.hpp"
#include "lpir/operators.hpp"
#include "lpir/tabular_io.hpp"
#include "lpir/tabular_mdp.hpp"
#include "support/generators.hpp"

using namespace lpir;
using lpir::testing::random_mdp;
using lpir::testing::random_policy;
using lpir::testing::single_state_mdp;

namespace {

lpir::testing::MdpShape property_shape() {
  lpir::testing::MdpShape shape;
  shape.min_states = 2;
  shape.max_states = 20;
  shape.max_actions = 4;
  shape.alpha = -1.0;
  return shape;
}

}  // namespace

TEST_CASE("MDP construction validates its kernel") {
  TabularMdp::Action bad{Eigen::Vector2d(0.5, 0.6), Eigen::Vector2d::Zero()};
  TabularMdp::Action good{Eigen::Vector2d(0.5, 0.5), Eigen::Vector2d::Zero()};
  CHECK_THROWS_AS(TabularMdp(0.9, {{bad}, {good}}), ModelError);
  CHECK_THROWS_AS(TabularMdp(1.0, {{good}, {good}}), ParameterError);
  TabularMdp::Action negative{Eigen::Vector2d(1.5, -0.5), Eigen::Vector2d::Zero()};
  CHECK_THROWS_AS(TabularMdp(0.9, {{negative}, {good}}), ModelError);
  CHECK_THROWS_AS(TabularMdp(0.9, {{}, {good}}), ModelError);
}

TEST_CASE("bellman_mu_linear") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    lpir::testing::MdpShape shape;
    shape.min_states = shape.max_states = 4;
    TabularMdp mdp = random_mdp(seed, shape);
    Rng rng = make_stream(seed, "bellman", {});
    const Policy mu = random_policy(mdp, rng);
    const CostTableXd J = WeightedSpace<double>::uniform(4).random_cost(rng);
    CHECK((bellman_mu_linear(mdp, mu, CostTableXd::Zero(4)) - policy_cost(mdp, mu)).cwiseAbs().maxCoeff() <= 1e-15);
    CHECK((bellman_mu_linear(mdp, mu, J) - apply_T_mu(mdp, mu, J)).cwiseAbs().maxCoeff() <= 1e-12);
    const CostTableXd Jmu = solve_J_mu(mdp, mu);
    CHECK((bellman_mu_linear(mdp, mu, Jmu) - Jmu).cwiseAbs().maxCoeff() <= 1e-10);
  }
  TabularMdp mdp = random_mdp(1);
  CHECK_THROWS_AS(bellman_mu_linear(mdp, Policy(1, 0), CostTableXd::Zero(mdp.num_states())), InvalidPolicy);
}

TEST_CASE("t_lambda_closed_form examples") {
  const TabularMdp one = single_state_mdp(1.0, 0.5);
  CHECK(t_lambda_closed_form(one, {0}, CostTableXd::Zero(1), 0.5)(0) == doctest::Approx(4.0 / 3.0).epsilon(1e-14));
  CHECK_THROWS_AS(t_lambda_closed_form(one, {0}, CostTableXd::Zero(1), 1.0), ParameterError);

  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    TabularMdp mdp = random_mdp(seed);
    Rng rng = make_stream(seed, "closed-zero", {});
    const Policy mu = random_policy(mdp, rng);
    const CostTableXd J = WeightedSpace<double>::uniform(mdp.num_states()).random_cost(rng);
    CHECK((t_lambda_closed_form(mdp, mu, J, 0.0).array() == bellman_mu_linear(mdp, mu, J).array()).all());
    const CostTableXd Jmu = solve_J_mu(mdp, mu);
    CHECK((t_lambda_closed_form(mdp, mu, Jmu, 0.7) - Jmu).cwiseAbs().maxCoeff() <= 1e-9);
  }
}

TEST_CASE("closed-form lambda operator agrees with the truncated series") {
  const double tol = 1e-10;
  std::size_t instances = 0;
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    TabularMdp mdp = random_mdp(seed, property_shape());
    Rng rng = make_stream(seed, "closed-vs-series", {});
    const Policy mu = random_policy(mdp, rng);
    const CostTableXd J = WeightedSpace<double>::uniform(mdp.num_states()).random_cost(rng);
    for (double lambda : {0.1, 0.5, 0.9}) {
      const CostTableXd closed = t_lambda_closed_form(mdp, mu, J, lambda);
      const CostTableXd series = apply_T_lambda(mdp, mu, J, lambda, tol);
      CHECK((closed - series).cwiseAbs().maxCoeff() <= 10 * tol);
      ++instances;
    }
  }
  CHECK(instances == 120);
}

TEST_CASE("solve_J_mu") {
  CHECK(solve_J_mu(single_state_mdp(1.0, 0.5), {0})(0) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(solve_J_mu(single_state_mdp(0.0, 0.5), {0})(0) == 0.0);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    TabularMdp mdp = random_mdp(seed, property_shape());
    Rng rng = make_stream(seed, "solve-j-mu", {});
    const Policy mu = random_policy(mdp, rng);
    const CostTableXd Jmu = solve_J_mu(mdp, mu);
    CHECK((bellman_mu_linear(mdp, mu, Jmu) - Jmu).cwiseAbs().maxCoeff() <= 1e-10);

    // Oracle: iterate T_mu to numerical convergence.
    CostTableXd J = CostTableXd::Zero(mdp.num_states());
    for (int k = 0; k < 20000; ++k) {
      const CostTableXd next = bellman_mu_linear(mdp, mu, J);
      const bool done = (next - J).cwiseAbs().maxCoeff() <= 1e-13;
      J = next;
      if (done) break;
    }
    CHECK((J - Jmu).cwiseAbs().maxCoeff() <= 1e-9);
  }
}

TEST_CASE("MDP JSON round trip and diagnostics") {
  TabularMdp mdp = random_mdp(5);
  const nlohmann::json doc = mdp_to_json(mdp);
  const TabularMdp back = mdp_from_json(doc);
  CHECK(back.num_states() == mdp.num_states());
  CHECK(back.discount() == mdp.discount());
  for (Eigen::Index x = 0; x < mdp.num_states(); ++x) {
    REQUIRE(back.num_controls(x) == mdp.num_controls(x));
    for (Eigen::Index u = 0; u < mdp.num_controls(x); ++u) {
      CHECK(back.expected_cost(x, u) == doctest::Approx(mdp.expected_cost(x, u)).epsilon(1e-15));
    }
  }

  nlohmann::json broken = doc;
  broken["P"][0][0][0] = 5.0;
  CHECK_THROWS_AS(mdp_from_json(broken), ModelError);
  broken = doc;
  broken.erase("alpha");
  CHECK_THROWS_WITH_AS(mdp_from_json(broken), doctest::Contains("alpha"), ModelError);
  CHECK_THROWS_AS(load_mdp("/nonexistent/mdp.json"), IoError);

  const auto shipped = std::filesystem::path(LPIR_SOURCE_DIR) / "configs" / "mdp" / "three_state.json";
  const TabularMdp three = load_mdp(shipped);
  CHECK(three.num_states() == 3);
  CHECK(three.num_controls(2) == 1);
}

TEST_CASE("counterexample: norm gap stays at one while pointwise gaps vanish") {
  CHECK(counterexample_norm_gap({0.5, 0.9, 5, 1}).norm_gap == 1.0);
  CHECK(counterexample_norm_gap({0.5, 0.9, 50, 20}).norm_gap == 1.0);
  CHECK_THROWS_AS(counterexample_norm_gap({0.5, 0.9, 20, 20}), ParameterError);

  const auto far = counterexample_norm_gap({0.5, 0.9, 101, 100});
  // The exact gap 3 * 0.5^97 lies below double round-off on values of size 3.
  CHECK(far.gap_at(3) <= 3.0 * std::pow(0.5, 97) + 1e-14);
  CHECK(counterexample_norm_gap({0.5, 0.9, 40, 20}).gap_at(3) == doctest::Approx(3.0 * std::pow(0.5, 17)).epsilon(1e-9));

  const Eigen::Index M = 30;
  double previous = std::numeric_limits<double>::infinity();
  for (Eigen::Index n = 0; n < M; ++n) {
    const auto r = counterexample_norm_gap({0.5, 0.9, M, n});
    CHECK(r.norm_gap == 1.0);
    CHECK(r.gap_at(3) <= previous);
    previous = r.gap_at(3);
  }
  CHECK(previous < 1e-6);

  // The weighted operator is the identity map on the fixed point once all mass is summed.
  const CounterexampleModel model(0.9, 12);
  const auto full = evaluate_T_w(model, Policy(12, 0), model.fixed_point(), WeightProfile::delayed_geometric(0.5), 1e-12);
  CHECK(weighted_norm(full.value - model.fixed_point(), model.weight()) <= 1e-12);
}
