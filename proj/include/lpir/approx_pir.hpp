#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string_view>
#include <utility>
#include <vector>

#include "lpir/control_problem.hpp"
#include "lpir/exact_solvers.hpp"
#include "lpir/quadratic_value.hpp"
#include "lpir/random.hpp"

namespace lpir {

/**
 * How rollout lengths L are drawn.
 *
 * Unbiased: P(L = l) = (1 - lambda) lambda^(l-1), mean 1 / (1 - lambda); the
 * expectation of T_mu^L J is exactly T_mu^(lambda) J.
 * Paper: P(L = l) = lambda (1 - lambda)^(l-1), mean 1 / lambda.
 */
enum class HorizonMode { Unbiased, Paper };

/// Evaluation step used by train(): randomized lambda-PIR, one-step VI, or fixed-horizon OPI.
enum class EvaluationScheme { LambdaPir, ValueIteration, Optimistic };

enum class SampleBranch { OneStep, Rollout };

std::string_view horizon_mode_name(HorizonMode mode);
std::string_view scheme_name(EvaluationScheme scheme);
std::string_view sample_branch_name(SampleBranch branch);

struct TrainConfig {
  double lambda = 0.1;
  std::size_t iterations = 5;  // K
  std::size_t samples = 100;   // S
  ProbabilitySchedule probability = constant_probability(0.5);  // p_k, k = 1..K
  std::uint64_t seed = 0;
  HorizonMode mode = HorizonMode::Paper;
  double ridge = 1e-8;
  bool per_sample_branch = false;  // draw the coin per sample instead of per iteration
  EvaluationScheme scheme = EvaluationScheme::LambdaPir;
  std::size_t opi_horizon = 10;
  std::size_t grid_points_per_axis = 21;  // evaluation grid for sup-differences

  /// Throws ParameterError. S must be at least the parameter count of a state_dim quadratic.
  void validate(Eigen::Index state_dim) const;
};

/// Rollout length L >= 1.
std::size_t draw_horizon(double lambda, HorizonMode mode, Rng& rng);

struct RolloutResult {
  double value = 0.0;
  std::size_t clip_events = 0;
};

/**
 * L greedy steps from x0:
 *   v = sum_{l < L} alpha^l g(x_l, u_l) + alpha^L J(x_L, theta),
 * with x_{l+1} = f(x_l, u_l) clipped to the state box.
 */
RolloutResult rollout_target(const ControlProblem& problem, const QuadraticValue& theta, const Eigen::VectorXd& x0,
                             std::size_t horizon);

struct SamplePair {
  Eigen::VectorXd x0;
  double target = 0.0;
  SampleBranch branch = SampleBranch::OneStep;
  std::size_t horizon = 1;
  std::size_t clip_events = 0;
};

/**
 * The S regression pairs of iteration k (k >= 1).
 *
 * The branch coin comes from stream (seed, "branch", k) and decides every
 * sample of the iteration, unless per_sample_branch is set, in which case
 * sample s uses (seed, "branch", k, s). x0 and L come from (seed, "sample", k, s).
 */
std::vector<SamplePair> collect_samples(const ControlProblem& problem, const QuadraticValue& theta,
                                        const TrainConfig& config, std::size_t k);

struct FitResult {
  QuadraticValue theta;
  double unconstrained_residual = 0.0;  // sum of squared residuals of the ridge solve
  double objective = 0.0;               // sum of squared residuals of the returned theta
  bool projected = false;               // eigenvalue clipping changed P
  bool kept_incumbent = false;          // the previous theta fit better and was returned
};

/// Sum over samples of (J(x_s, theta) - v_s)^2.
double regression_objective(const std::vector<SamplePair>& samples, const QuadraticValue& theta);

/**
 * Ridge least squares on the quadratic features, PSD projection by
 * eigenvalue clipping, offset refit for the projected P, then fallback to
 * prev_theta if it has the smaller objective.
 */
FitResult fit_theta(const std::vector<SamplePair>& samples, const QuadraticValue& prev_theta, double ridge = 1e-8);

struct TrainRecord {
  std::size_t k = 0;
  std::string_view branch;  // "one-step", "rollout" or "mixed"
  QuadraticValue theta;
  double residual = 0.0;
  double objective = 0.0;
  double grid_sup_diff = 0.0;  // sup over the evaluation grid of |J(., theta_k) - J(., theta_{k-1})|
  std::size_t samples = 0;
  std::size_t simulated_steps = 0;  // sample budget: sum of rollout lengths
  std::size_t clip_events = 0;
  bool projected = false;
  bool kept_incumbent = false;
};

struct TrainLog {
  QuadraticValue initial;
  std::vector<TrainRecord> records;
};

/// Evaluation grid over the state box, grid_points_per_axis per axis.
std::vector<Eigen::VectorXd> evaluation_grid(const ControlProblem& problem, std::size_t points_per_axis);

/// K rounds of collect_samples + fit_theta starting from theta0 (which must be admissible).
std::pair<QuadraticValue, TrainLog> train(const ControlProblem& problem, const TrainConfig& config,
                                          const QuadraticValue& theta0);

}  // namespace lpir
