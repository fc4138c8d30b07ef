#include "lpir/approx_pir.hpp"

#include <cmath>
#include <string>

#include "lpir/errors.hpp"
#include "lpir/simulation.hpp"

namespace lpir {

std::string_view horizon_mode_name(HorizonMode mode) {
  return mode == HorizonMode::Unbiased ? "unbiased" : "paper";
}

std::string_view scheme_name(EvaluationScheme scheme) {
  switch (scheme) {
    case EvaluationScheme::LambdaPir: return "lambda-pir";
    case EvaluationScheme::ValueIteration: return "vi";
    case EvaluationScheme::Optimistic: return "opi";
  }
  return "unknown";
}

std::string_view sample_branch_name(SampleBranch branch) {
  return branch == SampleBranch::OneStep ? "one-step" : "rollout";
}

void TrainConfig::validate(Eigen::Index state_dim) const {
  if (scheme == EvaluationScheme::LambdaPir && !(lambda > 0.0 && lambda < 1.0)) {
    throw ParameterError("lambda must lie in (0, 1) when the rollout branch is enabled");
  }
  if (samples < static_cast<std::size_t>(QuadraticValue::parameter_count(state_dim))) {
    throw ParameterError("need at least " + std::to_string(QuadraticValue::parameter_count(state_dim)) +
                         " samples per iteration");
  }
  if (ridge < 0.0) throw ParameterError("ridge must be nonnegative");
  if (scheme == EvaluationScheme::Optimistic && opi_horizon < 1) throw ParameterError("opi_horizon must be >= 1");
  if (!probability) throw ParameterError("probability schedule is empty");
  if (grid_points_per_axis < 2) throw ParameterError("evaluation grid needs at least two points per axis");
}

std::size_t draw_horizon(double lambda, HorizonMode mode, Rng& rng) {
  if (!(lambda > 0.0 && lambda < 1.0)) throw ParameterError("lambda must lie in (0, 1)");
  // std::geometric_distribution(p) counts failures before the first success.
  const double success = mode == HorizonMode::Unbiased ? 1.0 - lambda : lambda;
  std::geometric_distribution<std::size_t> failures(success);
  return 1 + failures(rng);
}

RolloutResult rollout_target(const ControlProblem& problem, const QuadraticValue& theta, const Eigen::VectorXd& x0,
                             std::size_t horizon) {
  if (horizon < 1) throw ParameterError("rollout horizon must be at least 1");
  RolloutResult out;
  Eigen::VectorXd x = x0;
  double discount = 1.0;
  for (std::size_t l = 0; l < horizon; ++l) {
    const double u = greedy_control(problem, theta, x).control;
    out.value += discount * problem.stage_cost(x, u);
    discount *= problem.discount;
    x = problem.step(x, u);
    if (!problem.state_box.contains(x)) {
      ++out.clip_events;
      x = problem.state_box.clamp(x);
    }
  }
  out.value += discount * theta(x);
  return out;
}

namespace {

Eigen::VectorXd draw_initial_state(const Box& box, Rng& rng) {
  Eigen::VectorXd x(box.dimension());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    x(i) = std::uniform_real_distribution<double>(box.lower(i), box.upper(i))(rng);
  }
  return x;
}

bool coin(const TrainConfig& config, std::size_t k, std::initializer_list<std::uint64_t> key) {
  const double p = config.probability(k);
  if (!(p >= 0.0 && p <= 1.0)) throw ParameterError("p_k must lie in [0, 1]");
  Rng rng = make_stream(config.seed, "branch", key);
  return uniform01(rng) < p;
}

}  // namespace

std::vector<SamplePair> collect_samples(const ControlProblem& problem, const QuadraticValue& theta,
                                        const TrainConfig& config, std::size_t k) {
  const bool iteration_one_step = config.scheme == EvaluationScheme::ValueIteration ||
                                  (config.scheme == EvaluationScheme::LambdaPir && !config.per_sample_branch &&
                                   coin(config, k, {k}));
  std::vector<SamplePair> out;
  out.reserve(config.samples);
  for (std::size_t s = 0; s < config.samples; ++s) {
    Rng rng = make_stream(config.seed, "sample", {k, s});
    SamplePair pair;
    pair.x0 = draw_initial_state(problem.initial_box, rng);
    bool one_step = iteration_one_step;
    if (config.scheme == EvaluationScheme::LambdaPir && config.per_sample_branch) one_step = coin(config, k, {k, s});
    if (one_step) {
      pair.branch = SampleBranch::OneStep;
      pair.horizon = 1;
      pair.target = greedy_control(problem, theta, pair.x0).objective;
    } else {
      pair.branch = SampleBranch::Rollout;
      pair.horizon = config.scheme == EvaluationScheme::Optimistic ? config.opi_horizon
                                                                  : draw_horizon(config.lambda, config.mode, rng);
      const RolloutResult r = rollout_target(problem, theta, pair.x0, pair.horizon);
      pair.target = r.value;
      pair.clip_events = r.clip_events;
    }
    out.push_back(std::move(pair));
  }
  return out;
}

double regression_objective(const std::vector<SamplePair>& samples, const QuadraticValue& theta) {
  double sum = 0.0;
  for (const auto& s : samples) {
    const double r = theta(s.x0) - s.target;
    sum += r * r;
  }
  return sum;
}

FitResult fit_theta(const std::vector<SamplePair>& samples, const QuadraticValue& prev_theta, double ridge) {
  if (samples.empty()) throw FitError("no samples to fit");
  if (ridge < 0.0) throw ParameterError("ridge must be nonnegative");
  const Eigen::Index dim = samples.front().x0.size();
  const Eigen::Index params = QuadraticValue::parameter_count(dim);
  const auto S = static_cast<Eigen::Index>(samples.size());
  if (S < params) throw FitError("need at least " + std::to_string(params) + " samples, got " + std::to_string(S));

  // Ridge as row augmentation: [Phi; sqrt(eps) I] theta ~ [v; 0].
  Eigen::MatrixXd design = Eigen::MatrixXd::Zero(S + params, params);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(S + params);
  Eigen::VectorXd targets(S);
  for (Eigen::Index s = 0; s < S; ++s) {
    const auto& pair = samples[static_cast<std::size_t>(s)];
    if (pair.x0.size() != dim) throw FitError("samples have mixed state dimensions");
    design.row(s) = QuadraticValue::features(pair.x0).transpose();
    rhs(s) = pair.target;
    targets(s) = pair.target;
  }
  design.bottomRows(params).diagonal().setConstant(std::sqrt(ridge));

  const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
  if (qr.rank() < params) {
    throw FitError("design matrix has rank " + std::to_string(qr.rank()) + " < " + std::to_string(params) +
                   " after ridge; samples do not excite every quadratic feature");
  }
  const Eigen::VectorXd solution = qr.solve(rhs);

  FitResult out;
  out.unconstrained_residual = (design.topRows(S) * solution - targets).squaredNorm();
  const QuadraticValue raw = QuadraticValue::from_parameters(dim, solution);
  QuadraticValue candidate = raw;
  if (raw.min_eigenvalue() < 0.0) {
    const QuadraticValue clipped = raw.projected();
    double offset = 0.0;
    for (const auto& pair : samples) offset += pair.target - pair.x0.dot(clipped.P() * pair.x0);
    candidate = QuadraticValue(clipped.P(), offset / static_cast<double>(S));
    out.projected = true;
  }
  out.theta = candidate;
  out.objective = regression_objective(samples, candidate);
  if (prev_theta.dimension() == dim) {
    const double incumbent = regression_objective(samples, prev_theta);
    if (incumbent < out.objective) {
      out.theta = prev_theta;
      out.objective = incumbent;
      out.kept_incumbent = true;
    }
  }
  return out;
}

std::vector<Eigen::VectorXd> evaluation_grid(const ControlProblem& problem, std::size_t points_per_axis) {
  const Eigen::Index dim = problem.state_dim;
  std::vector<std::vector<double>> axes;
  std::size_t total = 1;
  for (Eigen::Index d = 0; d < dim; ++d) {
    axes.push_back(linspace(problem.state_box.lower(d), problem.state_box.upper(d), points_per_axis));
    total *= points_per_axis;
  }
  std::vector<Eigen::VectorXd> grid;
  grid.reserve(total);
  for (std::size_t flat = 0; flat < total; ++flat) {
    Eigen::VectorXd x(dim);
    std::size_t rest = flat;
    for (Eigen::Index d = dim; d-- > 0;) {
      x(d) = axes[static_cast<std::size_t>(d)][rest % points_per_axis];
      rest /= points_per_axis;
    }
    grid.push_back(std::move(x));
  }
  return grid;
}

std::pair<QuadraticValue, TrainLog> train(const ControlProblem& problem, const TrainConfig& config,
                                          const QuadraticValue& theta0) {
  problem.validate();
  config.validate(problem.state_dim);
  if (theta0.dimension() != problem.state_dim) throw ParameterError("theta0 has the wrong dimension");
  if (!theta0.is_admissible()) throw ParameterError("theta0 must be symmetric positive semidefinite");

  const std::vector<Eigen::VectorXd> grid = evaluation_grid(problem, config.grid_points_per_axis);
  TrainLog log;
  log.initial = theta0;
  QuadraticValue theta = theta0;
  for (std::size_t k = 1; k <= config.iterations; ++k) {
    const std::vector<SamplePair> samples = collect_samples(problem, theta, config, k);
    const FitResult fit = fit_theta(samples, theta, config.ridge);

    TrainRecord r;
    r.k = k;
    r.theta = fit.theta;
    r.residual = fit.unconstrained_residual;
    r.objective = fit.objective;
    r.samples = samples.size();
    r.projected = fit.projected;
    r.kept_incumbent = fit.kept_incumbent;
    std::size_t one_step = 0;
    for (const auto& s : samples) {
      r.simulated_steps += s.horizon;
      r.clip_events += s.clip_events;
      if (s.branch == SampleBranch::OneStep) ++one_step;
    }
    r.branch = one_step == samples.size() ? "one-step" : (one_step == 0 ? "rollout" : "mixed");
    for (const auto& x : grid) r.grid_sup_diff = std::max(r.grid_sup_diff, std::abs(fit.theta(x) - theta(x)));
    log.records.push_back(std::move(r));
    theta = fit.theta;
  }
  return {theta, std::move(log)};
}

}  // namespace lpir
