#include "lpir/exact_solvers.hpp"

#include <cmath>
#include <string>

#include "lpir/errors.hpp"
#include "lpir/operators.hpp"
#include "lpir/random.hpp"

namespace lpir {

namespace {

constexpr double kInvariantTol = 1e-9;

CostTableXd initial_cost(const TabularMdp& mdp, const SolverConfig& config) {
  if (!config.initial) return CostTableXd::Zero(mdp.num_states());
  if (config.initial->size() != mdp.num_states()) throw ParameterError("initial cost has the wrong size");
  if (!config.initial->allFinite()) throw ParameterError("initial cost has non-finite entries");
  return *config.initial;
}

double norm(const CostTableXd& J) { return J.size() == 0 ? 0.0 : J.cwiseAbs().maxCoeff(); }

// Fills the record fields that depend on J*, T J_k and the VI bound sequence.
IterateRecord make_record(std::size_t k, Branch branch, const CostTableXd& J, const CostTableXd& TJ,
                          const CostTableXd& optimal, const CostTableXd* vi_bound, bool keep) {
  IterateRecord r;
  r.k = k;
  r.branch = branch;
  if (keep) r.J = J;
  r.error_norm = norm(J - optimal);
  r.residual = norm(TJ - J);
  r.lower_ok = ((optimal - J).array() <= kInvariantTol).all();
  r.upper_ok = ((TJ - J).array() <= kInvariantTol).all();
  if (vi_bound != nullptr) r.vi_bound_ok = ((J - *vi_bound).array() <= kInvariantTol).all();
  return r;
}

bool takes_vi_branch(const SolverConfig& config, std::size_t k) {
  const double p = config.probability(k);
  if (!(p >= 0.0 && p <= 1.0)) throw ParameterError("p_k must lie in [0, 1], got " + std::to_string(p) + " at k=" + std::to_string(k));
  Rng rng = make_stream(config.seed, "branch", {k});
  return uniform01(rng) < p;
}

}  // namespace

void SolverConfig::validate() const {
  if (!(lambda >= 0.0 && lambda < 1.0)) throw ParameterError("lambda must lie in [0, 1)");
  if (!(stop_tol > 0.0)) throw ParameterError("stop_tol must be positive");
  if (opi_horizon < 1) throw ParameterError("opi_horizon must be at least 1");
  if (!probability) throw ParameterError("probability schedule is empty");
}

std::string_view branch_name(Branch b) {
  switch (b) {
    case Branch::Initial: return "init";
    case Branch::ValueIteration: return "vi";
    case Branch::LambdaStep: return "lambda";
    case Branch::PolicyEvaluation: return "policy-eval";
    case Branch::Optimistic: return "opi";
  }
  return "unknown";
}

CostTableXd make_dominating_J0(const TabularMdp& mdp) {
  const double c = 2.0 * mdp.stage_cost_bound() / (1.0 - mdp.discount());
  CostTableXd J0 = c * mdp.weight();
  const CostTableXd TJ0 = apply_T(mdp, J0).value;
  if (!((TJ0 - J0).array() <= 1e-12 * std::max(1.0, c)).all()) {
    throw InvariantViolation("constructed J0 does not satisfy T J0 <= J0");
  }
  return J0;
}

SolveResult pi_solve(const TabularMdp& mdp, const SolverConfig& config) {
  config.validate();
  SolveResult out;
  PolicyTable mu = apply_T(mdp, initial_cost(mdp, config)).policy;
  std::vector<CostTableXd> values;
  for (std::size_t k = 1; k <= config.max_iters; ++k) {
    const CostTableXd J = solve_J_mu(mdp, mu);
    values.push_back(J);
    out.iterations = k;
    // Keep the incumbent action unless another is better by more than round-off;
    // this stops tie-induced cycling between equally good policies.
    const GreedyStep<double> greedy = apply_T(mdp, J);
    PolicyTable next = greedy.policy;
    for (Eigen::Index x = 0; x < mdp.num_states(); ++x) {
      const auto xs = static_cast<std::size_t>(x);
      const double incumbent = mdp.evaluate(x, mu[xs], J);
      if (incumbent <= greedy.value(x) + 1e-12 * std::max(1.0, std::abs(greedy.value(x)))) next[xs] = mu[xs];
    }
    if (next == mu) {
      out.converged = true;
      break;
    }
    mu = std::move(next);
  }
  out.J = values.back();
  out.policy = mu;
  for (std::size_t k = 0; k < values.size(); ++k) {
    const CostTableXd TJ = apply_T(mdp, values[k]).value;
    out.records.push_back(make_record(k + 1, Branch::PolicyEvaluation, values[k], TJ, out.J, nullptr, config.keep_snapshots));
  }
  return out;
}

CostTableXd optimal_cost(const TabularMdp& mdp) {
  SolverConfig config;
  config.keep_snapshots = false;
  const SolveResult r = pi_solve(mdp, config);
  if (!r.converged) throw ConvergenceError("policy iteration did not terminate");
  return r.J;
}

SolveResult vi_solve(const TabularMdp& mdp, const SolverConfig& config) {
  config.validate();
  const CostTableXd optimal = optimal_cost(mdp);
  const double alpha = mdp.discount();
  SolveResult out;
  CostTableXd J = initial_cost(mdp, config);
  GreedyStep<double> greedy = apply_T(mdp, J);
  out.records.push_back(make_record(0, Branch::Initial, J, greedy.value, optimal, nullptr, config.keep_snapshots));
  const double initial_error = out.records.front().error_norm;
  double decay = 1.0;

  for (std::size_t k = 0; k < config.max_iters; ++k) {
    CostTableXd next = greedy.value;
    const double step = norm(next - J);
    J = std::move(next);
    greedy = apply_T(mdp, J);
    out.records.push_back(make_record(k + 1, Branch::ValueIteration, J, greedy.value, optimal, nullptr, config.keep_snapshots));
    out.iterations = k + 1;
    decay *= alpha;
    if (out.records.back().error_norm > decay * initial_error + kInvariantTol) {
      throw InvariantViolation("value iteration error exceeded alpha^k ||J0 - J*|| at k=" + std::to_string(k + 1));
    }
    if (step <= config.stop_tol) {
      out.converged = true;
      break;
    }
  }
  out.J = J;
  out.policy = greedy.policy;
  return out;
}

SolveResult opi_solve(const TabularMdp& mdp, const SolverConfig& config) {
  config.validate();
  const CostTableXd optimal = optimal_cost(mdp);
  SolveResult out;
  CostTableXd J = initial_cost(mdp, config);
  GreedyStep<double> greedy = apply_T(mdp, J);
  out.records.push_back(make_record(0, Branch::Initial, J, greedy.value, optimal, nullptr, config.keep_snapshots));

  for (std::size_t k = 0; k < config.max_iters; ++k) {
    // First application of T_mu equals T J_k.
    CostTableXd next = greedy.value;
    for (std::size_t l = 1; l < config.opi_horizon; ++l) next = bellman_mu_linear(mdp, greedy.policy, next);
    const double step = norm(next - J);
    J = std::move(next);
    greedy = apply_T(mdp, J);
    const Branch b = config.opi_horizon == 1 ? Branch::ValueIteration : Branch::Optimistic;
    out.records.push_back(make_record(k + 1, b, J, greedy.value, optimal, nullptr, config.keep_snapshots));
    out.iterations = k + 1;
    if (step <= config.stop_tol) {
      out.converged = true;
      break;
    }
  }
  out.J = J;
  out.policy = greedy.policy;
  return out;
}

SolveResult lambda_pir_solve(const TabularMdp& mdp, const SolverConfig& config) {
  config.validate();
  const CostTableXd optimal = optimal_cost(mdp);
  SolveResult out;
  CostTableXd J = initial_cost(mdp, config);
  GreedyStep<double> greedy = apply_T(mdp, J);

  out.sandwich_active = ((greedy.value - J).array() <= 0.0).all();
  if (config.require_dominating_start && !out.sandwich_active) {
    throw ParameterError("initial cost does not satisfy T J0 <= J0");
  }
  CostTableXd vi_bound = J;  // T^k J0
  out.records.push_back(make_record(0, Branch::Initial, J, greedy.value, optimal,
                                    out.sandwich_active ? &vi_bound : nullptr, config.keep_snapshots));

  for (std::size_t k = 0; k < config.max_iters; ++k) {
    const bool vi = takes_vi_branch(config, k);
    CostTableXd next;
    if (vi || config.lambda == 0.0) {
      next = greedy.value;
    } else {
      next = t_lambda_closed_form(mdp, greedy.policy, J, config.lambda);
    }
    const double step = norm(next - J);
    J = std::move(next);
    greedy = apply_T(mdp, J);
    if (out.sandwich_active) vi_bound = apply_T(mdp, vi_bound).value;

    IterateRecord r = make_record(k + 1, vi ? Branch::ValueIteration : Branch::LambdaStep, J, greedy.value, optimal,
                                  out.sandwich_active ? &vi_bound : nullptr, config.keep_snapshots);
    if (out.sandwich_active && !(r.lower_ok && r.upper_ok && r.vi_bound_ok)) {
      throw InvariantViolation("sandwich invariant violated at k=" + std::to_string(k + 1) +
                               (r.lower_ok ? "" : " (J* <= J_k)") + (r.upper_ok ? "" : " (T J_k <= J_k)") +
                               (r.vi_bound_ok ? "" : " (J_k <= T^k J0)"));
    }
    out.records.push_back(std::move(r));
    out.iterations = k + 1;
    if (step <= config.stop_tol) {
      out.converged = true;
      break;
    }
  }
  out.J = J;
  out.policy = greedy.policy;
  return out;
}

}  // namespace lpir
