#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <optional>
#include <string_view>
#include <vector>

#include "lpir/tabular_mdp.hpp"

namespace lpir {

/// p_k as a function of the iteration index k (k = 0 for the first update).
using ProbabilitySchedule = std::function<double(std::size_t)>;

inline ProbabilitySchedule constant_probability(double p) {
  return [p](std::size_t) { return p; };
}

struct SolverConfig {
  double lambda = 0.5;
  ProbabilitySchedule probability = constant_probability(0.5);
  std::size_t max_iters = 10000;
  double stop_tol = 1e-9;
  std::uint64_t seed = 0;
  std::size_t opi_horizon = 10;
  std::optional<CostTableXd> initial;     // J0; zero when empty
  bool require_dominating_start = false;  // demand TJ0 <= J0 up front
  bool keep_snapshots = true;

  /// Throws ParameterError on an out-of-range field. p_k is checked per draw.
  void validate() const;
};

enum class Branch { Initial, ValueIteration, LambdaStep, PolicyEvaluation, Optimistic };

std::string_view branch_name(Branch b);

/// Diagnostics attached to iterate J_k. Comparisons use tolerance 1e-9.
struct IterateRecord {
  std::size_t k = 0;
  Branch branch = Branch::Initial;
  CostTableXd J;             // empty unless snapshots are kept
  double error_norm = 0.0;   // ||J_k - J*||
  double residual = 0.0;     // ||T J_k - J_k||
  bool lower_ok = true;      // J* <= J_k
  bool upper_ok = true;      // T J_k <= J_k
  bool vi_bound_ok = true;   // J_k <= T^k J0
};

struct SolveResult {
  CostTableXd J;
  PolicyTable policy;  // greedy with respect to J
  std::vector<IterateRecord> records;
  bool converged = false;
  std::size_t iterations = 0;
  bool sandwich_active = false;  // T J0 <= J0 held, so sandwich invariants were enforced
};

/// J_{k+1} = T J_k. Checks ||J_k - J*|| <= alpha^k ||J0 - J*|| on every record.
SolveResult vi_solve(const TabularMdp& mdp, const SolverConfig& config);

/// Greedy improvement plus exact evaluation until the policy repeats.
SolveResult pi_solve(const TabularMdp& mdp, const SolverConfig& config);

/// J_{k+1} = T_{mu^k}^l J_k with mu^k greedy at J_k and l = opi_horizon.
SolveResult opi_solve(const TabularMdp& mdp, const SolverConfig& config);

/**
 * lambda-policy iteration with randomization.
 *
 * Iteration k computes the greedy mu^k at J_k, then with probability p_k sets
 * J_{k+1} = T_{mu^k} J_k and otherwise J_{k+1} = T_{mu^k}^(lambda) J_k. The
 * coin for iteration k comes from stream (seed, "branch", k).
 *
 * When T J0 <= J0 holds, J* <= J_k, T J_k <= J_k and J_k <= T^k J0 are
 * checked after every update and a violation beyond 1e-9 throws
 * InvariantViolation.
 */
SolveResult lambda_pir_solve(const TabularMdp& mdp, const SolverConfig& config);

/// J0 = c 1 with c = 2 max|g| / (1 - alpha), so that T J0 <= J0.
CostTableXd make_dominating_J0(const TabularMdp& mdp);

/// Optimal cost by policy iteration from J = 0.
CostTableXd optimal_cost(const TabularMdp& mdp);

}  // namespace lpir
