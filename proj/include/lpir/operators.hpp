#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <type_traits>

#include "lpir/contractive_model.hpp"
#include "lpir/errors.hpp"
#include "lpir/random.hpp"
#include "lpir/weight_profile.hpp"

namespace lpir {

/// Cost argument that takes its scalar from the model, so Eigen expressions convert.
template <typename Scalar>
using CostArg = std::type_identity_t<CostTable<Scalar>>;

template <typename Scalar>
void validate_policy(const ContractiveModel<Scalar>& model, const Policy& mu) {
  if (static_cast<Eigen::Index>(mu.size()) != model.num_states()) {
    throw InvalidPolicy("policy length " + std::to_string(mu.size()) + " != number of states " +
                        std::to_string(model.num_states()));
  }
  for (Eigen::Index x = 0; x < model.num_states(); ++x) {
    const Eigen::Index u = mu[static_cast<std::size_t>(x)];
    if (u < 0 || u >= model.num_controls(x)) {
      throw InvalidPolicy("control " + std::to_string(u) + " not in U(" + std::to_string(x) + ")");
    }
  }
}

namespace detail {

template <typename Scalar>
Scalar checked_evaluate(const ContractiveModel<Scalar>& model, Eigen::Index x, Eigen::Index u,
                        const CostArg<Scalar>& J) {
  const Scalar h = model.evaluate(x, u, J);
  if (!std::isfinite(static_cast<double>(h))) {
    throw ModelEvaluationError("H(" + std::to_string(x) + ", " + std::to_string(u) + ", J) is not finite");
  }
  return h;
}

template <typename Scalar>
void check_cost_size(const ContractiveModel<Scalar>& model, const CostArg<Scalar>& J) {
  if (J.size() != model.num_states()) throw ParameterError("cost table size does not match the model");
  if (!J.allFinite()) throw ParameterError("cost table has non-finite entries");
}

// T_mu without re-validating the policy; used inside series loops.
template <typename Scalar>
CostTable<Scalar> policy_step(const ContractiveModel<Scalar>& model, const Policy& mu, const CostArg<Scalar>& J) {
  CostTable<Scalar> out(model.num_states());
  for (Eigen::Index x = 0; x < out.size(); ++x) {
    out(x) = checked_evaluate(model, x, mu[static_cast<std::size_t>(x)], J);
  }
  return out;
}

}  // namespace detail

/// (T_mu J)(x) = H(x, mu(x), J).
template <typename Scalar>
CostTable<Scalar> apply_T_mu(const ContractiveModel<Scalar>& model, const Policy& mu, const CostArg<Scalar>& J) {
  validate_policy(model, mu);
  detail::check_cost_size(model, J);
  return detail::policy_step(model, mu, J);
}

template <typename Scalar>
struct GreedyStep {
  CostTable<Scalar> value;  // TJ
  Policy policy;            // attains TJ; lowest control index on ties
};

/// (TJ)(x) = min_u H(x, u, J) with a minimizing policy.
template <typename Scalar>
GreedyStep<Scalar> apply_T(const ContractiveModel<Scalar>& model, const CostArg<Scalar>& J) {
  detail::check_cost_size(model, J);
  GreedyStep<Scalar> out{CostTable<Scalar>(model.num_states()), Policy(static_cast<std::size_t>(model.num_states()))};
  for (Eigen::Index x = 0; x < model.num_states(); ++x) {
    const Eigen::Index controls = model.num_controls(x);
    if (controls <= 0) throw ModelError("empty control set at state " + std::to_string(x));
    Scalar best = detail::checked_evaluate(model, x, 0, J);
    Eigen::Index arg = 0;
    for (Eigen::Index u = 1; u < controls; ++u) {
      const Scalar h = detail::checked_evaluate(model, x, u, J);
      if (h < best) {
        best = h;
        arg = u;
      }
    }
    out.value(x) = best;
    out.policy[static_cast<std::size_t>(x)] = arg;
  }
  return out;
}

/// Result of a truncated evaluation of sum_l w_l(x) (T_mu^l J)(x).
template <typename Scalar>
struct SeriesEvaluation {
  CostTable<Scalar> value;
  Eigen::Index terms = 0;              // number of summed steps N
  CostTable<Scalar> residual_bound;    // tail(x, N) * M_N(x), guaranteed >= |truncation error|
  Scalar iterate_bound = Scalar(0);    // bound on sup_l ||T_mu^l J||
};

/// Partial sum of the first n terms, with the sup-norm bound on all iterates.
template <typename Scalar>
SeriesEvaluation<Scalar> partial_T_w(const ContractiveModel<Scalar>& model, const Policy& mu,
                                     const CostArg<Scalar>& J, const WeightProfile& w, Eigen::Index n) {
  validate_policy(model, mu);
  detail::check_cost_size(model, J);
  if (n < 0) throw ParameterError("number of terms must be nonnegative");
  const auto& v = model.weight();
  const Scalar alpha = model.discount();

  SeriesEvaluation<Scalar> out;
  out.value = CostTable<Scalar>::Zero(J.size());
  CostTable<Scalar> iterate = J;
  Scalar first_step = Scalar(0);
  Scalar max_norm = Scalar(0);
  Scalar alpha_pow = Scalar(1);
  for (Eigen::Index l = 1; l <= n; ++l) {
    CostTable<Scalar> next = detail::policy_step(model, mu, iterate);
    if (l == 1) first_step = weighted_norm(next - J, v);
    iterate = std::move(next);
    alpha_pow *= alpha;
    max_norm = std::max(max_norm, weighted_norm(iterate, v));
    for (Eigen::Index x = 0; x < J.size(); ++x) {
      const double wl = w.weight(x, l);
      if (wl != 0.0) out.value(x) += static_cast<Scalar>(wl) * iterate(x);
    }
  }
  if (n == 0) first_step = weighted_norm(detail::policy_step(model, mu, J) - J, v);
  const Scalar drift = first_step * alpha_pow / (Scalar(1) - alpha);
  out.terms = n;
  out.residual_bound.resize(J.size());
  for (Eigen::Index x = 0; x < J.size(); ++x) {
    out.residual_bound(x) = static_cast<Scalar>(w.tail_mass(x, n)) * (std::abs(iterate(x)) + v(x) * drift);
  }
  out.iterate_bound = std::max(max_norm, weighted_norm(iterate, v) + drift);
  return out;
}

/**
 * T_mu^(w) J, truncated at the first N whose tail is certified below tol v(x).
 *
 * The bound on all later iterates is M_N(x) = |T^N J(x)| + v(x) a^N ||T J - J|| / (1 - a),
 * which follows from ||T^(m) J - T^(m-1) J|| <= a^(m-1) ||T J - J|| with the
 * declared modulus a. The residual at x is tail_mass(x, N) M_N(x).
 */
template <typename Scalar>
SeriesEvaluation<Scalar> evaluate_T_w(const ContractiveModel<Scalar>& model, const Policy& mu,
                                      const CostArg<Scalar>& J, const WeightProfile& w, std::type_identity_t<Scalar> tol,
                                      Eigen::Index max_terms = 1'000'000) {
  if (!(tol > Scalar(0))) throw ParameterError("series tolerance must be positive");
  validate_policy(model, mu);
  w.validate(model.num_states());
  detail::check_cost_size(model, J);
  const auto& v = model.weight();
  const Scalar alpha = model.discount();
  const Eigen::Index n_states = J.size();

  SeriesEvaluation<Scalar> out;
  out.value = CostTable<Scalar>::Zero(n_states);
  out.residual_bound = CostTable<Scalar>::Zero(n_states);
  CostTable<Scalar> iterate = J;
  Scalar first_step = Scalar(0);
  Scalar max_norm = Scalar(0);
  Scalar alpha_pow = Scalar(1);

  for (Eigen::Index l = 1; l <= max_terms; ++l) {
    CostTable<Scalar> next = detail::policy_step(model, mu, iterate);
    if (l == 1) first_step = weighted_norm(next - J, v);
    iterate = std::move(next);
    alpha_pow *= alpha;
    max_norm = std::max(max_norm, weighted_norm(iterate, v));

    const Scalar drift = first_step * alpha_pow / (Scalar(1) - alpha);
    bool done = true;
    for (Eigen::Index x = 0; x < n_states; ++x) {
      const double wl = w.weight(x, l);
      if (wl != 0.0) out.value(x) += static_cast<Scalar>(wl) * iterate(x);
      const Scalar bound = static_cast<Scalar>(w.tail_mass(x, l)) * (std::abs(iterate(x)) + v(x) * drift);
      out.residual_bound(x) = bound;
      if (bound > tol * v(x)) done = false;
    }
    if (done) {
      out.terms = l;
      out.iterate_bound = std::max(max_norm, weighted_norm(iterate, v) + drift);
      return out;
    }
  }
  throw ConvergenceError("weighted series did not reach tolerance within " + std::to_string(max_terms) + " terms");
}

template <typename Scalar>
CostTable<Scalar> apply_T_w(const ContractiveModel<Scalar>& model, const Policy& mu, const CostArg<Scalar>& J,
                            const WeightProfile& w, std::type_identity_t<Scalar> tol = Scalar(1e-10)) {
  return evaluate_T_w(model, mu, J, w, tol).value;
}

/// T_mu^(lambda) J = (1 - lambda) sum_l lambda^(l-1) T_mu^l J.
template <typename Scalar>
CostTable<Scalar> apply_T_lambda(const ContractiveModel<Scalar>& model, const Policy& mu, const CostArg<Scalar>& J,
                                 double lambda, std::type_identity_t<Scalar> tol = Scalar(1e-10)) {
  if (!(lambda >= 0.0 && lambda < 1.0)) throw ParameterError("lambda must lie in [0, 1)");
  return evaluate_T_w(model, mu, J, WeightProfile::geometric(lambda), tol).value;
}

/// sup_x sum_l w_l(x) a^l over the model's states, the modulus of T_mu^(w).
template <typename Scalar>
Scalar weighted_modulus(const ContractiveModel<Scalar>& model, const WeightProfile& w, double tol = 1e-14) {
  const double alpha = static_cast<double>(model.discount());
  double best = 0.0;
  for (Eigen::Index x = 0; x < model.num_states(); ++x) {
    double sum = 0.0;
    double alpha_pow = 1.0;
    for (Eigen::Index l = 1;; ++l) {
      alpha_pow *= alpha;
      sum += w.weight(x, l) * alpha_pow;
      // remaining terms are at most tail_mass * a^(l+1)
      if (w.tail_mass(x, l) * alpha_pow * alpha <= tol) break;
    }
    best = std::max(best, sum);
  }
  return static_cast<Scalar>(best);
}

/// Which operator estimate_contraction probes.
struct OperatorKind {
  enum class Type { PolicyEvaluation, Bellman, Lambda };
  Type type = Type::PolicyEvaluation;
  double lambda = 0.0;

  static OperatorKind policy_evaluation() { return {Type::PolicyEvaluation, 0.0}; }
  static OperatorKind bellman() { return {Type::Bellman, 0.0}; }
  static OperatorKind lambda_operator(double lambda) { return {Type::Lambda, lambda}; }
};

/// max over random pairs of ||OJ - OJ'|| / ||J - J'||. Deterministic in seed.
template <typename Scalar>
Scalar estimate_contraction(const ContractiveModel<Scalar>& model, const Policy& mu, OperatorKind kind,
                            std::size_t trials, std::uint64_t seed) {
  if (trials < 1) throw ParameterError("at least one trial is required");
  if (kind.type != OperatorKind::Type::Bellman) validate_policy(model, mu);
  const WeightedSpace<Scalar> space(model.weight());
  auto apply = [&](const CostTable<Scalar>& J) -> CostTable<Scalar> {
    switch (kind.type) {
      case OperatorKind::Type::PolicyEvaluation:
        return apply_T_mu(model, mu, J);
      case OperatorKind::Type::Bellman:
        return apply_T(model, J).value;
      case OperatorKind::Type::Lambda:
        return apply_T_lambda(model, mu, J, kind.lambda, Scalar(1e-13));
    }
    return J;
  };
  Scalar worst = Scalar(0);
  for (std::size_t t = 0; t < trials; ++t) {
    Rng rng = make_stream(seed, "contraction", {t});
    const CostTable<Scalar> J = space.random_cost(rng);
    const CostTable<Scalar> K = space.random_cost(rng);
    const Scalar gap = space.norm(J - K);
    if (gap == Scalar(0)) continue;
    worst = std::max(worst, space.norm(apply(J) - apply(K)) / gap);
  }
  return worst;
}

/**
 * Samples pairs J <= J' and checks T_mu^(w) J <= T_mu^(w) J' pointwise.
 *
 * Each trial probes three dominating partners of a random J: J itself, a
 * constant shift J + c v, and J plus a random nonnegative perturbation.
 */
template <typename Scalar>
bool check_monotone(const ContractiveModel<Scalar>& model, const Policy& mu, const WeightProfile& w,
                    std::size_t trials, std::uint64_t seed, std::type_identity_t<Scalar> violation_tol = Scalar(1e-10)) {
  validate_policy(model, mu);
  w.validate(model.num_states());
  const WeightedSpace<Scalar> space(model.weight());
  const auto& v = model.weight();
  const Scalar series_tol = Scalar(1e-13);
  for (std::size_t t = 0; t < trials; ++t) {
    Rng rng = make_stream(seed, "monotone", {t});
    const CostTable<Scalar> J = space.random_cost(rng);
    const CostTable<Scalar> base = apply_T_w(model, mu, J, w, series_tol);
    std::uniform_real_distribution<double> shift(0.0, 10.0);
    CostTable<Scalar> bump(J.size());
    for (Eigen::Index x = 0; x < J.size(); ++x) bump(x) = static_cast<Scalar>(shift(rng)) * v(x);
    const Scalar c = static_cast<Scalar>(shift(rng));
    for (const CostTable<Scalar>& upper : {CostTable<Scalar>(J), CostTable<Scalar>(J + c * v), CostTable<Scalar>(J + bump)}) {
      const CostTable<Scalar> image = apply_T_w(model, mu, upper, w, series_tol);
      if (!pointwise_leq(base, image, v, violation_tol)) return false;
    }
  }
  return true;
}

}  // namespace lpir
