#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <utility>

#include "lpir/errors.hpp"
#include "lpir/random.hpp"

namespace lpir {

/// A cost function J on a finite (truncated) state set.
template <typename Scalar>
using CostTable = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using CostTableXd = CostTable<double>;

/// Weighted sup-norm max_x |J(x)| / v(x). Zero on an empty table.
template <typename Derived, typename WeightDerived>
typename Derived::Scalar weighted_norm(const Eigen::MatrixBase<Derived>& J,
                                       const Eigen::MatrixBase<WeightDerived>& v) {
  if (J.size() == 0) return typename Derived::Scalar(0);
  return (J.array().abs() / v.array()).maxCoeff();
}

/// True when lhs(x) <= rhs(x) + tol * v(x) at every state.
template <typename A, typename B, typename W>
bool pointwise_leq(const Eigen::MatrixBase<A>& lhs, const Eigen::MatrixBase<B>& rhs,
                   const Eigen::MatrixBase<W>& v, typename A::Scalar tol) {
  return ((lhs - rhs).array() <= tol * v.array()).all();
}

/// The space B(X) restricted to a finite state set: a positive weight per state.
template <typename Scalar>
class WeightedSpace {
 public:
  explicit WeightedSpace(CostTable<Scalar> weight) : weight_(std::move(weight)) {
    for (Eigen::Index x = 0; x < weight_.size(); ++x) {
      if (!(weight_(x) > Scalar(0)) || !std::isfinite(static_cast<double>(weight_(x)))) {
        throw ParameterError("weight v(x) must be positive and finite");
      }
    }
  }

  static WeightedSpace uniform(Eigen::Index num_states) {
    return WeightedSpace(CostTable<Scalar>::Ones(num_states));
  }

  Eigen::Index size() const { return weight_.size(); }
  const CostTable<Scalar>& weight() const { return weight_; }

  template <typename Derived>
  Scalar norm(const Eigen::MatrixBase<Derived>& J) const {
    return weighted_norm(J, weight_);
  }

  /// Componentwise uniform on [-radius v(x), radius v(x)].
  CostTable<Scalar> random_cost(Rng& rng, Scalar radius = Scalar(10)) const {
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    CostTable<Scalar> J(weight_.size());
    for (Eigen::Index x = 0; x < J.size(); ++x) {
      J(x) = radius * weight_(x) * static_cast<Scalar>(unit(rng));
    }
    return J;
  }

 private:
  CostTable<Scalar> weight_;
};

}  // namespace lpir
