#pragma once

#include <Eigen/Dense>
#include <functional>
#include <utility>
#include <vector>

#include "lpir/weighted_space.hpp"

namespace lpir {

/// A policy: one control index per state.
using Policy = std::vector<Eigen::Index>;

/**
 * Abstract contractive model on a finite state set.
 *
 * Controls at each state are enumerated 0..num_controls(x)-1. evaluate()
 * is the mapping H(x, u, J); discount() is the declared uniform contraction
 * modulus with respect to the weighted sup-norm induced by weight().
 */
template <typename Scalar>
class ContractiveModel {
 public:
  virtual ~ContractiveModel() = default;

  virtual Eigen::Index num_states() const = 0;
  virtual Eigen::Index num_controls(Eigen::Index x) const = 0;
  virtual Scalar evaluate(Eigen::Index x, Eigen::Index u, const CostTable<Scalar>& J) const = 0;
  virtual Scalar discount() const = 0;
  virtual const CostTable<Scalar>& weight() const = 0;
};

/// A model assembled from callables. Handy for small hand-written instances.
template <typename Scalar>
class FunctionModel final : public ContractiveModel<Scalar> {
 public:
  using Evaluator = std::function<Scalar(Eigen::Index, Eigen::Index, const CostTable<Scalar>&)>;

  FunctionModel(std::vector<Eigen::Index> controls_per_state, Evaluator evaluator, Scalar discount,
                CostTable<Scalar> weight)
      : controls_(std::move(controls_per_state)),
        evaluator_(std::move(evaluator)),
        discount_(discount),
        space_(std::move(weight)) {
    if (static_cast<Eigen::Index>(controls_.size()) != space_.size()) {
      throw ModelError("control-count list and weight vector differ in length");
    }
    if (!(discount_ > Scalar(0) && discount_ < Scalar(1))) {
      throw ParameterError("discount must lie in (0, 1)");
    }
  }

  FunctionModel(std::vector<Eigen::Index> controls_per_state, Evaluator evaluator, Scalar discount)
      : FunctionModel(controls_per_state, std::move(evaluator), discount,
                      CostTable<Scalar>::Ones(static_cast<Eigen::Index>(controls_per_state.size()))) {}

  Eigen::Index num_states() const override { return space_.size(); }
  Eigen::Index num_controls(Eigen::Index x) const override { return controls_[static_cast<std::size_t>(x)]; }
  Scalar evaluate(Eigen::Index x, Eigen::Index u, const CostTable<Scalar>& J) const override {
    return evaluator_(x, u, J);
  }
  Scalar discount() const override { return discount_; }
  const CostTable<Scalar>& weight() const override { return space_.weight(); }

 private:
  std::vector<Eigen::Index> controls_;
  Evaluator evaluator_;
  Scalar discount_;
  WeightedSpace<Scalar> space_;
};

}  // namespace lpir
