#include "lpir/counterexample.hpp"

#include "lpir/errors.hpp"
#include "lpir/operators.hpp"

namespace lpir {

CounterexampleModel::CounterexampleModel(double alpha, Eigen::Index window) : alpha_(alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw ParameterError("alpha must lie in (0, 1)");
  if (window < 1) throw ParameterError("window must hold at least one state");
  weight_ = CostTableXd::LinSpaced(window, 1.0, static_cast<double>(window));
}

double CounterexampleModel::evaluate(Eigen::Index x, Eigen::Index, const CostTableXd& J) const {
  return (1.0 - alpha_) * weight_(x) + alpha_ * J(x);
}

CounterexampleResult counterexample_norm_gap(const CounterexampleParams& params) {
  if (params.truncation < 0) throw ParameterError("truncation index must be nonnegative");
  if (params.window <= params.truncation) throw ParameterError("window M must exceed the truncation index n");
  const CounterexampleModel model(params.alpha, params.window);
  const WeightProfile w = WeightProfile::delayed_geometric(params.tail_rate, 1);
  const Policy mu(static_cast<std::size_t>(params.window), 0);

  const auto partial = partial_T_w(model, mu, model.fixed_point(), w, params.truncation);
  CounterexampleResult out;
  out.pointwise_gap = (partial.value - model.fixed_point()).cwiseAbs();
  out.norm_gap = weighted_norm(partial.value - model.fixed_point(), model.weight());
  return out;
}

}  // namespace lpir
