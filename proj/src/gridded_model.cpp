#include "lpir/gridded_model.hpp"

#include <algorithm>
#include <cmath>

#include "lpir/errors.hpp"
#include "lpir/simulation.hpp"

namespace lpir {

GriddedControlModel::GriddedControlModel(ControlProblem problem, std::vector<std::size_t> points_per_axis,
                                         std::size_t control_points)
    : problem_(std::move(problem)) {
  problem_.validate();
  const auto dim = static_cast<std::size_t>(problem_.state_dim);
  if (points_per_axis.size() != dim) throw ParameterError("one grid size per state axis is required");
  if (control_points < 1) throw ParameterError("need at least one control point");
  std::size_t total = 1;
  for (std::size_t d = 0; d < dim; ++d) {
    if (points_per_axis[d] < 2) throw ParameterError("each axis needs at least two grid points");
    axes_.push_back(linspace(problem_.state_box.lower(static_cast<Eigen::Index>(d)),
                             problem_.state_box.upper(static_cast<Eigen::Index>(d)), points_per_axis[d]));
    total *= points_per_axis[d];
  }
  // Row-major flattening: the last axis varies fastest.
  states_.reserve(total);
  for (std::size_t flat = 0; flat < total; ++flat) {
    Eigen::VectorXd x(static_cast<Eigen::Index>(dim));
    std::size_t rest = flat;
    for (std::size_t d = dim; d-- > 0;) {
      x(static_cast<Eigen::Index>(d)) = axes_[d][rest % axes_[d].size()];
      rest /= axes_[d].size();
    }
    states_.push_back(std::move(x));
  }
  controls_ = linspace(problem_.control_box.lower, problem_.control_box.upper, control_points);
  weight_ = CostTableXd::Ones(static_cast<Eigen::Index>(total));
}

double GriddedControlModel::interpolate(const CostTableXd& J, const Eigen::VectorXd& point) const {
  const std::size_t dim = axes_.size();
  std::vector<std::size_t> base(dim);
  std::vector<double> frac(dim);
  for (std::size_t d = 0; d < dim; ++d) {
    const auto& axis = axes_[d];
    const double c = std::clamp(point(static_cast<Eigen::Index>(d)), axis.front(), axis.back());
    const double h = (axis.back() - axis.front()) / static_cast<double>(axis.size() - 1);
    auto i = static_cast<std::size_t>(std::floor((c - axis.front()) / h));
    i = std::min(i, axis.size() - 2);
    base[d] = i;
    frac[d] = std::clamp((c - axis[i]) / h, 0.0, 1.0);
  }
  double value = 0.0;
  for (std::size_t corner = 0; corner < (std::size_t{1} << dim); ++corner) {
    double w = 1.0;
    std::size_t flat = 0;
    for (std::size_t d = 0; d < dim; ++d) {
      const bool upper = (corner >> d) & 1U;
      w *= upper ? frac[d] : 1.0 - frac[d];
      flat = flat * axes_[d].size() + base[d] + (upper ? 1 : 0);
    }
    if (w != 0.0) value += w * J(static_cast<Eigen::Index>(flat));
  }
  return value;
}

double GriddedControlModel::evaluate(Eigen::Index x, Eigen::Index u, const CostTableXd& J) const {
  const Eigen::VectorXd& s = state(x);
  const double c = control(u);
  return problem_.stage_cost(s, c) + problem_.discount * interpolate(J, problem_.state_box.clamp(problem_.step(s, c)));
}

}  // namespace lpir
