#pragma once

#include <Eigen/Dense>
#include <vector>

#include "lpir/contractive_model.hpp"
#include "lpir/control_problem.hpp"

namespace lpir {

/**
 * Finite truncation of a ControlProblem: a tensor grid over the state box,
 * a uniform grid of controls, and
 *   H(x, u, J) = g(x, u) + alpha (I J)(clamp(f(x, u))),
 * where I is multilinear interpolation on the state grid. Interpolation is
 * a convex combination, so every T_mu is an alpha-contraction with v = 1.
 */
class GriddedControlModel final : public ContractiveModel<double> {
 public:
  GriddedControlModel(ControlProblem problem, std::vector<std::size_t> points_per_axis, std::size_t control_points);

  Eigen::Index num_states() const override { return static_cast<Eigen::Index>(states_.size()); }
  Eigen::Index num_controls(Eigen::Index) const override { return static_cast<Eigen::Index>(controls_.size()); }
  double evaluate(Eigen::Index x, Eigen::Index u, const CostTableXd& J) const override;
  double discount() const override { return problem_.discount; }
  const CostTableXd& weight() const override { return weight_; }

  const Eigen::VectorXd& state(Eigen::Index x) const { return states_[static_cast<std::size_t>(x)]; }
  double control(Eigen::Index u) const { return controls_[static_cast<std::size_t>(u)]; }

  /// Multilinear interpolation of J at an arbitrary point (clamped to the box).
  double interpolate(const CostTableXd& J, const Eigen::VectorXd& point) const;

 private:
  ControlProblem problem_;
  std::vector<std::vector<double>> axes_;
  std::vector<Eigen::VectorXd> states_;
  std::vector<double> controls_;
  CostTableXd weight_;
};

}  // namespace lpir
