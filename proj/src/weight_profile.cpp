#include "lpir/weight_profile.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "lpir/errors.hpp"

namespace lpir {

WeightProfile WeightProfile::geometric(double lambda) {
  if (!(lambda >= 0.0 && lambda < 1.0)) throw ParameterError("lambda must lie in [0, 1)");
  return WeightProfile(Kind::Geometric, lambda);
}

WeightProfile WeightProfile::unit_step() { return WeightProfile(Kind::UnitStep, 0.0); }

WeightProfile WeightProfile::delayed_geometric(double beta, Eigen::Index first_label) {
  if (!(beta > 0.0 && beta < 1.0)) throw ParameterError("tail rate beta must lie in (0, 1)");
  if (first_label < 0) throw ParameterError("first state label must be nonnegative");
  WeightProfile w(Kind::DelayedGeometric, beta);
  w.first_label_ = first_label;
  return w;
}

WeightProfile WeightProfile::explicit_table(std::vector<std::vector<double>> rows, double tail_rate) {
  if (!(tail_rate >= 0.0 && tail_rate < 1.0)) throw ParameterError("tail rate must lie in [0, 1)");
  WeightProfile w(Kind::Explicit, tail_rate);
  w.rows_ = std::move(rows);
  return w;
}

double WeightProfile::explicit_remainder(Eigen::Index x) const {
  const auto& row = rows_.at(static_cast<std::size_t>(x));
  return 1.0 - std::accumulate(row.begin(), row.end(), 0.0);
}

double WeightProfile::weight(Eigen::Index x, Eigen::Index step) const {
  if (step < 1) return 0.0;
  switch (kind_) {
    case Kind::Geometric:
      return (1.0 - rate_) * std::pow(rate_, static_cast<double>(step - 1));
    case Kind::UnitStep:
      return step == 1 ? 1.0 : 0.0;
    case Kind::DelayedGeometric: {
      const Eigen::Index d = delay(x);
      if (step <= d) return 0.0;
      return (1.0 - rate_) * std::pow(rate_, static_cast<double>(step - d - 1));
    }
    case Kind::Explicit: {
      const auto& row = rows_.at(static_cast<std::size_t>(x));
      const auto n = static_cast<Eigen::Index>(row.size());
      if (step <= n) return row[static_cast<std::size_t>(step - 1)];
      return explicit_remainder(x) * (1.0 - rate_) * std::pow(rate_, static_cast<double>(step - n - 1));
    }
  }
  return 0.0;
}

double WeightProfile::tail_mass(Eigen::Index x, Eigen::Index n) const {
  if (n <= 0) return 1.0;
  switch (kind_) {
    case Kind::Geometric:
      return std::pow(rate_, static_cast<double>(n));
    case Kind::UnitStep:
      return 0.0;
    case Kind::DelayedGeometric: {
      const Eigen::Index d = delay(x);
      if (n <= d) return 1.0;
      return std::pow(rate_, static_cast<double>(n - d));
    }
    case Kind::Explicit: {
      const auto& row = rows_.at(static_cast<std::size_t>(x));
      const auto len = static_cast<Eigen::Index>(row.size());
      const double rest = explicit_remainder(x);
      if (n >= len) return rest * std::pow(rate_, static_cast<double>(n - len));
      double mass = rest;
      for (Eigen::Index l = n; l < len; ++l) mass += row[static_cast<std::size_t>(l)];
      return mass;
    }
  }
  return 0.0;
}

void WeightProfile::validate(Eigen::Index num_states, double tol) const {
  if (kind_ == Kind::Explicit && static_cast<Eigen::Index>(rows_.size()) < num_states) {
    throw ParameterError("explicit weight table has fewer rows than states");
  }
  for (Eigen::Index x = 0; x < num_states; ++x) {
    if (kind_ == Kind::Explicit) {
      for (double w : rows_[static_cast<std::size_t>(x)]) {
        if (!(w >= 0.0) || !std::isfinite(w)) {
          throw ParameterError("weights must be nonnegative, state " + std::to_string(x));
        }
      }
      if (explicit_remainder(x) < -tol) {
        throw ParameterError("explicit weights exceed total mass one at state " + std::to_string(x));
      }
    }
    // Mass identity sum_{l<=n} w_l + tail(n) = 1 at a few checkpoints.
    double head = 0.0;
    Eigen::Index checked = 0;
    for (Eigen::Index n : {0, 1, 2, 5, 10, 50, 200}) {
      for (; checked < n; ++checked) head += weight(x, checked + 1);
      if (std::abs(head + tail_mass(x, n) - 1.0) > tol) {
        throw ParameterError("weights do not sum to one at state " + std::to_string(x));
      }
    }
  }
}

}  // namespace lpir
