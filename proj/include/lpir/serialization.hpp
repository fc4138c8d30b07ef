#pragma once

#include <Eigen/Dense>
#include <json.hpp>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "lpir/approx_pir.hpp"
#include "lpir/exact_solvers.hpp"
#include "lpir/quadratic_value.hpp"
#include "lpir/simulation.hpp"

namespace lpir {

using Json = nlohmann::json;

/// Shortest round-trip decimal form, independent of the C locale.
std::string format_number(double value);

/// Comma-separated row terminated by '\n'. Fields are written verbatim.
void write_csv_row(std::ostream& out, const std::vector<std::string>& fields);

/// k, branch, err_norm, sandwich_lower_ok, sandwich_upper_ok
void write_records_csv(std::ostream& out, const std::vector<IterateRecord>& records);
Json records_to_json(const SolveResult& result);

/// k, branch, residual, grid_sup_diff
void write_trainlog_csv(std::ostream& out, const TrainLog& log);
Json trainlog_to_json(const TrainLog& log);

Json quadratic_to_json(const QuadraticValue& theta);
/// Throws ModelError on malformed input.
QuadraticValue quadratic_from_json(const Json& doc);

/// t, x0..x{n-1}, u, stage_cost. The terminal state row leaves u and stage_cost empty.
void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory);

struct LabeledSlice {
  std::size_t k = 0;
  std::vector<std::pair<double, double>> points;
};

/// k, coordinate, value
void write_slices_csv(std::ostream& out, const std::vector<LabeledSlice>& slices);

}  // namespace lpir
