#include "lpir/serialization.hpp"

#include <array>
#include <charconv>

#include "lpir/errors.hpp"

namespace lpir {

std::string format_number(double value) {
  std::array<char, 64> buffer{};
  const auto [end, ec] = std::to_chars(buffer.data(), buffer.data() + buffer.size(), value);
  if (ec != std::errc{}) throw Error("could not format number");
  return {buffer.data(), end};
}

void write_csv_row(std::ostream& out, const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i > 0) out << ',';
    out << fields[i];
  }
  out << '\n';
}

namespace {

std::string flag(bool b) { return b ? "1" : "0"; }

Json vector_to_json(const Eigen::VectorXd& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

}  // namespace

void write_records_csv(std::ostream& out, const std::vector<IterateRecord>& records) {
  write_csv_row(out, {"k", "branch", "err_norm", "sandwich_lower_ok", "sandwich_upper_ok"});
  for (const auto& r : records) {
    write_csv_row(out, {std::to_string(r.k), std::string(branch_name(r.branch)), format_number(r.error_norm),
                        flag(r.lower_ok), flag(r.upper_ok)});
  }
}

Json records_to_json(const SolveResult& result) {
  Json doc;
  doc["converged"] = result.converged;
  doc["iterations"] = result.iterations;
  doc["sandwich_active"] = result.sandwich_active;
  doc["J"] = vector_to_json(result.J);
  doc["policy"] = result.policy;
  Json records = Json::array();
  for (const auto& r : result.records) {
    Json item{{"k", r.k},
              {"branch", branch_name(r.branch)},
              {"err_norm", r.error_norm},
              {"residual", r.residual},
              {"sandwich_lower_ok", r.lower_ok},
              {"sandwich_upper_ok", r.upper_ok},
              {"vi_bound_ok", r.vi_bound_ok}};
    if (r.J.size() > 0) item["J"] = vector_to_json(r.J);
    records.push_back(std::move(item));
  }
  doc["records"] = std::move(records);
  return doc;
}

void write_trainlog_csv(std::ostream& out, const TrainLog& log) {
  write_csv_row(out, {"k", "branch", "residual", "grid_sup_diff"});
  for (const auto& r : log.records) {
    write_csv_row(out, {std::to_string(r.k), std::string(r.branch), format_number(r.residual),
                        format_number(r.grid_sup_diff)});
  }
}

Json trainlog_to_json(const TrainLog& log) {
  Json doc;
  doc["initial"] = quadratic_to_json(log.initial);
  Json records = Json::array();
  for (const auto& r : log.records) {
    records.push_back(Json{{"k", r.k},
                           {"branch", r.branch},
                           {"theta", quadratic_to_json(r.theta)},
                           {"residual", r.residual},
                           {"objective", r.objective},
                           {"grid_sup_diff", r.grid_sup_diff},
                           {"samples", r.samples},
                           {"simulated_steps", r.simulated_steps},
                           {"clip_events", r.clip_events},
                           {"projected", r.projected},
                           {"kept_incumbent", r.kept_incumbent}});
  }
  doc["records"] = std::move(records);
  return doc;
}

Json quadratic_to_json(const QuadraticValue& theta) {
  const Eigen::Index n = theta.dimension();
  Json flat = Json::array();
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) flat.push_back(theta.P()(i, j));
  }
  return Json{{"dim", n}, {"P", std::move(flat)}, {"b", theta.offset()}};
}

QuadraticValue quadratic_from_json(const Json& doc) {
  try {
    const auto n = doc.at("dim").get<Eigen::Index>();
    const auto& flat = doc.at("P");
    if (n < 1) throw ModelError("theta.dim must be positive");
    if (!flat.is_array() || flat.size() != static_cast<std::size_t>(n * n)) {
      throw ModelError("theta.P must hold dim*dim entries in row-major order");
    }
    Eigen::MatrixXd P(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) P(i, j) = flat.at(static_cast<std::size_t>(i * n + j)).get<double>();
    }
    return QuadraticValue(P, doc.at("b").get<double>());
  } catch (const Json::exception& e) {
    throw ModelError(std::string("theta: ") + e.what());
  }
}

void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory) {
  if (trajectory.states.empty()) throw Error("empty trajectory");
  const Eigen::Index dim = trajectory.states.front().size();
  std::vector<std::string> header{"t"};
  for (Eigen::Index i = 0; i < dim; ++i) header.push_back("x" + std::to_string(i));
  header.emplace_back("u");
  header.emplace_back("stage_cost");
  write_csv_row(out, header);
  for (std::size_t k = 0; k < trajectory.states.size(); ++k) {
    std::vector<std::string> row{format_number(static_cast<double>(k) * trajectory.sample_time)};
    for (Eigen::Index i = 0; i < dim; ++i) row.push_back(format_number(trajectory.states[k](i)));
    const bool has_control = k < trajectory.controls.size();
    row.push_back(has_control ? format_number(trajectory.controls[k]) : "");
    row.push_back(has_control ? format_number(trajectory.stage_costs[k]) : "");
    write_csv_row(out, row);
  }
}

void write_slices_csv(std::ostream& out, const std::vector<LabeledSlice>& slices) {
  write_csv_row(out, {"k", "coordinate", "value"});
  for (const auto& slice : slices) {
    for (const auto& [coordinate, value] : slice.points) {
      write_csv_row(out, {std::to_string(slice.k), format_number(coordinate), format_number(value)});
    }
  }
}

}  // namespace lpir
