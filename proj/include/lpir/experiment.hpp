#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "lpir/approx_pir.hpp"
#include "lpir/control_problem.hpp"
#include "lpir/counterexample.hpp"
#include "lpir/exact_solvers.hpp"
#include "lpir/serialization.hpp"

namespace lpir {

struct Diagnostic {
  std::string field;  // JSON path such as "train.lambda", or "<document>"
  std::string message;
  std::size_t line = 0;  // 1-based source line for syntax errors, 0 otherwise
  std::size_t column = 0;
};

std::string to_string(const Diagnostic& d);

enum class ExitStatus : int { Success = 0, ValidationFailure = 1, InvariantViolation = 2, IoError = 3 };

/// Command-line values that replace fields of the config document.
struct Overrides {
  std::optional<std::string> kind;
  std::optional<std::uint64_t> seed;
  std::optional<std::filesystem::path> output_dir;
  std::optional<std::string> mode;
};

struct ConfigDocument {
  Json document;
  std::filesystem::path base_dir;  // mdp_file paths resolve against this
  std::vector<Diagnostic> diagnostics;
};

/// Parses a JSON config file. Syntax errors become diagnostics with line and column.
ConfigDocument read_config(const std::filesystem::path& path);

Json apply_overrides(Json document, const Overrides& overrides);

struct SimulationSettings {
  std::vector<Eigen::VectorXd> initial_states;
  std::size_t horizon = 100;
  bool continuous_plant = false;
  bool feedback_linearization = false;
  std::pair<double, double> poles{-1.0, -1.0};
  std::optional<QuadraticValue> theta;  // trains first when empty
};

struct SliceSettings {
  Eigen::Index axis = 0;
  std::size_t points = 101;
  std::optional<QuadraticValue> theta;
};

struct CounterexampleSettings {
  double tail_rate = 0.5;
  double alpha = 0.9;
  Eigen::Index n_min = 1;
  Eigen::Index n_max = 20;
  std::optional<Eigen::Index> window;  // 2n + 10 when empty
  Eigen::Index label = 3;
};

struct CompareSettings {
  std::vector<std::string> methods{"vi", "opi", "lambda-pir"};
  Eigen::Index axis = 0;
  std::size_t points = 101;
};

/// A validated experiment. Build with ExperimentConfig::parse.
struct ExperimentConfig {
  std::string kind;     // solve, train, simulate, slice, counterexample, compare
  std::string problem;  // linear, pendulum, sincos, mdp-file
  std::filesystem::path mdp_file;
  std::uint64_t seed = 0;
  std::filesystem::path output_dir = "out";
  std::optional<ControlProblem> control;
  std::string algorithm = "lambda-pir";
  SolverConfig solver;
  std::string initial_cost = "zero";  // zero, dominating or explicit
  TrainConfig train;
  std::optional<QuadraticValue> theta0;
  SimulationSettings simulate;
  SliceSettings slice;
  CounterexampleSettings counterexample;
  CompareSettings compare;
  Json document;  // echoed into the manifest

  /// Never throws; problems are appended to diagnostics.
  static ExperimentConfig parse(const Json& document, const std::filesystem::path& base_dir,
                                std::vector<Diagnostic>& diagnostics);
};

/// Schema and range checks. Pure apart from checking that referenced files load.
std::vector<Diagnostic> validate(const Json& document, const std::filesystem::path& base_dir = {});

/// Hash of a git blob holding content: SHA-1 over "blob <size>\0" + content, hex encoded.
std::string git_blob_hash(std::string_view content);

struct RunResult {
  ExitStatus status = ExitStatus::Success;
  std::vector<std::filesystem::path> artifacts;  // manifest.json first
  std::string message;
};

/// Writes manifest.json, then the artifacts of the experiment kind.
RunResult run(const ExperimentConfig& config, std::ostream& log);

}  // namespace lpir
