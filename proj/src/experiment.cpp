#include "lpir/experiment.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <memory>
#include <sstream>

#include "lpir/benchmarks.hpp"
#include "lpir/errors.hpp"
#include "lpir/feedback_linearization.hpp"
#include "lpir/simulation.hpp"
#include "lpir/tabular_io.hpp"

namespace lpir {

std::string to_string(const Diagnostic& d) {
  std::string out = d.field.empty() ? "<document>" : d.field;
  if (d.line > 0) out += " (line " + std::to_string(d.line) + ", column " + std::to_string(d.column) + ")";
  return out + ": " + d.message;
}

ConfigDocument read_config(const std::filesystem::path& path) {
  ConfigDocument out;
  out.base_dir = path.parent_path();
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    out.diagnostics.push_back({"<document>", "cannot open config file " + path.string()});
    return out;
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  const std::string text = buffer.str();
  try {
    out.document = Json::parse(text);
  } catch (const Json::parse_error& e) {
    // byte is 1-based and points just past the offending character.
    const std::size_t offset = std::min<std::size_t>(e.byte > 0 ? e.byte - 1 : 0, text.size());
    Diagnostic d{"<document>", "syntax error: " + std::string(e.what()), 1, 1};
    for (std::size_t i = 0; i < offset; ++i) {
      if (text[i] == '\n') {
        ++d.line;
        d.column = 1;
      } else {
        ++d.column;
      }
    }
    out.diagnostics.push_back(std::move(d));
  }
  return out;
}

Json apply_overrides(Json document, const Overrides& overrides) {
  if (!document.is_object()) return document;
  if (overrides.kind) document["kind"] = *overrides.kind;
  if (overrides.seed) document["seed"] = *overrides.seed;
  if (overrides.output_dir) document["output_dir"] = overrides.output_dir->generic_string();
  if (overrides.mode) document["train"]["mode"] = *overrides.mode;
  return document;
}

namespace {

/// Typed, defaulted field access on one JSON object with diagnostics.
class Section {
 public:
  Section(const Json* object, std::string path, std::vector<Diagnostic>& diagnostics)
      : object_(object), path_(std::move(path)), diagnostics_(diagnostics) {
    if (object_ != nullptr && !object_->is_object()) {
      diagnostics_.push_back({path_, "must be an object"});
      object_ = nullptr;
    }
  }

  std::string path(std::string_view key) const {
    return path_.empty() ? std::string(key) : path_ + "." + std::string(key);
  }
  void error(std::string_view key, std::string message) const { diagnostics_.push_back({path(key), std::move(message)}); }

  const Json* raw(std::string_view key) const {
    if (object_ == nullptr) return nullptr;
    const auto it = object_->find(key);
    return it == object_->end() ? nullptr : &*it;
  }
  bool has(std::string_view key) const { return raw(key) != nullptr; }

  Section child(std::string_view key) const { return Section(raw(key), path(key), diagnostics_); }

  void allow_only(std::initializer_list<std::string_view> keys) const {
    if (object_ == nullptr) return;
    for (const auto& [key, value] : object_->items()) {
      if (std::find(keys.begin(), keys.end(), key) == keys.end()) error(key, "unknown field");
    }
  }

  double number(std::string_view key, double fallback) const {
    const Json* v = raw(key);
    if (v == nullptr) return fallback;
    if (!v->is_number()) {
      error(key, "must be a number");
      return fallback;
    }
    const double x = v->get<double>();
    if (!std::isfinite(x)) error(key, "must be finite");
    return x;
  }

  std::uint64_t count(std::string_view key, std::uint64_t fallback, std::uint64_t minimum = 0) const {
    const Json* v = raw(key);
    if (v == nullptr) return fallback;
    if (!v->is_number_integer() || (v->is_number_integer() && !v->is_number_unsigned() && v->get<long long>() < 0)) {
      error(key, "must be a nonnegative integer");
      return fallback;
    }
    const auto n = v->get<std::uint64_t>();
    if (n < minimum) error(key, "must be at least " + std::to_string(minimum));
    return n;
  }

  bool boolean(std::string_view key, bool fallback) const {
    const Json* v = raw(key);
    if (v == nullptr) return fallback;
    if (!v->is_boolean()) {
      error(key, "must be true or false");
      return fallback;
    }
    return v->get<bool>();
  }

  std::string text(std::string_view key, std::string fallback) const {
    const Json* v = raw(key);
    if (v == nullptr) return fallback;
    if (!v->is_string()) {
      error(key, "must be a string");
      return fallback;
    }
    return v->get<std::string>();
  }

  std::string choice(std::string_view key, std::string fallback, std::initializer_list<std::string_view> options) const {
    const Json* v = raw(key);
    if (v == nullptr) return fallback;
    const std::string value = text(key, fallback);
    if (v->is_string() && std::find(options.begin(), options.end(), value) == options.end()) {
      std::string list;
      for (const auto& o : options) list += (list.empty() ? "" : ", ") + std::string(o);
      error(key, "must be one of: " + list);
      return fallback;
    }
    return value;
  }

  static std::optional<Eigen::VectorXd> as_vector(const Json& v) {
    if (!v.is_array() || v.empty()) return std::nullopt;
    Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_number()) return std::nullopt;
      out(static_cast<Eigen::Index>(i)) = v[i].get<double>();
    }
    return out;
  }

  std::optional<Eigen::VectorXd> vector(std::string_view key, Eigen::Index expected) const {
    const Json* v = raw(key);
    if (v == nullptr) return std::nullopt;
    auto out = as_vector(*v);
    if (!out) {
      error(key, "must be a nonempty array of numbers");
    } else if (expected > 0 && out->size() != expected) {
      error(key, "must have " + std::to_string(expected) + " entries");
      return std::nullopt;
    }
    return out;
  }

  std::optional<QuadraticValue> quadratic(std::string_view key, Eigen::Index dim) const {
    const Json* v = raw(key);
    if (v == nullptr) return std::nullopt;
    try {
      QuadraticValue theta = quadratic_from_json(*v);
      if (dim > 0 && theta.dimension() != dim) {
        error(key, "dimension must be " + std::to_string(dim));
        return std::nullopt;
      }
      if (!theta.is_admissible()) {
        error(key, "P must be symmetric positive semidefinite");
        return std::nullopt;
      }
      return theta;
    } catch (const Error& e) {
      error(key, e.what());
      return std::nullopt;
    }
  }

 private:
  const Json* object_;
  std::string path_;
  std::vector<Diagnostic>& diagnostics_;
};

void read_box(const Section& parent, std::string_view key, Box& box) {
  const Section section = parent.child(key);
  if (!parent.has(key)) return;
  section.allow_only({"lower", "upper"});
  const auto lower = section.vector("lower", box.dimension());
  const auto upper = section.vector("upper", box.dimension());
  if (!lower || !upper) {
    if (!section.has("lower") || !section.has("upper")) parent.error(key, "needs both lower and upper");
    return;
  }
  box = Box{*lower, *upper};
  if (box.empty()) parent.error(key, "box is empty");
}

std::optional<ControlProblem> read_control_problem(const std::string& name, const Section& options) {
  options.allow_only({"discount", "a", "state_box", "control_box", "initial_box"});
  const double a = options.number("a", 1.0);
  ControlProblem problem = name == "linear"     ? linear_example()
                           : name == "pendulum" ? pendulum_example()
                                                : sincos_example(a);
  if (options.has("a") && name != "sincos") options.error("a", "only applies to the sincos problem");
  problem.discount = options.number("discount", problem.discount);
  if (!(problem.discount > 0.0 && problem.discount < 1.0)) options.error("discount", "discount out of range (0, 1)");
  read_box(options, "state_box", problem.state_box);
  read_box(options, "initial_box", problem.initial_box);
  if (options.has("control_box")) {
    const Section box = options.child("control_box");
    box.allow_only({"lower", "upper"});
    problem.control_box.lower = box.number("lower", problem.control_box.lower);
    problem.control_box.upper = box.number("upper", problem.control_box.upper);
    if (problem.control_box.empty()) options.error("control_box", "control box is empty");
  }
  try {
    problem.validate();
  } catch (const Error& e) {
    options.error("", e.what());
    return std::nullopt;
  }
  return problem;
}

void read_solver(const Section& s, ExperimentConfig& config, Eigen::Index num_states) {
  s.allow_only({"algorithm", "lambda", "p", "max_iters", "stop_tol", "opi_horizon", "initial",
                "require_dominating_start", "keep_snapshots"});
  config.algorithm = s.choice("algorithm", "lambda-pir", {"lambda-pir", "vi", "pi", "opi"});
  SolverConfig& c = config.solver;
  c.seed = config.seed;
  c.lambda = s.number("lambda", c.lambda);
  if (!(c.lambda >= 0.0 && c.lambda < 1.0)) s.error("lambda", "lambda out of range [0, 1)");
  const double p = s.number("p", 0.5);
  if (!(p > 0.0 && p < 1.0)) s.error("p", "p out of range (0, 1)");
  c.probability = constant_probability(p);
  c.max_iters = s.count("max_iters", c.max_iters, 1);
  c.stop_tol = s.number("stop_tol", c.stop_tol);
  if (!(c.stop_tol > 0.0)) s.error("stop_tol", "stop_tol must be positive");
  c.opi_horizon = s.count("opi_horizon", c.opi_horizon, 1);
  c.require_dominating_start = s.boolean("require_dominating_start", false);
  c.keep_snapshots = s.boolean("keep_snapshots", true);
  if (const Json* init = s.raw("initial")) {
    if (init->is_string()) {
      config.initial_cost = s.choice("initial", "zero", {"zero", "dominating"});
    } else if (auto J = s.vector("initial", num_states)) {
      config.initial_cost = "explicit";
      c.initial = *J;
    }
  }
}

void read_train(const Section& s, ExperimentConfig& config, Eigen::Index dim) {
  s.allow_only({"lambda", "iterations", "samples", "p", "mode", "ridge", "per_sample_branch", "scheme", "opi_horizon",
                "grid_points", "theta0"});
  TrainConfig& c = config.train;
  c.seed = config.seed;
  const std::string scheme = s.choice("scheme", "lambda-pir", {"lambda-pir", "vi", "opi"});
  c.scheme = scheme == "vi" ? EvaluationScheme::ValueIteration
             : scheme == "opi" ? EvaluationScheme::Optimistic
                               : EvaluationScheme::LambdaPir;
  c.lambda = s.number("lambda", c.lambda);
  if (!(c.lambda > 0.0 && c.lambda < 1.0)) s.error("lambda", "lambda out of range (0, 1)");
  c.iterations = s.count("iterations", c.iterations, 1);
  c.samples = s.count("samples", c.samples, 1);
  const auto needed = static_cast<std::size_t>(QuadraticValue::parameter_count(dim));
  if (c.samples < needed) s.error("samples", "must be at least " + std::to_string(needed) + " for this problem");
  const double p = s.number("p", 0.5);
  if (!(p > 0.0 && p < 1.0)) s.error("p", "p out of range (0, 1)");
  c.probability = constant_probability(p);
  c.mode = s.choice("mode", "paper", {"paper", "unbiased"}) == "unbiased" ? HorizonMode::Unbiased : HorizonMode::Paper;
  c.ridge = s.number("ridge", c.ridge);
  if (c.ridge < 0.0) s.error("ridge", "must be nonnegative");
  c.per_sample_branch = s.boolean("per_sample_branch", false);
  c.opi_horizon = s.count("opi_horizon", c.opi_horizon, 1);
  c.grid_points_per_axis = s.count("grid_points", c.grid_points_per_axis, 2);
  config.theta0 = s.quadratic("theta0", dim);
}

void read_simulate(const Section& s, ExperimentConfig& config) {
  s.allow_only({"x0", "horizon", "plant", "controller", "poles", "theta"});
  const ControlProblem& problem = *config.control;
  const Eigen::Index dim = problem.state_dim;
  SimulationSettings& sim = config.simulate;
  if (const Json* x0 = s.raw("x0")) {
    const bool nested = x0->is_array() && !x0->empty() && (*x0)[0].is_array();
    std::vector<Json> rows = nested ? x0->get<std::vector<Json>>() : std::vector<Json>{*x0};
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const auto x = Section::as_vector(rows[i]);
      const std::string where = nested ? "x0[" + std::to_string(i) + "]" : "x0";
      if (!x || x->size() != dim) {
        s.error(where, "must be an array of " + std::to_string(dim) + " numbers");
      } else if (!problem.state_box.contains(*x)) {
        s.error(where, "lies outside the state box");
      } else {
        sim.initial_states.push_back(*x);
      }
    }
  } else {
    s.error("x0", "at least one initial state is required");
  }
  sim.horizon = s.count("horizon", sim.horizon, 1);
  sim.continuous_plant = s.choice("plant", "discrete", {"discrete", "continuous"}) == "continuous";
  sim.feedback_linearization = s.choice("controller", "adp", {"adp", "feedback-lin"}) == "feedback-lin";
  if (sim.continuous_plant && config.problem == "linear") s.error("plant", "the linear problem has no continuous plant");
  if (sim.feedback_linearization) {
    if (config.problem != "sincos") s.error("controller", "feedback-lin only applies to the sincos problem");
    if (!sim.continuous_plant) s.error("controller", "feedback-lin requires plant = continuous");
  }
  if (const auto poles = s.vector("poles", 2)) {
    sim.poles = {(*poles)(0), (*poles)(1)};
    if (!(sim.poles.first < 0.0 && sim.poles.second < 0.0)) s.error("poles", "poles must be negative");
  }
  sim.theta = s.quadratic("theta", dim);
}

void read_slice(const Section& s, ExperimentConfig& config) {
  s.allow_only({"axis", "points", "theta"});
  const Eigen::Index dim = config.control->state_dim;
  config.slice.axis = static_cast<Eigen::Index>(s.count("axis", 0));
  if (config.slice.axis >= dim) s.error("axis", "must be below the state dimension " + std::to_string(dim));
  config.slice.points = s.count("points", config.slice.points, 2);
  config.slice.theta = s.quadratic("theta", dim);
}

void read_counterexample(const Section& s, ExperimentConfig& config) {
  s.allow_only({"tail_rate", "alpha", "n_min", "n_max", "window", "label"});
  CounterexampleSettings& c = config.counterexample;
  c.tail_rate = s.number("tail_rate", c.tail_rate);
  if (!(c.tail_rate > 0.0 && c.tail_rate < 1.0)) s.error("tail_rate", "tail_rate out of range (0, 1)");
  c.alpha = s.number("alpha", c.alpha);
  if (!(c.alpha > 0.0 && c.alpha < 1.0)) s.error("alpha", "alpha out of range (0, 1)");
  c.n_min = static_cast<Eigen::Index>(s.count("n_min", 1));
  c.n_max = static_cast<Eigen::Index>(s.count("n_max", 20));
  if (c.n_max < c.n_min) s.error("n_max", "must be at least n_min");
  if (s.has("window")) {
    c.window = static_cast<Eigen::Index>(s.count("window", 0));
    if (*c.window <= c.n_max) s.error("window", "must exceed n_max");
  }
  c.label = static_cast<Eigen::Index>(s.count("label", 3, 1));
  const Eigen::Index smallest = c.window ? *c.window : 2 * c.n_min + 10;
  if (c.label > smallest) s.error("label", "must not exceed the smallest window " + std::to_string(smallest));
}

void read_compare(const Section& s, ExperimentConfig& config) {
  s.allow_only({"methods", "axis", "points"});
  if (const Json* methods = s.raw("methods")) {
    config.compare.methods.clear();
    if (!methods->is_array() || methods->empty()) s.error("methods", "must be a nonempty array");
    else {
      for (const auto& m : *methods) {
        const std::string name = m.is_string() ? m.get<std::string>() : "";
        if (name != "vi" && name != "opi" && name != "lambda-pir") {
          s.error("methods", "entries must be vi, opi or lambda-pir");
        } else if (std::find(config.compare.methods.begin(), config.compare.methods.end(), name) ==
                   config.compare.methods.end()) {
          config.compare.methods.push_back(name);
        }
      }
    }
  }
  if (config.control) {
    config.compare.axis = static_cast<Eigen::Index>(s.count("axis", 0));
    if (config.compare.axis >= config.control->state_dim) s.error("axis", "must be below the state dimension");
    config.compare.points = s.count("points", config.compare.points, 2);
  }
}

}  // namespace

ExperimentConfig ExperimentConfig::parse(const Json& document, const std::filesystem::path& base_dir,
                                         std::vector<Diagnostic>& diagnostics) {
  ExperimentConfig config;
  config.document = document;
  if (!document.is_object()) {
    diagnostics.push_back({"<document>", "config must be a JSON object"});
    return config;
  }
  const Section top(&document, "", diagnostics);
  top.allow_only({"description", "kind", "problem", "mdp_file", "seed", "output_dir", "problem_options", "solver",
                  "train", "simulate", "slice", "counterexample", "compare"});
  config.kind = top.choice("kind", "",
                           {"solve", "tabular-solve", "train", "simulate", "slice", "counterexample", "compare"});
  if (config.kind == "tabular-solve") config.kind = "solve";
  if (!top.has("kind")) top.error("kind", "kind is required");
  config.seed = top.count("seed", 0);
  config.output_dir = top.text("output_dir", "out");
  config.problem = top.choice("problem", "", {"linear", "pendulum", "sincos", "mdp-file"});
  if (config.kind.empty()) return config;

  const bool needs_problem = config.kind != "counterexample";
  if (needs_problem && !top.has("problem")) top.error("problem", "problem is required for kind " + config.kind);

  Eigen::Index num_states = 0;
  if (config.problem == "mdp-file") {
    const std::string file = top.text("mdp_file", "");
    if (file.empty()) {
      top.error("mdp_file", "required when problem = mdp-file");
    } else {
      config.mdp_file = std::filesystem::path(file).is_absolute() ? std::filesystem::path(file) : base_dir / file;
      try {
        num_states = load_mdp(config.mdp_file).num_states();
      } catch (const Error& e) {
        top.error("mdp_file", e.what());
      }
    }
    if (top.has("problem_options")) top.error("problem_options", "does not apply to mdp-file problems");
  } else if (!config.problem.empty()) {
    if (top.has("mdp_file")) top.error("mdp_file", "only applies when problem = mdp-file");
    config.control = read_control_problem(config.problem, top.child("problem_options"));
  }

  const bool tabular = config.problem == "mdp-file";
  const bool control = config.control.has_value();
  const auto require = [&](bool ok, const std::string& what) {
    if (!ok && !config.problem.empty()) top.error("problem", "kind " + config.kind + " needs " + what);
  };

  if (config.kind == "solve") {
    require(tabular, "problem = mdp-file");
    read_solver(top.child("solver"), config, num_states);
  } else if (config.kind == "counterexample") {
    read_counterexample(top.child("counterexample"), config);
  } else if (config.kind == "compare") {
    if (tabular) read_solver(top.child("solver"), config, num_states);
    if (control) read_train(top.child("train"), config, config.control->state_dim);
    read_compare(top.child("compare"), config);
  } else {
    require(!tabular, "a control problem");
    if (control) {
      read_train(top.child("train"), config, config.control->state_dim);
      if (config.kind == "simulate") read_simulate(top.child("simulate"), config);
      if (config.kind == "slice") read_slice(top.child("slice"), config);
    }
  }
  return config;
}

std::vector<Diagnostic> validate(const Json& document, const std::filesystem::path& base_dir) {
  std::vector<Diagnostic> diagnostics;
  (void)ExperimentConfig::parse(document, base_dir, diagnostics);
  return diagnostics;
}

std::string git_blob_hash(std::string_view content) {
  const std::string header = "blob " + std::to_string(content.size()) + '\0';
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int length = 0;
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha1(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx.get(), header.data(), header.size()) != 1 ||
      EVP_DigestUpdate(ctx.get(), content.data(), content.size()) != 1 ||
      EVP_DigestFinal_ex(ctx.get(), digest.data(), &length) != 1) {
    throw Error("SHA-1 digest failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < length; ++i) {
    out += kHex[digest[i] >> 4];
    out += kHex[digest[i] & 0xF];
  }
  return out;
}

namespace {

class ArtifactWriter {
 public:
  ArtifactWriter(std::filesystem::path dir, RunResult& result) : dir_(std::move(dir)), result_(result) {}

  void write(const std::string& name, const std::string& content) {
    const std::filesystem::path path = dir_ / name;
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out << content;
    out.close();
    if (!out) throw IoError("failed writing " + path.string());
    result_.artifacts.push_back(path);
  }

  void json(const std::string& name, const Json& doc) { write(name, doc.dump(2) + "\n"); }

  template <typename Emit>
  void csv(const std::string& name, Emit&& emit) {
    std::ostringstream out;
    out.imbue(std::locale::classic());
    emit(out);
    write(name, out.str());
  }

 private:
  std::filesystem::path dir_;
  RunResult& result_;
};

SolveResult solve_with(const std::string& algorithm, const TabularMdp& mdp, const SolverConfig& config) {
  if (algorithm == "vi") return vi_solve(mdp, config);
  if (algorithm == "pi") return pi_solve(mdp, config);
  if (algorithm == "opi") return opi_solve(mdp, config);
  return lambda_pir_solve(mdp, config);
}

SolverConfig solver_for(const ExperimentConfig& config, const TabularMdp& mdp) {
  SolverConfig solver = config.solver;
  if (config.initial_cost == "dominating") solver.initial = make_dominating_J0(mdp);
  if (solver.initial && solver.initial->size() != mdp.num_states()) {
    throw ParameterError("solver.initial has the wrong length");
  }
  return solver;
}

std::pair<QuadraticValue, TrainLog> train_for(const ExperimentConfig& config, const TrainConfig& train_config) {
  const ControlProblem& problem = *config.control;
  return train(problem, train_config, config.theta0.value_or(QuadraticValue::zero(problem.state_dim)));
}

void write_training(ArtifactWriter& out, const QuadraticValue& theta, const TrainLog& log) {
  out.json("trainlog.json", trainlog_to_json(log));
  out.csv("trainlog.csv", [&](std::ostream& s) { write_trainlog_csv(s, log); });
  out.json("theta.json", quadratic_to_json(theta));
}

std::vector<LabeledSlice> training_slices(const TrainLog& log, Eigen::Index axis, const std::vector<double>& grid) {
  std::vector<LabeledSlice> slices{{0, cost_slice(log.initial, axis, grid)}};
  for (const auto& r : log.records) slices.push_back({r.k, cost_slice(r.theta, axis, grid)});
  return slices;
}

std::vector<double> axis_grid(const ControlProblem& problem, Eigen::Index axis, std::size_t points) {
  return linspace(problem.state_box.lower(axis), problem.state_box.upper(axis), points);
}

void run_solve(const ExperimentConfig& config, ArtifactWriter& out, std::ostream& log) {
  const TabularMdp mdp = load_mdp(config.mdp_file);
  const SolveResult result = solve_with(config.algorithm, mdp, solver_for(config, mdp));
  out.csv("solve_records.csv", [&](std::ostream& s) { write_records_csv(s, result.records); });
  out.json("solve_result.json", records_to_json(result));
  log << config.algorithm << ": " << result.iterations << " iterations, converged=" << result.converged
      << ", final error " << format_number(result.records.empty() ? 0.0 : result.records.back().error_norm) << "\n";
}

void run_train(const ExperimentConfig& config, ArtifactWriter& out, std::ostream& log) {
  const auto [theta, train_log] = train_for(config, config.train);
  write_training(out, theta, train_log);
  log << "trained " << train_log.records.size() << " iterations, final offset " << format_number(theta.offset())
      << "\n";
}

void run_simulate(const ExperimentConfig& config, ArtifactWriter& out, std::ostream& log) {
  const ControlProblem& problem = *config.control;
  const SimulationSettings& sim = config.simulate;
  QuadraticValue theta;
  if (!sim.feedback_linearization) {
    if (sim.theta) {
      theta = *sim.theta;
    } else {
      auto [trained, train_log] = train_for(config, config.train);
      write_training(out, trained, train_log);
      theta = trained;
    }
  }
  const double a = config.document.value("problem_options", Json::object()).value("a", 1.0);
  for (std::size_t i = 0; i < sim.initial_states.size(); ++i) {
    const Eigen::VectorXd& x0 = sim.initial_states[i];
    Trajectory trajectory;
    if (!sim.continuous_plant) {
      trajectory = simulate_adp(problem, theta, x0, sim.horizon);
    } else {
      const ContinuousDynamics plant = config.problem == "pendulum" ? pendulum_rhs() : sincos_rhs(a);
      FeedbackPolicy policy = adp_policy(problem, theta);
      if (sim.feedback_linearization) {
        const auto [l1, l2] = pole_placement_gains(sim.poles.first, sim.poles.second);
        const FeedbackLinController controller{l1, l2, a, 1.0};
        policy = [controller](const Eigen::VectorXd& x) { return feedback_lin_control(controller, x); };
      }
      trajectory = simulate_sampled(problem, plant, policy, x0, sim.horizon);
    }
    out.csv("trajectory_" + std::to_string(i) + ".csv",
            [&](std::ostream& s) { write_trajectory_csv(s, trajectory); });
    log << "trajectory " << i << ": discounted cost " << format_number(trajectory.discounted_cost) << ", "
        << trajectory.clip_events << " clip events\n";
  }
}

void run_slice(const ExperimentConfig& config, ArtifactWriter& out, std::ostream& log) {
  const ControlProblem& problem = *config.control;
  const std::vector<double> grid = axis_grid(problem, config.slice.axis, config.slice.points);
  std::vector<LabeledSlice> slices;
  if (config.slice.theta) {
    slices.push_back({0, cost_slice(*config.slice.theta, config.slice.axis, grid)});
  } else {
    const auto [theta, train_log] = train_for(config, config.train);
    write_training(out, theta, train_log);
    slices = training_slices(train_log, config.slice.axis, grid);
  }
  out.csv("slices.csv", [&](std::ostream& s) { write_slices_csv(s, slices); });
  log << "wrote " << slices.size() << " slices along axis " << config.slice.axis << "\n";
}

void run_counterexample(const ExperimentConfig& config, ArtifactWriter& out, std::ostream& log) {
  const CounterexampleSettings& c = config.counterexample;
  out.csv("counterexample.csv", [&](std::ostream& s) {
    write_csv_row(s, {"n", "window", "norm_gap", "pointwise_gap", "label"});
    for (Eigen::Index n = c.n_min; n <= c.n_max; ++n) {
      CounterexampleParams params{c.tail_rate, c.alpha, c.window.value_or(2 * n + 10), n};
      const CounterexampleResult r = counterexample_norm_gap(params);
      write_csv_row(s, {std::to_string(n), std::to_string(params.window), format_number(r.norm_gap),
                        format_number(r.gap_at(c.label)), std::to_string(c.label)});
    }
  });
  log << "counterexample rows for n = " << c.n_min << ".." << c.n_max << "\n";
}

void run_compare_tabular(const ExperimentConfig& config, ArtifactWriter& out, std::ostream& log) {
  const TabularMdp mdp = load_mdp(config.mdp_file);
  const SolverConfig solver = solver_for(config, mdp);
  std::vector<std::vector<std::string>> summary;
  for (const auto& method : config.compare.methods) {
    const SolveResult result = solve_with(method, mdp, solver);
    out.csv("compare_" + method + ".csv", [&](std::ostream& s) { write_records_csv(s, result.records); });
    summary.push_back({method, std::to_string(result.iterations), result.converged ? "1" : "0",
                       format_number(result.records.empty() ? 0.0 : result.records.back().error_norm)});
    log << method << ": " << result.iterations << " iterations\n";
  }
  out.csv("compare_summary.csv", [&](std::ostream& s) {
    write_csv_row(s, {"method", "iterations", "converged", "final_err_norm"});
    for (const auto& row : summary) write_csv_row(s, row);
  });
}

void run_compare_control(const ExperimentConfig& config, ArtifactWriter& out, std::ostream& log) {
  const ControlProblem& problem = *config.control;
  const std::vector<double> grid = axis_grid(problem, config.compare.axis, config.compare.points);
  struct Run {
    std::string method;
    TrainLog log;
    std::vector<LabeledSlice> slices;
  };
  std::vector<Run> runs;
  for (const auto& method : config.compare.methods) {
    TrainConfig c = config.train;
    c.scheme = method == "vi"    ? EvaluationScheme::ValueIteration
               : method == "opi" ? EvaluationScheme::Optimistic
                                 : EvaluationScheme::LambdaPir;
    auto [theta, train_log] = train_for(config, c);
    std::vector<LabeledSlice> slices = training_slices(train_log, config.compare.axis, grid);
    out.csv("compare_" + method + ".csv", [&](std::ostream& s) { write_slices_csv(s, slices); });
    log << method << ": final grid sup-diff " << format_number(train_log.records.back().grid_sup_diff) << "\n";
    runs.push_back({method, std::move(train_log), std::move(slices)});
  }
  const auto reference = std::find_if(runs.begin(), runs.end(), [](const Run& r) { return r.method == "lambda-pir"; });
  out.csv("compare_summary.csv", [&](std::ostream& s) {
    write_csv_row(s, {"method", "k", "branch", "grid_sup_diff", "simulated_steps", "dist_to_own_final",
                      "dist_to_lambda_pir_final"});
    for (const auto& run : runs) {
      for (std::size_t i = 1; i < run.slices.size(); ++i) {
        const auto& record = run.log.records[i - 1];
        write_csv_row(s, {run.method, std::to_string(record.k), std::string(record.branch),
                          format_number(record.grid_sup_diff), std::to_string(record.simulated_steps),
                          format_number(slice_sup_distance(run.slices[i].points, run.slices.back().points)),
                          reference == runs.end()
                              ? ""
                              : format_number(slice_sup_distance(run.slices[i].points, reference->slices.back().points))});
      }
    }
  });
}

}  // namespace

RunResult run(const ExperimentConfig& config, std::ostream& log) {
  RunResult result;
  try {
    std::filesystem::create_directories(config.output_dir);
    ArtifactWriter out(config.output_dir, result);
    const std::string canonical = config.document.dump();
    out.json("manifest.json", Json{{"tool", "lpir"},
                                   {"kind", config.kind},
                                   {"seed", config.seed},
                                   {"config", config.document},
                                   {"config_hash", git_blob_hash(canonical)}});
    if (config.kind == "solve") run_solve(config, out, log);
    else if (config.kind == "train") run_train(config, out, log);
    else if (config.kind == "simulate") run_simulate(config, out, log);
    else if (config.kind == "slice") run_slice(config, out, log);
    else if (config.kind == "counterexample") run_counterexample(config, out, log);
    else if (config.kind == "compare" && config.control) run_compare_control(config, out, log);
    else if (config.kind == "compare") run_compare_tabular(config, out, log);
    else throw ParameterError("unknown experiment kind '" + config.kind + "'");
  } catch (const InvariantViolation& e) {
    result.status = ExitStatus::InvariantViolation;
    result.message = e.what();
  } catch (const IoError& e) {
    result.status = ExitStatus::IoError;
    result.message = e.what();
  } catch (const std::filesystem::filesystem_error& e) {
    result.status = ExitStatus::IoError;
    result.message = e.what();
  } catch (const Error& e) {
    result.status = ExitStatus::ValidationFailure;
    result.message = e.what();
  }
  return result;
}

}  // namespace lpir
