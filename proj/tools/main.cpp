#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "lpir/experiment.hpp"

namespace {

struct CommonFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<std::string> mode;
};

int report(const std::vector<lpir::Diagnostic>& diagnostics) {
  for (const auto& d : diagnostics) std::cerr << "error: " << lpir::to_string(d) << "\n";
  return diagnostics.empty() ? 0 : static_cast<int>(lpir::ExitStatus::ValidationFailure);
}

int execute(const std::string& verb, const CommonFlags& flags) {
  lpir::ConfigDocument doc = lpir::read_config(flags.config);
  if (!doc.diagnostics.empty()) return report(doc.diagnostics);

  lpir::Overrides overrides;
  if (verb != "validate") overrides.kind = verb;
  overrides.seed = flags.seed;
  if (flags.out) overrides.output_dir = *flags.out;
  overrides.mode = flags.mode;
  const lpir::Json document = lpir::apply_overrides(std::move(doc.document), overrides);

  std::vector<lpir::Diagnostic> diagnostics;
  const lpir::ExperimentConfig config = lpir::ExperimentConfig::parse(document, doc.base_dir, diagnostics);
  if (verb == "validate") {
    const int status = report(diagnostics);
    if (status == 0) std::cout << flags.config << ": ok\n";
    return status;
  }
  if (!diagnostics.empty()) return report(diagnostics);

  const lpir::RunResult result = lpir::run(config, std::cout);
  if (result.status != lpir::ExitStatus::Success) std::cerr << "error: " << result.message << "\n";
  for (const auto& path : result.artifacts) std::cout << "wrote " << path.generic_string() << "\n";
  return static_cast<int>(result.status);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"lpir: lambda-policy iteration with randomization, exact and data-driven"};
  app.require_subcommand(1);

  CommonFlags flags;
  std::string verb;
  const std::vector<std::pair<std::string, std::string>> verbs{
      {"solve", "solve a tabular MDP with vi, pi, opi or lambda-pir"},
      {"train", "train a quadratic value approximation by data-driven lambda-PIR"},
      {"simulate", "simulate closed-loop trajectories"},
      {"slice", "emit cost slices along one state axis"},
      {"counterexample", "tabulate the weighted-operator counterexample"},
      {"compare", "run vi, opi and lambda-pir side by side"},
      {"validate", "check a config file without running it"},
  };
  for (const auto& [name, help] : verbs) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", flags.config, "experiment config (JSON)")->required()->check(CLI::ExistingFile);
    sub->add_option("--seed", flags.seed, "override the config seed");
    sub->add_option("--out", flags.out, "override the output directory");
    sub->add_option("--mode", flags.mode, "rollout horizon mode")->check(CLI::IsMember({"unbiased", "paper"}));
    sub->callback([&verb, name = name] { verb = name; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return static_cast<int>(lpir::ExitStatus::ValidationFailure);
  }
  return execute(verb, flags);
}
