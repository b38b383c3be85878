// Command-line front end: plan, benchmark, validate.

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>

#include "hyrrt/cli/commands.hpp"

int main(int argc, char** argv) {
  using hyrrt::cli::Overrides;

  CLI::App app{"HyRRT-Connect motion planner for hybrid systems"};
  app.require_subcommand(1);

  std::string config_path;
  std::string plan_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> mode;
  std::optional<int> max_iterations;
  std::optional<double> tolerance;
  std::optional<int> runs;
  std::optional<std::string> output;
  bool dump_trees = false;

  auto* plan = app.add_subcommand("plan", "Run one seeded planning attempt and write a RunOutput file");
  plan->add_option("--config", config_path, "Run configuration (JSON)")->required();
  plan->add_option("--seed", seed, "Random seed");
  plan->add_option("--mode", mode, "HyRRT, BiHyRRT or HyRRTConnect");
  plan->add_option("--max-iterations", max_iterations, "Iteration bound K");
  plan->add_option("--tolerance", tolerance, "S1 matching tolerance delta");
  plan->add_option("--output", output, "RunOutput path");
  plan->add_flag("--dump-trees", dump_trees, "Include both search trees in the output");

  auto* bench = app.add_subcommand("benchmark", "Seeded runs per mode, summarized as CSV");
  bench->add_option("--config", config_path, "Run configuration (JSON)")->required();
  bench->add_option("--seed", seed, "Base seed; run i uses seed + i");
  bench->add_option("--mode", mode, "Comma-separated modes (default: all three)");
  bench->add_option("--max-iterations", max_iterations, "Iteration bound K");
  bench->add_option("--tolerance", tolerance, "S1 matching tolerance delta");
  bench->add_option("--runs", runs, "Runs per mode (default 20)");
  bench->add_option("--output", output, "CSV path");

  auto* validate = app.add_subcommand("validate", "Check a stored plan against the configured system");
  validate->add_option("plan", plan_path, "RunOutput or solution-pair JSON")->required();
  validate->add_option("--config", config_path, "Run configuration (JSON)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : hyrrt::cli::kExitError;
  }

  Overrides o{seed, mode, max_iterations, tolerance, runs, output, dump_trees};
  if (*plan) return hyrrt::cli::cmd_plan(config_path, o, std::cout, std::cerr);
  if (*bench) return hyrrt::cli::cmd_benchmark(config_path, o, std::cout, std::cerr);
  return hyrrt::cli::cmd_validate(plan_path, config_path, std::cout, std::cerr);
}
