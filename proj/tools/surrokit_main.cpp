// surrokit: simulate experiment corpora, estimate long-term effects with
// surrogate indexes, and evaluate launch-decision agreement.

#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "surrokit/app/commands.hpp"
#include "surrokit/error.hpp"

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitNumerical = 4;

void configure_logging() {
  auto logger = spdlog::stderr_color_st("surrokit");
  logger->set_pattern("[%l] %v");
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::warn);
  if (const char* level = std::getenv("SURROKIT_LOG")) {
    spdlog::set_level(spdlog::level::from_str(level));
  }
}

}  // namespace

int main(int argc, char** argv) {
  configure_logging();
  using namespace surrokit::app;

  CLI::App app{"Surrogate-index estimation of long-term A/B test effects"};
  app.set_version_flag("--version", std::string(kToolVersion));
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOptions global;
  std::uint64_t seed = 0;
  auto* seed_opt = app.add_option("--seed", seed, "Override the simulation seed");
  app.add_option("--jobs", global.jobs, "Worker threads")->check(CLI::PositiveNumber);
  app.add_option("--alpha", global.alpha, "Significance level")->capture_default_str();
  auto* horizon_opt =
      app.add_option("--horizon", global.horizon, "Long-term horizon in days")->capture_default_str();

  SimulateOptions sim;
  auto* simulate = app.add_subcommand("simulate", "Generate a seeded experiment corpus");
  simulate->add_option("--config", sim.config, "SimConfig JSON file")->required();
  simulate->add_option("--out", sim.out_dir, "Output directory")->required();

  AnalyzeOptions an;
  int order = 0;
  std::string donor;
  std::string model_in;
  std::string model_out;
  auto* analyze = app.add_subcommand("analyze", "Direct and surrogate effect estimates per arm");
  analyze->add_option("--panel", an.panel, "Panel CSV or directory of panel CSVs")->required();
  analyze->add_option("--regime", an.regime, "pretest | similar | running-mean")
      ->capture_default_str();
  auto* donor_opt = analyze->add_option("--donor", donor, "Donor panel for --regime similar");
  auto* order_opt = analyze->add_option("--T", order, "Surrogate order (days of data)");
  analyze->add_flag("--sweep-T", an.sweep_order, "Estimate for every T in 1..horizon");
  auto* model_in_opt = analyze->add_option("--model-in", model_in, "Use a saved model");
  auto* model_out_opt = analyze->add_option("--model-out", model_out, "Save the fitted model");
  analyze->add_option("--out", an.out, "Estimates file (or directory for panel directories)")
      ->required();

  EvaluateOptions ev;
  int eval_order = 0;
  auto* evaluate = app.add_subcommand("evaluate", "Decision agreement report");
  evaluate->add_option("--estimates", ev.estimates_dir, "Directory of *.estimates.json")
      ->required();
  evaluate->add_option("--out", ev.out, "Report JSON path")->required();
  auto* eval_order_opt = evaluate->add_option("--T", eval_order, "Surrogate order to evaluate");
  evaluate->add_option("--long-cycle", ev.long_cycle, "Long test cycle in days")
      ->capture_default_str();
  evaluate->add_option("--short-cycle", ev.short_cycle, "Short test cycle in days")
      ->capture_default_str();
  evaluate->add_flag("--density", ev.density, "Also write Gaussian KDE curves");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  if (*seed_opt) global.seed = seed;
  global.horizon_given = static_cast<bool>(*horizon_opt);
  if (*order_opt) an.order = order;
  if (*donor_opt) an.donor = donor;
  if (*model_in_opt) an.model_in = model_in;
  if (*model_out_opt) an.model_out = model_out;
  if (*eval_order_opt) ev.order = eval_order;

  try {
    if (*simulate) run_simulate(global, sim);
    if (*analyze) run_analyze(global, an);
    if (*evaluate) run_evaluate(global, ev);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const surrokit::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return surrokit::is_numerical(e.code()) ? kExitNumerical : kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
  return 0;
}
