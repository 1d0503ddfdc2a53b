#include "surrokit/app/commands.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <set>
#include <sstream>
#include <tuple>

#include <spdlog/spdlog.h>

#include "surrokit/app/worker_pool.hpp"
#include "surrokit/error.hpp"
#include "surrokit/evaluation.hpp"
#include "surrokit/json_io.hpp"
#include "surrokit/numeric_format.hpp"
#include "surrokit/simulator.hpp"

namespace fs = std::filesystem;

namespace surrokit::app {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

Json manifest(const std::string& command, const GlobalOptions& global) {
  Json m;
  m["command"] = command;
  m["tool_version"] = kToolVersion;
  m["seed"] = global.seed ? Json(*global.seed) : Json(nullptr);
  m["alpha"] = global.alpha;
  m["horizon"] = global.horizon;
  m["jobs"] = global.jobs;
  return m;
}

void write_manifest(Json m, Clock::time_point start, const fs::path& path) {
  m["wall_clock_seconds"] = seconds_since(start);
  write_text_atomically(path, dump(m));
}

fs::path sibling_manifest(const fs::path& out) {
  fs::path p = out;
  p += ".manifest.json";
  return p;
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::Io, "cannot create " + dir.string() + ": " + ec.message());
}

std::vector<fs::path> list_files(const fs::path& dir, const std::string& suffix) {
  std::vector<fs::path> files;
  std::error_code ec;
  for (const auto& entry : fs::directory_iterator(dir, ec)) {
    const std::string name = entry.path().filename().string();
    if (entry.is_regular_file() && name.size() > suffix.size() &&
        name.compare(name.size() - suffix.size(), suffix.size(), suffix) == 0) {
      files.push_back(entry.path());
    }
  }
  if (ec) throw Error(ErrorCode::Io, "cannot list " + dir.string() + ": " + ec.message());
  std::sort(files.begin(), files.end());
  return files;
}

void validate_global(const GlobalOptions& global) {
  if (!(global.alpha > 0.0 && global.alpha < 1.0)) throw UsageError("--alpha must lie in (0, 1)");
  if (global.horizon < 1) throw UsageError("--horizon must be positive");
  if (global.jobs < 1) throw UsageError("--jobs must be positive");
}

Json estimates_to_json(const std::vector<EffectEstimate>& estimates) {
  Json arr = Json::array();
  for (const auto& e : estimates) arr.push_back(to_json(e));
  return arr;
}

void write_scaled_csv(const fs::path& path, std::span<const double> values) {
  std::string text = "value\n";
  for (double v : values) {
    append_double(text, v);
    text += '\n';
  }
  write_text_atomically(path, text);
}

void write_density_csv(const fs::path& path, std::span<const double> values) {
  std::string text = "x,density\n";
  for (const auto& p : kernel_density(values)) {
    append_double(text, p.x);
    text += ',';
    append_double(text, p.density);
    text += '\n';
  }
  write_text_atomically(path, text);
}

}  // namespace

// ---------------------------------------------------------------------------
// simulate

void run_simulate(const GlobalOptions& global, const SimulateOptions& options) {
  const auto start = Clock::now();
  validate_global(global);
  SimConfig config = load_sim_config(options.config);
  if (global.seed) config.seed = *global.seed;
  if (global.horizon_given) config.horizon = global.horizon;
  config.validate();
  ensure_dir(options.out_dir);

  std::vector<std::map<std::string, double>> truths(config.n_experiments);
  parallel_for(config.n_experiments, global.jobs, [&](std::size_t i) {
    SimulatedExperiment exp = simulate_experiment(config, i);
    std::ostringstream csv;
    write_panel(exp.panel, csv);
    write_text_atomically(options.out_dir / (exp.panel.experiment_id() + ".csv"), csv.str());
    truths[i] = std::move(exp.true_effects);
    spdlog::debug("simulated {}", exp.panel.experiment_id());
  });

  GroundTruth truth;
  for (std::size_t i = 0; i < truths.size(); ++i) truth[experiment_id_for(i)] = truths[i];
  write_text_atomically(options.out_dir / kGroundTruthFile, dump(ground_truth_to_json(truth)));

  Json m = manifest("simulate", global);
  m["seed"] = config.seed;
  m["horizon"] = config.horizon;
  m["config_paths"] = Json::array({options.config.string()});
  m["config"] = to_json(config);
  m["outputs"] = Json{{"out_dir", options.out_dir.string()},
                      {"panels", config.n_experiments},
                      {"ground_truth", kGroundTruthFile}};
  write_manifest(std::move(m), start, options.out_dir / kManifestFile);
  spdlog::info("simulated {} experiments into {}", config.n_experiments, options.out_dir.string());
}

// ---------------------------------------------------------------------------
// analyze

AnalysisPlan make_plan(const GlobalOptions& global, const AnalyzeOptions& options) {
  validate_global(global);
  AnalysisPlan plan;
  plan.horizon = global.horizon;

  if (options.model_in) {
    if (options.sweep_order) throw UsageError("--sweep-T cannot be combined with --model-in");
    SurrogateModel model = surrogate_model_from_json(read_json_file(*options.model_in));
    if (options.order && *options.order != model.order()) {
      throw UsageError("--T does not match the order of the loaded model");
    }
    if (model.order() > plan.horizon) throw UsageError("loaded model order exceeds --horizon");
    plan.regime = model.source();
    plan.orders = {model.order()};
    plan.shared_models.push_back(std::move(model));
    return plan;
  }

  if (options.regime == "pretest") {
    plan.regime = ModelSource::PreTest;
  } else if (options.regime == "similar") {
    plan.regime = ModelSource::SimilarTest;
  } else if (options.regime == "running-mean") {
    plan.regime = ModelSource::RunningMean;
  } else {
    throw UsageError("--regime must be pretest, similar or running-mean");
  }
  if (plan.regime == ModelSource::SimilarTest && !options.donor) {
    throw UsageError("--regime similar requires --donor");
  }
  if (plan.regime != ModelSource::SimilarTest && options.donor) {
    throw UsageError("--donor is only valid with --regime similar");
  }

  if (options.sweep_order) {
    if (options.order) throw UsageError("give either --T or --sweep-T, not both");
    for (int t = 1; t <= plan.horizon; ++t) plan.orders.push_back(t);
  } else {
    if (!options.order) throw UsageError("--T is required (or --sweep-T)");
    if (*options.order < 1 || *options.order > plan.horizon) {
      throw UsageError("--T must lie in [1, horizon]");
    }
    plan.orders = {*options.order};
  }

  if (plan.regime == ModelSource::RunningMean) {
    for (int t : plan.orders) plan.shared_models.push_back(running_mean_model(t));
  } else if (plan.regime == ModelSource::SimilarTest) {
    OutcomePanel donor = load_panel_file(*options.donor, PanelSchema{plan.horizon, ','});
    for (int t : plan.orders) plan.shared_models.push_back(fit_similar(donor, t));
  }
  return plan;
}

std::vector<EffectEstimate> analyze_panel(const OutcomePanel& panel, const AnalysisPlan& plan) {
  std::vector<EffectEstimate> out;
  std::vector<SurrogateModel> models;
  const std::vector<SurrogateModel>* use = &plan.shared_models;
  if (plan.shared_models.empty()) {
    models.reserve(plan.orders.size());
    for (int t : plan.orders) models.push_back(fit_pretest(panel, t));
    use = &models;
  }
  for (const auto& arm : panel.treatment_arms()) {
    out.push_back(direct_effect(panel, arm, plan.horizon));
    for (const auto& model : *use) out.push_back(surrogate_effect(model, panel, arm));
  }
  std::stable_sort(out.begin(), out.end(), [](const EffectEstimate& a, const EffectEstimate& b) {
    return std::tie(a.arm.name, a.kind, a.days) < std::tie(b.arm.name, b.kind, b.days);
  });
  return out;
}

void run_analyze(const GlobalOptions& global, const AnalyzeOptions& options) {
  const auto start = Clock::now();
  AnalysisPlan plan = make_plan(global, options);
  const PanelSchema schema{plan.horizon, ','};

  Json m = manifest("analyze", global);
  m["regime"] = std::string(to_string(plan.regime));
  m["T"] = plan.orders.size() == 1 ? Json(plan.orders.front()) : Json(nullptr);
  m["sweep_T"] = options.sweep_order;
  m["config_paths"] = Json::array();
  if (options.donor) m["config_paths"].push_back(options.donor->string());
  if (options.model_in) m["config_paths"].push_back(options.model_in->string());

  if (fs::is_directory(options.panel)) {
    if (options.model_out && plan.shared_models.empty()) {
      throw UsageError("--model-out with a panel directory needs a shared model regime");
    }
    std::vector<fs::path> panels = list_files(options.panel, ".csv");
    if (panels.empty()) throw Error(ErrorCode::EmptyInput, "no .csv panels in " + options.panel.string());
    ensure_dir(options.out);
    parallel_for(panels.size(), global.jobs, [&](std::size_t i) {
      OutcomePanel panel = load_panel_file(panels[i], schema);
      auto estimates = analyze_panel(panel, plan);
      const fs::path target = options.out / (panels[i].stem().string() + kEstimatesSuffix);
      write_text_atomically(target, dump(estimates_to_json(estimates)));
      spdlog::debug("analyzed {}", panels[i].string());
    });
    m["inputs"] = Json{{"panel_dir", options.panel.string()}, {"panels", panels.size()}};
    m["outputs"] = Json{{"out_dir", options.out.string()}};
    if (options.model_out) {
      if (plan.shared_models.size() != 1) throw UsageError("--model-out needs a single --T");
      write_text_atomically(*options.model_out, dump(to_json(plan.shared_models.front())));
    }
    write_manifest(std::move(m), start, options.out / kManifestFile);
    return;
  }

  OutcomePanel panel = load_panel_file(options.panel, schema);
  auto estimates = analyze_panel(panel, plan);
  if (options.out.has_parent_path()) ensure_dir(options.out.parent_path());
  write_text_atomically(options.out, dump(estimates_to_json(estimates)));
  if (options.model_out) {
    if (plan.orders.size() != 1) throw UsageError("--model-out needs a single --T");
    SurrogateModel model = plan.shared_models.empty() ? fit_pretest(panel, plan.orders.front())
                                                      : plan.shared_models.front();
    write_text_atomically(*options.model_out, dump(to_json(model)));
  }
  m["inputs"] = Json{{"panel", options.panel.string()}};
  m["outputs"] = Json{{"estimates", options.out.string()}};
  write_manifest(std::move(m), start, sibling_manifest(options.out));
}

// ---------------------------------------------------------------------------
// evaluate

void run_evaluate(const GlobalOptions& global, const EvaluateOptions& options) {
  const auto start = Clock::now();
  validate_global(global);
  if (!fs::is_directory(options.estimates_dir)) {
    throw UsageError(options.estimates_dir.string() + " is not a directory");
  }
  std::vector<fs::path> files = list_files(options.estimates_dir, kEstimatesSuffix);
  if (files.empty()) {
    throw Error(ErrorCode::EmptyInput, "no *" + std::string(kEstimatesSuffix) + " files in " +
                                           options.estimates_dir.string());
  }

  std::vector<EffectEstimate> direct;
  std::vector<EffectEstimate> surrogate;
  std::set<int> orders;
  for (const auto& file : files) {
    nlohmann::json arr = read_json_file(file);
    if (!arr.is_array()) throw Error(ErrorCode::MalformedRow, file.string() + ": expected array");
    for (const auto& rec : arr) {
      EffectEstimate e = effect_estimate_from_json(rec);
      if (e.kind == EstimateKind::Direct) {
        if (e.days == global.horizon) direct.push_back(std::move(e));
      } else if (!options.order || *options.order == e.days) {
        orders.insert(e.days);
        surrogate.push_back(std::move(e));
      }
    }
  }
  if (orders.size() > 1) {
    throw UsageError("estimates hold several surrogate orders; select one with --T");
  }
  if (direct.empty()) {
    throw Error(ErrorCode::KeyMismatch,
                "no direct estimates with horizon " + std::to_string(global.horizon));
  }
  if (surrogate.empty()) throw Error(ErrorCode::KeyMismatch, "no surrogate estimates");

  auto pairs = classify_pairs(direct, surrogate, global.alpha);
  ConfusionMatrix3 matrix = confusion(pairs);
  LaunchMetrics metrics = launch_metrics(matrix);

  // Point estimates in pair order.
  std::map<std::pair<std::string, std::string>, double> direct_points;
  std::map<std::pair<std::string, std::string>, double> surrogate_points;
  for (const auto& e : direct) direct_points[{e.experiment_id, e.arm.name}] = e.point;
  for (const auto& e : surrogate) surrogate_points[{e.experiment_id, e.arm.name}] = e.point;
  std::vector<double> d_vals;
  std::vector<double> s_vals;
  std::vector<double> diff_vals;
  for (const auto& p : pairs) {
    const double d = direct_points.at({p.experiment_id, p.arm});
    const double s = surrogate_points.at({p.experiment_id, p.arm});
    d_vals.push_back(d);
    s_vals.push_back(s);
    diff_vals.push_back(s - d);
  }

  const fs::path out_dir = options.out.has_parent_path() ? options.out.parent_path() : fs::path(".");
  ensure_dir(out_dir);
  std::string stem = options.out.filename().string();
  if (stem.size() > 5 && stem.ends_with(".json")) stem.resize(stem.size() - 5);

  Json distributions = Json::object();
  Json kurtosis = Json::object();
  Json scaled_paths = Json::object();
  auto summarize = [&](const std::string& name, std::span<const double> values,
                       std::span<const double> scale_by) {
    try {
      DistributionSummary s = scaled_distribution(values, scale_by);
      const std::string file = stem + "." + name + "_scaled.csv";
      write_scaled_csv(out_dir / file, s.scaled_values);
      if (options.density) {
        write_density_csv(out_dir / (stem + "." + name + "_density.csv"), s.scaled_values);
      }
      distributions[name] = to_json(s, file);
      kurtosis[name] = s.excess_kurtosis ? Json(*s.excess_kurtosis) : Json(nullptr);
      scaled_paths[name] = file;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::ZeroVariance) throw;
      spdlog::warn("{} distribution skipped: {}", name, e.what());
      distributions[name] = nullptr;
      kurtosis[name] = nullptr;
      scaled_paths[name] = nullptr;
    }
  };
  // Direct and surrogate share the direct read's scale; differences use their own.
  summarize("direct", d_vals, d_vals);
  summarize("surrogate", s_vals, d_vals);
  summarize("difference", diff_vals, diff_vals);

  const double gain = capacity_gain(options.long_cycle, options.short_cycle);
  Json extra = nullptr;
  Json net_positive = nullptr;
  if (metrics.recall.defined() && metrics.recall.value() > 0.0) {
    const double needed = extra_experiments_needed(metrics.recall.value());
    extra = needed;
    net_positive = gain > needed;
  }

  Json report;
  report["alpha"] = global.alpha;
  report["horizon"] = global.horizon;
  report["T"] = orders.empty() ? Json(nullptr) : Json(*orders.begin());
  report["n_pairs"] = pairs.size();
  report["classes"] = Json::array({"sig_positive", "not_sig", "sig_negative"});
  report["confusion"] = to_json(matrix);
  report["precision"] = to_json(metrics.precision);
  report["recall"] = to_json(metrics.recall);
  report["agreement"] = metrics.agreement;
  report["ns_rates"] = Json{{"direct", metrics.direct_ns_rate},
                            {"surrogate", metrics.surrogate_ns_rate}};
  report["false_launch_negatives"] = metrics.false_launch_negatives;
  report["kurtosis"] = kurtosis;
  report["distributions"] = distributions;
  report["scaled_values_path"] = scaled_paths;
  report["throughput"] = Json{{"long_cycle_days", options.long_cycle},
                              {"short_cycle_days", options.short_cycle},
                              {"capacity_gain", gain},
                              {"extra_experiments_needed", extra},
                              {"net_positive", net_positive}};
  write_text_atomically(options.out, dump(report));

  Json m = manifest("evaluate", global);
  m["T"] = report["T"];
  m["config_paths"] = Json::array();
  m["inputs"] = Json{{"estimates_dir", options.estimates_dir.string()}, {"files", files.size()}};
  m["outputs"] = Json{{"report", options.out.string()}};
  write_manifest(std::move(m), start, sibling_manifest(options.out));
}

}  // namespace surrokit::app
