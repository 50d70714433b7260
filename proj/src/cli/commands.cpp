#include "cegan/cli/commands.hpp"

#include <charconv>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "cegan/cli/config.hpp"
#include "cegan/cli/svg_chart.hpp"
#include "cegan/datagen/csv_io.hpp"
#include "cegan/model/checkpoint.hpp"
#include "cegan/training/gradcheck.hpp"

namespace cegan {
namespace {

namespace fs = std::filesystem;

ExperimentConfig load_config(const CommandOptions& options) {
  if (options.config_path.empty()) throw ValidationError("--config is required");
  ExperimentConfig cfg = load_experiment_config(options.config_path);
  if (options.seed) cfg.spec.seed = *options.seed;
  if (options.out_dir) cfg.output_dir = *options.out_dir;
  if (cfg.output_dir.empty()) throw ValidationError("output_dir: must not be empty");
  return cfg;
}

fs::path prepare_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw std::runtime_error("cannot create output directory '" + dir + "'");
  return fs::path(dir);
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write '" + path.string() + "'");
  return f;
}

void close_out(std::ofstream& f, const fs::path& path) {
  f.close();
  if (!f) throw std::runtime_error("error writing '" + path.string() + "'");
}

std::string format_value(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

// The dataset realization 0 of an experiment would see.
RealizationData load_data(const ExperimentConfig& cfg) {
  std::optional<Dataset> fixed;
  if (cfg.spec.generator.kind == GeneratorSpec::Kind::kCsv) fixed = load_csv_dataset(cfg.spec.generator);
  return make_realization_data(cfg.spec, fixed ? &*fixed : nullptr, 0);
}

void write_sweep_csv(std::ostream& out, const SweepResult& sweep) {
  out << "parameter,value,method,split,metric,mean,std,R\n";
  for (std::size_t i = 0; i < sweep.values.size(); ++i) {
    for (const SummaryRow& s : sweep.reports[i].summary) {
      out << to_string(sweep.parameter) << ',' << format_value(sweep.values[i]) << ',' << to_string(s.method) << ','
          << to_string(s.split) << ',' << to_string(s.metric) << ',' << format_value(s.mean) << ','
          << format_value(s.std) << ',' << s.count << '\n';
    }
  }
}

LineChart sweep_chart(const SweepResult& sweep, const std::vector<MethodId>& methods, Split split, Metric metric) {
  LineChart chart;
  chart.title = to_string(metric) + " (" + to_string(split) + ") vs " + to_string(sweep.parameter);
  chart.x_label = to_string(sweep.parameter);
  chart.y_label = to_string(metric);
  for (MethodId m : methods) {
    ChartSeries series{to_string(m), {}};
    for (std::size_t i = 0; i < sweep.values.size(); ++i) {
      if (const SummaryRow* row = sweep.reports[i].find(m, split, metric)) {
        series.points.emplace_back(sweep.values[i], row->mean);
      }
    }
    if (!series.points.empty()) chart.series.push_back(std::move(series));
  }
  return chart;
}

void write_report(const fs::path& dir, const std::string& stem, const EvalReport& report) {
  const fs::path json_path = dir / (stem + ".json");
  std::ofstream j = open_out(json_path);
  report.write_json(j);
  close_out(j, json_path);
  const fs::path csv_path = dir / (stem + ".csv");
  std::ofstream c = open_out(csv_path);
  report.write_csv(c);
  close_out(c, csv_path);
}

}  // namespace

void cmd_generate(const CommandOptions& options, std::ostream& out, std::ostream&) {
  const ExperimentConfig cfg = load_config(options);
  const GeneratorSpec& g = cfg.spec.generator;
  Dataset data;
  if (g.kind == GeneratorSpec::Kind::kToy) {
    ToyGenConfig c = g.toy;
    c.seed = cfg.spec.seed;
    data = generate_toy(c);
  } else if (g.kind == GeneratorSpec::Kind::kTwinsLike) {
    TwinsLikeConfig c = g.twins;
    c.seed = cfg.spec.seed;
    data = generate_twins_like(c);
  } else {
    throw ValidationError("generator: generate needs toy or twins_like, not csv");
  }
  const fs::path dir = prepare_dir(cfg.output_dir);
  const fs::path csv_path = dir / "data.csv";
  std::ofstream f = open_out(csv_path);
  write_dataset_csv(f, data);
  close_out(f, csv_path);
  write_schema_sidecar(dir / "data.csv.schema.json", data.schema);
  out << "wrote " << csv_path.string() << " (" << data.size() << " rows, " << data.schema.describe() << ")\n";
}

void cmd_train(const CommandOptions& options, std::ostream& out, std::ostream& err) {
  const ExperimentConfig cfg = load_config(options);
  const RealizationData data = load_data(cfg);
  const std::uint64_t method_seed = realization_seeds(cfg.spec.seed, 0).for_method(MethodId::kCegan);
  const TrainConfig train = method_train_config(cfg.spec.train, method_seed);
  const fs::path dir = prepare_dir(cfg.output_dir);
  FitResult result;
  try {
    result = fit(data.train, data.valid, train, cfg.spec.model);
  } catch (const TrainingDiverged& e) {
    const fs::path trace_path = dir / "trace.csv";
    std::ofstream t = open_out(trace_path);
    e.trace().write_csv(t);
    err << "training diverged; partial trace in " << trace_path.string() << '\n';
    throw;
  }
  save_checkpoint(dir / "checkpoint.json", Checkpoint{result.model, train.fingerprint()});
  const fs::path trace_path = dir / "trace.csv";
  std::ofstream t = open_out(trace_path);
  result.trace.write_csv(t);
  close_out(t, trace_path);
  out << "trained " << result.trace.records.size() << " iterations; best validation L_P "
      << format_value(result.trace.best_val_l_p) << " at iteration " << result.trace.best_iteration
      << (result.trace.stopped_early ? " (stopped early)" : "") << '\n';
  out << "wrote " << (dir / "checkpoint.json").string() << " and " << trace_path.string() << '\n';
}

void cmd_ite(const CommandOptions& options, std::ostream& out, std::ostream&) {
  const ExperimentConfig cfg = load_config(options);
  const RealizationData data = load_data(cfg);
  const fs::path dir = prepare_dir(cfg.output_dir);
  const fs::path ckpt = options.checkpoint_path.empty() ? dir / "checkpoint.json" : fs::path(options.checkpoint_path);
  if (!fs::exists(ckpt)) throw ValidationError("checkpoint '" + ckpt.string() + "' does not exist");
  const Checkpoint cp = load_checkpoint(ckpt, data.all.schema);
  const std::uint64_t method_seed = realization_seeds(cfg.spec.seed, 0).for_method(MethodId::kCegan);
  const ItEstimate est = estimate_ite(cp.model, data.all.x, method_ite_config(cfg.spec.ite, method_seed));
  const fs::path path = dir / "ite.csv";
  std::ofstream f = open_out(path);
  write_ite_csv(f, est);
  close_out(f, path);
  out << "wrote " << path.string() << " (" << est.ite.rows() << " subjects, mean ITE "
      << format_value(est.ite.mean()) << ")\n";
}

void cmd_experiment(const CommandOptions& options, std::ostream& out, std::ostream& err) {
  const ExperimentConfig cfg = load_config(options);
  const fs::path dir = prepare_dir(cfg.output_dir);
  const LogFn log = [&err](const std::string& line) { err << line << '\n'; };
  if (!cfg.sweep) {
    const EvalReport report = run_experiment(cfg.spec, options.jobs, log);
    write_report(dir, "report", report);
    out << "wrote " << (dir / "report.json").string() << " and report.csv (" << report.summary.size() << " rows, "
        << report.warning_count() << " warnings)\n";
    return;
  }
  const SweepResult sweep = run_sweep(cfg.spec, cfg.sweep->parameter, cfg.sweep->values, options.jobs, log);
  std::size_t warnings = 0;
  for (std::size_t i = 0; i < sweep.values.size(); ++i) {
    write_report(dir, "report_" + to_string(sweep.parameter) + "_" + format_value(sweep.values[i]), sweep.reports[i]);
    warnings += sweep.reports[i].warning_count();
  }
  const fs::path csv_path = dir / "sweep.csv";
  std::ofstream c = open_out(csv_path);
  write_sweep_csv(c, sweep);
  close_out(c, csv_path);
  const Metric metric = cfg.spec.metrics.front();
  const Split split = cfg.spec.splits.back();
  const fs::path svg_path = dir / "sweep.svg";
  std::ofstream s = open_out(svg_path);
  write_svg(s, sweep_chart(sweep, cfg.spec.methods, split, metric));
  close_out(s, svg_path);
  out << "wrote " << sweep.values.size() << " reports, " << csv_path.string() << " and " << svg_path.string() << " ("
      << warnings << " warnings)\n";
}

bool cmd_gradcheck(const CommandOptions& options, std::ostream& out, std::ostream& err) {
  GradcheckOptions go;
  if (options.seed) go.seed = *options.seed;
  if (options.corrupt_group) go.corrupt_group = parse_param_group(*options.corrupt_group);
  const GradcheckReport report = run_gradcheck(go);
  out << "objective,schema,group,layer,checked,max_rel_error,status\n";
  for (const GradcheckEntry& e : report.entries) {
    out << e.objective << ',' << e.schema << ',' << to_string(e.group) << ',' << e.layer << ',' << e.checked << ','
        << std::scientific << std::setprecision(3) << e.max_relative_error << std::defaultfloat << ','
        << (e.passed ? "ok" : "FAIL") << '\n';
  }
  out << "max relative error per subnetwork:\n";
  for (ParamGroup g : kAllParamGroups) {
    out << "  " << std::left << std::setw(14) << to_string(g) << std::right << std::scientific << std::setprecision(3)
        << report.max_error(g) << std::defaultfloat << '\n';
  }
  if (report.passed()) {
    out << "gradcheck passed (tolerance " << go.tolerance << ")\n";
    return true;
  }
  for (const GradcheckEntry& e : report.entries) {
    if (!e.passed) {
      err << "gradcheck FAILED: group " << to_string(e.group) << " layer " << e.layer << " (" << e.objective << ", "
          << e.schema << ") max relative error " << e.max_relative_error << '\n';
    }
  }
  return false;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Causal effect estimation with adversarially learned latent confounders"};
  app.require_subcommand(1);
  CommandOptions options;
  std::uint64_t seed = 0;
  std::string out_dir;
  std::string corrupt;

  auto add_common = [&](CLI::App* sub, bool with_jobs) {
    sub->add_option("--config", options.config_path, "experiment config (JSON)")->required();
    sub->add_option("--seed", seed, "master seed; overrides the config");
    sub->add_option("--out", out_dir, "output directory; overrides the config");
    if (with_jobs) sub->add_option("--jobs", options.jobs, "concurrent realizations")->check(CLI::PositiveNumber);
  };
  CLI::App* generate = app.add_subcommand("generate", "write a synthetic dataset as CSV plus schema sidecar");
  add_common(generate, false);
  CLI::App* train = app.add_subcommand("train", "fit the model; write checkpoint and trace");
  add_common(train, false);
  CLI::App* ite = app.add_subcommand("ite", "export per-subject effect estimates from a checkpoint");
  add_common(ite, false);
  ite->add_option("--checkpoint", options.checkpoint_path, "checkpoint (default <out>/checkpoint.json)");
  CLI::App* experiment = app.add_subcommand("experiment", "multi-realization evaluation; reports and sweep chart");
  add_common(experiment, true);
  CLI::App* gradcheck = app.add_subcommand("gradcheck", "finite-difference check of every training gradient");
  gradcheck->add_option("--seed", seed, "seed of the tiny test models");
  gradcheck->add_option("--corrupt", corrupt, "test hook: perturb one group's analytic gradient");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    std::ostringstream o;
    std::ostringstream e2;
    const int code = app.exit(e, o, e2);
    out << o.str();
    err << e2.str();
    return code == 0 ? kExitOk : kExitValidation;
  }

  const CLI::App* active = app.get_subcommands().front();
  auto given = [&](const char* name) {
    const CLI::Option* opt = active->get_option_no_throw(name);
    return opt != nullptr && opt->count() > 0;
  };
  if (given("--seed")) options.seed = seed;
  if (given("--out")) options.out_dir = out_dir;
  if (!corrupt.empty()) options.corrupt_group = corrupt;

  try {
    if (active == generate) {
      cmd_generate(options, out, err);
    } else if (active == train) {
      cmd_train(options, out, err);
    } else if (active == ite) {
      cmd_ite(options, out, err);
    } else if (active == experiment) {
      cmd_experiment(options, out, err);
    } else if (!cmd_gradcheck(options, out, err)) {
      return kExitRuntime;
    }
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitOk;
}

}  // namespace cegan
