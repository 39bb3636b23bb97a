#include <cstdio>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "vsnash/errors.hpp"
#include "vsnash/harness.hpp"

using namespace vsnash;

namespace {

int cmd_run(const std::string& config_path, const std::string& out_override) {
  ExperimentConfig cfg = load_config(config_path);
  if (!out_override.empty()) cfg.output_dir = out_override;
  if (cfg.output_dir.empty()) throw ConfigError("no output_dir given in the config or on the command line");
  const ExperimentSetup setup = prepare_experiment(cfg);
  const ExperimentSummary summary = run_experiment(cfg, setup);
  write_outputs(cfg, setup, summary, cfg.output_dir);
  std::printf("iterations %zu  final_rel_err %.6e  final_mse %.6e  samples %lld\n", summary.mse.size() - 1,
              summary.final_rel_err, summary.final_mse,
              static_cast<long long>(summary.counters.back().samples));
  return 0;
}

int cmd_predict(const std::string& config_path, const std::vector<double>& eps) {
  const ExperimentConfig cfg = load_config(config_path);
  const ExperimentSetup setup = prepare_experiment(cfg);
  const RateParamsResult rp = rate_params(cfg, setup);
  nlohmann::json j;
  j["scheme"] = to_string(cfg.scheme);
  if (!rp.params) {
    j["error"] = rp.reason;
    std::cout << j.dump(2) << "\n";
    throw PreconditionError(rp.reason);
  }
  j["predictions"] = nlohmann::json::array();
  for (double e : eps) {
    const ComplexityPrediction p = predict_complexity(cfg.scheme, *rp.params, e);
    nlohmann::json row = {{"eps", e}, {"K", p.K_eps}, {"M", p.M_eps}, {"regime", to_string(p.regime)}};
    if (p.comm_eps) row["comm"] = *p.comm_eps;
    j["predictions"].push_back(row);
  }
  std::cout << j.dump(2) << "\n";
  return 0;
}

int cmd_plot(const std::vector<std::string>& traces, const std::string& out) {
  std::vector<std::filesystem::path> paths(traces.begin(), traces.end());
  const auto written = emit_plots(paths, out);
  for (const auto& p : written) std::cout << p.string() << "\n";
  return 0;
}

int cmd_gen_instance(const std::string& spec_path, const std::string& out) {
  const ExperimentConfig cfg = load_config(spec_path);
  const CournotInstance inst = cfg.family == Family::linear_cournot
                                   ? sample_linear_cournot(cfg.n, cfg.L, cfg.instance_seed, cfg.cournot)
                                   : sample_quadratic_cournot(cfg.n, cfg.L, cfg.instance_seed, cfg.cournot);
  const std::string text = instance_to_json(inst).dump(2) + "\n";
  if (out.empty()) {
    std::cout << text;
  } else {
    std::ofstream f(out, std::ios::binary);
    if (!f) throw ConfigError("cannot write " + out);
    f << text;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Variance-reduced Nash equilibrium solvers and experiment runner"};
  app.require_subcommand(1);

  std::string config_path, out;
  auto* run = app.add_subcommand("run", "run a configured experiment");
  run->add_option("config", config_path, "experiment config file")->required();
  run->add_option("-o,--out", out, "output directory (overrides output_dir)");

  std::vector<double> eps;
  auto* predict = app.add_subcommand("predict", "theoretical complexity bounds");
  predict->add_option("config", config_path, "experiment config file")->required();
  predict->add_option("--eps", eps, "target accuracies")->required();

  std::vector<std::string> traces;
  std::string plot_out = ".";
  auto* plot = app.add_subcommand("plot", "SVG plots of trace files");
  plot->add_option("traces", traces, "trace.csv files")->required();
  plot->add_option("-o,--out", plot_out, "output directory");

  std::string spec_path;
  auto* gen = app.add_subcommand("gen-instance", "sample a Cournot instance");
  gen->add_option("spec", spec_path, "config file with the instance keys")->required();
  gen->add_option("-o,--out", out, "output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (*run) return cmd_run(config_path, out);
    if (*predict) return cmd_predict(config_path, eps);
    if (*plot) return cmd_plot(traces, plot_out);
    if (*gen) return cmd_gen_instance(spec_path, out);
  } catch (const std::exception& e) {
    const int code = exit_code_for(e);
    nlohmann::json j = {{"error", e.what()}, {"exit_code", code}};
    std::cerr << j.dump() << "\n";
    return code;
  }
  return 1;
}
