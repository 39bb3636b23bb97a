#pragma once

#include <cstdint>
#include <exception>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "vsnash/analysis.hpp"
#include "vsnash/cournot.hpp"
#include "vsnash/graph.hpp"
#include "vsnash/schedules.hpp"
#include "vsnash/solvers.hpp"

namespace vsnash {

enum class Family { linear_cournot, quadratic_cournot };
enum class Metric { mse, relative_error };

std::string to_string(Family f);
std::string to_string(Metric m);
std::string to_string(OracleMode m);

// Flat key = value experiment description. Lines starting with '#' are
// comments; unknown keys and malformed values are ConfigErrors.
//
//   family            linear_cournot | quadratic_cournot
//   n, L              firms and markets
//   instance_seed     seed of the instance draw
//   cap               capacity per firm and market
//   price_noise_base  d | b
//   noise_scale       multiplier of all noise half-widths
//   instance_file     replay an instance.json instead of sampling one
//   scheme            vs_pgr | d_vs_pgr | vs_pbr | d_vs_pbr
//   alpha, mu         step size (gradient schemes), proximal weight (BR schemes)
//   batch             geometric | polynomial | pbr_geometric | raw_geometric | constant
//   batch_rho, batch_v, batch_eta_br, batch_size, max_batch
//   batch_c_ns        0 derives the constant from the instance
//   comm, comm_u      linear | polynomial | log, with the exponent of polynomial
//   topology          complete | cycle | star | erdos_renyi
//   graph_seed
//   max_iters, seed, replications, budget
//   metric            mse | relative_error
//   inner_tol, inner_max_iters, inner_closed_form
//   oracle, oracle_tol
//   eps               comma-separated accuracies for the complexity report
//   output_dir, plot
struct ExperimentConfig {
  Family family = Family::linear_cournot;
  int n = 20;
  int L = 10;
  std::uint64_t instance_seed = 1;
  CournotOptions cournot;
  std::string instance_file;

  Scheme scheme = Scheme::vs_pgr;
  double alpha = 0.01;
  double mu = 20.0;
  BatchSchedule batch = BatchSchedule::raw_geometric(0.98);
  CommSchedule comm = CommSchedule::linear();
  Topology topology = Topology::complete;
  std::uint64_t graph_seed = 1;

  std::int64_t max_iters = 1000;
  std::uint64_t seed = 1;
  int replications = 50;
  std::int64_t budget = 1'000'000;
  Metric metric = Metric::relative_error;
  InnerSolverConfig inner;
  OracleMode oracle = OracleMode::fixed_point;
  double oracle_tol = 1e-12;
  std::vector<double> eps;
  std::string output_dir;
  bool plot = false;

  void validate() const;
  bool distributed() const { return scheme == Scheme::d_vs_pgr || scheme == Scheme::d_vs_pbr; }
};

ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::filesystem::path& path);
// Canonical key/value form; parse_config(format_config(c)) reproduces c.
std::map<std::string, std::string> config_entries(const ExperimentConfig& c);
std::string format_config(const ExperimentConfig& c);

nlohmann::json instance_to_json(const CournotInstance& inst);
CournotInstance instance_from_json(const nlohmann::json& j);

// Everything an experiment needs before the first run.
struct ExperimentSetup {
  CournotInstance instance;
  GameSpec game;
  std::optional<WeightedGraph> graph;
  GroundTruth truth;
  SolverConfig solver;
};

ExperimentSetup prepare_experiment(const ExperimentConfig& config);

// Per-player noise variances nu_i^2 of the instance and the derived batch
// constant max_i nu_i^2 C_i^2 for the BR schemes.
double pbr_batch_constant(const CournotInstance& inst, double mu, bool distributed);

// Constants of the complexity bounds for the configured scheme; nullopt with
// a reason when the bounds do not apply (e.g. q >= 1, polynomial batches).
struct RateParamsResult {
  std::optional<RateParams> params;
  std::string reason;
};

RateParamsResult rate_params(const ExperimentConfig& config, const ExperimentSetup& setup);

struct ExperimentSummary {
  // Pointwise averages over replications, indexed by k.
  std::vector<double> mse;
  std::vector<double> rel_err;
  std::vector<double> consensus_err;
  std::vector<double> tracker_gap;
  std::vector<ResourceCounters> counters;
  double truth_norm = 0.0;
  double truth_residual = 0.0;
  double final_rel_err = 0.0;
  double final_mse = 0.0;
  std::optional<RateFit> fit;
  std::optional<RateParams> params;
  std::string params_note;
  std::vector<RunStatus> statuses;
  int players = 0;
  double wall_seconds = 0.0;

  // Series selected by the config metric.
  const std::vector<double>& metric_series(Metric m) const { return m == Metric::mse ? mse : rel_err; }
};

// Replications run on VSNASH_WORKERS threads (default: hardware concurrency);
// results are merged in replication order so the output is independent of it.
ExperimentSummary run_experiment(const ExperimentConfig& config);
ExperimentSummary run_experiment(const ExperimentConfig& config, const ExperimentSetup& setup);

struct ComplexityReport {
  double eps = 0.0;
  bool reached = false;
  std::int64_t K_hat = 0;
  std::int64_t M_hat = 0;
  std::int64_t comm_hat = 0;
  std::optional<ComplexityPrediction> bound;
  bool violation = false;
};

// Empirical K, M and communication at the first k with series[k] <= eps,
// against the theoretical bounds. series should be the MSE trace. M_hat counts
// samples of all players; the bound is per player, so M_hat / players is compared.
ComplexityReport compare_complexity(const std::vector<double>& series,
                                    const std::vector<ResourceCounters>& counters,
                                    const std::optional<ComplexityPrediction>& bound, double eps,
                                    int players);
ComplexityReport compare_complexity(const ExperimentSummary& summary, Scheme scheme, double eps);

nlohmann::json report_to_json(const ComplexityReport& r);

// trace.csv: k,mse,rel_err,consensus_err,prox_evals,samples,comm_rounds,inner_solves
std::string format_trace_csv(const ExperimentSummary& s);
void write_outputs(const ExperimentConfig& config, const ExperimentSetup& setup,
                   const ExperimentSummary& summary, const std::filesystem::path& dir);

struct TraceTable {
  std::vector<double> k, mse, rel_err, consensus_err, samples;
};

TraceTable read_trace_csv(const std::filesystem::path& path);

struct PlotSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

struct PlotSpec {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_x = false;
  bool log_y = true;
};

// Standalone SVG line chart; empty string when no series has a plottable point.
std::string render_svg(const std::vector<PlotSeries>& series, const PlotSpec& spec);

// Two panels per call: error vs iteration and error vs cumulative samples,
// one series per trace file. Returns the files written.
std::vector<std::filesystem::path> emit_plots(const std::vector<std::filesystem::path>& traces,
                                              const std::filesystem::path& out_dir);

// 0 success, 2 configuration, 3 precondition, 4 divergence, 1 anything else.
int exit_code_for(const std::exception& e);

}  // namespace vsnash
