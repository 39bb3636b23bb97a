#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "vsnash/game.hpp"
#include "vsnash/graph.hpp"
#include "vsnash/schedules.hpp"

namespace vsnash {

struct InnerSolverConfig {
  double tol = 1e-10;
  std::int64_t max_iters = 100'000;
  // Solve separable quadratic subproblems in closed form (needs own_hessian_diag).
  bool closed_form = false;
};

struct SolverConfig {
  Scheme scheme = Scheme::vs_pgr;
  double alpha = 0.0;
  double mu = 0.0;
  BatchSchedule batch;
  CommSchedule comm;
  std::int64_t max_iters = 100;
  std::uint64_t seed = 0;
  std::optional<StrategyProfile> ground_truth;
  // Defaults to the projection of the origin onto the domain.
  std::optional<StrategyProfile> x0;
  InnerSolverConfig inner;
  // Stop before iteration k once this many samples have been drawn.
  std::optional<std::int64_t> sample_budget;
  bool skip_contraction_check = false;
  // Iterate snapshot period; 0 selects ceil(K/200).
  std::int64_t snapshot_every = 0;

  void validate() const;
};

enum class RunStatus { completed, budget_exhausted, diverged, inner_failure };

std::string to_string(RunStatus status);

constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();

// Record k describes x_k; counters are the totals spent producing x_k.
// consensus_error and tracker_gap refer to the estimates held at iteration k.
struct TraceRecord {
  std::int64_t k = 0;
  double mse = kMissing;
  double residual = kMissing;
  double consensus_error = kMissing;
  double tracker_gap = kMissing;
  ResourceCounters counters;
};

struct Snapshot {
  std::int64_t k = 0;
  StrategyProfile x;
};

struct RunTrace {
  std::vector<TraceRecord> records;
  std::vector<Snapshot> snapshots;
  StrategyProfile final_iterate;
  RunStatus status = RunStatus::completed;
  std::string diagnostic;

  std::vector<double> mse_series() const;
  std::vector<double> consensus_series() const;
  std::vector<double> tracker_series() const;
};

// Argument of a best-response subproblem: frozen rivals (general games) or an
// aggregate shift c so that the aggregate seen by the player is x_i + c.
struct BrContext {
  const StrategyProfile* rivals = nullptr;
  std::optional<Eigen::VectorXd> aggregate_shift;
};

struct BrSolution {
  Eigen::VectorXd x;
  std::int64_t iterations = 0;
  double residual = 0.0;
  bool converged = false;
};

// argmin (1/S) sum_p psi_i(.; xi_p) + r_i + (mu/2)|. - anchor|^2 with the sample
// draws as the rows of samples.
BrSolution solve_sample_average_br(const GameSpec& game, int player, const BrContext& context,
                                   const Eigen::MatrixXd& samples, double mu,
                                   const Eigen::VectorXd& anchor, const InnerSolverConfig& config,
                                   ResourceCounters& counters);

RunTrace vs_pgr(const GameSpec& game, const SolverConfig& config, NoiseStream& stream);
RunTrace d_vs_pgr(const GameSpec& game, const WeightedGraph& graph, const SolverConfig& config,
                  NoiseStream& stream);
RunTrace vs_pbr(const GameSpec& game, const SolverConfig& config, NoiseStream& stream);
RunTrace d_vs_pbr(const GameSpec& game, const WeightedGraph& graph, const SolverConfig& config,
                  NoiseStream& stream);

// Dispatch on config.scheme with a fresh stream seeded by config.seed.
// Distributed schemes require a graph.
RunTrace run_scheme(const GameSpec& game, const WeightedGraph* graph, const SolverConfig& config);

}  // namespace vsnash
