#include "vsnash/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "vsnash/analysis.hpp"
#include "vsnash/errors.hpp"

namespace vsnash {

std::string to_string(RunStatus status) {
  switch (status) {
    case RunStatus::completed: return "completed";
    case RunStatus::budget_exhausted: return "budget_exhausted";
    case RunStatus::diverged: return "diverged";
    case RunStatus::inner_failure: return "inner_failure";
  }
  return "?";
}

void SolverConfig::validate() const {
  if (max_iters < 1) throw ConfigError("max_iters must be at least 1");
  const bool gradient = scheme == Scheme::vs_pgr || scheme == Scheme::d_vs_pgr;
  if (gradient && !(alpha > 0.0)) throw ConfigError("gradient schemes need alpha > 0");
  if (!gradient && !(mu > 0.0)) throw ConfigError("best-response schemes need mu > 0");
  batch.validate();
  comm.validate();
  if (!(inner.tol > 0.0) || inner.max_iters < 1) throw ConfigError("invalid inner solver settings");
  if (sample_budget && *sample_budget < 1) throw ConfigError("sample budget must be at least 1");
}

namespace {

std::vector<double> column(const std::vector<TraceRecord>& records, double TraceRecord::*field) {
  std::vector<double> out;
  out.reserve(records.size());
  for (const auto& r : records) out.push_back(r.*field);
  return out;
}

}  // namespace

std::vector<double> RunTrace::mse_series() const { return column(records, &TraceRecord::mse); }
std::vector<double> RunTrace::consensus_series() const {
  return column(records, &TraceRecord::consensus_error);
}
std::vector<double> RunTrace::tracker_series() const { return column(records, &TraceRecord::tracker_gap); }

namespace {

// Bookkeeping shared by all schemes: records, snapshots, budget and divergence.
class Recorder {
public:
  Recorder(const GameSpec& game, const SolverConfig& cfg, double residual_step)
      : game_(game), cfg_(cfg), residual_step_(residual_step) {
    cfg.validate();
    game.validate();
    if (cfg.ground_truth && cfg.ground_truth->dims() != game.dims())
      throw ConfigError("ground truth does not match the game");
    every_ = cfg.snapshot_every > 0 ? cfg.snapshot_every : (cfg.max_iters + 199) / 200;
    const double diam = game.domain_diameter();
    guard_ = 1e6 * (std::isfinite(diam) ? std::max(1.0, diam) : 1.0);
  }

  StrategyProfile initial_point() {
    StrategyProfile x = cfg_.x0 ? *cfg_.x0 : prox_profile(game_, game_.zero_profile(), 1.0);
    if (x.dims() != game_.dims()) throw ConfigError("initial point does not match the game");
    if (!std::isfinite(game_.domain_diameter())) guard_ = 1e6 * std::max(1.0, x.data().norm());
    return x;
  }

  bool budget_spent(const ResourceCounters& c) const {
    return cfg_.sample_budget && c.samples >= *cfg_.sample_budget;
  }

  bool diverged(const StrategyProfile& x) const {
    return !x.finite() || x.data().norm() > guard_;
  }

  TraceRecord& record(std::int64_t k, const StrategyProfile& x, const ResourceCounters& c) {
    TraceRecord r;
    r.k = k;
    r.counters = c;
    if (x.finite()) {
      if (cfg_.ground_truth)
        r.mse = (x.data() - cfg_.ground_truth->data()).squaredNorm();
      else
        r.residual = fixed_point_residual(game_, x, residual_step_);
    }
    trace.records.push_back(r);
    if (k % every_ == 0) trace.snapshots.push_back({k, x});
    return trace.records.back();
  }

  void finish(const StrategyProfile& x) {
    trace.final_iterate = x;
    const std::int64_t k = trace.records.empty() ? 0 : trace.records.back().k;
    if (trace.snapshots.empty() || trace.snapshots.back().k != k) trace.snapshots.push_back({k, x});
  }

  RunTrace trace;

private:
  const GameSpec& game_;
  const SolverConfig& cfg_;
  double residual_step_;
  std::int64_t every_ = 1;
  double guard_ = 1e6;
};

void check_distributed(const GameSpec& game, const WeightedGraph& graph) {
  if (game.kind != GameKind::aggregative) throw ConfigError("distributed schemes need an aggregative game");
  if (graph.n != game.size() || graph.A.rows() != game.size())
    throw ConfigError("graph size does not match the number of players");
  if (!game.compact()) throw PreconditionError("distributed schemes need compact strategy sets");
}

void check_contraction(const GameSpec& game, const SolverConfig& cfg) {
  if (cfg.skip_contraction_check) return;
  const ContractionReport rep = gamma_matrix(game, cfg.mu);
  if (!rep.contractive)
    throw PreconditionError("proximal best-response map is not a contraction: |Gamma|_inf = " +
                            std::to_string(rep.a_inf));
}

double max_abs_mean_gap(const Eigen::MatrixXd& V, const Eigen::MatrixXd& X) {
  return (V.colwise().mean() - X.colwise().mean()).cwiseAbs().maxCoeff();
}

double consensus_error(const Eigen::MatrixXd& Vhat, const Eigen::RowVectorXd& y) {
  return (Vhat.rowwise() - y).rowwise().norm().maxCoeff();
}

Eigen::MatrixXd player_samples(const GameSpec& game, int i, const NoiseStream& stream, std::int64_t S) {
  if (game.players[i].affine_in_noise) {
    Eigen::VectorXd mean(game.noise.dim(i));
    game.noise.batch_mean(stream.seed, i, stream.iteration, S, mean);
    return mean.transpose();
  }
  return game.noise.batch(stream.seed, i, stream.iteration, S);
}

}  // namespace

RunTrace vs_pgr(const GameSpec& game, const SolverConfig& cfg, NoiseStream& stream) {
  Recorder rec(game, cfg, cfg.alpha);
  StrategyProfile x = rec.initial_point();
  ResourceCounters c;
  rec.record(0, x, c);
  for (std::int64_t k = 0; k < cfg.max_iters; ++k) {
    if (rec.budget_spent(c)) {
      rec.trace.status = RunStatus::budget_exhausted;
      break;
    }
    const std::int64_t S = batch_size(cfg.batch, k);
    stream.iteration = k;
    const std::int64_t before = stream.samples;
    StrategyProfile y = x;
    y.data() -= cfg.alpha * sampled_gradient(game, x, S, stream).data();
    c.samples += stream.samples - before;
    StrategyProfile next = prox_profile(game, y, cfg.alpha, c);
    if (rec.diverged(next)) {
      rec.trace.status = RunStatus::diverged;
      rec.trace.diagnostic = "iterate left the divergence guard at k=" + std::to_string(k + 1);
      rec.record(k + 1, next, c);
      break;
    }
    x = std::move(next);
    rec.record(k + 1, x, c);
  }
  rec.finish(x);
  return std::move(rec.trace);
}

RunTrace d_vs_pgr(const GameSpec& game, const WeightedGraph& graph, const SolverConfig& cfg,
                  NoiseStream& stream) {
  check_distributed(game, graph);
  Recorder rec(game, cfg, cfg.alpha);
  StrategyProfile x = rec.initial_point();
  const double n = game.size();
  Eigen::MatrixXd X = x.as_rows();
  Eigen::MatrixXd V = X;
  ResourceCounters c;
  rec.record(0, x, c).tracker_gap = 0.0;
  for (std::int64_t k = 0; k < cfg.max_iters; ++k) {
    if (rec.budget_spent(c)) {
      rec.trace.status = RunStatus::budget_exhausted;
      break;
    }
    const std::int64_t S = batch_size(cfg.batch, k);
    const std::int64_t tau = comm_rounds(cfg.comm, k);
    const Eigen::MatrixXd Vhat = consensus_step(V, graph.A, tau, c.comm_rounds);
    rec.trace.records.back().consensus_error = consensus_error(Vhat, V.colwise().mean());

    stream.iteration = k;
    const std::int64_t before = stream.samples;
    StrategyProfile y = x;
    y.data() -= cfg.alpha * sampled_gradient(game, x, n * Vhat, S, stream).data();
    c.samples += stream.samples - before;
    StrategyProfile next = prox_profile(game, y, cfg.alpha, c);
    if (rec.diverged(next)) {
      rec.trace.status = RunStatus::diverged;
      rec.trace.diagnostic = "iterate left the divergence guard at k=" + std::to_string(k + 1);
      rec.record(k + 1, next, c);
      break;
    }
    const Eigen::MatrixXd Xnext = next.as_rows();
    V = Vhat + Xnext - X;
    X = Xnext;
    x = std::move(next);
    rec.record(k + 1, x, c).tracker_gap = max_abs_mean_gap(V, X);
  }
  rec.finish(x);
  return std::move(rec.trace);
}

namespace {

// One synchronous best-response sweep; context(i) builds player i's subproblem argument.
template <typename ContextFn>
bool br_sweep(const GameSpec& game, const SolverConfig& cfg, const StrategyProfile& x,
              std::int64_t S, NoiseStream& stream, ResourceCounters& c, StrategyProfile& next,
              std::string& diagnostic, ContextFn context) {
  next = x;
  for (int i = 0; i < game.size(); ++i) {
    const Eigen::MatrixXd samples = player_samples(game, i, stream, S);
    stream.samples += S;
    const BrContext ctx = context(i);
    const BrSolution sol =
        solve_sample_average_br(game, i, ctx, samples, cfg.mu, x.block(i), cfg.inner, c);
    if (!sol.converged) {
      diagnostic = "inner solver for player " + std::to_string(i) + " stopped at residual " +
                   std::to_string(sol.residual) + " after " + std::to_string(sol.iterations) +
                   " iterations at k=" + std::to_string(stream.iteration);
      return false;
    }
    next.block(i) = sol.x;
  }
  return true;
}

}  // namespace

RunTrace vs_pbr(const GameSpec& game, const SolverConfig& cfg, NoiseStream& stream) {
  check_contraction(game, cfg);
  Recorder rec(game, cfg, 1.0 / cfg.mu);
  StrategyProfile x = rec.initial_point();
  ResourceCounters c;
  rec.record(0, x, c);
  StrategyProfile next;
  for (std::int64_t k = 0; k < cfg.max_iters; ++k) {
    if (rec.budget_spent(c)) {
      rec.trace.status = RunStatus::budget_exhausted;
      break;
    }
    const std::int64_t S = batch_size(cfg.batch, k);
    stream.iteration = k;
    const std::int64_t before = stream.samples;
    Eigen::VectorXd total;
    if (game.kind == GameKind::aggregative) {
      total = Eigen::VectorXd::Zero(game.players[0].dim);
      for (int j = 0; j < game.size(); ++j) total += x.block(j);
    }
    const bool ok = br_sweep(game, cfg, x, S, stream, c, next, rec.trace.diagnostic, [&](int i) {
      BrContext ctx;
      if (game.kind == GameKind::aggregative)
        ctx.aggregate_shift = total - x.block(i);
      else
        ctx.rivals = &x;
      return ctx;
    });
    c.samples += stream.samples - before;
    if (!ok) {
      rec.trace.status = RunStatus::inner_failure;
      break;
    }
    if (rec.diverged(next)) {
      rec.trace.status = RunStatus::diverged;
      rec.trace.diagnostic = "iterate left the divergence guard at k=" + std::to_string(k + 1);
      rec.record(k + 1, next, c);
      break;
    }
    x = next;
    rec.record(k + 1, x, c);
  }
  rec.finish(x);
  return std::move(rec.trace);
}

RunTrace d_vs_pbr(const GameSpec& game, const WeightedGraph& graph, const SolverConfig& cfg,
                  NoiseStream& stream) {
  check_distributed(game, graph);
  check_contraction(game, cfg);
  Recorder rec(game, cfg, 1.0 / cfg.mu);
  StrategyProfile x = rec.initial_point();
  const double n = game.size();
  Eigen::MatrixXd X = x.as_rows();
  Eigen::MatrixXd V = X;
  ResourceCounters c;
  rec.record(0, x, c).tracker_gap = 0.0;
  StrategyProfile next;
  for (std::int64_t k = 0; k < cfg.max_iters; ++k) {
    if (rec.budget_spent(c)) {
      rec.trace.status = RunStatus::budget_exhausted;
      break;
    }
    const std::int64_t S = batch_size(cfg.batch, k);
    const std::int64_t tau = comm_rounds(cfg.comm, k);
    const Eigen::MatrixXd Vhat = consensus_step(V, graph.A, tau, c.comm_rounds);
    rec.trace.records.back().consensus_error = consensus_error(Vhat, V.colwise().mean());

    stream.iteration = k;
    const std::int64_t before = stream.samples;
    const bool ok = br_sweep(game, cfg, x, S, stream, c, next, rec.trace.diagnostic, [&](int i) {
      BrContext ctx;
      ctx.aggregate_shift = Eigen::VectorXd(n * Vhat.row(i).transpose() - x.block(i));
      return ctx;
    });
    c.samples += stream.samples - before;
    if (!ok) {
      rec.trace.status = RunStatus::inner_failure;
      break;
    }
    if (rec.diverged(next)) {
      rec.trace.status = RunStatus::diverged;
      rec.trace.diagnostic = "iterate left the divergence guard at k=" + std::to_string(k + 1);
      rec.record(k + 1, next, c);
      break;
    }
    const Eigen::MatrixXd Xnext = next.as_rows();
    V = Vhat + Xnext - X;
    X = Xnext;
    x = next;
    rec.record(k + 1, x, c).tracker_gap = max_abs_mean_gap(V, X);
  }
  rec.finish(x);
  return std::move(rec.trace);
}

RunTrace run_scheme(const GameSpec& game, const WeightedGraph* graph, const SolverConfig& cfg) {
  NoiseStream stream{cfg.seed, 0, 0};
  switch (cfg.scheme) {
    case Scheme::vs_pgr:
      return vs_pgr(game, cfg, stream);
    case Scheme::vs_pbr:
      return vs_pbr(game, cfg, stream);
    case Scheme::d_vs_pgr:
      if (graph == nullptr) throw ConfigError("d_vs_pgr needs a communication graph");
      return d_vs_pgr(game, *graph, cfg, stream);
    case Scheme::d_vs_pbr:
      if (graph == nullptr) throw ConfigError("d_vs_pbr needs a communication graph");
      return d_vs_pbr(game, *graph, cfg, stream);
  }
  throw ConfigError("unknown scheme");
}

}  // namespace vsnash
