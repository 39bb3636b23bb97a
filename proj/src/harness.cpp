#include "vsnash/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <mutex>
#include <thread>

#include "vsnash/errors.hpp"

namespace vsnash {

namespace {

int worker_count(int jobs) {
  int w = static_cast<int>(std::thread::hardware_concurrency());
  if (const char* env = std::getenv("VSNASH_WORKERS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || v < 1) throw ConfigError("VSNASH_WORKERS must be a positive integer");
    w = static_cast<int>(v);
  }
  return std::clamp(w, 1, std::max(1, jobs));
}

bool gradient_scheme(Scheme s) { return s == Scheme::vs_pgr || s == Scheme::d_vs_pgr; }

// Sum over players of the largest norm in the box.
double domain_radius_sum(const GameSpec& game) {
  double total = 0.0;
  for (const auto& p : game.players)
    total += p.lower.cwiseAbs().cwiseMax(p.upper.cwiseAbs()).norm();
  return total;
}

// Consensus-error constants (C1, C2) with theta = 1; both vanish for exact averaging.
std::pair<double, double> consensus_constants(double DR, double beta) {
  if (beta <= 0.0) return {0.0, 0.0};
  const double lb = std::log(1.0 / beta);
  const double c1 = DR;
  const double c2 = 2.0 * DR * (std::exp(1.0) * std::sqrt(1.0 / (0.5 * lb)) + (2.0 + lb) / (std::sqrt(beta) * lb));
  return {c1, c2};
}

double br_constant(double mu, double L) {
  const double r = std::sqrt(mu * mu + L * L);
  return mu / (mu * mu + L * L) / (1.0 - L / r);
}

std::string fmt(double v) {
  if (std::isnan(v)) return "";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

nlohmann::json num_or_null(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); }

}  // namespace

double pbr_batch_constant(const CournotInstance& inst, double mu, bool distributed) {
  if (!(mu > 0.0)) throw ConfigError("mu must be positive");
  const Eigen::VectorXd nu = inst.noise_second_moments();
  double La = 0.0;
  for (int i = 0; i < inst.n; ++i) La = std::max(La, inst.own_lipschitz(i));
  double c = 0.0;
  for (int i = 0; i < inst.n; ++i) {
    const double Ci = br_constant(mu, distributed ? La : inst.own_lipschitz(i));
    c = std::max(c, nu(i) * Ci * Ci);
  }
  return c;
}

ExperimentSetup prepare_experiment(const ExperimentConfig& config) {
  config.validate();
  ExperimentSetup s;
  if (!config.instance_file.empty()) {
    std::ifstream f(config.instance_file);
    if (!f) throw ConfigError("cannot read instance file " + config.instance_file);
    nlohmann::json j;
    try {
      f >> j;
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(std::string("malformed instance file: ") + e.what());
    }
    s.instance = instance_from_json(j);
  } else if (config.family == Family::linear_cournot) {
    s.instance = sample_linear_cournot(config.n, config.L, config.instance_seed, config.cournot);
  } else {
    s.instance = sample_quadratic_cournot(config.n, config.L, config.instance_seed, config.cournot);
  }
  s.game = make_game(s.instance);

  if (gradient_scheme(config.scheme)) {
    if (!s.game.eta || !(*s.game.eta > 0.0))
      throw PreconditionError("gradient map is not strongly monotone on this instance");
  } else {
    const ContractionReport rep = gamma_matrix(s.game, config.mu);
    if (!rep.contractive)
      throw PreconditionError("proximal best-response map is not a contraction: |Gamma|_inf = " +
                              std::to_string(rep.a_inf));
  }
  if (config.distributed()) s.graph = make_graph(config.topology, s.instance.n, config.graph_seed);

  GroundTruthOptions go;
  go.mode = config.oracle;
  go.tol = config.oracle_tol;
  s.truth = ground_truth_ne(s.game, go);

  SolverConfig& sc = s.solver;
  sc.scheme = config.scheme;
  sc.alpha = config.alpha;
  sc.mu = config.mu;
  sc.batch = config.batch;
  if (sc.batch.kind == BatchKind::geometric || sc.batch.kind == BatchKind::polynomial) sc.batch.alpha = config.alpha;
  if (sc.batch.kind == BatchKind::pbr_geometric && sc.batch.c_ns == 0.0)
    sc.batch.c_ns = pbr_batch_constant(s.instance, config.mu, config.distributed());
  sc.comm = config.comm;
  sc.max_iters = config.max_iters;
  sc.seed = config.seed;
  sc.ground_truth = s.truth.x;
  sc.inner = config.inner;
  sc.sample_budget = config.budget;
  // The contraction certificate was checked above.
  sc.skip_contraction_check = true;
  sc.validate();
  return s;
}

RateParamsResult rate_params(const ExperimentConfig& config, const ExperimentSetup& s) {
  RateParamsResult out;
  const GameSpec& game = s.game;
  const int n = game.size();
  RateParams p;
  const StrategyProfile x0 = prox_profile(game, game.zero_profile(), 1.0);
  p.C = std::max((x0.data() - s.truth.x.data()).squaredNorm(), 1e-300);
  const double xs2 = s.truth.x.data().squaredNorm();
  const NoiseConstants nc = game.noise_constants.value_or(NoiseConstants{});
  const BatchSchedule& batch = s.solver.batch;
  const double beta = s.graph ? s.graph->beta : 0.0;
  const double DR = domain_radius_sum(game);
  const auto [C1, C2] = consensus_constants(DR, beta);

  if (gradient_scheme(config.scheme)) {
    if (batch.kind == BatchKind::geometric) {
      p.sample_scale = 1.0 / (config.alpha * config.alpha);
    } else if (batch.kind == BatchKind::raw_geometric) {
      p.sample_scale = 1.0;
    } else {
      out.reason = "closed-form bounds need geometric batches";
      return out;
    }
    p.rho = batch.rho;
    const double a = config.alpha;
    const double eta = game.eta.value_or(0.0);
    const double L = game.lipschitz.value_or(0.0);
    const double g = 1.0 + 2.0 * a * a;
    if (config.scheme == Scheme::vs_pgr) {
      const MonotonicityReport m = monotonicity_report(eta, L, a, nc.nu1);
      p.q = 1.0 - 2.0 * a * eta + a * a * m.L_tilde * m.L_tilde;
      const double nu_sq = 2.0 * g * nc.nu1 * nc.nu1 * xs2 + g * nc.nu2 * nc.nu2;
      p.alpha_nu_sq = nu_sq / p.sample_scale;
    } else {
      const double Lt2 = 0.5 + g * nc.nu1 * nc.nu1 + 2.0 * L * L;
      p.q = 1.0 - 2.0 * a * eta + 2.0 * a * a * Lt2;
      p.beta = beta;
      double sumL = 0.0, sumL2 = 0.0;
      for (const auto& pl : game.players) {
        sumL += pl.cross_lipschitz;
        sumL2 += pl.cross_lipschitz * pl.cross_lipschitz;
      }
      const double nubar_sq = g * (2.0 * nc.nu1 * nc.nu1 * xs2 + nc.nu2 * nc.nu2);
      p.c3 = nubar_sq / p.sample_scale + 4.0 * a * n * DR * (C1 + C2) * sumL +
             4.0 * a * a * n * n * beta * (C1 * C1 + C2 * C2) * sumL2;
    }
    if (!(p.q > 0.0 && p.q < 1.0)) {
      out.reason = "contraction factor q = " + std::to_string(p.q) + " lies outside (0,1)";
      return out;
    }
  } else {
    if (batch.kind != BatchKind::pbr_geometric) {
      out.reason = "closed-form bounds need pbr_geometric batches";
      return out;
    }
    p.a = gamma_matrix(game, config.mu).a_inf;
    p.eta_br = batch.eta_br;
    p.n = n;
    p.c_ns = batch.c_ns;
    if (config.scheme == Scheme::d_vs_pbr) {
      double La = 0.0, Lg = 0.0;
      for (const auto& pl : game.players) {
        La = std::max(La, pl.own_lipschitz);
        Lg = std::max(Lg, pl.cross_lipschitz);
      }
      const double Lt = config.mu * Lg / (config.mu * config.mu + La * La) /
                        (1.0 - La / std::sqrt(config.mu * config.mu + La * La));
      p.beta = beta;
      p.c4 = std::sqrt(n) + std::pow(n, 1.5) * Lt * (C1 + C2);
    }
  }
  out.params = p;
  return out;
}

ExperimentSummary run_experiment(const ExperimentConfig& config) {
  const ExperimentSetup setup = prepare_experiment(config);
  return run_experiment(config, setup);
}

ExperimentSummary run_experiment(const ExperimentConfig& config, const ExperimentSetup& setup) {
  const auto start = std::chrono::steady_clock::now();
  const int R = config.replications;
  std::vector<RunTrace> traces(R);
  std::vector<std::exception_ptr> errors(R);
  std::atomic<int> next{0};
  const WeightedGraph* graph = setup.graph ? &*setup.graph : nullptr;
  auto work = [&] {
    for (int r = next++; r < R; r = next++) {
      try {
        SolverConfig sc = setup.solver;
        sc.seed = config.seed + static_cast<std::uint64_t>(r);
        traces[r] = run_scheme(setup.game, graph, sc);
      } catch (...) {
        errors[r] = std::current_exception();
      }
    }
  };
  const int W = worker_count(R);
  std::vector<std::thread> pool;
  for (int w = 1; w < W; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  ExperimentSummary s;
  s.players = setup.game.size();
  s.truth_norm = setup.truth.x.data().norm();
  s.truth_residual = setup.truth.residual;
  for (int r = 0; r < R; ++r) {
    s.statuses.push_back(traces[r].status);
    if (traces[r].status == RunStatus::diverged || traces[r].status == RunStatus::inner_failure)
      throw DivergenceError("replication " + std::to_string(r) + " " + to_string(traces[r].status) + ": " +
                            traces[r].diagnostic);
  }
  std::size_t K = traces[0].records.size();
  for (const auto& t : traces) K = std::min(K, t.records.size());

  s.mse.assign(K, 0.0);
  s.rel_err.assign(K, 0.0);
  s.consensus_err.assign(K, 0.0);
  s.tracker_gap.assign(K, 0.0);
  s.counters.resize(K);
  for (std::size_t k = 0; k < K; ++k) {
    for (int r = 0; r < R; ++r) {
      const TraceRecord& rec = traces[r].records[k];
      s.mse[k] += rec.mse;
      s.rel_err[k] += std::sqrt(rec.mse);
      s.consensus_err[k] += rec.consensus_error;
      s.tracker_gap[k] += rec.tracker_gap;
    }
    s.mse[k] /= R;
    s.rel_err[k] = s.truth_norm > 0.0 ? s.rel_err[k] / R / s.truth_norm : kMissing;
    s.consensus_err[k] /= R;
    s.tracker_gap[k] /= R;
    s.counters[k] = traces[0].records[k].counters;
  }
  s.final_mse = s.mse.back();
  s.final_rel_err = s.rel_err.back();
  try {
    const FitRegime regime =
        config.batch.kind == BatchKind::polynomial ? FitRegime::polynomial : FitRegime::linear;
    s.fit = fit_rate(s.mse, regime);
  } catch (const DomainError&) {
    s.fit.reset();
  }
  const RateParamsResult rp = rate_params(config, setup);
  s.params = rp.params;
  s.params_note = rp.reason;
  s.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return s;
}

ComplexityReport compare_complexity(const std::vector<double>& series,
                                    const std::vector<ResourceCounters>& counters,
                                    const std::optional<ComplexityPrediction>& bound, double eps,
                                    int players) {
  if (!(eps > 0.0)) throw DomainError("compare_complexity: eps must be positive");
  if (series.size() != counters.size()) throw ConfigError("series and counters differ in length");
  if (players < 1) throw ConfigError("compare_complexity: players must be positive");
  ComplexityReport r;
  r.eps = eps;
  r.bound = bound;
  const auto idx = epsilon_ne_index(series, eps);
  if (!idx) return r;
  r.reached = true;
  r.K_hat = *idx;
  r.M_hat = counters[*idx].samples;
  r.comm_hat = counters[*idx].comm_rounds;
  if (bound) {
    const double slack = 1e-9;
    const double K_cap = std::ceil(bound->K_eps - slack);
    r.violation = r.K_hat > K_cap ||
                  static_cast<double>(r.M_hat) / players > bound->M_eps * (1.0 + slack) ||
                  (bound->comm_eps && static_cast<double>(r.comm_hat) > *bound->comm_eps * (1.0 + slack));
  }
  return r;
}

ComplexityReport compare_complexity(const ExperimentSummary& summary, Scheme scheme, double eps) {
  std::optional<ComplexityPrediction> bound;
  if (summary.params) bound = predict_complexity(scheme, *summary.params, eps);
  return compare_complexity(summary.mse, summary.counters, bound, eps, summary.players);
}

nlohmann::json report_to_json(const ComplexityReport& r) {
  nlohmann::json j;
  j["eps"] = r.eps;
  j["reached"] = r.reached;
  if (r.reached) {
    j["K_hat"] = r.K_hat;
    j["M_hat"] = r.M_hat;
    j["comm_hat"] = r.comm_hat;
  } else {
    j["status"] = "not reached";
  }
  if (r.bound) {
    j["K_bound"] = num_or_null(r.bound->K_eps);
    j["M_bound"] = num_or_null(r.bound->M_eps);
    if (r.bound->comm_eps) j["comm_bound"] = num_or_null(*r.bound->comm_eps);
    j["regime"] = to_string(r.bound->regime);
  }
  j["violation"] = r.violation;
  return j;
}

std::string format_trace_csv(const ExperimentSummary& s) {
  std::string out = "k,mse,rel_err,consensus_err,prox_evals,samples,comm_rounds,inner_solves\n";
  for (std::size_t k = 0; k < s.mse.size(); ++k) {
    const ResourceCounters& c = s.counters[k];
    out += std::to_string(k) + "," + fmt(s.mse[k]) + "," + fmt(s.rel_err[k]) + "," + fmt(s.consensus_err[k]) +
           "," + std::to_string(c.prox_evals) + "," + std::to_string(c.samples) + "," +
           std::to_string(c.comm_rounds) + "," + std::to_string(c.inner_solves) + "\n";
  }
  return out;
}

namespace {

void write_file(const std::filesystem::path& p, const std::string& content) {
  std::ofstream f(p, std::ios::binary);
  if (!f) throw ConfigError("cannot write " + p.string());
  f << content;
}

nlohmann::json params_to_json(const RateParams& p) {
  return {{"C", p.C},       {"q", p.q},         {"rho", p.rho},   {"alpha_nu_sq", p.alpha_nu_sq},
          {"sample_scale", p.sample_scale},     {"beta", p.beta}, {"c3", p.c3},
          {"a", p.a},       {"eta_br", p.eta_br}, {"n", p.n},     {"c_ns", p.c_ns},
          {"c4", p.c4}};
}

}  // namespace

void write_outputs(const ExperimentConfig& config, const ExperimentSetup& setup,
                   const ExperimentSummary& summary, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  write_file(dir / "trace.csv", format_trace_csv(summary));
  write_file(dir / "instance.json", instance_to_json(setup.instance).dump(2) + "\n");

  nlohmann::json j;
  j["config"] = config_entries(config);
  j["price_noise_base"] = to_string(setup.instance.price_noise_base);
  j["replications"] = config.replications;
  j["statuses"] = nlohmann::json::array();
  for (RunStatus st : summary.statuses) j["statuses"].push_back(to_string(st));
  j["ground_truth"] = {{"x", std::vector<double>(setup.truth.x.data().data(),
                                                 setup.truth.x.data().data() + setup.truth.x.total_dim())},
                       {"norm", summary.truth_norm},
                       {"residual", summary.truth_residual},
                       {"iterations", setup.truth.iterations},
                       {"alpha", setup.truth.alpha},
                       {"mode", to_string(config.oracle)}};
  if (setup.graph)
    j["graph"] = {{"topology", to_string(setup.graph->kind)},
                  {"n", setup.graph->n},
                  {"seed", setup.graph->seed},
                  {"edges", setup.graph->edges},
                  {"beta", setup.graph->beta},
                  {"attempts", setup.graph->attempts}};
  const NoiseConstants nc = setup.game.noise_constants.value_or(NoiseConstants{});
  j["noise_constants"] = {{"nu1", nc.nu1}, {"nu2", nc.nu2}};
  if (setup.game.eta && setup.game.lipschitz) {
    const MonotonicityReport m = monotonicity_report(*setup.game.eta, *setup.game.lipschitz,
                                                     config.alpha, nc.nu1);
    j["monotonicity"] = {{"eta", m.eta},         {"L", m.L},
                         {"alpha", m.alpha},     {"nu1", m.nu1},
                         {"L_tilde", m.L_tilde}, {"kappa_tilde", m.kappa_tilde}};
  }
  if (setup.game.hessian_bounds) {
    const ContractionReport cr = gamma_matrix(setup.game, config.mu);
    nlohmann::json gamma = nlohmann::json::array();
    for (Eigen::Index r = 0; r < cr.Gamma.rows(); ++r) {
      std::vector<double> row(cr.Gamma.cols());
      for (Eigen::Index c = 0; c < cr.Gamma.cols(); ++c) row[c] = cr.Gamma(r, c);
      gamma.push_back(row);
    }
    j["contraction"] = {{"mu", config.mu},
                        {"Gamma", gamma},
                        {"a_inf", cr.a_inf},
                        {"spectral_radius", cr.spectral_radius},
                        {"contractive", cr.contractive}};
  }
  j["batch"] = {{"kind", to_string(setup.solver.batch.kind)},
                {"alpha", setup.solver.batch.alpha},
                {"c_ns", setup.solver.batch.c_ns}};
  j["iterations"] = summary.mse.empty() ? 0 : static_cast<std::int64_t>(summary.mse.size() - 1);
  j["final_mse"] = num_or_null(summary.final_mse);
  j["final_rel_err"] = num_or_null(summary.final_rel_err);
  const ResourceCounters& c = summary.counters.back();
  j["counters"] = {{"prox_evals", c.prox_evals},
                   {"samples", c.samples},
                   {"comm_rounds", c.comm_rounds},
                   {"inner_solves", c.inner_solves}};
  if (summary.fit)
    j["rate_fit"] = {{"slope", summary.fit->slope},
                     {"intercept", summary.fit->intercept},
                     {"r_squared", summary.fit->r_squared},
                     {"window", {summary.fit->window.lo, summary.fit->window.hi}}};
  if (summary.params)
    j["rate_params"] = params_to_json(*summary.params);
  else
    j["rate_params_note"] = summary.params_note;
  j["complexity"] = nlohmann::json::array();
  for (double e : config.eps) j["complexity"].push_back(report_to_json(compare_complexity(summary, config.scheme, e)));
  j["wall_seconds"] = summary.wall_seconds;
  write_file(dir / "summary.json", j.dump(2) + "\n");

  if (config.plot) emit_plots({dir / "trace.csv"}, dir);
}

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const ScheduleError*>(&e)) return 2;
  if (dynamic_cast<const PreconditionError*>(&e) || dynamic_cast<const DomainError*>(&e) ||
      dynamic_cast<const OracleError*>(&e))
    return 3;
  if (dynamic_cast<const DivergenceError*>(&e)) return 4;
  return 1;
}

}  // namespace vsnash
