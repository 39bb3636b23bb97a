#pragma once

#include <cstdint>
#include <optional>
#include <string>

namespace vsnash {

enum class BatchKind { geometric, polynomial, pbr_geometric, raw_geometric, constant };

// Per-iteration sample sizes S_k.
//   geometric      ceil(alpha^-2 rho^-(k+1))
//   polynomial     ceil(alpha^-2 (k+1)^v)
//   pbr_geometric  ceil(c_ns / eta_br^(2(k+1)))
//   raw_geometric  ceil(rho^-(k+1))
//   constant       size
struct BatchSchedule {
  BatchKind kind = BatchKind::constant;
  double alpha = 1.0;
  double rho = 0.5;
  double v = 1.0;
  double c_ns = 1.0;
  double eta_br = 0.5;
  std::int64_t size = 1;
  std::int64_t max_batch = 1'000'000;

  static BatchSchedule geometric(double alpha, double rho);
  static BatchSchedule polynomial(double alpha, double v);
  static BatchSchedule pbr_geometric(double c_ns, double eta_br);
  static BatchSchedule raw_geometric(double rho);
  static BatchSchedule constant(std::int64_t size);

  void validate() const;
};

std::int64_t batch_size(const BatchSchedule& schedule, std::int64_t k);

enum class CommKind { linear, polynomial, log };

// Consensus rounds tau_k: k+1, ceil((k+1)^u), or max(1, ceil(ln k)).
struct CommSchedule {
  CommKind kind = CommKind::linear;
  double u = 1.0;

  static CommSchedule linear() { return {}; }
  static CommSchedule polynomial(double u);
  static CommSchedule log() { return {CommKind::log, 1.0}; }

  void validate() const;
};

std::int64_t comm_rounds(const CommSchedule& schedule, std::int64_t k);

std::string to_string(BatchKind kind);
std::string to_string(CommKind kind);
BatchKind parse_batch_kind(const std::string& s);
CommKind parse_comm_kind(const std::string& s);

// Bound on v_k for v_{k+1} <= q v_k + c1 rho^(k+1), v_0 <= c0.
double recursion_bound(double c0, double c1, double q, double rho, int k);

struct CqvConstant {
  double c = 0.0;
  double maximizer = 0.0;
};

// c with q^(x^u) x^v <= c for all x > 0.
CqvConstant cqv_constant(double q, double u, double v);

enum class Scheme { vs_pgr, d_vs_pgr, vs_pbr, d_vs_pbr };
enum class Regime { rho_lt_q, rho_eq_q, rho_gt_q };

std::string to_string(Scheme scheme);
Scheme parse_scheme(const std::string& s);
std::string to_string(Regime regime);

// Inputs of the complexity bounds. Fields not used by a scheme are ignored.
//   vs_pgr    C, q, rho, alpha_nu_sq, sample_scale
//   d_vs_pgr  C, q (contraction of the distributed recursion), rho, beta, c3, sample_scale
//   vs_pbr    C, a, eta_br, n, c_ns
//   d_vs_pbr  C, a, eta_br, beta, c4, c_ns
// For the BR schemes the regime compares the batch rate with the contraction
// (rho_lt_q means eta_br < a, resp. gamma < a).
struct RateParams {
  double C = 1.0;
  double q = 0.0;
  double rho = 0.0;
  double alpha_nu_sq = 0.0;
  double sample_scale = 1.0;
  double beta = 0.0;
  double c3 = 0.0;
  double a = 0.0;
  double eta_br = 0.0;
  double n = 1.0;
  double c_ns = 1.0;
  double c4 = 0.0;
};

struct ComplexityPrediction {
  double K_eps = 0.0;
  double M_eps = 0.0;
  std::optional<double> comm_eps;
  Regime regime = Regime::rho_gt_q;
};

ComplexityPrediction predict_complexity(Scheme scheme, const RateParams& params, double eps);

struct TunedParams {
  double alpha = 0.0;
  double rho = 0.0;
};

// alpha = eta / L~^2, rho = 1 - 1/(2 kappa~^2).
TunedParams kappa_tuned_params(double eta, double L_tilde);
// alpha = eta / (2 L~^2), rho = max(1 - eta^2 / (a L~^2), beta); requires a > 2.
TunedParams kappa_tuned_params(double eta, double L_tilde, double a, double beta);

}  // namespace vsnash
