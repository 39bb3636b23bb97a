#include "vsnash/schedules.hpp"

#include <algorithm>
#include <cmath>

#include "vsnash/errors.hpp"

namespace vsnash {

namespace {

// Ceiling that ignores representation error of formulas with integer values,
// e.g. 1/0.01^2 = 10000.000000000002.
double snapped_ceil(double v) {
  const double r = std::round(v);
  if (std::abs(v - r) <= 1e-12 * std::max(1.0, std::abs(v))) return r;
  return std::ceil(v);
}

bool in_open_unit(double x) { return x > 0.0 && x < 1.0; }

}  // namespace

BatchSchedule BatchSchedule::geometric(double alpha, double rho) {
  BatchSchedule s;
  s.kind = BatchKind::geometric;
  s.alpha = alpha;
  s.rho = rho;
  s.validate();
  return s;
}

BatchSchedule BatchSchedule::polynomial(double alpha, double v) {
  BatchSchedule s;
  s.kind = BatchKind::polynomial;
  s.alpha = alpha;
  s.v = v;
  s.validate();
  return s;
}

BatchSchedule BatchSchedule::pbr_geometric(double c_ns, double eta_br) {
  BatchSchedule s;
  s.kind = BatchKind::pbr_geometric;
  s.c_ns = c_ns;
  s.eta_br = eta_br;
  s.validate();
  return s;
}

BatchSchedule BatchSchedule::raw_geometric(double rho) {
  BatchSchedule s;
  s.kind = BatchKind::raw_geometric;
  s.rho = rho;
  s.validate();
  return s;
}

BatchSchedule BatchSchedule::constant(std::int64_t size) {
  BatchSchedule s;
  s.kind = BatchKind::constant;
  s.size = size;
  s.validate();
  return s;
}

void BatchSchedule::validate() const {
  if (max_batch < 1) throw ConfigError("batch cap must be at least 1");
  switch (kind) {
    case BatchKind::geometric:
      if (!(alpha > 0.0)) throw ConfigError("geometric batch: alpha must be positive");
      if (!in_open_unit(rho)) throw ConfigError("geometric batch: rho must lie in (0,1)");
      return;
    case BatchKind::polynomial:
      if (!(alpha > 0.0)) throw ConfigError("polynomial batch: alpha must be positive");
      if (!(v > 0.0)) throw ConfigError("polynomial batch: v must be positive");
      return;
    case BatchKind::pbr_geometric:
      if (!(c_ns > 0.0)) throw ConfigError("pbr_geometric batch: c_ns must be positive");
      if (!in_open_unit(eta_br)) throw ConfigError("pbr_geometric batch: eta_br must lie in (0,1)");
      return;
    case BatchKind::raw_geometric:
      if (!in_open_unit(rho)) throw ConfigError("raw_geometric batch: rho must lie in (0,1)");
      return;
    case BatchKind::constant:
      if (size < 1) throw ConfigError("constant batch: size must be at least 1");
      return;
  }
}

std::int64_t batch_size(const BatchSchedule& s, std::int64_t k) {
  if (k < 0) throw DomainError("iteration index must be nonnegative");
  s.validate();
  const double kk = static_cast<double>(k);
  double value = 0.0;
  switch (s.kind) {
    case BatchKind::geometric:
      value = std::pow(s.rho, -(kk + 1.0)) / (s.alpha * s.alpha);
      break;
    case BatchKind::polynomial:
      value = std::pow(kk + 1.0, s.v) / (s.alpha * s.alpha);
      break;
    case BatchKind::pbr_geometric:
      value = s.c_ns / std::pow(s.eta_br, 2.0 * (kk + 1.0));
      break;
    case BatchKind::raw_geometric:
      value = std::pow(s.rho, -(kk + 1.0));
      break;
    case BatchKind::constant:
      value = static_cast<double>(s.size);
      break;
  }
  const double c = std::max(1.0, snapped_ceil(value));
  if (!(c <= static_cast<double>(s.max_batch)))
    throw ScheduleError("batch size at k=" + std::to_string(k) + " exceeds the cap of " +
                        std::to_string(s.max_batch));
  return static_cast<std::int64_t>(c);
}

CommSchedule CommSchedule::polynomial(double u) {
  CommSchedule s{CommKind::polynomial, u};
  s.validate();
  return s;
}

void CommSchedule::validate() const {
  if (kind == CommKind::polynomial && !(u > 0.0 && u <= 1.0))
    throw ConfigError("polynomial comm schedule: u must lie in (0,1]");
}

std::int64_t comm_rounds(const CommSchedule& s, std::int64_t k) {
  if (k < 0) throw DomainError("iteration index must be nonnegative");
  s.validate();
  switch (s.kind) {
    case CommKind::linear:
      return k + 1;
    case CommKind::polynomial:
      return static_cast<std::int64_t>(snapped_ceil(std::pow(static_cast<double>(k + 1), s.u)));
    case CommKind::log:
      if (k <= 1) return 1;
      return std::max<std::int64_t>(1, static_cast<std::int64_t>(
                                           snapped_ceil(std::log(static_cast<double>(k)))));
  }
  return 1;
}

std::string to_string(BatchKind kind) {
  switch (kind) {
    case BatchKind::geometric: return "geometric";
    case BatchKind::polynomial: return "polynomial";
    case BatchKind::pbr_geometric: return "pbr_geometric";
    case BatchKind::raw_geometric: return "raw_geometric";
    case BatchKind::constant: return "constant";
  }
  return "?";
}

std::string to_string(CommKind kind) {
  switch (kind) {
    case CommKind::linear: return "linear";
    case CommKind::polynomial: return "polynomial";
    case CommKind::log: return "log";
  }
  return "?";
}

BatchKind parse_batch_kind(const std::string& s) {
  for (BatchKind k : {BatchKind::geometric, BatchKind::polynomial, BatchKind::pbr_geometric,
                      BatchKind::raw_geometric, BatchKind::constant})
    if (to_string(k) == s) return k;
  throw ConfigError("unknown batch schedule '" + s + "'");
}

CommKind parse_comm_kind(const std::string& s) {
  for (CommKind k : {CommKind::linear, CommKind::polynomial, CommKind::log})
    if (to_string(k) == s) return k;
  throw ConfigError("unknown comm schedule '" + s + "'");
}

double recursion_bound(double c0, double c1, double q, double rho, int k) {
  if (!in_open_unit(q) || !in_open_unit(rho)) throw DomainError("recursion_bound: q and rho must lie in (0,1)");
  if (c0 < 0.0 || c1 < 0.0) throw DomainError("recursion_bound: c0 and c1 must be nonnegative");
  if (k < 0) throw DomainError("recursion_bound: k must be nonnegative");
  if (rho != q) {
    // Sum of q^(k-j) rho^j over j = 1..k; the forcing rate stays in the numerator in both cases.
    return (c0 + c1 * rho / std::fabs(rho - q)) * std::pow(std::max(rho, q), k);
  }
  const double qt = 0.5 * (1.0 + q);
  return (c0 + c1 / (std::exp(1.0) * std::log(qt / q))) * std::pow(qt, k);
}

CqvConstant cqv_constant(double q, double u, double v) {
  if (!in_open_unit(q)) throw DomainError("cqv_constant: q must lie in (0,1)");
  if (!(u > 0.0 && u <= 1.0)) throw DomainError("cqv_constant: u must lie in (0,1]");
  if (!(v > 0.0)) throw DomainError("cqv_constant: v must be positive");
  const double base = v / (u * std::log(1.0 / q));
  return {std::exp(-v / u) * std::pow(base, v / u), std::pow(base, 1.0 / u)};
}

std::string to_string(Scheme scheme) {
  switch (scheme) {
    case Scheme::vs_pgr: return "vs_pgr";
    case Scheme::d_vs_pgr: return "d_vs_pgr";
    case Scheme::vs_pbr: return "vs_pbr";
    case Scheme::d_vs_pbr: return "d_vs_pbr";
  }
  return "?";
}

Scheme parse_scheme(const std::string& s) {
  for (Scheme k : {Scheme::vs_pgr, Scheme::d_vs_pgr, Scheme::vs_pbr, Scheme::d_vs_pbr})
    if (to_string(k) == s) return k;
  throw ConfigError("unknown scheme '" + s + "'");
}

std::string to_string(Regime regime) {
  switch (regime) {
    case Regime::rho_lt_q: return "rho_lt_q";
    case Regime::rho_eq_q: return "rho_eq_q";
    case Regime::rho_gt_q: return "rho_gt_q";
  }
  return "?";
}

namespace {

Regime compare(double batch_rate, double contraction) {
  if (batch_rate < contraction) return Regime::rho_lt_q;
  if (batch_rate > contraction) return Regime::rho_gt_q;
  return Regime::rho_eq_q;
}

// Bound on sum_{k<K} S_k for S_k = ceil(scale * growth^(k+1)).
double batch_sum_bound(double scale, double growth, double K) {
  return scale * std::pow(growth, K + 1.0) / std::log(growth) + K;
}

double iterations(double X, double eps, double rate) {
  return std::max(0.0, std::log(X / eps) / std::log(1.0 / rate));
}

}  // namespace

ComplexityPrediction predict_complexity(Scheme scheme, const RateParams& p, double eps) {
  if (!(eps > 0.0)) throw DomainError("predict_complexity: eps must be positive");
  if (!(p.C > 0.0)) throw DomainError("predict_complexity: C must be positive");
  ComplexityPrediction out;
  const double e = std::exp(1.0);

  switch (scheme) {
    case Scheme::vs_pgr:
    case Scheme::d_vs_pgr: {
      if (!in_open_unit(p.q) || !in_open_unit(p.rho))
        throw DomainError("predict_complexity: q and rho must lie in (0,1)");
      if (p.sample_scale <= 0.0) throw DomainError("predict_complexity: sample_scale must be positive");
      double X = 0.0;
      double rate = 0.0;
      if (scheme == Scheme::vs_pgr) {
        out.regime = compare(p.rho, p.q);
        const double w = p.alpha_nu_sq;
        if (out.regime == Regime::rho_lt_q) {
          X = p.C + w * p.rho / (p.q - p.rho);
          rate = p.q;
        } else if (out.regime == Regime::rho_eq_q) {
          rate = 0.5 * (1.0 + p.q);
          X = p.C + w / (e * std::log(rate / p.q));
        } else {
          X = p.C + w * p.rho / (p.rho - p.q);
          rate = p.rho;
        }
      } else {
        if (p.beta < 0.0 || p.beta >= 1.0) throw DomainError("predict_complexity: beta must lie in [0,1)");
        const double gamma = std::max(p.rho, p.beta);
        out.regime = compare(gamma, p.q);
        if (out.regime == Regime::rho_lt_q) {
          X = p.C + p.c3 * gamma / (p.q - gamma);
          rate = p.q;
        } else if (out.regime == Regime::rho_eq_q) {
          rate = 0.5 * (1.0 + p.q);
          X = p.C + p.c3 / (e * std::log(rate / p.q));
        } else {
          X = p.C + p.c3 * gamma / (gamma - p.q);
          rate = gamma;
        }
      }
      out.K_eps = iterations(X, eps, rate);
      const double Kc = snapped_ceil(out.K_eps);
      out.M_eps = batch_sum_bound(p.sample_scale, 1.0 / p.rho, Kc);
      if (scheme == Scheme::d_vs_pgr) out.comm_eps = Kc * (Kc + 1.0) / 2.0;
      break;
    }
    case Scheme::vs_pbr: {
      if (!in_open_unit(p.a) || !in_open_unit(p.eta_br))
        throw DomainError("predict_complexity: a and eta_br must lie in (0,1)");
      if (!(p.n >= 1.0) || !(p.c_ns > 0.0)) throw DomainError("predict_complexity: need n >= 1 and c_ns > 0");
      const double sn = std::sqrt(p.n);
      double X = 0.0;
      double rate = 0.0;
      out.regime = compare(p.eta_br, p.a);
      if (out.regime == Regime::rho_lt_q) {
        X = std::sqrt(p.C) + p.eta_br * sn / (p.a - p.eta_br);
        rate = p.a;
      } else if (out.regime == Regime::rho_eq_q) {
        rate = 0.5 * (1.0 + p.a);
        X = std::sqrt(p.C) + sn / (e * std::log(rate / p.a));
      } else {
        X = std::sqrt(p.C) + p.eta_br * sn / (p.eta_br - p.a);
        rate = p.eta_br;
      }
      out.K_eps = iterations(X, std::sqrt(eps), rate);
      out.M_eps = batch_sum_bound(p.c_ns, 1.0 / (p.eta_br * p.eta_br), snapped_ceil(out.K_eps));
      break;
    }
    case Scheme::d_vs_pbr: {
      if (!in_open_unit(p.a) || !in_open_unit(p.eta_br))
        throw DomainError("predict_complexity: a and eta_br must lie in (0,1)");
      if (p.beta < 0.0 || p.beta >= 1.0) throw DomainError("predict_complexity: beta must lie in [0,1)");
      if (!(p.c_ns > 0.0)) throw DomainError("predict_complexity: c_ns must be positive");
      const double gamma = std::max(p.eta_br, p.beta);
      out.regime = compare(gamma, p.a);
      double Q = 0.0;
      double rate = 0.0;
      if (out.regime == Regime::rho_eq_q) {
        rate = 0.5 * (1.0 + p.a);
        Q = std::sqrt(p.C) + p.c4 / (e * std::log(rate / p.a));
      } else {
        Q = std::sqrt(p.C) + p.c4 * gamma / std::fabs(gamma - p.a);
        rate = std::max(p.a, gamma);
      }
      out.K_eps = snapped_ceil(iterations(Q, std::sqrt(eps), rate));
      out.M_eps = batch_sum_bound(p.c_ns, 1.0 / (p.eta_br * p.eta_br), out.K_eps);
      out.comm_eps = out.K_eps * (out.K_eps + 1.0) / 2.0;
      break;
    }
  }
  return out;
}

TunedParams kappa_tuned_params(double eta, double L_tilde) {
  if (!(eta > 0.0)) throw DomainError("kappa_tuned_params: eta must be positive");
  if (!(L_tilde >= eta)) throw DomainError("kappa_tuned_params: L_tilde must be at least eta");
  const double kappa = L_tilde / eta;
  return {eta / (L_tilde * L_tilde), 1.0 - 1.0 / (2.0 * kappa * kappa)};
}

TunedParams kappa_tuned_params(double eta, double L_tilde, double a, double beta) {
  if (!(eta > 0.0)) throw DomainError("kappa_tuned_params: eta must be positive");
  if (!(L_tilde >= eta)) throw DomainError("kappa_tuned_params: L_tilde must be at least eta");
  if (!(a > 2.0)) throw DomainError("kappa_tuned_params: a must exceed 2");
  if (beta < 0.0 || beta >= 1.0) throw DomainError("kappa_tuned_params: beta must lie in [0,1)");
  const double L2 = L_tilde * L_tilde;
  return {eta / (2.0 * L2), std::max(1.0 - eta * eta / (a * L2), beta)};
}

}  // namespace vsnash
