#include "vsnash/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "vsnash/errors.hpp"

namespace vsnash {

MonotonicityConstants quadratic_constants(const Eigen::MatrixXd& M) {
  if (M.rows() != M.cols() || M.rows() == 0) throw DomainError("quadratic_constants: matrix must be square");
  const Eigen::MatrixXd sym = 0.5 * (M + M.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym, Eigen::EigenvaluesOnly);
  MonotonicityConstants c;
  c.eta = es.eigenvalues()(0);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> gram(M.transpose() * M, Eigen::EigenvaluesOnly);
  c.L = std::sqrt(std::max(0.0, gram.eigenvalues()(gram.eigenvalues().size() - 1)));
  c.strongly_monotone = c.eta > 0.0;
  return c;
}

MonotonicityReport monotonicity_report(double eta, double L, double alpha, double nu1) {
  if (!(eta > 0.0) || !(L >= eta)) throw DomainError("monotonicity_report: need 0 < eta <= L");
  MonotonicityReport r;
  r.eta = eta;
  r.L = L;
  r.alpha = alpha;
  r.nu1 = nu1;
  r.L_tilde = std::sqrt(1.0 + 2.0 * (1.0 + 2.0 * alpha * alpha) * nu1 * nu1 + 2.0 * L * L);
  r.kappa_tilde = r.L_tilde / eta;
  return r;
}

ContractionReport gamma_matrix(const HessianBounds& bounds, double mu) {
  if (!(mu > 0.0)) throw DomainError("gamma_matrix: mu must be positive");
  const Eigen::Index n = bounds.own_min.size();
  if (bounds.cross_max.rows() != n || bounds.cross_max.cols() != n)
    throw ConfigError("Hessian bounds have inconsistent sizes");
  ContractionReport r;
  r.Gamma = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double denom = mu + bounds.own_min(i);
    if (!(denom > 0.0)) throw DomainError("gamma_matrix: mu + zeta_min must be positive");
    for (Eigen::Index j = 0; j < n; ++j) {
      const double top = i == j ? mu : bounds.cross_max(i, j);
      if (top < 0.0) throw ConfigError("cross Hessian bounds must be nonnegative");
      r.Gamma(i, j) = top / denom;
    }
  }
  r.a_inf = r.Gamma.rowwise().sum().maxCoeff();
  r.spectral_radius = Eigen::EigenSolver<Eigen::MatrixXd>(r.Gamma, false).eigenvalues().cwiseAbs().maxCoeff();
  r.contractive = r.a_inf < 1.0;
  return r;
}

ContractionReport gamma_matrix(const GameSpec& game, double mu) {
  if (!game.hessian_bounds) throw ConfigError("game does not supply Hessian bounds");
  return gamma_matrix(*game.hessian_bounds, mu);
}

double fixed_point_residual(const GameSpec& game, const StrategyProfile& x, double alpha) {
  StrategyProfile y = x;
  y.data() -= alpha * deterministic_gradient(game, x).data();
  return (x.data() - prox_profile(game, y, alpha).data()).norm();
}

namespace {

StrategyProfile prox_step(const GameSpec& game, const StrategyProfile& x, const StrategyProfile& g,
                          double step) {
  StrategyProfile y = x;
  y.data() -= step * g.data();
  return prox_profile(game, y, step);
}

}  // namespace

GroundTruth ground_truth_ne(const GameSpec& game, const GroundTruthOptions& opt) {
  game.validate();
  if (!(opt.tol > 0.0)) throw ConfigError("oracle tolerance must be positive");
  const bool have_constants = game.eta.has_value() && game.lipschitz.has_value();
  double alpha = opt.alpha;
  if (alpha == 0.0) {
    if (!have_constants) throw ConfigError("oracle step needs eta and L of the game or an explicit alpha");
    alpha = *game.eta / (*game.lipschitz * *game.lipschitz);
  }
  if (!(alpha > 0.0)) throw ConfigError("oracle step must be positive");

  double step = alpha;
  if (opt.mode == OracleMode::fixed_point) {
    if (have_constants && !(alpha < 2.0 * *game.eta / (*game.lipschitz * *game.lipschitz)))
      throw PreconditionError("fixed-point oracle requires alpha < 2 eta / L^2");
  } else {
    if (!game.lipschitz) throw ConfigError("extragradient oracle needs the Lipschitz constant");
    step = 1.0 / (2.0 * *game.lipschitz);
  }

  StrategyProfile x = prox_profile(game, game.zero_profile(), 1.0);
  double best = std::numeric_limits<double>::infinity();
  std::int64_t since_best = 0;
  std::int64_t it = 0;
  for (; it < opt.max_iters; ++it) {
    StrategyProfile next;
    if (opt.mode == OracleMode::fixed_point) {
      next = prox_step(game, x, deterministic_gradient(game, x), step);
    } else {
      const StrategyProfile y = prox_step(game, x, deterministic_gradient(game, x), step);
      next = prox_step(game, x, deterministic_gradient(game, y), step);
    }
    if (!next.finite()) throw OracleError("ground-truth iteration produced a nonfinite point");
    const double r = (next.data() - x.data()).norm();
    x = std::move(next);
    if (r < best) {
      best = r;
      since_best = 0;
    } else if (++since_best >= opt.patience) {
      break;
    }
    if (r == 0.0) break;
  }

  GroundTruth out;
  out.alpha = alpha;
  out.iterations = it;
  out.residual = fixed_point_residual(game, x, alpha);
  out.x = std::move(x);
  if (!(out.residual <= opt.tol))
    throw OracleError("ground-truth oracle stopped at residual " + std::to_string(out.residual) +
                      " above tolerance after " + std::to_string(it) + " iterations");
  return out;
}

FitWindow default_window(std::size_t length) {
  if (length == 0) return {0, -1};
  const int last = static_cast<int>(length) - 1;
  return {static_cast<int>(std::floor(0.25 * last)), last};
}

RateFit fit_rate(const std::vector<double>& series, FitRegime regime, std::optional<FitWindow> window) {
  FitWindow w = window.value_or(default_window(series.size()));
  if (w.lo < 0 || w.hi >= static_cast<int>(series.size()) || w.lo > w.hi)
    throw DomainError("fit window lies outside the series");
  if (w.hi - w.lo + 1 < 10) throw DomainError("fit window must hold at least 10 points");
  if (regime == FitRegime::polynomial && w.lo == 0) w.lo = 1;
  for (int k = w.lo; k <= w.hi; ++k) {
    if (!(series[k] > 0.0)) {
      w.hi = k - 1;
      break;
    }
  }
  const int m = w.hi - w.lo + 1;
  if (m < 3) throw DomainError("fit window is empty after removing nonpositive values");

  double sx = 0, sy = 0;
  std::vector<double> xs(m), ys(m);
  for (int t = 0; t < m; ++t) {
    const int k = w.lo + t;
    xs[t] = regime == FitRegime::linear ? static_cast<double>(k) : std::log(static_cast<double>(k));
    ys[t] = std::log(series[k]);
    sx += xs[t];
    sy += ys[t];
  }
  const double mx = sx / m, my = sy / m;
  double sxx = 0, sxy = 0, syy = 0;
  for (int t = 0; t < m; ++t) {
    sxx += (xs[t] - mx) * (xs[t] - mx);
    sxy += (xs[t] - mx) * (ys[t] - my);
    syy += (ys[t] - my) * (ys[t] - my);
  }
  RateFit f;
  f.window = w;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double ss_res = 0;
  for (int t = 0; t < m; ++t) {
    const double e = ys[t] - (f.intercept + f.slope * xs[t]);
    ss_res += e * e;
  }
  f.r_squared = syy > 0.0 ? std::clamp(1.0 - ss_res / syy, 0.0, 1.0) : 1.0;
  return f;
}

std::optional<int> epsilon_ne_index(const std::vector<double>& series, double eps) {
  for (std::size_t k = 0; k < series.size(); ++k)
    if (series[k] <= eps) return static_cast<int>(k);
  return std::nullopt;
}

}  // namespace vsnash
