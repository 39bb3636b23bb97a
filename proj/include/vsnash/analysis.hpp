#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "vsnash/game.hpp"

namespace vsnash {

struct MonotonicityConstants {
  double eta = 0.0;
  double L = 0.0;
  bool strongly_monotone = false;
};

// For G(x) = Mx + b: eta = lambda_min((M + M^T)/2), L = sigma_max(M).
MonotonicityConstants quadratic_constants(const Eigen::MatrixXd& M);

struct MonotonicityReport {
  double eta = 0.0;
  double L = 0.0;
  double alpha = 0.0;
  double nu1 = 0.0;
  double L_tilde = 0.0;
  double kappa_tilde = 0.0;
};

// L~ = sqrt(1 + 2(1 + 2 alpha^2) nu1^2 + 2 L^2), kappa~ = L~ / eta.
MonotonicityReport monotonicity_report(double eta, double L, double alpha, double nu1);

struct ContractionReport {
  Eigen::MatrixXd Gamma;
  double a_inf = 0.0;
  double spectral_radius = 0.0;
  bool contractive = false;
};

ContractionReport gamma_matrix(const HessianBounds& bounds, double mu);
ContractionReport gamma_matrix(const GameSpec& game, double mu);

enum class OracleMode { fixed_point, extragradient };

struct GroundTruthOptions {
  OracleMode mode = OracleMode::fixed_point;
  double tol = 1e-12;
  // Step of the reported residual and of the fixed-point iteration;
  // 0 selects eta / L^2 from the game constants.
  double alpha = 0.0;
  std::int64_t max_iters = 1'000'000;
  // Iterations without a new smallest step before the floating-point floor is declared.
  std::int64_t patience = 1000;
};

struct GroundTruth {
  StrategyProfile x;
  double residual = 0.0;
  double alpha = 0.0;
  std::int64_t iterations = 0;
};

// |x - prox_profile(x - alpha G(x))|
double fixed_point_residual(const GameSpec& game, const StrategyProfile& x, double alpha);

GroundTruth ground_truth_ne(const GameSpec& game, const GroundTruthOptions& options = {});

enum class FitRegime { linear, polynomial };

struct FitWindow {
  int lo = 0;
  int hi = 0;
};

struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  FitWindow window;
};

// Discards the first quarter of a series of the given length.
FitWindow default_window(std::size_t length);

// Least squares of ln(series[k]) against k (linear) or ln k (polynomial).
RateFit fit_rate(const std::vector<double>& series, FitRegime regime,
                 std::optional<FitWindow> window = std::nullopt);

// Smallest k with series[k] <= eps; NaN entries never qualify.
std::optional<int> epsilon_ne_index(const std::vector<double>& series, double eps);

}  // namespace vsnash
