#pragma once

#include <Eigen/Dense>

namespace vsnash {

struct GameSpec;
struct ResourceCounters;
class StrategyProfile;

enum class ProxKind { zero, box, nonneg, l1 };

// Closed-form nonsmooth term r. The box kind is the indicator of [lower, upper].
struct ProxOperator {
  ProxKind kind = ProxKind::zero;
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;
  double weight = 0.0;

  static ProxOperator zero() { return {}; }
  static ProxOperator box(Eigen::VectorXd lower, Eigen::VectorXd upper);
  static ProxOperator box(int dim, double lower, double upper);
  static ProxOperator nonneg();
  static ProxOperator l1(double weight);

  bool is_indicator() const { return kind == ProxKind::box || kind == ProxKind::nonneg; }
  // Value of r at x; +inf outside the domain of an indicator.
  double value(const Eigen::VectorXd& x) const;
};

// argmin_y r(y) + |y - x|^2 / (2 alpha)
Eigen::VectorXd prox(const ProxOperator& op, const Eigen::VectorXd& x, double alpha);
void prox_inplace(const ProxOperator& op, Eigen::Ref<Eigen::VectorXd> x, double alpha);
// Coordinatewise steps, for separable quadratic models with diagonal curvature.
void prox_inplace(const ProxOperator& op, Eigen::Ref<Eigen::VectorXd> x,
                  const Eigen::VectorXd& alphas);

StrategyProfile prox_profile(const GameSpec& game, const StrategyProfile& x, double alpha);
StrategyProfile prox_profile(const GameSpec& game, const StrategyProfile& x, double alpha,
                             ResourceCounters& counters);

}  // namespace vsnash
