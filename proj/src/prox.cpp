#include "vsnash/prox.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "vsnash/errors.hpp"
#include "vsnash/game.hpp"

namespace vsnash {

ProxOperator ProxOperator::box(Eigen::VectorXd lower, Eigen::VectorXd upper) {
  if (lower.size() != upper.size()) throw ConfigError("box bounds differ in size");
  if ((lower.array() > upper.array()).any()) throw ConfigError("box is empty");
  ProxOperator op;
  op.kind = ProxKind::box;
  op.lower = std::move(lower);
  op.upper = std::move(upper);
  return op;
}

ProxOperator ProxOperator::box(int dim, double lower, double upper) {
  return box(Eigen::VectorXd::Constant(dim, lower), Eigen::VectorXd::Constant(dim, upper));
}

ProxOperator ProxOperator::nonneg() {
  ProxOperator op;
  op.kind = ProxKind::nonneg;
  return op;
}

ProxOperator ProxOperator::l1(double weight) {
  if (!(weight >= 0.0)) throw ConfigError("l1 weight must be nonnegative");
  ProxOperator op;
  op.kind = ProxKind::l1;
  op.weight = weight;
  return op;
}

double ProxOperator::value(const Eigen::VectorXd& x) const {
  constexpr double inf = std::numeric_limits<double>::infinity();
  switch (kind) {
    case ProxKind::zero:
      return 0.0;
    case ProxKind::box:
      return ((x.array() >= lower.array()) && (x.array() <= upper.array())).all() ? 0.0 : inf;
    case ProxKind::nonneg:
      return (x.array() >= 0.0).all() ? 0.0 : inf;
    case ProxKind::l1:
      return weight * x.lpNorm<1>();
  }
  return 0.0;
}

namespace {

inline double soft_threshold(double v, double t) {
  if (v > t) return v - t;
  if (v < -t) return v + t;
  return 0.0;
}

}  // namespace

void prox_inplace(const ProxOperator& op, Eigen::Ref<Eigen::VectorXd> x, double alpha) {
  if (!(alpha > 0.0)) throw DomainError("prox step must be positive");
  switch (op.kind) {
    case ProxKind::zero:
      return;
    case ProxKind::box:
      if (op.lower.size() != x.size()) throw ConfigError("box dimension mismatch");
      for (Eigen::Index c = 0; c < x.size(); ++c) x[c] = std::clamp(x[c], op.lower[c], op.upper[c]);
      return;
    case ProxKind::nonneg:
      for (Eigen::Index c = 0; c < x.size(); ++c) x[c] = std::max(x[c], 0.0);
      return;
    case ProxKind::l1:
      for (Eigen::Index c = 0; c < x.size(); ++c) x[c] = soft_threshold(x[c], alpha * op.weight);
      return;
  }
}

void prox_inplace(const ProxOperator& op, Eigen::Ref<Eigen::VectorXd> x,
                  const Eigen::VectorXd& alphas) {
  if (alphas.size() != x.size()) throw ConfigError("step vector dimension mismatch");
  if (op.kind == ProxKind::l1) {
    for (Eigen::Index c = 0; c < x.size(); ++c) {
      if (!(alphas[c] > 0.0)) throw DomainError("prox step must be positive");
      x[c] = soft_threshold(x[c], alphas[c] * op.weight);
    }
    return;
  }
  prox_inplace(op, x, alphas.size() > 0 ? alphas.minCoeff() : 1.0);
}

Eigen::VectorXd prox(const ProxOperator& op, const Eigen::VectorXd& x, double alpha) {
  Eigen::VectorXd y = x;
  prox_inplace(op, y, alpha);
  return y;
}

StrategyProfile prox_profile(const GameSpec& game, const StrategyProfile& x, double alpha) {
  if (x.dims() != game.dims()) throw ConfigError("profile dimensions do not match the game");
  StrategyProfile y = x;
  for (int i = 0; i < game.size(); ++i) prox_inplace(game.players[i].prox_term, y.block(i), alpha);
  return y;
}

StrategyProfile prox_profile(const GameSpec& game, const StrategyProfile& x, double alpha,
                             ResourceCounters& counters) {
  StrategyProfile y = prox_profile(game, x, alpha);
  ++counters.prox_evals;
  return y;
}

}  // namespace vsnash
