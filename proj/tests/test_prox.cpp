#include <doctest.h>

#include <random>

#include "vsnash/analysis.hpp"
#include "vsnash/cournot.hpp"
#include "vsnash/errors.hpp"
#include "vsnash/game.hpp"
#include "vsnash/prox.hpp"

using namespace vsnash;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> v) {
  Eigen::VectorXd out(v.size());
  int i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

Eigen::VectorXd random_vec(std::mt19937_64& rng, int d, double scale) {
  std::uniform_real_distribution<double> u(-scale, scale);
  Eigen::VectorXd v(d);
  for (int i = 0; i < d; ++i) v(i) = u(rng);
  return v;
}

std::vector<ProxOperator> all_kinds() {
  return {ProxOperator::zero(), ProxOperator::box(4, -1.0, 2.0), ProxOperator::nonneg(), ProxOperator::l1(0.7)};
}

}  // namespace

TEST_CASE("box projection of an interior point is the identity") {
  const auto op = ProxOperator::box(2, 0.0, 2.0);
  CHECK(prox(op, vec({1, 1}), 0.5) == vec({1, 1}));
}

TEST_CASE("box projection clips componentwise for any alpha") {
  const auto op = ProxOperator::box(2, 0.0, 2.0);
  for (double a : {0.01, 1.0, 100.0}) CHECK(prox(op, vec({-1, 3}), a) == vec({0, 2}));
}

TEST_CASE("l1 prox soft-thresholds by alpha times weight") {
  const auto op = ProxOperator::l1(1.0);
  CHECK(prox(op, vec({2, -0.5, 0}), 1.0) == vec({1, 0, 0}));
  // Exactly at the threshold the output is zero.
  CHECK(prox(op, vec({1.0, -1.0}), 1.0) == vec({0, 0}));
  CHECK(prox(op, vec({3.0, -3.0}), 0.5) == vec({2.5, -2.5}));
}

TEST_CASE("nonnegative projection") {
  CHECK(prox(ProxOperator::nonneg(), vec({-2, 0, 5}), 3.0) == vec({0, 0, 5}));
}

TEST_CASE("prox minimizes the model objective") {
  std::mt19937_64 rng(7);
  for (const auto& op : all_kinds()) {
    for (int t = 0; t < 50; ++t) {
      const Eigen::VectorXd x = random_vec(rng, 4, 4.0);
      const double a = 0.3;
      const Eigen::VectorXd p = prox(op, x, a);
      const double best = op.value(p) + (p - x).squaredNorm() / (2 * a);
      for (int s = 0; s < 20; ++s) {
        const Eigen::VectorXd y = p + random_vec(rng, 4, 0.1);
        const double val = op.value(y) + (y - x).squaredNorm() / (2 * a);
        CHECK(best <= val + 1e-12);
      }
    }
  }
}

TEST_CASE("prox rejects a nonpositive step") {
  CHECK_THROWS_AS(prox(ProxOperator::zero(), vec({1}), 0.0), DomainError);
  CHECK_THROWS_AS(prox(ProxOperator::l1(1.0), vec({1}), -1.0), DomainError);
}

TEST_CASE("nonexpansiveness on random pairs") {
  std::mt19937_64 rng(11);
  for (const auto& op : all_kinds()) {
    for (int t = 0; t < 1000; ++t) {
      const Eigen::VectorXd x = random_vec(rng, 4, 5.0);
      const Eigen::VectorXd y = random_vec(rng, 4, 5.0);
      const double a = std::uniform_real_distribution<double>(0.01, 3.0)(rng);
      CHECK((prox(op, x, a) - prox(op, y, a)).norm() <= (x - y).norm() + 1e-12);
    }
  }
}

TEST_CASE("indicator kinds are idempotent, alpha independent and land in the domain") {
  std::mt19937_64 rng(13);
  for (const auto& op : {ProxOperator::box(4, -1.0, 2.0), ProxOperator::nonneg()}) {
    REQUIRE(op.is_indicator());
    for (int t = 0; t < 200; ++t) {
      const Eigen::VectorXd x = random_vec(rng, 4, 5.0);
      const Eigen::VectorXd p = prox(op, x, 1.0);
      CHECK(prox(op, p, 1.0) == p);
      CHECK(prox(op, x, 0.01) == p);
      CHECK(prox(op, x, 100.0) == p);
      CHECK(std::isfinite(op.value(p)));
    }
  }
}

TEST_CASE("prox_profile acts blockwise and counts one evaluation") {
  GameSpec g = make_affine_game({1, 1}, Eigen::Matrix2d::Identity(), Eigen::Vector2d::Zero(), vec({0, -1}),
                                vec({2, 1}), Eigen::Vector2d::Zero());
  StrategyProfile x({1, 1}, vec({3, -2}));
  ResourceCounters c;
  const StrategyProfile p = prox_profile(g, x, 0.5, c);
  CHECK(p.data() == vec({2, -1}));
  CHECK(c.prox_evals == 1);
  prox_profile(g, x, 0.5, c);
  CHECK(c.prox_evals == 2);
}

TEST_CASE("zero-prox players leave any profile unchanged") {
  GameSpec g = make_affine_game({2, 1}, Eigen::Matrix3d::Identity(), Eigen::Vector3d::Zero(),
                                Eigen::Vector3d::Constant(-INFINITY), Eigen::Vector3d::Constant(INFINITY),
                                Eigen::Vector3d::Zero());
  for (auto& p : g.players) p.prox_term = ProxOperator::zero();
  StrategyProfile x({2, 1}, vec({3, -7, 1e9}));
  CHECK(prox_profile(g, x, 2.0).data() == x.data());
}

TEST_CASE("equilibrium is a fixed point of the prox-gradient map") {
  const CournotBenchmark bench = gen_linear_cournot(20, 10, 5);
  const GroundTruth gt = ground_truth_ne(bench.game);
  for (double a : {1e-3, 1e-2, gt.alpha}) {
    StrategyProfile y = gt.x;
    y.data() -= a * deterministic_gradient(bench.game, gt.x).data();
    CHECK((prox_profile(bench.game, y, a).data() - gt.x.data()).norm() <= 1e-10);
  }
}
