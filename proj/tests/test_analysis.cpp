#include <doctest.h>

#include <cmath>
#include <random>

#include <unsupported/Eigen/KroneckerProduct>

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

}  // namespace

TEST_CASE("quadratic constants of small matrices") {
  auto c = quadratic_constants(Eigen::Matrix3d::Identity());
  CHECK(c.eta == doctest::Approx(1.0));
  CHECK(c.L == doctest::Approx(1.0));
  CHECK(c.strongly_monotone);
  Eigen::Matrix2d M;
  M << 2, 1, 1, 2;
  c = quadratic_constants(M);
  CHECK(c.eta == doctest::Approx(1.0));
  CHECK(c.L == doctest::Approx(3.0));
  // Skew part does not change eta.
  M << 1, 5, -5, 1;
  c = quadratic_constants(M);
  CHECK(c.eta == doctest::Approx(1.0));
  M << 0, 1, 1, 0;
  CHECK_FALSE(quadratic_constants(M).strongly_monotone);
  CHECK_THROWS_AS(quadratic_constants(Eigen::MatrixXd::Ones(2, 3)), DomainError);
}

TEST_CASE("linear Cournot map constants") {
  const int n = 3;
  const Eigen::Vector2d b(1, 2);
  const Eigen::MatrixXd M =
      Eigen::kroneckerProduct(Eigen::MatrixXd::Identity(n, n) + Eigen::MatrixXd::Ones(n, n), b.asDiagonal().toDenseMatrix());
  const auto c = quadratic_constants(M);
  CHECK(c.eta == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(c.L == doctest::Approx((n + 1) * 2.0).epsilon(1e-12));
}

TEST_CASE("monotonicity report") {
  const auto r = monotonicity_report(1.0, 2.0, 0.5, 0.0);
  CHECK(r.L_tilde == doctest::Approx(std::sqrt(1 + 8.0)));
  CHECK(r.kappa_tilde == doctest::Approx(3.0));
  const auto s = monotonicity_report(1.0, 2.0, 0.5, 1.0);
  CHECK(s.L_tilde == doctest::Approx(std::sqrt(1 + 2 * 1.5 + 8.0)));
  CHECK_THROWS_AS(monotonicity_report(0.0, 1.0, 0.1, 0.0), DomainError);
}

TEST_CASE("Gamma matrix of a symmetric two-player instance") {
  HessianBounds hb{vec({2, 2}), Eigen::Matrix2d::Zero()};
  hb.cross_max << 0, 1, 1, 0;
  const auto r = gamma_matrix(hb, 1.0);
  const double t = 1.0 / 3.0;
  CHECK((r.Gamma - Eigen::MatrixXd::Constant(2, 2, t)).cwiseAbs().maxCoeff() < 1e-15);
  CHECK(r.a_inf == doctest::Approx(2.0 / 3.0));
  CHECK(r.contractive);
  CHECK(r.spectral_radius == doctest::Approx(2.0 / 3.0));
  const auto big = gamma_matrix(hb, 1e6);
  CHECK(big.a_inf > 0.999);
  CHECK(big.a_inf < 1.0);
  CHECK(big.contractive);
}

TEST_CASE("Gamma row sums and entries") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 3.0);
  for (int t = 0; t < 50; ++t) {
    const int n = 2 + t % 6;
    HessianBounds hb{Eigen::VectorXd(n), Eigen::MatrixXd::Zero(n, n)};
    for (int i = 0; i < n; ++i) {
      hb.own_min(i) = u(rng);
      for (int j = 0; j < n; ++j)
        if (j != i) hb.cross_max(i, j) = u(rng);
    }
    const double mu = 0.1 + u(rng) * 10;
    const auto r = gamma_matrix(hb, mu);
    CHECK(r.Gamma.minCoeff() >= 0.0);
    for (int i = 0; i < n; ++i) {
      const double denom = mu + hb.own_min(i);
      CHECK(r.Gamma(i, i) == doctest::Approx(mu / denom).epsilon(1e-15));
      CHECK(r.Gamma.row(i).sum() == doctest::Approx((mu + hb.cross_max.row(i).sum()) / denom).epsilon(1e-14));
    }
    CHECK(r.contractive == (r.a_inf < 1.0));
  }
}

TEST_CASE("Gamma needs Hessian bounds") {
  GameSpec g = make_affine_game({1}, Eigen::MatrixXd::Identity(1, 1), vec({0}), vec({0}), vec({1}), vec({0}));
  g.hessian_bounds.reset();
  CHECK_THROWS_AS(gamma_matrix(g, 1.0), ConfigError);
}

TEST_CASE("quadratic Cournot contraction follows the per-player eigenvalue test") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    CournotInstance inst = sample_quadratic_cournot(5, 3, seed);
    const double threshold = 4 * inst.b.maxCoeff() - 2 * inst.b.minCoeff();
    for (double shift : {-0.5, -0.01, 0.01, 0.5}) {
      inst.rho = Eigen::VectorXd::Constant(5, std::max(0.0, threshold + shift));
      const bool expected = (inst.rho(0) + 2 * inst.b.minCoeff()) > 4 * inst.b.maxCoeff();
      for (double mu : {0.5, 20.0}) CHECK(gamma_matrix(make_game(inst), mu).contractive == expected);
    }
  }
}

TEST_CASE("oracle on small games") {
  GameSpec one = make_affine_game({1}, Eigen::MatrixXd::Constant(1, 1, 2.0), vec({-2}), vec({0}), vec({2}), vec({0}));
  GroundTruth gt = ground_truth_ne(one);
  CHECK(gt.x.data()(0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(gt.residual <= 1e-12);

  Eigen::Matrix2d M;
  M << 2, 1, 1, 2;
  GameSpec two = make_affine_game({1, 1}, M, vec({0, 0}), vec({-5, -5}), vec({5, 5}), vec({0, 0}));
  for (auto mode : {OracleMode::fixed_point, OracleMode::extragradient}) {
    GroundTruthOptions opt;
    opt.mode = mode;
    gt = ground_truth_ne(two, opt);
    CHECK(gt.x.data().norm() <= 1e-11);
  }
}

TEST_CASE("oracle rejects steps outside the contraction range") {
  GameSpec one = make_affine_game({1}, Eigen::MatrixXd::Constant(1, 1, 2.0), vec({-2}), vec({0}), vec({2}), vec({0}));
  GroundTruthOptions opt;
  opt.alpha = 1.5;
  CHECK_THROWS_AS(ground_truth_ne(one, opt), PreconditionError);
  opt.alpha = 0.0;
  opt.tol = 0.0;
  CHECK_THROWS_AS(ground_truth_ne(one, opt), ConfigError);
}

TEST_CASE("oracle reports failure when the iteration cap is hit") {
  const CournotBenchmark bench = gen_linear_cournot(20, 10, 1);
  GroundTruthOptions opt;
  opt.max_iters = 5;
  CHECK_THROWS_AS(ground_truth_ne(bench.game, opt), OracleError);
}

TEST_CASE("fixed-point and extragradient oracles agree on Cournot benchmarks") {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    for (bool quad : {false, true}) {
      const CournotBenchmark bench = quad ? gen_quadratic_cournot(20, 10, 20.0, seed) : gen_linear_cournot(20, 10, seed);
      GroundTruthOptions fp, eg;
      eg.mode = OracleMode::extragradient;
      const GroundTruth a = ground_truth_ne(bench.game, fp);
      const GroundTruth b = ground_truth_ne(bench.game, eg);
      CHECK(a.residual <= 1e-12);
      CHECK(b.residual <= 1e-12);
      // Independent post hoc residual with its own step.
      const double step = *bench.game.eta / (*bench.game.lipschitz * *bench.game.lipschitz);
      CHECK(fixed_point_residual(bench.game, a.x, step) <= 1e-11);
      CHECK((a.x.data() - b.x.data()).norm() <= 1e-9);
    }
  }
}

TEST_CASE("fit_rate recovers planted rates") {
  std::vector<double> geo(200), pw(200);
  for (int k = 0; k < 200; ++k) {
    geo[k] = std::pow(0.9, k);
    pw[k] = k == 0 ? 1.0 : std::pow(static_cast<double>(k), -2.0);
  }
  const RateFit g = fit_rate(geo, FitRegime::linear);
  CHECK(g.slope == doctest::Approx(std::log(0.9)).epsilon(1e-9));
  CHECK(g.r_squared == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(g.window.lo == 49);
  CHECK(g.window.hi == 199);
  const RateFit p = fit_rate(pw, FitRegime::polynomial);
  CHECK(std::fabs(p.slope + 2.0) <= 1e-9);
  CHECK(p.r_squared == doctest::Approx(1.0).epsilon(1e-12));
  const RateFit f = fit_rate(pw, FitRegime::polynomial, FitWindow{0, 20});
  CHECK(f.window.lo == 1);
  CHECK(std::fabs(f.slope + 2.0) <= 1e-9);
}

TEST_CASE("fit_rate shrinks the window at the first nonpositive value") {
  std::vector<double> s(40);
  for (int k = 0; k < 40; ++k) s[k] = k < 30 ? std::exp(-0.5 * k) : 0.0;
  const RateFit f = fit_rate(s, FitRegime::linear);
  CHECK(f.window.hi == 29);
  CHECK(f.slope == doctest::Approx(-0.5).epsilon(1e-9));
  CHECK_THROWS_AS(fit_rate(std::vector<double>(5, 1.0), FitRegime::linear), DomainError);
  std::vector<double> zeros(40, 0.0);
  CHECK_THROWS_AS(fit_rate(zeros, FitRegime::linear), DomainError);
  CHECK_THROWS_AS(fit_rate(s, FitRegime::linear, FitWindow{0, 40}), DomainError);
}

TEST_CASE("epsilon-NE index") {
  CHECK(epsilon_ne_index({4, 1, 0.2}, 0.5) == 2);
  CHECK(epsilon_ne_index({4, 1, 0.2}, 5.0) == 0);
  CHECK_FALSE(epsilon_ne_index({4, 1, 0.2}, 0.1));
  CHECK(epsilon_ne_index({4, NAN, 0.2}, 2.0) == 2);
  CHECK_FALSE(epsilon_ne_index({}, 1.0));
}
