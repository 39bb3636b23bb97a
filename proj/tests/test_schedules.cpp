#include <doctest.h>

#include <cmath>
#include <random>

#include "vsnash/errors.hpp"
#include "vsnash/schedules.hpp"

using namespace vsnash;

TEST_CASE("geometric batch sizes") {
  const auto s = BatchSchedule::geometric(1.0, 0.5);
  CHECK(batch_size(s, 0) == 2);
  CHECK(batch_size(s, 2) == 8);
  CHECK(batch_size(BatchSchedule::geometric(0.01, 0.98), 0) == 10205);
  CHECK(batch_size(s, 0) >= 1.0 / (s.alpha * s.alpha));
}

TEST_CASE("polynomial, raw, pbr and constant batch sizes") {
  CHECK(batch_size(BatchSchedule::polynomial(1.0, 2.0), 3) == 16);
  CHECK(batch_size(BatchSchedule::raw_geometric(0.5), 3) == 16);
  CHECK(batch_size(BatchSchedule::raw_geometric(0.98), 0) == 2);
  CHECK(batch_size(BatchSchedule::pbr_geometric(3.0, 0.5), 1) == 48);
  CHECK(batch_size(BatchSchedule::constant(16), 100) == 16);
}

TEST_CASE("batch parameters out of range are configuration errors") {
  CHECK_THROWS_AS(batch_size(BatchSchedule::geometric(1.0, 1.0), 0), ConfigError);
  CHECK_THROWS_AS(batch_size(BatchSchedule::geometric(1.0, 0.0), 0), ConfigError);
  CHECK_THROWS_AS(batch_size(BatchSchedule::polynomial(1.0, 0.0), 0), ConfigError);
  CHECK_THROWS_AS(batch_size(BatchSchedule::pbr_geometric(1.0, 1.5), 0), ConfigError);
  CHECK_THROWS_AS(batch_size(BatchSchedule::constant(0), 0), ConfigError);
}

TEST_CASE("batch cap is a hard error") {
  auto s = BatchSchedule::raw_geometric(0.5);
  s.max_batch = 1000;
  CHECK(batch_size(s, 8) == 512);
  CHECK_THROWS_AS(batch_size(s, 9), ScheduleError);
  CHECK_THROWS_AS(batch_size(BatchSchedule::geometric(0.01, 0.5), 30), ScheduleError);
}

TEST_CASE("batch sizes are at least one and nondecreasing") {
  BatchSchedule kinds[] = {BatchSchedule::geometric(0.5, 0.9), BatchSchedule::polynomial(2.0, 1.5),
                           BatchSchedule::pbr_geometric(0.01, 0.95), BatchSchedule::raw_geometric(0.98),
                           BatchSchedule::constant(3)};
  for (auto& s : kinds) {
    s.max_batch = std::int64_t{1} << 62;
    std::int64_t prev = 0;
    for (int k = 0; k < 200; ++k) {
      const std::int64_t b = batch_size(s, k);
      CHECK(b >= 1);
      CHECK(b >= prev);
      prev = b;
    }
  }
}

TEST_CASE("communication rounds") {
  CHECK(comm_rounds(CommSchedule::linear(), 4) == 5);
  CHECK(comm_rounds(CommSchedule::polynomial(0.5), 8) == 3);
  CHECK(comm_rounds(CommSchedule::log(), 0) == 1);
  CHECK(comm_rounds(CommSchedule::log(), 1) == 1);
  CHECK(comm_rounds(CommSchedule::log(), 3) == 2);
  CHECK_THROWS_AS(comm_rounds(CommSchedule::polynomial(1.5), 0), ConfigError);
  CHECK_THROWS_AS(comm_rounds(CommSchedule::polynomial(0.0), 0), ConfigError);
  for (const auto& s : {CommSchedule::linear(), CommSchedule::polynomial(0.3), CommSchedule::log()}) {
    std::int64_t prev = 1;
    for (int k = 0; k < 500; ++k) {
      const std::int64_t t = comm_rounds(s, k);
      CHECK(t >= 1);
      if (s.kind != CommKind::log) CHECK(t >= prev);
      prev = t;
    }
  }
}

TEST_CASE("schedule names round-trip") {
  for (auto k : {BatchKind::geometric, BatchKind::polynomial, BatchKind::pbr_geometric, BatchKind::raw_geometric,
                 BatchKind::constant})
    CHECK(parse_batch_kind(to_string(k)) == k);
  for (auto k : {CommKind::linear, CommKind::polynomial, CommKind::log}) CHECK(parse_comm_kind(to_string(k)) == k);
  for (auto s : {Scheme::vs_pgr, Scheme::d_vs_pgr, Scheme::vs_pbr, Scheme::d_vs_pbr})
    CHECK(parse_scheme(to_string(s)) == s);
  CHECK_THROWS_AS(parse_batch_kind("exponential"), ConfigError);
}

TEST_CASE("recursion bound closed form") {
  CHECK(recursion_bound(1, 1, 0.5, 0.25, 3) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(recursion_bound(2, 0, 0.5, 0.8, 4) == doctest::Approx(2 * std::pow(0.8, 4)).epsilon(1e-15));
  CHECK(recursion_bound(3, 0, 0.7, 0.2, 5) == doctest::Approx(3 * std::pow(0.7, 5)).epsilon(1e-15));
  // Fast contraction with slow forcing: v_1 = q c0 + c1 rho must still be covered.
  CHECK(0.2 + 0.9 <= recursion_bound(1, 1, 0.2, 0.9, 1));
  CHECK_THROWS_AS(recursion_bound(1, 1, 1.0, 0.5, 1), DomainError);
  CHECK_THROWS_AS(recursion_bound(1, 1, 0.5, 0.0, 1), DomainError);
}

TEST_CASE("recursion bound dominates brute-force iteration") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u01(0.01, 0.99), uc(0.0, 10.0);
  for (int t = 0; t < 100; ++t) {
    const double c0 = uc(rng), c1 = uc(rng), q = u01(rng);
    const double rho = t % 10 == 0 ? q : u01(rng);
    double v = c0;
    for (int k = 0; k <= 50; ++k) {
      CHECK(v <= recursion_bound(c0, c1, q, rho, k) * (1 + 1e-9));
      v = q * v + c1 * std::pow(rho, k + 1);
    }
  }
}

TEST_CASE("cqv constant") {
  const double e = std::exp(1.0);
  const CqvConstant a = cqv_constant(1 / e, 1, 1);
  CHECK(a.c == doctest::Approx(0.367879).epsilon(1e-6));
  CHECK(a.maximizer == doctest::Approx(1.0));
  CHECK(cqv_constant(1 / e, 1, 2).c == doctest::Approx(0.541341).epsilon(1e-6));
  CHECK_THROWS_AS(cqv_constant(1.0, 1, 1), DomainError);
  CHECK_THROWS_AS(cqv_constant(0.5, 1.5, 1), DomainError);
  CHECK_THROWS_AS(cqv_constant(0.5, 1, 0), DomainError);
}

TEST_CASE("cqv constant majorizes on a grid") {
  const struct {
    double q, u, v;
  } cases[] = {{0.9, 1, 3}, {0.5, 0.5, 1}, {0.99, 1, 1}, {0.7, 0.25, 2}};
  for (const auto& c : cases) {
    const CqvConstant k = cqv_constant(c.q, c.u, c.v);
    double best = 0;
    for (int i = 1; i <= 2000; ++i) {
      const double x = 0.1 * i;
      const double val = std::pow(c.q, std::pow(x, c.u)) * std::pow(x, c.v);
      CHECK(val <= k.c + 1e-9);
      best = std::max(best, val);
    }
    if (k.maximizer <= 200) CHECK(best >= 0.99 * k.c);
  }
}

TEST_CASE("gradient-response complexity predictions") {
  RateParams p;
  p.C = 1;
  p.q = 0.5;
  p.rho = 0.9;
  p.alpha_nu_sq = 0;
  const ComplexityPrediction a = predict_complexity(Scheme::vs_pgr, p, 0.01);
  CHECK(a.K_eps == doctest::Approx(std::log(100.0) / std::log(1 / 0.9)));
  CHECK(a.K_eps == doctest::Approx(43.71).epsilon(1e-4));
  CHECK(a.regime == Regime::rho_gt_q);
  CHECK_FALSE(a.comm_eps);
  CHECK(predict_complexity(Scheme::vs_pgr, p, 1.0).K_eps == 0.0);
  p.rho = 0.5;
  CHECK(predict_complexity(Scheme::vs_pgr, p, 0.01).regime == Regime::rho_eq_q);
  p.rho = 0.3;
  CHECK(predict_complexity(Scheme::vs_pgr, p, 0.01).regime == Regime::rho_lt_q);
  CHECK_THROWS_AS(predict_complexity(Scheme::vs_pgr, p, 0.0), DomainError);
  p.q = 1.2;
  CHECK_THROWS_AS(predict_complexity(Scheme::vs_pgr, p, 0.1), DomainError);
}

TEST_CASE("distributed communication bound is K(K+1)/2") {
  RateParams p;
  p.C = 1024;
  p.q = 0.5;
  p.rho = 0.25;
  p.beta = 0;
  p.c3 = 0;
  const ComplexityPrediction a = predict_complexity(Scheme::d_vs_pgr, p, 1.0);
  CHECK(a.K_eps == doctest::Approx(10.0));
  REQUIRE(a.comm_eps);
  CHECK(*a.comm_eps == 55.0);
}

TEST_CASE("oracle bound is at least the iteration bound") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.05, 0.95), uc(0.1, 10.0);
  for (int t = 0; t < 200; ++t) {
    RateParams p;
    p.C = uc(rng);
    p.q = u(rng);
    p.rho = u(rng);
    p.alpha_nu_sq = uc(rng);
    p.sample_scale = t % 2 ? 1.0 : 100.0;
    p.beta = 0.5 * u(rng);
    p.c3 = uc(rng);
    p.a = u(rng);
    p.eta_br = u(rng);
    p.n = 5;
    p.c_ns = uc(rng);
    p.c4 = uc(rng);
    for (double eps : {1e-1, 1e-3, 1e-6}) {
      for (auto s : {Scheme::vs_pgr, Scheme::d_vs_pgr, Scheme::vs_pbr, Scheme::d_vs_pbr}) {
        const ComplexityPrediction r = predict_complexity(s, p, eps);
        CHECK(r.K_eps >= 0);
        CHECK(r.M_eps >= r.K_eps);
        if (r.comm_eps) CHECK(*r.comm_eps >= 0);
      }
    }
  }
}

TEST_CASE("tuned parameters") {
  auto a = kappa_tuned_params(1, 1);
  CHECK(a.alpha == 1.0);
  CHECK(a.rho == 0.5);
  a = kappa_tuned_params(1, 2);
  CHECK(a.alpha == 0.25);
  CHECK(a.rho == 0.875);
  a = kappa_tuned_params(1, 2, 4, 0.9);
  CHECK(a.alpha == 0.125);
  CHECK(a.rho == 0.9375);
  CHECK(kappa_tuned_params(1, 2, 4, 0.95).rho == 0.95);
  CHECK_THROWS_AS(kappa_tuned_params(0, 1), DomainError);
  CHECK_THROWS_AS(kappa_tuned_params(1, 2, 2, 0.5), DomainError);
}
