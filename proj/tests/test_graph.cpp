#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "vsnash/errors.hpp"
#include "vsnash/graph.hpp"

using namespace vsnash;

namespace {

EdgeSet sorted(EdgeSet e) {
  std::sort(e.begin(), e.end());
  return e;
}

double deviation(const Eigen::MatrixXd& X) {
  const Eigen::RowVectorXd mean = X.colwise().mean();
  return (X.rowwise() - mean).norm();
}

constexpr Topology kAll[] = {Topology::cycle, Topology::star, Topology::erdos_renyi, Topology::complete};

}  // namespace

TEST_CASE("topology edge sets") {
  CHECK(sorted(build_topology(Topology::cycle, 4)) == EdgeSet{{0, 1}, {0, 3}, {1, 2}, {2, 3}});
  CHECK(sorted(build_topology(Topology::star, 4)) == EdgeSet{{0, 1}, {0, 2}, {0, 3}});
  CHECK(sorted(build_topology(Topology::complete, 3)) == sorted(build_topology(Topology::cycle, 3)));
  CHECK(build_topology(Topology::complete, 6).size() == 15);
  CHECK_THROWS_AS(build_topology(Topology::cycle, 1), ConfigError);
  for (auto t : kAll) CHECK(parse_topology(to_string(t)) == t);
}

TEST_CASE("Erdos-Renyi samples are connected and reproducible") {
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    const EdgeSet e = build_topology(Topology::erdos_renyi, 20, seed);
    CHECK(is_connected(e, 20));
    CHECK(e == build_topology(Topology::erdos_renyi, 20, seed));
    for (const auto& [i, j] : e) {
      CHECK(i < j);
      CHECK(j < 20);
    }
  }
  CHECK(build_topology(Topology::erdos_renyi, 20, 1) != build_topology(Topology::erdos_renyi, 20, 2));
}

TEST_CASE("connectivity check") {
  CHECK(is_connected({{0, 1}, {1, 2}}, 3));
  CHECK_FALSE(is_connected({{0, 1}}, 3));
}

TEST_CASE("weight matrices from the degree rule") {
  const double t = 1.0 / 3.0;
  Eigen::MatrixXd A = weight_matrix(build_topology(Topology::complete, 2), 2);
  CHECK((A - Eigen::MatrixXd::Constant(2, 2, 0.5)).cwiseAbs().maxCoeff() < 1e-15);
  CHECK(slem(A) == doctest::Approx(0.0));

  A = weight_matrix(build_topology(Topology::star, 3), 3);
  Eigen::Matrix3d star;
  star << t, t, t, t, 2 * t, 0, t, 0, 2 * t;
  CHECK((A - star).cwiseAbs().maxCoeff() < 1e-15);
  CHECK(slem(A) == doctest::Approx(2.0 / 3.0).epsilon(1e-12));

  A = weight_matrix(build_topology(Topology::cycle, 3), 3);
  CHECK((A - Eigen::MatrixXd::Constant(3, 3, t)).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("weight matrices are symmetric, doubly stochastic and follow the edge pattern") {
  for (auto kind : kAll) {
    for (int n : {2, 5, 20, 37}) {
      const WeightedGraph g = make_graph(kind, n, 3);
      CHECK(g.A.rows() == n);
      CHECK((g.A - g.A.transpose()).cwiseAbs().maxCoeff() == 0.0);
      CHECK((g.A.rowwise().sum().array() - 1.0).abs().maxCoeff() <= 1e-12);
      CHECK((g.A.colwise().sum().array() - 1.0).abs().maxCoeff() <= 1e-12);
      CHECK(g.A.minCoeff() >= 0.0);
      Eigen::MatrixXi adj = Eigen::MatrixXi::Identity(n, n);
      for (const auto& [i, j] : g.edges) adj(i, j) = adj(j, i) = 1;
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) CHECK((g.A(i, j) > 0) == (adj(i, j) == 1));
      CHECK(g.beta >= 0.0);
      CHECK(g.beta < 1.0);
    }
  }
}

TEST_CASE("complete graphs average exactly") {
  for (int n = 2; n <= 10; ++n) CHECK(make_graph(Topology::complete, n).beta == 0.0);
}

TEST_CASE("spectral gaps of the twenty-node benchmark graphs") {
  CHECK(make_graph(Topology::star, 20).beta == doctest::Approx(0.95).epsilon(1e-3));
  CHECK(make_graph(Topology::cycle, 20).beta == doctest::Approx(0.967).epsilon(2e-3));
}

TEST_CASE("slem rejects nonsymmetric input") {
  Eigen::Matrix2d A;
  A << 0.5, 0.5, 0.2, 0.8;
  CHECK_THROWS_AS(slem(A), DomainError);
}

TEST_CASE("consensus rounds") {
  Eigen::MatrixXd X(2, 3);
  X << 1, 2, 3, 5, 0, -1;
  const Eigen::MatrixXd A = make_graph(Topology::complete, 2).A;
  std::int64_t rounds = 0;
  CHECK(consensus_step(X, A, 0, rounds) == X);
  CHECK(rounds == 0);
  const Eigen::MatrixXd Y = consensus_step(X, A, 1, rounds);
  CHECK(rounds == 1);
  for (int c = 0; c < 3; ++c) {
    CHECK(Y(0, c) == doctest::Approx(0.5 * (X(0, c) + X(1, c))));
    CHECK(Y(1, c) == Y(0, c));
  }
  consensus_step(X, A, 7, rounds);
  CHECK(rounds == 8);
}

TEST_CASE("consensus preserves the mean and contracts the deviation by beta^tau") {
  std::mt19937_64 rng(17);
  std::normal_distribution<double> N(0.0, 3.0);
  for (auto kind : kAll) {
    const WeightedGraph g = make_graph(kind, 20, 5);
    for (int t = 0; t < 50; ++t) {
      Eigen::MatrixXd X(20, 4);
      for (int i = 0; i < X.size(); ++i) X.data()[i] = N(rng);
      const std::int64_t tau = t % 7;
      const Eigen::MatrixXd Y = consensus_step(X, g.A, tau);
      CHECK((Y.colwise().mean() - X.colwise().mean()).cwiseAbs().maxCoeff() <= 1e-12);
      CHECK(deviation(Y) <= std::pow(g.beta, static_cast<double>(tau)) * deviation(X) + 1e-10);
    }
  }
}

TEST_CASE("powers of the weight matrix decay at the rate beta") {
  for (auto kind : {Topology::cycle, Topology::star, Topology::erdos_renyi}) {
    for (int n : {10, 20}) {
      const WeightedGraph g = make_graph(kind, n, 7);
      Eigen::MatrixXd P = Eigen::MatrixXd::Identity(n, n);
      std::vector<double> ks, logs;
      for (int k = 1; k <= 30; ++k) {
        P = P * g.A;
        if (k < 5) continue;
        ks.push_back(k);
        logs.push_back(std::log((P.array() - 1.0 / n).abs().maxCoeff()));
      }
      // Least-squares slope of log max |A^k - 11'/n| against k.
      const double mk = std::accumulate(ks.begin(), ks.end(), 0.0) / ks.size();
      const double ml = std::accumulate(logs.begin(), logs.end(), 0.0) / logs.size();
      double sxy = 0, sxx = 0;
      for (std::size_t i = 0; i < ks.size(); ++i) {
        sxy += (ks[i] - mk) * (logs[i] - ml);
        sxx += (ks[i] - mk) * (ks[i] - mk);
      }
      const double ratio = std::exp(sxy / sxx);
      CAPTURE(to_string(kind));
      CAPTURE(n);
      CHECK(std::fabs(ratio / g.beta - 1.0) <= 0.05);
    }
  }
}
