#include "vsnash/graph.hpp"

#include <algorithm>
#include <numeric>

#include "vsnash/errors.hpp"
#include "vsnash/noise.hpp"

namespace vsnash {

namespace {
constexpr int kMaxErAttempts = 1000;
}

std::string to_string(Topology t) {
  switch (t) {
    case Topology::cycle: return "cycle";
    case Topology::star: return "star";
    case Topology::erdos_renyi: return "erdos_renyi";
    case Topology::complete: return "complete";
  }
  return "?";
}

Topology parse_topology(const std::string& s) {
  for (Topology t : {Topology::cycle, Topology::star, Topology::erdos_renyi, Topology::complete})
    if (to_string(t) == s) return t;
  if (s == "er") return Topology::erdos_renyi;
  throw ConfigError("unknown topology '" + s + "'");
}

bool is_connected(const EdgeSet& edges, int n) {
  if (n <= 0) return false;
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  int components = n;
  for (auto [i, j] : edges) {
    const int a = find(i), b = find(j);
    if (a != b) {
      parent[a] = b;
      --components;
    }
  }
  return components == 1;
}

namespace {

EdgeSet build(Topology kind, int n, std::uint64_t seed, int& attempts) {
  if (n < 2) throw ConfigError("a communication graph needs at least 2 players");
  EdgeSet edges;
  attempts = 1;
  switch (kind) {
    case Topology::cycle:
      for (int i = 0; i + 1 < n; ++i) edges.emplace_back(i, i + 1);
      if (n > 2) edges.emplace_back(0, n - 1);
      break;
    case Topology::star:
      for (int j = 1; j < n; ++j) edges.emplace_back(0, j);
      break;
    case Topology::complete:
      for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) edges.emplace_back(i, j);
      break;
    case Topology::erdos_renyi: {
      const double p = 2.0 / n;
      for (attempts = 1; attempts <= kMaxErAttempts; ++attempts) {
        CounterRng rng(seed, 0xE7000000ULL + static_cast<std::uint64_t>(attempts));
        edges.clear();
        for (int i = 0; i < n; ++i)
          for (int j = i + 1; j < n; ++j)
            if (rng.uniform() < p) edges.emplace_back(i, j);
        if (is_connected(edges, n)) return edges;
      }
      throw ConfigError("no connected Erdos-Renyi sample within the attempt cap");
    }
  }
  return edges;
}

}  // namespace

EdgeSet build_topology(Topology kind, int n, std::uint64_t seed) {
  int attempts = 0;
  return build(kind, n, seed, attempts);
}

Eigen::MatrixXd weight_matrix(const EdgeSet& edges, int n) {
  std::vector<int> degree(n, 1);
  for (auto [i, j] : edges) {
    if (i == j || i < 0 || j < 0 || i >= n || j >= n) throw ConfigError("invalid edge");
    ++degree[i];
    ++degree[j];
  }
  const int dmax = *std::max_element(degree.begin(), degree.end());
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
  for (auto [i, j] : edges) {
    A(i, j) = 1.0 / dmax;
    A(j, i) = 1.0 / dmax;
  }
  // Same value as 1 - (d-1)/dmax, written so that the complete graph gets exactly 1/n.
  for (int i = 0; i < n; ++i) A(i, i) = static_cast<double>(dmax - degree[i] + 1) / dmax;
  return A;
}

double slem(const Eigen::MatrixXd& A) {
  if (A.rows() != A.cols()) throw DomainError("slem: matrix is not square");
  if ((A - A.transpose()).cwiseAbs().maxCoeff() > 1e-12) throw DomainError("slem: matrix is not symmetric");
  const Eigen::Index n = A.rows();
  // Removing the averaging projection leaves every eigenvalue except the Perron one.
  const Eigen::MatrixXd B = A - Eigen::MatrixXd::Constant(n, n, 1.0 / static_cast<double>(n));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(B, Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

WeightedGraph make_graph(Topology kind, int n, std::uint64_t seed) {
  WeightedGraph g;
  g.kind = kind;
  g.n = n;
  g.seed = seed;
  g.edges = build(kind, n, seed, g.attempts);
  g.A = weight_matrix(g.edges, n);
  g.beta = slem(g.A);
  return g;
}

Eigen::MatrixXd consensus_step(const Eigen::MatrixXd& estimates, const Eigen::MatrixXd& A,
                               std::int64_t tau) {
  if (tau < 0) throw DomainError("consensus rounds must be nonnegative");
  if (A.rows() != estimates.rows() || A.cols() != estimates.rows())
    throw ConfigError("weight matrix does not match the estimate stack");
  Eigen::MatrixXd v = estimates;
  Eigen::MatrixXd next(v.rows(), v.cols());
  for (std::int64_t t = 0; t < tau; ++t) {
    next.noalias() = A * v;
    v.swap(next);
  }
  return v;
}

Eigen::MatrixXd consensus_step(const Eigen::MatrixXd& estimates, const Eigen::MatrixXd& A,
                               std::int64_t tau, std::int64_t& comm_rounds) {
  Eigen::MatrixXd v = consensus_step(estimates, A, tau);
  comm_rounds += tau;
  return v;
}

}  // namespace vsnash
