#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace vsnash {

enum class Topology { cycle, star, erdos_renyi, complete };

std::string to_string(Topology t);
Topology parse_topology(const std::string& s);

// Undirected edges (i, j) with i < j, nodes numbered from 0. Self-loops are implicit.
using EdgeSet = std::vector<std::pair<int, int>>;

// Erdos-Renyi graphs use edge probability 2/n and are redrawn until connected.
EdgeSet build_topology(Topology kind, int n, std::uint64_t seed = 0);

bool is_connected(const EdgeSet& edges, int n);

// a_ij = 1/d_max for neighbours, a_ii = 1 - (d(i)-1)/d_max, d counting the node itself.
Eigen::MatrixXd weight_matrix(const EdgeSet& edges, int n);

// Second-largest eigenvalue modulus of a symmetric stochastic matrix.
double slem(const Eigen::MatrixXd& A);

struct WeightedGraph {
  Topology kind = Topology::complete;
  int n = 0;
  std::uint64_t seed = 0;
  EdgeSet edges;
  Eigen::MatrixXd A;
  double beta = 0.0;
  // Number of redraws needed for a connected Erdos-Renyi sample.
  int attempts = 1;
};

WeightedGraph make_graph(Topology kind, int n, std::uint64_t seed = 0);

// A^tau applied to the rows of estimates, one multiplication per round.
Eigen::MatrixXd consensus_step(const Eigen::MatrixXd& estimates, const Eigen::MatrixXd& A,
                               std::int64_t tau);
Eigen::MatrixXd consensus_step(const Eigen::MatrixXd& estimates, const Eigen::MatrixXd& A,
                               std::int64_t tau, std::int64_t& comm_rounds);

}  // namespace vsnash
