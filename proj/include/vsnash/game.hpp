#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "vsnash/noise.hpp"
#include "vsnash/prox.hpp"

namespace vsnash {

// Concatenated strategies (x_1, ..., x_n) in one contiguous vector.
class StrategyProfile {
public:
  StrategyProfile() = default;
  explicit StrategyProfile(std::vector<int> dims);
  StrategyProfile(std::vector<int> dims, Eigen::VectorXd data);

  int players() const { return static_cast<int>(dims_.size()); }
  int dim(int i) const { return dims_[i]; }
  int offset(int i) const { return offsets_[i]; }
  int total_dim() const { return static_cast<int>(data_.size()); }
  const std::vector<int>& dims() const { return dims_; }

  Eigen::VectorXd::SegmentReturnType block(int i) { return data_.segment(offsets_[i], dims_[i]); }
  Eigen::VectorXd::ConstSegmentReturnType block(int i) const {
    return data_.segment(offsets_[i], dims_[i]);
  }
  Eigen::VectorXd& data() { return data_; }
  const Eigen::VectorXd& data() const { return data_; }

  bool same_shape(const StrategyProfile& other) const { return dims_ == other.dims_; }
  bool finite() const { return data_.allFinite(); }

  // Rows are blocks; requires equal block dimensions.
  Eigen::MatrixXd as_rows() const;
  void set_rows(const Eigen::MatrixXd& rows);

private:
  std::vector<int> dims_;
  std::vector<int> offsets_;
  Eigen::VectorXd data_;
};

struct ResourceCounters {
  std::int64_t prox_evals = 0;
  std::int64_t samples = 0;
  std::int64_t comm_rounds = 0;
  std::int64_t inner_solves = 0;

  bool operator==(const ResourceCounters&) const = default;
};

// out = grad_{x_i} f_i(x)
using GradFn = std::function<void(const StrategyProfile& x, Eigen::Ref<Eigen::VectorXd> out)>;
// out = grad_{x_i} psi_i(x; xi)
using NoisyGradFn = std::function<void(const StrategyProfile& x, const Eigen::VectorXd& xi,
                                       Eigen::Ref<Eigen::VectorXd> out)>;

struct PlayerSpec {
  int dim = 0;
  GradFn smooth_grad;
  NoisyGradFn noisy_grad;
  ProxOperator prox_term;
  // Feasible box R_i; infinite bounds allowed.
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;
  // The sampled gradient is affine in the noise, so a batch mean equals the
  // gradient at the mean draw.
  bool affine_in_noise = false;
  // Lipschitz constant of x_i -> grad_i psi_i with rivals (or aggregate shift) fixed.
  double own_lipschitz = 0.0;
  // Aggregative games: Lipschitz constant of F_i(x_i, .) in the aggregate.
  double cross_lipschitz = 0.0;
  // Constant diagonal Hessian of x_i -> psi_i, when the player objective is a
  // separable quadratic in x_i. Enables the closed-form best response.
  Eigen::VectorXd own_hessian_diag;
};

using AggregateFn = std::function<void(const Eigen::Ref<const Eigen::VectorXd>& xi,
                                       const Eigen::Ref<const Eigen::VectorXd>& z,
                                       Eigen::Ref<Eigen::VectorXd> out)>;
using NoisyAggregateFn = std::function<void(const Eigen::Ref<const Eigen::VectorXd>& xi,
                                            const Eigen::Ref<const Eigen::VectorXd>& z,
                                            const Eigen::VectorXd& noise,
                                            Eigen::Ref<Eigen::VectorXd> out)>;

// F_i(x_i, z) with z the full aggregate sum_j x_j.
struct AggregateMap {
  AggregateFn eval;
  NoisyAggregateFn noisy_eval;
};

enum class GameKind { general, aggregative };

// zeta_{i,min} and zeta_{ij,max}; the diagonal of cross_max is ignored.
struct HessianBounds {
  Eigen::VectorXd own_min;
  Eigen::MatrixXd cross_max;
};

// E|w|^2 <= nu1^2 |x|^2 + nu2^2 for the single-sample gradient error of G.
struct NoiseConstants {
  double nu1 = 0.0;
  double nu2 = 0.0;
};

struct GameSpec {
  GameKind kind = GameKind::general;
  std::vector<PlayerSpec> players;
  std::vector<AggregateMap> aggregates;
  NoiseModel noise;
  std::optional<HessianBounds> hessian_bounds;
  std::optional<NoiseConstants> noise_constants;
  // Strong monotonicity modulus and Lipschitz constant of G, when known.
  std::optional<double> eta;
  std::optional<double> lipschitz;

  int size() const { return static_cast<int>(players.size()); }
  std::vector<int> dims() const;
  StrategyProfile zero_profile() const { return StrategyProfile(dims()); }
  void validate() const;
  bool compact() const;
  // Euclidean diameter of the product box, or +inf.
  double domain_diameter() const;
};

StrategyProfile deterministic_gradient(const GameSpec& game, const StrategyProfile& x);

// Batch-mean sampled gradient at x; draws come from iteration stream.iteration.
StrategyProfile sampled_gradient(const GameSpec& game, const StrategyProfile& x,
                                 std::int64_t batch, NoiseStream& stream);
// Aggregative games only: row i of aggregates replaces sum_j x_j for player i.
StrategyProfile sampled_gradient(const GameSpec& game, const StrategyProfile& x,
                                 const Eigen::MatrixXd& aggregates, std::int64_t batch,
                                 NoiseStream& stream);

// G(x) = M x + b with additive componentwise uniform noise of the given half-widths.
GameSpec make_affine_game(const std::vector<int>& dims, const Eigen::MatrixXd& M,
                          const Eigen::VectorXd& b, const Eigen::VectorXd& lower,
                          const Eigen::VectorXd& upper, const Eigen::VectorXd& half_widths);

}  // namespace vsnash
