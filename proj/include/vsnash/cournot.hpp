#pragma once

#include <cstdint>
#include <string>

#include <Eigen/Dense>

#include "vsnash/game.hpp"

namespace vsnash {

enum class PriceNoiseBase { d, b };

std::string to_string(PriceNoiseBase base);
PriceNoiseBase parse_price_noise_base(const std::string& s);

struct CournotOptions {
  double cap = 2.0;
  PriceNoiseBase price_noise_base = PriceNoiseBase::d;
  // Multiplies every noise half-width; 0 gives the deterministic game.
  double noise_scale = 1.0;
};

// n firms selling in L markets with inverse demand d - B * (total supply).
// Firm i pays (c_i + xi_i) sum_l x_il + (rho_i / 2) |x_i|^2 and faces
// price shocks zeta_l. rho is empty for the linear-cost variant.
struct CournotInstance {
  int n = 0;
  int L = 0;
  std::uint64_t seed = 0;
  Eigen::VectorXd d;
  Eigen::VectorXd b;
  Eigen::VectorXd c;
  Eigen::VectorXd rho;
  Eigen::VectorXd margin;
  double cap = 2.0;
  PriceNoiseBase price_noise_base = PriceNoiseBase::d;
  double noise_scale = 1.0;

  bool quadratic() const { return rho.size() > 0; }
  double rho_i(int i) const { return quadratic() ? rho(i) : 0.0; }
  // Half-width of xi_i and of zeta_l.
  double cost_half_width(int i) const;
  Eigen::VectorXd price_half_widths() const;

  // F_i(x_i, z) at the given noise (xi_i, zeta_1..zeta_L).
  void gradient(int i, const Eigen::Ref<const Eigen::VectorXd>& xi,
                const Eigen::Ref<const Eigen::VectorXd>& z, const Eigen::VectorXd& noise,
                Eigen::Ref<Eigen::VectorXd> out) const;
  // Deterministic payoff f_i at the profile.
  double payoff(int i, const StrategyProfile& x) const;
  // Jacobian of G; block (i,i) = rho_i I + 2B, block (i,j) = B.
  Eigen::MatrixXd jacobian() const;
  // Constant term of G(x) = Jx + g0.
  Eigen::VectorXd offset() const;

  HessianBounds hessian_bounds() const;
  // E|F_i - noisy F_i|^2 per player.
  Eigen::VectorXd noise_second_moments() const;
  // Analytic (eta, L) of G for the linear variant, numeric otherwise.
  double eta() const;
  double lipschitz() const;
  // Lipschitz constant of x_i -> F_i(x_i, x_i + y): rho_i + 2 max b.
  double own_lipschitz(int i) const;
};

CournotInstance sample_linear_cournot(int n, int L, std::uint64_t seed, const CournotOptions& opt = {});
CournotInstance sample_quadratic_cournot(int n, int L, std::uint64_t seed, const CournotOptions& opt = {});

GameSpec make_game(const CournotInstance& inst);

struct CournotBenchmark {
  CournotInstance instance;
  GameSpec game;
};

CournotBenchmark gen_linear_cournot(int n, int L, std::uint64_t seed, const CournotOptions& opt = {});
// mu enters only the contraction certificate, which holds for every mu > 0.
CournotBenchmark gen_quadratic_cournot(int n, int L, double mu, std::uint64_t seed,
                                       const CournotOptions& opt = {});

}  // namespace vsnash
