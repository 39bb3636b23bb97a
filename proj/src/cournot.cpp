#include "vsnash/cournot.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include "vsnash/analysis.hpp"
#include "vsnash/errors.hpp"
#include "vsnash/noise.hpp"

namespace vsnash {

std::string to_string(PriceNoiseBase base) { return base == PriceNoiseBase::d ? "d" : "b"; }

PriceNoiseBase parse_price_noise_base(const std::string& s) {
  if (s == "d") return PriceNoiseBase::d;
  if (s == "b") return PriceNoiseBase::b;
  throw ConfigError("price_noise_base must be 'd' or 'b', got '" + s + "'");
}

double CournotInstance::cost_half_width(int i) const { return noise_scale * c(i) / 5.0; }

Eigen::VectorXd CournotInstance::price_half_widths() const {
  const Eigen::VectorXd& base = price_noise_base == PriceNoiseBase::d ? d : b;
  return noise_scale * base / 5.0;
}

void CournotInstance::gradient(int i, const Eigen::Ref<const Eigen::VectorXd>& xi,
                               const Eigen::Ref<const Eigen::VectorXd>& z,
                               const Eigen::VectorXd& noise, Eigen::Ref<Eigen::VectorXd> out) const {
  const double cost = c(i) + noise(0);
  const double r = rho_i(i);
  for (int l = 0; l < L; ++l)
    out(l) = cost - (d(l) + noise(1 + l)) + (r + b(l)) * xi(l) + b(l) * z(l);
}

double CournotInstance::payoff(int i, const StrategyProfile& x) const {
  Eigen::VectorXd total = Eigen::VectorXd::Zero(L);
  for (int j = 0; j < n; ++j) total += x.block(j);
  const auto xi = x.block(i);
  return c(i) * xi.sum() + 0.5 * rho_i(i) * xi.squaredNorm() - d.dot(xi) +
         xi.dot(b.cwiseProduct(total));
}

Eigen::MatrixXd CournotInstance::jacobian() const {
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n * L, n * L);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int l = 0; l < L; ++l) J(i * L + l, j * L + l) = i == j ? rho_i(i) + 2.0 * b(l) : b(l);
  return J;
}

Eigen::VectorXd CournotInstance::offset() const {
  Eigen::VectorXd g(n * L);
  for (int i = 0; i < n; ++i) g.segment(i * L, L) = (Eigen::VectorXd::Constant(L, c(i)) - d);
  return g;
}

HessianBounds CournotInstance::hessian_bounds() const {
  HessianBounds h;
  h.own_min.resize(n);
  for (int i = 0; i < n; ++i) h.own_min(i) = rho_i(i) + 2.0 * b.minCoeff();
  h.cross_max = Eigen::MatrixXd::Constant(n, n, b.maxCoeff());
  h.cross_max.diagonal().setZero();
  return h;
}

Eigen::VectorXd CournotInstance::noise_second_moments() const {
  const double price = price_half_widths().squaredNorm() / 3.0;
  Eigen::VectorXd nu(n);
  for (int i = 0; i < n; ++i) {
    const double h = cost_half_width(i);
    nu(i) = L * h * h / 3.0 + price;
  }
  return nu;
}

double CournotInstance::eta() const {
  if (!quadratic()) return b.minCoeff();
  return quadratic_constants(jacobian()).eta;
}

double CournotInstance::lipschitz() const {
  if (!quadratic()) return (n + 1) * b.maxCoeff();
  return quadratic_constants(jacobian()).L;
}

double CournotInstance::own_lipschitz(int i) const { return rho_i(i) + 2.0 * b.maxCoeff(); }

namespace {

CournotInstance sample_common(int n, int L, std::uint64_t seed, const CournotOptions& opt) {
  if (n < 2) throw ConfigError("Cournot game needs at least 2 firms");
  if (L < 1) throw ConfigError("Cournot game needs at least 1 market");
  if (!(opt.cap > 0.0)) throw ConfigError("capacity must be positive");
  if (!(opt.noise_scale >= 0.0)) throw ConfigError("noise scale must be nonnegative");
  CournotInstance inst;
  inst.n = n;
  inst.L = L;
  inst.seed = seed;
  inst.cap = opt.cap;
  inst.price_noise_base = opt.price_noise_base;
  inst.noise_scale = opt.noise_scale;
  CounterRng rng(seed, 0xC0u);
  inst.d.resize(L);
  inst.b.resize(L);
  inst.c.resize(n);
  for (int l = 0; l < L; ++l) inst.d(l) = rng.uniform(40.0, 50.0);
  for (int l = 0; l < L; ++l) inst.b(l) = rng.uniform(1.0, 2.0);
  for (int i = 0; i < n; ++i) inst.c(i) = rng.uniform(3.0, 5.0);
  return inst;
}

}  // namespace

CournotInstance sample_linear_cournot(int n, int L, std::uint64_t seed, const CournotOptions& opt) {
  return sample_common(n, L, seed, opt);
}

CournotInstance sample_quadratic_cournot(int n, int L, std::uint64_t seed, const CournotOptions& opt) {
  CournotInstance inst = sample_common(n, L, seed, opt);
  CounterRng rng(seed, 0xC1u);
  inst.margin.resize(n);
  inst.rho.resize(n);
  // rho_i + 2 min b > (n-1) max b keeps every row of Gamma below one for all mu.
  const double base = std::max(0.0, (n - 1) * inst.b.maxCoeff() - 2.0 * inst.b.minCoeff());
  for (int i = 0; i < n; ++i) {
    inst.margin(i) = rng.uniform(0.5, 1.5);
    inst.rho(i) = base + inst.margin(i);
  }
  return inst;
}

GameSpec make_game(const CournotInstance& inst) {
  const int n = inst.n;
  const int L = inst.L;
  if (inst.d.size() != L || inst.b.size() != L || inst.c.size() != n ||
      (inst.quadratic() && inst.rho.size() != n))
    throw ConfigError("Cournot instance has inconsistent sizes");
  auto shared = std::make_shared<const CournotInstance>(inst);

  GameSpec game;
  game.kind = GameKind::aggregative;
  std::vector<Eigen::VectorXd> widths;
  const Eigen::VectorXd price = inst.price_half_widths();
  for (int i = 0; i < n; ++i) {
    PlayerSpec p;
    p.dim = L;
    p.lower = Eigen::VectorXd::Zero(L);
    p.upper = Eigen::VectorXd::Constant(L, inst.cap);
    p.prox_term = ProxOperator::box(p.lower, p.upper);
    p.affine_in_noise = true;
    p.own_lipschitz = inst.own_lipschitz(i);
    p.cross_lipschitz = inst.b.maxCoeff();
    p.own_hessian_diag = (Eigen::VectorXd::Constant(L, inst.rho_i(i)) + 2.0 * inst.b);
    p.smooth_grad = [shared, i](const StrategyProfile& x, Eigen::Ref<Eigen::VectorXd> out) {
      Eigen::VectorXd z = Eigen::VectorXd::Zero(shared->L);
      for (int j = 0; j < x.players(); ++j) z += x.block(j);
      shared->gradient(i, x.block(i), z, Eigen::VectorXd::Zero(shared->L + 1), out);
    };
    p.noisy_grad = [shared, i](const StrategyProfile& x, const Eigen::VectorXd& noise,
                               Eigen::Ref<Eigen::VectorXd> out) {
      Eigen::VectorXd z = Eigen::VectorXd::Zero(shared->L);
      for (int j = 0; j < x.players(); ++j) z += x.block(j);
      shared->gradient(i, x.block(i), z, noise, out);
    };
    game.players.push_back(std::move(p));

    AggregateMap agg;
    agg.eval = [shared, i](const Eigen::Ref<const Eigen::VectorXd>& xi,
                           const Eigen::Ref<const Eigen::VectorXd>& z, Eigen::Ref<Eigen::VectorXd> out) {
      shared->gradient(i, xi, z, Eigen::VectorXd::Zero(shared->L + 1), out);
    };
    agg.noisy_eval = [shared, i](const Eigen::Ref<const Eigen::VectorXd>& xi,
                                 const Eigen::Ref<const Eigen::VectorXd>& z,
                                 const Eigen::VectorXd& noise, Eigen::Ref<Eigen::VectorXd> out) {
      shared->gradient(i, xi, z, noise, out);
    };
    game.aggregates.push_back(std::move(agg));

    Eigen::VectorXd w(L + 1);
    w(0) = inst.cost_half_width(i);
    w.tail(L) = price;
    widths.push_back(std::move(w));
  }
  game.noise = NoiseModel(std::move(widths));
  game.hessian_bounds = inst.hessian_bounds();
  game.eta = inst.eta();
  game.lipschitz = inst.lipschitz();
  game.noise_constants = NoiseConstants{0.0, std::sqrt(inst.noise_second_moments().sum())};
  game.validate();
  return game;
}

CournotBenchmark gen_linear_cournot(int n, int L, std::uint64_t seed, const CournotOptions& opt) {
  CournotBenchmark out;
  out.instance = sample_linear_cournot(n, L, seed, opt);
  out.game = make_game(out.instance);
  return out;
}

CournotBenchmark gen_quadratic_cournot(int n, int L, double mu, std::uint64_t seed,
                                       const CournotOptions& opt) {
  CournotBenchmark out;
  out.instance = sample_quadratic_cournot(n, L, seed, opt);
  out.game = make_game(out.instance);
  if (!gamma_matrix(out.game, mu).contractive)
    throw PreconditionError("generated quadratic Cournot instance is not contractive");
  return out;
}

}  // namespace vsnash
