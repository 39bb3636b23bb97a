#include "vsnash/game.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "vsnash/analysis.hpp"
#include "vsnash/errors.hpp"

namespace vsnash {

StrategyProfile::StrategyProfile(std::vector<int> dims) : dims_(std::move(dims)) {
  int total = 0;
  offsets_.reserve(dims_.size());
  for (int d : dims_) {
    if (d < 0) throw ConfigError("negative block dimension");
    offsets_.push_back(total);
    total += d;
  }
  data_ = Eigen::VectorXd::Zero(total);
}

StrategyProfile::StrategyProfile(std::vector<int> dims, Eigen::VectorXd data)
    : StrategyProfile(std::move(dims)) {
  if (data.size() != data_.size()) throw ConfigError("profile data does not match block dimensions");
  data_ = std::move(data);
}

Eigen::MatrixXd StrategyProfile::as_rows() const {
  const int n = players();
  const int d = n > 0 ? dims_[0] : 0;
  for (int v : dims_)
    if (v != d) throw ConfigError("as_rows requires equal block dimensions");
  Eigen::MatrixXd rows(n, d);
  for (int i = 0; i < n; ++i) rows.row(i) = block(i).transpose();
  return rows;
}

void StrategyProfile::set_rows(const Eigen::MatrixXd& rows) {
  if (rows.rows() != players()) throw ConfigError("row count does not match player count");
  for (int i = 0; i < players(); ++i) {
    if (rows.cols() != dims_[i]) throw ConfigError("row width does not match block dimension");
    block(i) = rows.row(i).transpose();
  }
}

std::vector<int> GameSpec::dims() const {
  std::vector<int> d;
  d.reserve(players.size());
  for (const auto& p : players) d.push_back(p.dim);
  return d;
}

void GameSpec::validate() const {
  if (players.empty()) throw ConfigError("game has no players");
  if (noise.players() != size()) throw ConfigError("noise model player count mismatch");
  for (int i = 0; i < size(); ++i) {
    const auto& p = players[i];
    if (p.dim <= 0) throw ConfigError("player " + std::to_string(i) + " has no dimensions");
    if (p.lower.size() != p.dim || p.upper.size() != p.dim)
      throw ConfigError("player " + std::to_string(i) + " domain size mismatch");
    if ((p.lower.array() > p.upper.array()).any())
      throw ConfigError("player " + std::to_string(i) + " has an empty domain");
    if (kind == GameKind::general && (!p.smooth_grad || !p.noisy_grad))
      throw ConfigError("player " + std::to_string(i) + " lacks a gradient oracle");
  }
  if (kind == GameKind::aggregative) {
    if (static_cast<int>(aggregates.size()) != size())
      throw ConfigError("aggregative game needs one aggregate map per player");
    for (const auto& a : aggregates)
      if (!a.eval || !a.noisy_eval) throw ConfigError("aggregate map is incomplete");
    for (const auto& p : players)
      if (p.dim != players[0].dim) throw ConfigError("aggregative players must share a dimension");
  }
}

bool GameSpec::compact() const {
  for (const auto& p : players)
    if (!p.lower.allFinite() || !p.upper.allFinite()) return false;
  return true;
}

double GameSpec::domain_diameter() const {
  if (!compact()) return std::numeric_limits<double>::infinity();
  double sq = 0.0;
  for (const auto& p : players) sq += (p.upper - p.lower).squaredNorm();
  return std::sqrt(sq);
}

namespace {

void check_shape(const GameSpec& game, const StrategyProfile& x) {
  if (x.dims() != game.dims()) throw ConfigError("profile dimensions do not match the game");
}

bool degenerate_noise(const GameSpec& game, int i) {
  return (game.noise.half_widths(i).array() == 0.0).all();
}

Eigen::VectorXd aggregate_sum(const StrategyProfile& x) {
  Eigen::VectorXd z = Eigen::VectorXd::Zero(x.dim(0));
  for (int j = 0; j < x.players(); ++j) z += x.block(j);
  return z;
}

}  // namespace

StrategyProfile deterministic_gradient(const GameSpec& game, const StrategyProfile& x) {
  check_shape(game, x);
  StrategyProfile g(x.dims());
  if (game.kind == GameKind::aggregative) {
    const Eigen::VectorXd z = aggregate_sum(x);
    for (int i = 0; i < game.size(); ++i) game.aggregates[i].eval(x.block(i), z, g.block(i));
  } else {
    for (int i = 0; i < game.size(); ++i) game.players[i].smooth_grad(x, g.block(i));
  }
  return g;
}

namespace {

StrategyProfile sampled_impl(const GameSpec& game, const StrategyProfile& x,
                             const Eigen::MatrixXd* aggregates, std::int64_t batch,
                             NoiseStream& stream) {
  if (batch < 1) throw ScheduleError("batch size must be at least 1");
  check_shape(game, x);
  const int n = game.size();
  StrategyProfile g(x.dims());
  Eigen::VectorXd z;
  if (game.kind == GameKind::aggregative && aggregates == nullptr) z = aggregate_sum(x);

  for (int i = 0; i < n; ++i) {
    const PlayerSpec& p = game.players[i];
    const int m = game.noise.dim(i);
    Eigen::VectorXd xi(m);
    const bool one_shot = p.affine_in_noise || degenerate_noise(game, i);
    if (one_shot) {
      if (degenerate_noise(game, i))
        xi.setZero();
      else
        game.noise.batch_mean(stream.seed, i, stream.iteration, batch, xi);
      if (game.kind == GameKind::aggregative) {
        if (aggregates != nullptr)
          game.aggregates[i].noisy_eval(x.block(i), aggregates->row(i).transpose(), xi, g.block(i));
        else
          game.aggregates[i].noisy_eval(x.block(i), z, xi, g.block(i));
      } else {
        p.noisy_grad(x, xi, g.block(i));
      }
    } else {
      Eigen::VectorXd acc = Eigen::VectorXd::Zero(p.dim);
      Eigen::VectorXd tmp(p.dim);
      Eigen::VectorXd zi;
      if (game.kind == GameKind::aggregative)
        zi = aggregates != nullptr ? Eigen::VectorXd(aggregates->row(i).transpose()) : z;
      for (std::int64_t s = 0; s < batch; ++s) {
        game.noise.draw(stream.seed, i, stream.iteration, s, xi);
        if (game.kind == GameKind::aggregative)
          game.aggregates[i].noisy_eval(x.block(i), zi, xi, tmp);
        else
          p.noisy_grad(x, xi, tmp);
        acc += tmp;
      }
      g.block(i) = acc / static_cast<double>(batch);
    }
  }
  stream.samples += batch * n;
  return g;
}

}  // namespace

StrategyProfile sampled_gradient(const GameSpec& game, const StrategyProfile& x,
                                 std::int64_t batch, NoiseStream& stream) {
  return sampled_impl(game, x, nullptr, batch, stream);
}

StrategyProfile sampled_gradient(const GameSpec& game, const StrategyProfile& x,
                                 const Eigen::MatrixXd& aggregates, std::int64_t batch,
                                 NoiseStream& stream) {
  if (game.kind != GameKind::aggregative)
    throw ConfigError("aggregate override requires an aggregative game");
  if (aggregates.rows() != game.size() || aggregates.cols() != game.players[0].dim)
    throw ConfigError("aggregate override has the wrong shape");
  return sampled_impl(game, x, &aggregates, batch, stream);
}

GameSpec make_affine_game(const std::vector<int>& dims, const Eigen::MatrixXd& M,
                          const Eigen::VectorXd& b, const Eigen::VectorXd& lower,
                          const Eigen::VectorXd& upper, const Eigen::VectorXd& half_widths) {
  StrategyProfile shape(dims);
  const int total = shape.total_dim();
  if (M.rows() != total || M.cols() != total || b.size() != total || lower.size() != total ||
      upper.size() != total || half_widths.size() != total)
    throw ConfigError("affine game data does not match the block dimensions");

  GameSpec game;
  game.kind = GameKind::general;
  std::vector<Eigen::VectorXd> widths;
  const int n = static_cast<int>(dims.size());
  HessianBounds bounds{Eigen::VectorXd::Zero(n), Eigen::MatrixXd::Zero(n, n)};

  for (int i = 0; i < n; ++i) {
    const int off = shape.offset(i);
    const int d = dims[i];
    PlayerSpec p;
    p.dim = d;
    p.lower = lower.segment(off, d);
    p.upper = upper.segment(off, d);
    p.prox_term = ProxOperator::box(p.lower, p.upper);
    p.affine_in_noise = true;
    p.smooth_grad = [M, b, off, d](const StrategyProfile& x, Eigen::Ref<Eigen::VectorXd> out) {
      out = M.middleRows(off, d) * x.data() + b.segment(off, d);
    };
    p.noisy_grad = [M, b, off, d](const StrategyProfile& x, const Eigen::VectorXd& xi,
                                  Eigen::Ref<Eigen::VectorXd> out) {
      out = M.middleRows(off, d) * x.data() + b.segment(off, d) + xi;
    };
    const Eigen::MatrixXd own = M.block(off, off, d, d);
    p.own_lipschitz = Eigen::JacobiSVD<Eigen::MatrixXd>(own).singularValues()(0);
    const Eigen::MatrixXd off_diag = own - Eigen::MatrixXd(own.diagonal().asDiagonal());
    if (off_diag.cwiseAbs().maxCoeff() == 0.0) p.own_hessian_diag = own.diagonal();
    game.players.push_back(std::move(p));
    widths.push_back(half_widths.segment(off, d));

    bounds.own_min(i) = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(
                            0.5 * (own + own.transpose()))
                            .eigenvalues()(0);
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      const Eigen::MatrixXd cross = M.block(off, shape.offset(j), d, dims[j]);
      bounds.cross_max(i, j) = Eigen::JacobiSVD<Eigen::MatrixXd>(cross).singularValues()(0);
    }
  }
  game.noise = NoiseModel(std::move(widths));
  game.hessian_bounds = bounds;

  const MonotonicityConstants mc = quadratic_constants(M);
  if (mc.strongly_monotone) game.eta = mc.eta;
  game.lipschitz = mc.L;
  game.noise_constants = NoiseConstants{0.0, std::sqrt((half_widths.array().square() / 3.0).sum())};
  game.validate();
  return game;
}

}  // namespace vsnash
