#include <cmath>

#include "vsnash/errors.hpp"
#include "vsnash/solvers.hpp"

namespace vsnash {

namespace {

// Sample-average gradient of x_i -> psi_i at z, without the proximal term.
class SampleAverageGradient {
public:
  SampleAverageGradient(const GameSpec& game, int player, const BrContext& ctx,
                        const Eigen::MatrixXd& samples)
      : game_(game), player_(player), ctx_(ctx) {
    const PlayerSpec& p = game.players[player];
    if (p.affine_in_noise && samples.rows() > 1)
      rows_ = samples.colwise().mean();
    else
      rows_ = samples;
    if (game.kind == GameKind::aggregative) {
      if (!ctx.aggregate_shift) throw ConfigError("aggregative best response needs an aggregate shift");
      if (ctx.aggregate_shift->size() != p.dim) throw ConfigError("aggregate shift has the wrong size");
    } else {
      if (ctx.rivals == nullptr) throw ConfigError("best response needs a rival profile");
      work_ = *ctx.rivals;
    }
    tmp_.resize(p.dim);
    xi_.resize(rows_.cols());
  }

  void operator()(const Eigen::VectorXd& z, Eigen::VectorXd& out) {
    out.setZero(z.size());
    if (game_.kind == GameKind::aggregative) {
      const Eigen::VectorXd agg = z + *ctx_.aggregate_shift;
      for (Eigen::Index s = 0; s < rows_.rows(); ++s) {
        xi_ = rows_.row(s).transpose();
        game_.aggregates[player_].noisy_eval(z, agg, xi_, tmp_);
        out += tmp_;
      }
    } else {
      work_.block(player_) = z;
      for (Eigen::Index s = 0; s < rows_.rows(); ++s) {
        xi_ = rows_.row(s).transpose();
        game_.players[player_].noisy_grad(work_, xi_, tmp_);
        out += tmp_;
      }
    }
    if (rows_.rows() > 1) out /= static_cast<double>(rows_.rows());
  }

private:
  const GameSpec& game_;
  int player_;
  const BrContext& ctx_;
  Eigen::MatrixXd rows_;
  StrategyProfile work_;
  Eigen::VectorXd tmp_;
  Eigen::VectorXd xi_;
};

}  // namespace

BrSolution solve_sample_average_br(const GameSpec& game, int player, const BrContext& context,
                                   const Eigen::MatrixXd& samples, double mu,
                                   const Eigen::VectorXd& anchor, const InnerSolverConfig& config,
                                   ResourceCounters& counters) {
  if (player < 0 || player >= game.size()) throw ConfigError("player index out of range");
  if (samples.rows() == 0) throw ConfigError("best response needs at least one sample");
  if (samples.cols() != game.noise.dim(player)) throw ConfigError("sample width does not match the noise model");
  if (!(mu > 0.0)) throw ConfigError("mu must be positive");
  const PlayerSpec& p = game.players[player];
  if (anchor.size() != p.dim) throw ConfigError("anchor has the wrong size");

  SampleAverageGradient grad(game, player, context, samples);
  ++counters.inner_solves;
  BrSolution sol;
  Eigen::VectorXd g(p.dim);

  if (config.closed_form) {
    if (p.own_hessian_diag.size() != p.dim) throw ConfigError("closed-form best response needs own_hessian_diag");
    grad(anchor, g);
    const Eigen::VectorXd curv = (p.own_hessian_diag.array() + mu).matrix();
    sol.x = (anchor.array() - g.array() / curv.array()).matrix();
    prox_inplace(p.prox_term, sol.x, Eigen::VectorXd(curv.cwiseInverse()));
    sol.iterations = 1;
    sol.converged = true;
    return sol;
  }

  if (!(p.own_lipschitz > 0.0)) throw ConfigError("iterative best response needs the player's own Lipschitz constant");
  const double t = 1.0 / (p.own_lipschitz + mu);
  Eigen::VectorXd z = anchor;
  Eigen::VectorXd next(p.dim);
  for (std::int64_t it = 1; it <= config.max_iters; ++it) {
    grad(z, g);
    next = z - t * (g + mu * (z - anchor));
    prox_inplace(p.prox_term, next, t);
    sol.residual = (next - z).norm() / t;
    z.swap(next);
    sol.iterations = it;
    if (!z.allFinite()) break;
    if (sol.residual <= config.tol) {
      sol.converged = true;
      break;
    }
  }
  sol.x = std::move(z);
  return sol;
}

}  // namespace vsnash
