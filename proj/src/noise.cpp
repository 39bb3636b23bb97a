#include "vsnash/noise.hpp"

#include "vsnash/errors.hpp"

namespace vsnash {

std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t stream_key(std::uint64_t seed, std::uint64_t player, std::uint64_t iteration) {
  std::uint64_t h = mix64(seed ^ 0x243F6A8885A308D3ULL);
  h = mix64(h + 0xD1B54A32D192ED03ULL * (player + 1));
  return mix64(h + 0x8CB92BA72F3D8DD7ULL * (iteration + 1));
}

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t tag)
    : key_(stream_key(seed, tag, 0x5EED5EEDULL)) {}

double CounterRng::uniform() { return unit_draw(key_, counter_++); }

double CounterRng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

NoiseModel::NoiseModel(std::vector<Eigen::VectorXd> half_widths)
    : half_widths_(std::move(half_widths)) {
  for (const auto& h : half_widths_)
    for (Eigen::Index c = 0; c < h.size(); ++c)
      if (!(h[c] >= 0.0)) throw ConfigError("noise half-widths must be nonnegative");
}

Eigen::VectorXd NoiseModel::variances(int i) const {
  return half_widths_[i].array().square() / 3.0;
}

void NoiseModel::draw(std::uint64_t seed, int i, std::int64_t k, std::int64_t p,
                      Eigen::Ref<Eigen::VectorXd> out) const {
  const Eigen::VectorXd& h = half_widths_[i];
  const std::uint64_t key = stream_key(seed, static_cast<std::uint64_t>(i), static_cast<std::uint64_t>(k));
  const std::uint64_t m = static_cast<std::uint64_t>(h.size());
  for (std::uint64_t c = 0; c < m; ++c)
    out[c] = h[c] * (2.0 * unit_draw(key, static_cast<std::uint64_t>(p) * m + c) - 1.0);
}

void NoiseModel::batch_mean(std::uint64_t seed, int i, std::int64_t k, std::int64_t batch,
                            Eigen::Ref<Eigen::VectorXd> out) const {
  const Eigen::VectorXd& h = half_widths_[i];
  const std::uint64_t key = stream_key(seed, static_cast<std::uint64_t>(i), static_cast<std::uint64_t>(k));
  const std::uint64_t m = static_cast<std::uint64_t>(h.size());
  std::vector<double> acc(m, 0.0);
  std::uint64_t n = 0;
  for (std::int64_t p = 0; p < batch; ++p)
    for (std::uint64_t c = 0; c < m; ++c) acc[c] += unit_draw(key, n++);
  for (std::uint64_t c = 0; c < m; ++c)
    out[c] = h[c] * (2.0 * (acc[c] / static_cast<double>(batch)) - 1.0);
}

Eigen::MatrixXd NoiseModel::batch(std::uint64_t seed, int i, std::int64_t k, std::int64_t batch) const {
  Eigen::MatrixXd rows(batch, dim(i));
  Eigen::VectorXd tmp(dim(i));
  for (std::int64_t p = 0; p < batch; ++p) {
    draw(seed, i, k, p, tmp);
    rows.row(p) = tmp.transpose();
  }
  return rows;
}

}  // namespace vsnash
