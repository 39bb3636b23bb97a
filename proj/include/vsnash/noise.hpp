#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace vsnash {

// splitmix64 output function.
std::uint64_t mix64(std::uint64_t z);

// Key of the draw stream owned by (seed, player, iteration).
std::uint64_t stream_key(std::uint64_t seed, std::uint64_t player, std::uint64_t iteration);

// n-th uniform in [0, 1) of the stream with the given key.
inline double unit_draw(std::uint64_t key, std::uint64_t n) {
  std::uint64_t z = key + (n + 1) * 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  z ^= z >> 31;
  return static_cast<double>(z >> 11) * 0x1.0p-53;
}

// Sequential counter-based generator, used for instance and graph sampling.
class CounterRng {
public:
  CounterRng(std::uint64_t seed, std::uint64_t tag);
  double uniform();
  double uniform(double lo, double hi);
  std::uint64_t position() const { return counter_; }

private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

// Componentwise centred uniform noise: component c of player i is U(-h_ic, h_ic).
// Sample p of player i at iteration k is a pure function of (seed, i, k, p).
class NoiseModel {
public:
  NoiseModel() = default;
  explicit NoiseModel(std::vector<Eigen::VectorXd> half_widths);

  int players() const { return static_cast<int>(half_widths_.size()); }
  int dim(int i) const { return static_cast<int>(half_widths_[i].size()); }
  const Eigen::VectorXd& half_widths(int i) const { return half_widths_[i]; }
  // Per-component variance h^2/3.
  Eigen::VectorXd variances(int i) const;

  void draw(std::uint64_t seed, int i, std::int64_t k, std::int64_t p,
            Eigen::Ref<Eigen::VectorXd> out) const;
  // Mean of samples 0..batch-1.
  void batch_mean(std::uint64_t seed, int i, std::int64_t k, std::int64_t batch,
                  Eigen::Ref<Eigen::VectorXd> out) const;
  // Rows are samples 0..batch-1.
  Eigen::MatrixXd batch(std::uint64_t seed, int i, std::int64_t k, std::int64_t batch) const;

private:
  std::vector<Eigen::VectorXd> half_widths_;
};

// Cursor over a seeded noise stream, owned by a single run.
struct NoiseStream {
  std::uint64_t seed = 0;
  std::int64_t iteration = 0;
  std::int64_t samples = 0;
};

}  // namespace vsnash
