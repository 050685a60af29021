#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>

namespace nbmf {

/// Seeded random source. Every random stream in the library is derived from
/// a (seed, stream) pair so that independent chains, restarts and the data
/// splitter never share draws.
class Rng {
 public:
  using Engine = std::mt19937_64;

  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0);

  /// Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, n).
  std::size_t index(std::size_t n);

  bool bernoulli(double p) { return uniform() < p; }

  double gamma(double shape);

  /// log of a Gamma(shape, 1) variate; stays finite for shapes well below 1
  /// where the variate itself underflows.
  double log_gamma_variate(double shape);

  double beta(double a, double b);

  void dirichlet(std::span<const double> concentration, std::span<double> out);

  /// Draws an index from unnormalized nonnegative weights with a single
  /// uniform against the running sum. `scratch` must have weights.size()
  /// entries and receives the cumulative sums.
  std::size_t categorical(std::span<const double> weights, std::span<double> scratch);

  Engine& engine() { return engine_; }

 private:
  Engine engine_;
};

/// Stream ids for the library's own random consumers. Chain i of an engine
/// uses stream i; auxiliary consumers sit far above any realistic chain count.
namespace streams {
inline constexpr std::uint64_t kSplit = 1ULL << 40;
inline constexpr std::uint64_t kSynthFactors = (1ULL << 40) + 1;
inline constexpr std::uint64_t kSynthData = (1ULL << 40) + 2;
}  // namespace streams

}  // namespace nbmf
