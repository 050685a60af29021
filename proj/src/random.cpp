#include "nbmf/random.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "nbmf/errors.hpp"

namespace nbmf {

namespace {

std::seed_seq make_seed_seq(std::uint64_t seed, std::uint64_t stream) {
  return std::seed_seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                       static_cast<std::uint32_t>(stream),
                       static_cast<std::uint32_t>(stream >> 32), 0x6e626d66u};
}

}  // namespace

Rng::Rng(std::uint64_t seed, std::uint64_t stream) {
  auto seq = make_seed_seq(seed, stream);
  engine_.seed(seq);
}

std::size_t Rng::index(std::size_t n) {
  if (n == 0) throw ArgumentError("Rng::index: empty range");
  std::uniform_int_distribution<std::size_t> dist(0, n - 1);
  return dist(engine_);
}

double Rng::gamma(double shape) {
  std::gamma_distribution<double> dist(shape, 1.0);
  return dist(engine_);
}

double Rng::log_gamma_variate(double shape) {
  if (shape >= 1.0) return std::log(gamma(shape));
  // G(a) = G(a + 1) * U^(1/a)
  double u = uniform();
  while (u == 0.0) u = uniform();
  return std::log(gamma(shape + 1.0)) + std::log(u) / shape;
}

double Rng::beta(double a, double b) {
  const double lx = log_gamma_variate(a);
  const double ly = log_gamma_variate(b);
  // x / (x + y) without leaving log space
  return 1.0 / (1.0 + std::exp(ly - lx));
}

void Rng::dirichlet(std::span<const double> concentration, std::span<double> out) {
  double top = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < concentration.size(); ++k) {
    out[k] = log_gamma_variate(concentration[k]);
    top = std::max(top, out[k]);
  }
  double total = 0.0;
  for (std::size_t k = 0; k < concentration.size(); ++k) {
    out[k] = std::exp(out[k] - top);
    total += out[k];
  }
  for (std::size_t k = 0; k < concentration.size(); ++k) out[k] /= total;
}

std::size_t Rng::categorical(std::span<const double> weights, std::span<double> scratch) {
  double running = 0.0;
  for (std::size_t k = 0; k < weights.size(); ++k) {
    running += weights[k];
    scratch[k] = running;
  }
  const double u = uniform() * running;
  const auto it = std::upper_bound(scratch.begin(), scratch.begin() + weights.size(), u);
  const auto k = static_cast<std::size_t>(it - scratch.begin());
  if (k < weights.size()) return k;
  // u landed on the total through rounding; take the last positive weight
  for (std::size_t j = weights.size(); j-- > 0;)
    if (weights[j] > 0.0) return j;
  return weights.size() - 1;
}

}  // namespace nbmf
