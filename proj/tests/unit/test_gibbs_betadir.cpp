#include "doctest.h"

#include <cmath>
#include <numeric>
#include <random>

#include <boost/math/distributions/chi_squared.hpp>

#include "generators.hpp"
#include "nbmf/errors.hpp"
#include "nbmf/gibbs_betadir.hpp"
#include "oracle.hpp"

using namespace nbmf;

namespace {

HyperParams symmetric(std::size_t k) {
  HyperParams h;
  h.k = k;
  h.alpha.assign(k, 1.0);
  h.beta.assign(k, 1.0);
  h.gamma.assign(k, 1.0);
  return h;
}

std::vector<double> normalized(std::vector<double> w) {
  const double s = std::accumulate(w.begin(), w.end(), 0.0);
  for (auto& x : w) x /= s;
  return w;
}

// Row 0 holds the probed one at (0,0) and two more cells assigned to k0;
// column 0 holds three ones and one zero below it, all assigned to k0.
BinaryMatrix worked_example_matrix() {
  const auto M = CellState::Missing, O = CellState::One, Z = CellState::Zero;
  return BinaryMatrix(5, 3, {O, O, Z,
                             O, M, M,
                             O, M, M,
                             O, M, M,
                             Z, M, M});
}

bool counters_conserved(const BetaDirState& s) {
  const auto& v = s.data();
  for (std::size_t f = 0; f < v.rows(); ++f)
    if (s.row_counts().row(static_cast<Eigen::Index>(f)).sum() != static_cast<int>(v.row_observed(f))) return false;
  for (std::size_t n = 0; n < v.cols(); ++n) {
    const auto col = static_cast<Eigen::Index>(n);
    if (s.one_counts().col(col).sum() + s.zero_counts().col(col).sum() != static_cast<int>(v.col_observed(n)))
      return false;
  }
  return s.row_counts().minCoeff() >= 0 && s.one_counts().minCoeff() >= 0 && s.zero_counts().minCoeff() >= 0;
}

}  // namespace

TEST_CASE("init_random") {
  const auto v = BinaryMatrix::from_values(2, 2, {1, 0, 1, 1});
  SUBCASE("assigns every observed cell") {
    const auto s = init_random(v, symmetric(3), 7);
    CHECK(s.assignments().size() == 4);
    CHECK(s.row_counts().sum() == 4);
    CHECK(s.counters_consistent());
  }
  SUBCASE("K=1 puts everything in component 0") {
    const auto s = init_random(v, symmetric(1), 7);
    for (int z : s.assignments()) CHECK(z == 0);
  }
  SUBCASE("same seed, same state") {
    CHECK(init_random(v, symmetric(3), 9).assignments() == init_random(v, symmetric(3), 9).assignments());
  }
}

TEST_CASE("conditional weights of the worked example") {
  const auto v = worked_example_matrix();
  HyperParams h = symmetric(2);
  h.gamma = {0.5, 0.5};
  auto s = BetaDirState::from_assignments(v, h, std::vector<int>(v.observed_count(), 0));
  const auto w = s.conditional_weights(0, 0);
  REQUIRE(w.size() == 2);
  CHECK(w[0] == doctest::Approx(5.0 / 3.0).epsilon(1e-14));
  CHECK(w[1] == doctest::Approx(0.25).epsilon(1e-14));
  const auto p = normalized(w);
  CHECK(p[0] == doctest::Approx(20.0 / 23.0).epsilon(1e-14));
  CHECK(p[1] == doctest::Approx(3.0 / 23.0).epsilon(1e-14));
  // the probe restores the state
  CHECK_FALSE(s.detached().has_value());
  CHECK(s.counters_consistent());
}

TEST_CASE("conditional weights edge cases") {
  SUBCASE("lone cell, symmetric prior: uniform") {
    const auto v = BinaryMatrix::from_values(1, 1, {1});
    const auto s = BetaDirState::from_assignments(v, symmetric(4), {2});
    for (double p : normalized(s.conditional_weights(0, 0))) CHECK(p == doctest::Approx(0.25));
  }
  SUBCASE("K=1") {
    const auto v = BinaryMatrix::from_values(1, 2, {1, 0});
    const auto s = BetaDirState::from_assignments(v, symmetric(1), {0, 0});
    const auto p = normalized(s.conditional_weights(0, 1));
    REQUIRE(p.size() == 1);
    CHECK(p[0] == 1.0);
  }
  SUBCASE("missing cell is a contract violation") {
    const auto v = worked_example_matrix();
    const auto s = BetaDirState::from_assignments(v, symmetric(2), std::vector<int>(v.observed_count(), 1));
    CHECK_THROWS_AS(s.conditional_weights(1, 1), ContractError);
  }
  SUBCASE("span form requires the cell to be detached") {
    const auto v = BinaryMatrix::from_values(1, 2, {1, 0});
    auto s = BetaDirState::from_assignments(v, symmetric(2), {0, 1});
    std::vector<double> out(2);
    CHECK_THROWS_AS(s.conditional_weights(0, out), ContractError);
    s.detach(0);
    CHECK_NOTHROW(s.conditional_weights(0, out));
    CHECK_THROWS_AS(s.detach(1), ContractError);
    s.attach(0, 1);
    CHECK(s.counters_consistent());
  }
}

TEST_CASE("conditional weights match oracle joint ratios") {
  std::mt19937_64 gen(2024);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const auto v = testgen::random_matrix(gen, 3, 3, 0.25);
    const std::size_t k = 1 + trial % 3;
    const auto h = testgen::random_betadir_hyper(gen, k, 0.2, 2.0);
    const auto z = testgen::random_assignment(gen, v.observed_count(), k);
    const auto s = BetaDirState::from_assignments(v, h, z);
    const auto inst = oracle::instance_of(v);
    for (std::size_t cell = 0; cell < v.observed_count(); ++cell) {
      const auto cidx = v.observed()[cell];
      const auto got = normalized(s.conditional_weights(cidx.row, cidx.col));
      const auto want = oracle::betadir_exact_conditional(inst, h, z, cell);
      for (std::size_t j = 0; j < k; ++j) {
        CHECK(got[j] > 0.0);
        worst = std::max(worst, std::abs(got[j] - want[j]) / want[j]);
      }
    }
  }
  CHECK(worst <= 1e-10);
}

TEST_CASE("prior conditional sums to one") {
  std::mt19937_64 gen(3);
  for (int trial = 0; trial < 20; ++trial) {
    const auto v = testgen::random_matrix(gen, 4, 4, 0.3);
    const auto h = testgen::random_betadir_hyper(gen, 3, 0.2, 2.0);
    auto s = BetaDirState::from_assignments(v, h, testgen::random_assignment(gen, v.observed_count(), 3));
    const std::size_t cell = 0;
    const std::size_t f = v.observed()[cell].row;
    s.detach(cell);
    double total = 0.0;
    const double denom = std::accumulate(h.gamma.begin(), h.gamma.end(), 0.0) + v.row_observed(f) - 1.0;
    for (std::size_t k = 0; k < 3; ++k)
      total += (h.gamma[k] + s.row_counts()(static_cast<Eigen::Index>(f), static_cast<Eigen::Index>(k))) / denom;
    CHECK(total == doctest::Approx(1.0).epsilon(1e-13));
    s.attach(cell, s.assignments()[cell]);
  }
}

TEST_CASE("sweeps keep counters consistent and conserved") {
  std::mt19937_64 gen(8);
  for (int trial = 0; trial < 20; ++trial) {
    const auto v = testgen::random_matrix(gen, 6, 6, 0.3);
    const auto h = testgen::random_betadir_hyper(gen, 4, 0.1, 2.0);
    auto s = init_random(v, h, static_cast<std::uint64_t>(trial));
    Rng rng(static_cast<std::uint64_t>(trial), 1);
    for (int i = 0; i < 5; ++i) {
      s.sweep(rng);
      CHECK(s.counters_consistent());
      CHECK(counters_conserved(s));
    }
  }
}

TEST_CASE("sweep on a 1x1 matrix with K=1 is a no-op") {
  const auto v = BinaryMatrix::from_values(1, 1, {1});
  auto s = init_random(v, symmetric(1), 0);
  Rng rng(0);
  s.sweep(rng);
  CHECK(s.assignments() == std::vector<int>{0});
}

TEST_CASE("log joint") {
  SUBCASE("single one") {
    const auto v = BinaryMatrix::from_values(1, 1, {1});
    CHECK(BetaDirState::from_assignments(v, symmetric(1), {0}).log_joint() ==
          doctest::Approx(-0.693147180559945).epsilon(1e-14));
  }
  SUBCASE("single zero") {
    const auto v = BinaryMatrix::from_values(1, 1, {0});
    CHECK(BetaDirState::from_assignments(v, symmetric(1), {0}).log_joint() ==
          doctest::Approx(std::log(0.5)).epsilon(1e-14));
  }
  SUBCASE("label swap with symmetric hyperparameters") {
    std::mt19937_64 gen(4);
    for (int trial = 0; trial < 10; ++trial) {
      const auto v = testgen::random_matrix(gen, 4, 4, 0.2);
      const auto z = testgen::random_assignment(gen, v.observed_count(), 3);
      std::vector<int> swapped = z;
      for (auto& x : swapped) x = (x + 1) % 3;
      CHECK(BetaDirState::from_assignments(v, symmetric(3), z).log_joint() ==
            doctest::Approx(BetaDirState::from_assignments(v, symmetric(3), swapped).log_joint()).epsilon(1e-13));
    }
  }
  SUBCASE("matches the oracle closed form") {
    std::mt19937_64 gen(6);
    for (int trial = 0; trial < 30; ++trial) {
      const auto v = testgen::random_matrix(gen, 4, 4, 0.3);
      const auto h = testgen::random_betadir_hyper(gen, 3, 0.2, 2.0);
      const auto z = testgen::random_assignment(gen, v.observed_count(), 3);
      CHECK(BetaDirState::from_assignments(v, h, z).log_joint() ==
            doctest::Approx(oracle::betadir_log_joint(oracle::instance_of(v), h, z)).epsilon(1e-12));
    }
  }
}

TEST_CASE("sweep distribution matches the enumerated posterior (chi-square)") {
  const auto v = BinaryMatrix::from_values(2, 2, {1, 0, 1, 1});
  HyperParams h;
  h.k = 2;
  h.alpha = {0.7, 1.5};
  h.beta = {1.2, 0.6};
  h.gamma = {0.8, 1.3};
  const auto exact = oracle::enumerate_betadir(oracle::instance_of(v), h);
  REQUIRE(exact.configurations() == 16);

  auto s = init_random(v, h, 99);
  Rng rng(99, 1);
  const std::size_t sweeps = 50000, thin = 5;
  std::vector<double> counts(16, 0.0);
  for (std::size_t t = 1; t <= sweeps; ++t) {
    s.sweep(rng);
    if (t % thin) continue;
    std::size_t idx = 0;
    for (int z : s.assignments()) idx = idx * 2 + static_cast<std::size_t>(z);
    counts[idx] += 1.0;
  }
  const double n = static_cast<double>(sweeps / thin);
  double stat = 0.0;
  for (std::size_t j = 0; j < 16; ++j) {
    const double e = n * exact.posterior[j];
    stat += (counts[j] - e) * (counts[j] - e) / e;
  }
  const boost::math::chi_squared dist(15.0);
  const double p_value = boost::math::cdf(boost::math::complement(dist, stat));
  CHECK(p_value > 0.01);
}

TEST_CASE("run_gibbs_betadir") {
  const auto v = BinaryMatrix::from_values(3, 4, {1, 0, 1, 1, 0, 0, 1, 0, 1, 1, 1, 0});
  RunConfig cfg;
  cfg.burn_in = 20;
  cfg.kept_samples = 15;
  cfg.thin = 2;
  cfg.seed = 5;
  cfg.store_snapshots = true;
  const auto h = symmetric(3);
  const auto a = run_gibbs_betadir(v, h, cfg);
  const auto b = run_gibbs_betadir(v, h, cfg);
  CHECK(a.kept == 15);
  CHECK(a.snapshots.size() == 15);
  CHECK(a.diagnostics.size() == 20 + 15 * 2);
  CHECK(a.snapshots == b.snapshots);
  CHECK(a.ev_sum == b.ev_sum);
  for (const auto& d : a.diagnostics) CHECK(std::isfinite(d.log_joint));
  CHECK(a.ev_sum.allFinite());
  const auto other_chain = run_gibbs_betadir(v, h, cfg, 1);
  CHECK(other_chain.snapshots != a.snapshots);
}

TEST_CASE("trace merge pools samples") {
  const auto v = BinaryMatrix::from_values(2, 3, {1, 0, 1, 0, 1, 1});
  RunConfig cfg;
  cfg.burn_in = 5;
  cfg.kept_samples = 7;
  const auto h = symmetric(2);
  auto a = run_gibbs_betadir(v, h, cfg, 0);
  const auto b = run_gibbs_betadir(v, h, cfg, 1);
  const Eigen::MatrixXd expected = a.ev_sum + b.ev_sum;
  a.merge(b);
  CHECK(a.kept == 14);
  CHECK((a.ev_sum - expected).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("count_active") {
  const std::vector<double> mass{50, 30, 19.5, 0.5};
  CHECK(count_active(mass, 0.01) == 3);
  CHECK(count_active(mass, 0.004) == 4);
}
