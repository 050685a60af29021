#include "doctest.h"

#include <cmath>
#include <random>

#include "generators.hpp"
#include "nbmf/errors.hpp"
#include "nbmf/metrics.hpp"

using namespace nbmf;

TEST_CASE("single-cell values") {
  const auto one = BinaryMatrix::from_values(1, 1, {1});
  CHECK(neg_log_likelihood(one, Eigen::MatrixXd::Constant(1, 1, 0.5)) == doctest::Approx(0.693147180559945));
  const std::vector<TestCell> t{{0, 0, true}};
  CHECK(perplexity(t, Eigen::MatrixXd::Constant(1, 1, 0.9)) == doctest::Approx(0.105360515657826).epsilon(1e-12));
  const auto r = evaluate(one, Eigen::MatrixXd::Constant(1, 1, 1.0));
  CHECK(r.neg_log_lik >= 0.0);
  CHECK(r.neg_log_lik <= 1e-12 + 1e-24);
  CHECK(r.clamp_count == 1);
}

TEST_CASE("uniform predictor scores ln 2 on any test set") {
  std::mt19937_64 gen(1);
  for (int trial = 0; trial < 30; ++trial) {
    const auto v = testgen::random_matrix(gen, 9, 9, 0.3);
    const Eigen::MatrixXd ev = Eigen::MatrixXd::Constant(9, 9, 0.5);
    std::vector<TestCell> cells;
    for (std::size_t i = 0; i < v.observed_count(); ++i)
      cells.push_back({v.observed()[i].row, v.observed()[i].col, v.value(i)});
    CHECK(std::abs(perplexity(cells, ev) - std::log(2.0)) <= 1e-12);
  }
}

TEST_CASE("neg log-likelihood is the cell count times perplexity") {
  std::mt19937_64 gen(2);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 30; ++trial) {
    const auto v = testgen::random_matrix(gen, 7, 7, 0.2);
    Eigen::MatrixXd ev(v.rows(), v.cols());
    for (Eigen::Index i = 0; i < ev.size(); ++i) ev.data()[i] = u(gen);
    const auto r = evaluate(v, ev);
    CHECK(r.n_cells == v.observed_count());
    CHECK(r.neg_log_lik == doctest::Approx(static_cast<double>(r.n_cells) * r.perplexity).epsilon(1e-15));
    CHECK(r.perplexity >= 0.0);
  }
}

TEST_CASE("perfect predictions give zero perplexity up to clamping") {
  const auto v = BinaryMatrix::from_values(2, 2, {1, 0, 0, 1});
  Eigen::MatrixXd ev(2, 2);
  ev << 1, 0, 0, 1;
  const auto r = evaluate(v, ev);
  CHECK(r.perplexity <= 1.1e-12);
  CHECK(r.clamp_count == 4);
}

TEST_CASE("validation errors") {
  const auto v = BinaryMatrix::from_values(1, 2, {1, 0});
  CHECK_THROWS_AS(neg_log_likelihood(v, Eigen::MatrixXd::Constant(2, 2, 0.5)), ArgumentError);
  CHECK_THROWS_AS(neg_log_likelihood(v, Eigen::MatrixXd::Constant(1, 2, 1.5)), ArgumentError);
  CHECK_THROWS_AS(neg_log_likelihood(v, Eigen::MatrixXd::Constant(1, 2, NAN)), ArgumentError);
  CHECK_THROWS_AS(perplexity(std::vector<TestCell>{}, Eigen::MatrixXd::Constant(1, 2, 0.5)), ArgumentError);
  CHECK_THROWS_AS(perplexity(std::vector<TestCell>{{3, 0, true}}, Eigen::MatrixXd::Constant(1, 2, 0.5)),
                  DimensionError);
}
