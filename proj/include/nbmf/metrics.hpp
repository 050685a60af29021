#pragma once

#include <cstddef>
#include <span>

#include <Eigen/Core>

#include "nbmf/binary_matrix.hpp"

namespace nbmf {

/// Predictions are clamped to [eps, 1 - eps] before taking logs.
inline constexpr double kProbabilityFloor = 1e-12;

struct MetricReport {
  double neg_log_lik = 0.0;  // nats, summed over the evaluated cells
  double perplexity = 0.0;   // neg_log_lik / n_cells
  std::size_t n_cells = 0;
  std::size_t clamp_count = 0;
};

/// -sum over observed cells of v log EV + (1 - v) log(1 - EV).
double neg_log_likelihood(const BinaryMatrix& v, const Eigen::MatrixXd& ev);

/// Mean negative log-likelihood (nats) of held-out cells.
double perplexity(std::span<const TestCell> test, const Eigen::MatrixXd& ev);

/// Both metrics over the observed cells of v.
MetricReport evaluate(const BinaryMatrix& v, const Eigen::MatrixXd& ev);
/// Both metrics over a list of cells.
MetricReport evaluate(std::span<const TestCell> cells, const Eigen::MatrixXd& ev);

/// Throws ArgumentError unless every entry is finite and within [0, 1].
void validate_predictions(const Eigen::MatrixXd& ev);

}  // namespace nbmf
