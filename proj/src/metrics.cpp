#include "nbmf/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "nbmf/errors.hpp"

namespace nbmf {

void validate_predictions(const Eigen::MatrixXd& ev) {
  for (Eigen::Index i = 0; i < ev.rows(); ++i)
    for (Eigen::Index j = 0; j < ev.cols(); ++j) {
      const double p = ev(i, j);
      if (!std::isfinite(p) || p < 0.0 || p > 1.0)
        throw ArgumentError("prediction at (" + std::to_string(i) + ", " + std::to_string(j) +
                            ") is outside [0, 1]");
    }
}

MetricReport evaluate(std::span<const TestCell> cells, const Eigen::MatrixXd& ev) {
  if (cells.empty()) throw ArgumentError("no cells to evaluate");
  validate_predictions(ev);
  MetricReport r;
  for (const auto& c : cells) {
    if (c.row >= static_cast<std::size_t>(ev.rows()) || c.col >= static_cast<std::size_t>(ev.cols()))
      throw DimensionError("evaluated cell lies outside the prediction matrix");
    double p = ev(static_cast<Eigen::Index>(c.row), static_cast<Eigen::Index>(c.col));
    if (p < kProbabilityFloor || p > 1.0 - kProbabilityFloor) {
      p = std::clamp(p, kProbabilityFloor, 1.0 - kProbabilityFloor);
      ++r.clamp_count;
    }
    r.neg_log_lik -= c.value ? std::log(p) : std::log1p(-p);
  }
  r.n_cells = cells.size();
  r.perplexity = r.neg_log_lik / static_cast<double>(r.n_cells);
  return r;
}

namespace {

std::vector<TestCell> observed_cells(const BinaryMatrix& v) {
  std::vector<TestCell> cells;
  cells.reserve(v.observed_count());
  for (std::size_t i = 0; i < v.observed_count(); ++i)
    cells.push_back({v.observed()[i].row, v.observed()[i].col, v.value(i)});
  return cells;
}

}  // namespace

MetricReport evaluate(const BinaryMatrix& v, const Eigen::MatrixXd& ev) {
  if (ev.rows() != static_cast<Eigen::Index>(v.rows()) || ev.cols() != static_cast<Eigen::Index>(v.cols()))
    throw ArgumentError("prediction matrix is " + std::to_string(ev.rows()) + "x" +
                        std::to_string(ev.cols()) + ", data is " + std::to_string(v.rows()) + "x" +
                        std::to_string(v.cols()));
  return evaluate(observed_cells(v), ev);
}

double neg_log_likelihood(const BinaryMatrix& v, const Eigen::MatrixXd& ev) {
  return evaluate(v, ev).neg_log_lik;
}

double perplexity(std::span<const TestCell> test, const Eigen::MatrixXd& ev) {
  return evaluate(test, ev).perplexity;
}

}  // namespace nbmf
