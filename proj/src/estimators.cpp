#include "nbmf/estimators.hpp"

#include <vector>

#include "nbmf/errors.hpp"

namespace nbmf {

std::string to_string(EstimateSource source) {
  switch (source) {
    case EstimateSource::GibbsBetaDir: return "gibbs_betadir";
    case EstimateSource::CvbBetaDir: return "cvb_betadir";
    case EstimateSource::GibbsDirDir: return "gibbs_dirdir";
  }
  return "unknown";
}

namespace {

Eigen::MatrixXd dirichlet_rows_mean(const Eigen::MatrixXd& mean_counts, const std::vector<double>& prior,
                                    const BinaryMatrix& v) {
  double prior_sum = 0.0;
  for (double p : prior) prior_sum += p;
  Eigen::MatrixXd w(mean_counts.rows(), mean_counts.cols());
  for (Eigen::Index f = 0; f < w.rows(); ++f) {
    const double denom = prior_sum + static_cast<double>(v.row_observed(static_cast<std::size_t>(f)));
    for (Eigen::Index k = 0; k < w.cols(); ++k)
      w(f, k) = (prior[static_cast<std::size_t>(k)] + mean_counts(f, k)) / denom;
  }
  return w;
}

void check_trace_shape(const Eigen::MatrixXd& row_sum, const Eigen::MatrixXd& ev_sum,
                       const BinaryMatrix& v, const HyperParams& hyper) {
  if (row_sum.rows() != static_cast<Eigen::Index>(v.rows()) ||
      row_sum.cols() != static_cast<Eigen::Index>(hyper.k) ||
      ev_sum.cols() != static_cast<Eigen::Index>(v.cols()))
    throw DimensionError("trace does not match the data matrix or the number of components");
}

}  // namespace

FactorEstimate estimate_betadir(const BetaDirTrace& trace, const BinaryMatrix& v,
                                const HyperParams& hyper) {
  if (trace.kept == 0) throw ArgumentError("cannot estimate from an empty trace");
  hyper.validate(ModelKind::BetaDir);
  check_trace_shape(trace.row_assign_sum, trace.ev_sum, v, hyper);
  const double inv_j = 1.0 / static_cast<double>(trace.kept);
  FactorEstimate est;
  est.ew = dirichlet_rows_mean(trace.row_assign_sum * inv_j, hyper.gamma, v);
  est.eh = trace.h_mean_sum * inv_j;
  est.ev = (trace.ev_sum * inv_j).cwiseMax(0.0).cwiseMin(1.0);
  est.source = EstimateSource::GibbsBetaDir;
  est.samples = trace.kept;
  return est;
}

FactorEstimate estimate_dirdir(const DirDirTrace& trace, const BinaryMatrix& v,
                               const HyperParams& hyper) {
  if (trace.kept == 0) throw ArgumentError("cannot estimate from an empty trace");
  hyper.validate(ModelKind::DirDir);
  check_trace_shape(trace.row_assign_sum, trace.ev_sum, v, hyper);
  const double inv_j = 1.0 / static_cast<double>(trace.kept);
  FactorEstimate est;
  est.ew = dirichlet_rows_mean(trace.row_assign_sum * inv_j, hyper.gamma, v);
  // columns of H are Dirichlet rows of the transpose
  const Eigen::MatrixXd col_mean = (trace.col_assign_sum * inv_j).transpose();
  est.eh = dirichlet_rows_mean(col_mean, hyper.eta, v.transposed()).transpose();
  est.ev = (trace.ev_sum * inv_j).cwiseMax(0.0).cwiseMin(1.0);
  est.source = EstimateSource::GibbsDirDir;
  est.samples = trace.kept;
  return est;
}

FactorEstimate estimate_cvb(const Responsibilities& resp) {
  const VariationalFactors vf = variational_factors(resp);
  FactorEstimate est;
  est.ew = vf.dirichlet;
  for (Eigen::Index f = 0; f < est.ew.rows(); ++f) est.ew.row(f) /= est.ew.row(f).sum();
  est.eh = vf.beta_a.cwiseQuotient(vf.beta_a + vf.beta_b);
  est.ev = (est.ew * est.eh).cwiseMax(0.0).cwiseMin(1.0);
  est.source = EstimateSource::CvbBetaDir;
  est.samples = 0;
  return est;
}

std::size_t active_components(std::span<const double> mass, double threshold) {
  if (!(threshold > 0.0 && threshold < 1.0)) throw ArgumentError("threshold must lie in (0, 1)");
  return count_active(mass, threshold);
}

std::size_t active_components(const FactorEstimate& estimate, double threshold) {
  const Eigen::VectorXd mass = estimate.ew.colwise().sum().transpose();
  return active_components(std::span<const double>(mass.data(), static_cast<std::size_t>(mass.size())),
                           threshold);
}

Eigen::MatrixXd predictive_mean(const BetaDirState& state) {
  return state.conditional_w_mean() * state.conditional_h_mean();
}

Eigen::MatrixXd predictive_mean(const DirDirState& state) {
  return state.conditional_w_mean() * state.conditional_h_mean();
}

}  // namespace nbmf
