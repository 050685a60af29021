#pragma once

#include <cstddef>
#include <span>
#include <string>

#include <Eigen/Core>

#include "nbmf/binary_matrix.hpp"
#include "nbmf/config.hpp"
#include "nbmf/cvb_betadir.hpp"
#include "nbmf/gibbs_betadir.hpp"
#include "nbmf/gibbs_dirdir.hpp"

namespace nbmf {

enum class EstimateSource { GibbsBetaDir, CvbBetaDir, GibbsDirDir };

std::string to_string(EstimateSource source);

/// Posterior-mean point estimates.
struct FactorEstimate {
  Eigen::MatrixXd ew;  // F x K, E[W | V]
  Eigen::MatrixXd eh;  // K x N, E[H | V]
  Eigen::MatrixXd ev;  // F x N, E[WH | V], the predictive mean
  EstimateSource source;
  std::size_t samples;  // kept samples behind the estimate (0 for CVB0)
};

/// Monte-Carlo posterior means from a Beta-Dir trace:
///   E[w_f | V]  ~ (gamma + (1/J) sum_j L_f^(j)) / (sum(gamma) + N_f)
///   E[h_kn | V] ~ (1/J) sum_j (alpha_k + A_kn^(j)) / (alpha_k + beta_k + M_kn^(j))
///   E[v*_fn | V] ~ (1/J) sum_j w_f^(j) h_n^(j)
/// The predictive uses conditional means or draws per the trace's mode.
FactorEstimate estimate_betadir(const BetaDirTrace& trace, const BinaryMatrix& v,
                                const HyperParams& hyper);

/// Dir-Dir analogue; E[h_n | V] ~ (eta + (1/J) sum_j Q_n^(j)) / (sum(eta) + F_n).
FactorEstimate estimate_dirdir(const DirDirTrace& trace, const BinaryMatrix& v,
                               const HyperParams& hyper);

/// Means of the variational factor posteriors; EV = E_q[W] E_q[H].
FactorEstimate estimate_cvb(const Responsibilities& resp);

/// Number of components whose share of the mass exceeds `threshold`.
/// Mass is either the assignment counts of the final kept sample or, from a
/// point estimate, the column sums of EW.
std::size_t active_components(std::span<const double> mass, double threshold = kDefaultActiveThreshold);
std::size_t active_components(const FactorEstimate& estimate, double threshold = kDefaultActiveThreshold);

/// Conditional predictive mean E[WH | Z] of a single state.
Eigen::MatrixXd predictive_mean(const BetaDirState& state);
Eigen::MatrixXd predictive_mean(const DirDirState& state);

}  // namespace nbmf
