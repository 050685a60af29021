#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "nbmf/binary_matrix.hpp"
#include "nbmf/config.hpp"
#include "nbmf/random.hpp"

namespace nbmf {

/// F x K counts, rows contiguous.
using RowCounts = Eigen::Matrix<std::int32_t, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
/// K x N counts, columns contiguous.
using ColCounts = Eigen::Matrix<std::int32_t, Eigen::Dynamic, Eigen::Dynamic>;

/// One row of the per-sweep diagnostics log.
struct SweepRecord {
  std::size_t sweep;
  double log_joint;
  std::size_t active_components;
};

/// Component mass below which a component is not counted as active.
inline constexpr double kDefaultActiveThreshold = 0.01;

/// Collapsed Beta-Dir state: one component index per observed cell plus the
/// counters
///   L_fk = #cells of row f assigned to k
///   A_kn = #one-cells of column n assigned to k
///   B_kn = #zero-cells of column n assigned to k
/// over observed cells only. The state keeps a pointer to the data matrix,
/// which must outlive it.
class BetaDirState {
 public:
  static BetaDirState random(const BinaryMatrix& v, const HyperParams& hyper, Rng& rng);
  static BetaDirState from_assignments(const BinaryMatrix& v, const HyperParams& hyper,
                                       std::vector<int> z);

  const BinaryMatrix& data() const { return *v_; }
  const HyperParams& hyper() const { return hyper_; }
  std::size_t components() const { return hyper_.k; }

  const std::vector<int>& assignments() const { return z_; }
  const RowCounts& row_counts() const { return l_; }
  const ColCounts& one_counts() const { return a_; }
  const ColCounts& zero_counts() const { return b_; }

  /// Removes a cell's assignment from the counters. Only one cell can be
  /// detached at a time.
  void detach(std::size_t cell);
  /// Assigns component k to the detached cell and restores the counters.
  void attach(std::size_t cell, int k);
  std::optional<std::size_t> detached() const { return detached_; }

  /// Unnormalized conditional p(z_cell = k | rest):
  ///   (gamma_k + L_fk) (alpha_k + A_kn)^v (beta_k + B_kn)^(1-v) / (alpha_k + beta_k + M_kn)
  /// with the counters excluding the cell. The cell must be detached.
  void conditional_weights(std::size_t cell, std::span<double> out) const;
  /// Same, addressed by position. Attached cells are excluded from the
  /// counters on the fly. Throws ContractError for a missing cell.
  std::vector<double> conditional_weights(std::size_t row, std::size_t col) const;

  /// One Gibbs scan over the observed cells in row-major order.
  void sweep(Rng& rng);

  /// log p(V, Z) with W and H integrated out.
  double log_joint() const;

  /// Number of cells assigned to each component.
  std::vector<double> component_mass() const;

  /// Conditional posterior means given Z: E[w_f | Z] (F x K) and
  /// E[h_kn | Z, V] (K x N).
  Eigen::MatrixXd conditional_w_mean() const;
  Eigen::MatrixXd conditional_h_mean() const;

  /// True when counters recomputed from the assignments match the stored ones.
  bool counters_consistent() const;

 private:
  BetaDirState(const BinaryMatrix& v, const HyperParams& hyper, std::vector<int> z);
  void recount();

  const BinaryMatrix* v_;
  HyperParams hyper_;
  std::vector<int> z_;
  RowCounts l_;
  ColCounts a_;
  ColCounts b_;
  std::optional<std::size_t> detached_;
  std::vector<double> alpha_beta_;  // alpha_k + beta_k
  std::vector<double> weights_;     // sweep scratch
  std::vector<double> cumulative_;
};

BetaDirState init_random(const BinaryMatrix& v, const HyperParams& hyper, std::uint64_t seed);

/// Monte-Carlo accumulators over the kept samples of a Beta-Dir chain.
struct BetaDirTrace {
  std::size_t kept = 0;
  PredictiveMode predictive = PredictiveMode::RaoBlackwell;
  Eigen::MatrixXd row_assign_sum;  // F x K, sum_j L^(j)
  Eigen::MatrixXd h_mean_sum;      // K x N, sum_j E[h | Z^(j), V]
  Eigen::MatrixXd ev_sum;          // F x N, sum_j w^(j) h^(j)
  std::vector<double> final_mass;  // component mass of the last kept sample
  std::vector<SweepRecord> diagnostics;
  std::vector<std::vector<int>> snapshots;

  void accumulate(const BetaDirState& state, Rng& rng, bool keep_snapshot = false);
  /// Pools another chain over the same data into this trace.
  void merge(const BetaDirTrace& other);
};

/// Random init, burn_in discarded sweeps, then kept_samples x thin sweeps
/// of which every thin-th is accumulated. log_joint is logged every sweep.
/// `chain` selects the random stream.
BetaDirTrace run_gibbs_betadir(const BinaryMatrix& v, const HyperParams& hyper,
                               const RunConfig& config, std::uint64_t chain = 0);

/// Counts components whose share of the total mass exceeds the threshold.
std::size_t count_active(std::span<const double> mass, double threshold);

}  // namespace nbmf
