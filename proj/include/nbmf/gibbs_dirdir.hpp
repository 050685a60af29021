#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "nbmf/binary_matrix.hpp"
#include "nbmf/config.hpp"
#include "nbmf/gibbs_betadir.hpp"
#include "nbmf/random.hpp"

namespace nbmf {

/// Collapsed Dir-Dir state under the double augmentation: every observed
/// cell carries a row-side indicator z and a column-side indicator c with
/// v = [z == c]. Counters:
///   L_fk = #cells of row f with z = k
///   Q_kn = #cells of column n with c = k
/// The data matrix must outlive the state.
class DirDirState {
 public:
  /// Ones get z = c = random k; zeros get z = random k and c = random k' != k.
  /// Throws InfeasibleError for K = 1 when a zero is observed.
  static DirDirState random(const BinaryMatrix& v, const HyperParams& hyper, Rng& rng);
  /// Throws InvariantError when (z, c) violate the data constraint.
  static DirDirState from_assignments(const BinaryMatrix& v, const HyperParams& hyper,
                                      std::vector<int> z, std::vector<int> c);

  const BinaryMatrix& data() const { return *v_; }
  const HyperParams& hyper() const { return hyper_; }
  std::size_t components() const { return hyper_.k; }

  const std::vector<int>& z() const { return z_; }
  const std::vector<int>& c() const { return c_; }
  const RowCounts& row_counts() const { return l_; }
  const ColCounts& col_counts() const { return q_; }

  void detach_z(std::size_t cell);
  void attach_z(std::size_t cell, int k);
  void detach_c(std::size_t cell);
  void attach_c(std::size_t cell, int k);
  /// Sets z = c = k on a cell whose z and c are both detached.
  void attach_pair(std::size_t cell, int k);

  /// One-cell weights (gamma_k + L_fk)(eta_k + Q_kn) for the shared
  /// component of a one; both indicators detached.
  void pair_weights_v1(std::size_t cell, std::span<double> out) const;
  /// (gamma_k + L_fk)(1 - [k == c]) for a zero with z detached.
  void z_weights_v0(std::size_t cell, std::span<double> out) const;
  /// (eta_k + Q_kn)(1 - [k == z]) for a zero with c detached.
  void c_weights_v0(std::size_t cell, std::span<double> out) const;

  /// One scan in row-major order: ones draw the shared component; zeros
  /// draw z given c, then c given the new z.
  void sweep(Rng& rng);

  /// log p(V, Z, C) = sum_f log p(Z_f) + sum_n log p(C_n). Throws
  /// InvariantError if a constraint is violated.
  double log_joint() const;

  bool constraints_hold() const;
  bool counters_consistent() const;

  std::vector<double> component_mass() const;
  Eigen::MatrixXd conditional_w_mean() const;  // F x K
  Eigen::MatrixXd conditional_h_mean() const;  // K x N

 private:
  DirDirState(const BinaryMatrix& v, const HyperParams& hyper, std::vector<int> z,
              std::vector<int> c);
  void recount();
  void check_cell(std::size_t cell) const;

  const BinaryMatrix* v_;
  HyperParams hyper_;
  std::vector<int> z_;
  std::vector<int> c_;
  RowCounts l_;
  ColCounts q_;
  std::optional<std::size_t> z_detached_;
  std::optional<std::size_t> c_detached_;
  std::vector<double> weights_;
  std::vector<double> cumulative_;
};

DirDirState init_consistent(const BinaryMatrix& v, const HyperParams& hyper, std::uint64_t seed);

struct DirDirTrace {
  std::size_t kept = 0;
  PredictiveMode predictive = PredictiveMode::RaoBlackwell;
  Eigen::MatrixXd row_assign_sum;  // F x K, sum_j L^(j)
  Eigen::MatrixXd col_assign_sum;  // K x N, sum_j Q^(j)
  Eigen::MatrixXd ev_sum;          // F x N
  std::vector<double> final_mass;
  std::vector<SweepRecord> diagnostics;
  std::vector<std::vector<int>> z_snapshots;
  std::vector<std::vector<int>> c_snapshots;

  void accumulate(const DirDirState& state, Rng& rng, bool keep_snapshot = false);
  void merge(const DirDirTrace& other);
};

DirDirTrace run_gibbs_dirdir(const BinaryMatrix& v, const HyperParams& hyper,
                             const RunConfig& config, std::uint64_t chain = 0);

}  // namespace nbmf
