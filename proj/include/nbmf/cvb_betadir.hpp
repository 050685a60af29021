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

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Variational posterior q(z_cell) for every observed cell, together with the
/// expected counters E[L] (F x K), E[A] and E[B] (K x N). Keeps a pointer to
/// the data matrix, which must outlive it.
class Responsibilities {
 public:
  /// Each q is a random canonical vector.
  static Responsibilities random_one_hot(const BinaryMatrix& v, const HyperParams& hyper, Rng& rng);
  static Responsibilities from_assignments(const BinaryMatrix& v, const HyperParams& hyper,
                                           const std::vector<int>& z);
  /// Rows of q must be probability vectors.
  static Responsibilities from_q(const BinaryMatrix& v, const HyperParams& hyper, RowMatrix q);

  const BinaryMatrix& data() const { return *v_; }
  const HyperParams& hyper() const { return hyper_; }
  std::size_t components() const { return hyper_.k; }

  const RowMatrix& q() const { return q_; }
  const RowMatrix& expected_row_counts() const { return el_; }
  const Eigen::MatrixXd& expected_one_counts() const { return ea_; }
  const Eigen::MatrixXd& expected_zero_counts() const { return eb_; }

  /// Subtracts a cell's q from the expected counters.
  void detach(std::size_t cell);
  /// Stores a new q for the detached cell and adds it back.
  void attach(std::size_t cell, std::span<const double> q);
  std::optional<std::size_t> detached() const { return detached_; }

  /// Unnormalized CVB0 update for a detached cell; the Gibbs conditional
  /// with counters replaced by their expectations.
  void cvb0_weights(std::size_t cell, std::span<double> out) const;

  /// detach + normalized update + attach. Returns the L1 change of q.
  double update(std::size_t cell);

  /// One pass over the observed cells in row-major order; returns the
  /// largest per-cell L1 change.
  double pass();

  /// Rebuilds the expected counters from q.
  void recount();

  double max_normalization_error() const;
  /// Stored counters within `tol` of a fresh recount.
  bool counters_consistent(double tol) const;

  std::vector<double> component_mass() const;

 private:
  Responsibilities(const BinaryMatrix& v, const HyperParams& hyper, RowMatrix q);
  void add_cell(std::size_t cell, double sign);

  const BinaryMatrix* v_;
  HyperParams hyper_;
  RowMatrix q_;        // cells x K
  RowMatrix el_;       // F x K
  Eigen::MatrixXd ea_;  // K x N
  Eigen::MatrixXd eb_;  // K x N
  std::vector<double> alpha_beta_;
  std::vector<double> scratch_;
  std::optional<std::size_t> detached_;
};

struct CvbPassRecord {
  std::size_t pass;
  double max_q_change;
  std::size_t active_components;
};

struct CvbResult {
  Responsibilities resp;
  std::vector<CvbPassRecord> diagnostics;
};

/// Random one-hot start, then vb_iterations passes with a full counter
/// recount every recount_every passes. `chain` selects the random stream.
CvbResult run_cvb(const BinaryMatrix& v, const HyperParams& hyper, const RunConfig& config,
                  std::uint64_t chain = 0);

/// Parameters of the variational factor posteriors:
///   q(w_f)  = Dirichlet(gamma + E[L_f])          -> dirichlet (F x K)
///   q(h_kn) = Beta(alpha_k + E[A_kn], beta_k + E[B_kn])
struct VariationalFactors {
  Eigen::MatrixXd dirichlet;
  Eigen::MatrixXd beta_a;
  Eigen::MatrixXd beta_b;
};

VariationalFactors variational_factors(const Responsibilities& resp);

}  // namespace nbmf
