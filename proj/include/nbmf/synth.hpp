#pragma once

#include <cstdint>
#include <string>

#include <Eigen/Core>

#include "nbmf/binary_matrix.hpp"
#include "nbmf/config.hpp"
#include "nbmf/random.hpp"

namespace nbmf {

/// Generative models; Dir-Beta exists here because it can be sampled
/// directly even though it is fitted through the transpose.
enum class SynthKind { BetaDir, DirBeta, DirDir };

std::string to_string(SynthKind kind);
SynthKind parse_synth_kind(const std::string& s);

struct SynthResult {
  BinaryMatrix v;     // fully observed
  Eigen::MatrixXd w;  // F x K
  Eigen::MatrixXd h;  // K x N
  SynthKind kind;
};

/// Draws W and H from the kind's priors, then v_fn ~ Bernoulli([WH]_fn).
///   BetaDir: w_f ~ Dirichlet(gamma), h_kn ~ Beta(alpha_k, beta_k)
///   DirBeta: w_fk ~ Beta(alpha_k, beta_k), h_n ~ Dirichlet(eta)
///   DirDir:  w_f ~ Dirichlet(gamma), h_n ~ Dirichlet(eta)
SynthResult generate(SynthKind kind, std::size_t rows, std::size_t cols, const HyperParams& hyper,
                     std::uint64_t seed);

/// Draws V only, for fixed factors. [WH] is clamped to [0, 1] against
/// rounding in the simplex normalization.
BinaryMatrix sample_observations(const Eigen::MatrixXd& w, const Eigen::MatrixXd& h, Rng& rng);

/// Hyperparameters with every alpha, beta, gamma, eta entry equal to
/// `value`; the two demonstration regimes use 1 and 0.1.
HyperParams uniform_synth_hyper(std::size_t k, double value);

}  // namespace nbmf
