#include "nbmf/synth.hpp"

#include <algorithm>
#include <vector>

#include "nbmf/errors.hpp"

namespace nbmf {

std::string to_string(SynthKind kind) {
  switch (kind) {
    case SynthKind::BetaDir: return "beta-dir";
    case SynthKind::DirBeta: return "dir-beta";
    case SynthKind::DirDir: return "dir-dir";
  }
  return "unknown";
}

SynthKind parse_synth_kind(const std::string& s) {
  if (s == "beta-dir") return SynthKind::BetaDir;
  if (s == "dir-beta") return SynthKind::DirBeta;
  if (s == "dir-dir") return SynthKind::DirDir;
  throw ArgumentError("unknown kind '" + s + "' (expected beta-dir, dir-beta or dir-dir)");
}

namespace {

void require(const std::vector<double>& v, std::size_t k, const char* name, SynthKind kind) {
  if (v.size() != k)
    throw ArgumentError(to_string(kind) + " generation needs " + std::to_string(k) + " " + name +
                        " values");
  for (double x : v)
    if (!(x > 0.0)) throw ArgumentError(std::string(name) + " entries must be positive");
}

}  // namespace

HyperParams uniform_synth_hyper(std::size_t k, double value) {
  if (k == 0) throw ArgumentError("number of components must be at least 1");
  HyperParams h;
  h.k = k;
  h.alpha.assign(k, value);
  h.beta.assign(k, value);
  h.gamma.assign(k, value);
  h.eta.assign(k, value);
  return h;
}

BinaryMatrix sample_observations(const Eigen::MatrixXd& w, const Eigen::MatrixXd& h, Rng& rng) {
  if (w.cols() != h.rows()) throw DimensionError("W and H inner dimensions differ");
  const Eigen::MatrixXd p = w * h;
  std::vector<CellState> cells;
  cells.reserve(static_cast<std::size_t>(p.size()));
  for (Eigen::Index f = 0; f < p.rows(); ++f)
    for (Eigen::Index n = 0; n < p.cols(); ++n)
      cells.push_back(rng.bernoulli(std::clamp(p(f, n), 0.0, 1.0)) ? CellState::One
                                                                   : CellState::Zero);
  return BinaryMatrix(static_cast<std::size_t>(p.rows()), static_cast<std::size_t>(p.cols()),
                      std::move(cells));
}

SynthResult generate(SynthKind kind, std::size_t rows, std::size_t cols, const HyperParams& hyper,
                     std::uint64_t seed) {
  if (rows == 0 || cols == 0) throw ArgumentError("synthetic matrix needs rows, cols >= 1");
  const std::size_t k = hyper.k;
  if (k == 0) throw ArgumentError("number of components must be at least 1");
  const bool dirichlet_rows = kind != SynthKind::DirBeta;
  const bool dirichlet_cols = kind != SynthKind::BetaDir;
  if (dirichlet_rows) require(hyper.gamma, k, "gamma", kind);
  if (dirichlet_cols) require(hyper.eta, k, "eta", kind);
  if (!dirichlet_rows || !dirichlet_cols) {
    require(hyper.alpha, k, "alpha", kind);
    require(hyper.beta, k, "beta", kind);
  }

  const auto K = static_cast<Eigen::Index>(k);
  Eigen::MatrixXd w(static_cast<Eigen::Index>(rows), K);
  Eigen::MatrixXd h(K, static_cast<Eigen::Index>(cols));
  Rng rng(seed, streams::kSynthFactors);
  std::vector<double> buf(k);

  for (Eigen::Index f = 0; f < w.rows(); ++f) {
    if (dirichlet_rows) {
      rng.dirichlet(hyper.gamma, buf);
      for (Eigen::Index j = 0; j < K; ++j) w(f, j) = buf[static_cast<std::size_t>(j)];
    } else {
      for (Eigen::Index j = 0; j < K; ++j) {
        const auto kk = static_cast<std::size_t>(j);
        w(f, j) = rng.beta(hyper.alpha[kk], hyper.beta[kk]);
      }
    }
  }
  for (Eigen::Index n = 0; n < h.cols(); ++n) {
    if (dirichlet_cols) {
      rng.dirichlet(hyper.eta, buf);
      for (Eigen::Index j = 0; j < K; ++j) h(j, n) = buf[static_cast<std::size_t>(j)];
    } else {
      for (Eigen::Index j = 0; j < K; ++j) {
        const auto kk = static_cast<std::size_t>(j);
        h(j, n) = rng.beta(hyper.alpha[kk], hyper.beta[kk]);
      }
    }
  }

  Rng data_rng(seed, streams::kSynthData);
  return SynthResult{sample_observations(w, h, data_rng), std::move(w), std::move(h), kind};
}

}  // namespace nbmf
