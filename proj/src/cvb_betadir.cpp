#include "nbmf/cvb_betadir.hpp"

#include <algorithm>
#include <cmath>

#include "nbmf/errors.hpp"
#include "nbmf/gibbs_betadir.hpp"

namespace nbmf {

Responsibilities::Responsibilities(const BinaryMatrix& v, const HyperParams& hyper, RowMatrix q)
    : v_(&v), hyper_(hyper), q_(std::move(q)) {
  hyper_.validate(ModelKind::BetaDir);
  if (q_.rows() != static_cast<Eigen::Index>(v.observed_count()) ||
      q_.cols() != static_cast<Eigen::Index>(hyper_.k))
    throw DimensionError("responsibilities must be (observed cells) x K");
  alpha_beta_.resize(hyper_.k);
  for (std::size_t k = 0; k < hyper_.k; ++k) alpha_beta_[k] = hyper_.alpha[k] + hyper_.beta[k];
  scratch_.resize(hyper_.k);
  recount();
}

Responsibilities Responsibilities::random_one_hot(const BinaryMatrix& v, const HyperParams& hyper,
                                                  Rng& rng) {
  if (hyper.k == 0) throw ArgumentError("number of components must be at least 1");
  std::vector<int> z(v.observed_count());
  for (auto& zi : z) zi = static_cast<int>(rng.index(hyper.k));
  return from_assignments(v, hyper, z);
}

Responsibilities Responsibilities::from_assignments(const BinaryMatrix& v, const HyperParams& hyper,
                                                    const std::vector<int>& z) {
  if (z.size() != v.observed_count())
    throw DimensionError("assignment vector length differs from the observed cell count");
  RowMatrix q = RowMatrix::Zero(static_cast<Eigen::Index>(z.size()), static_cast<Eigen::Index>(hyper.k));
  for (std::size_t i = 0; i < z.size(); ++i) {
    if (z[i] < 0 || z[i] >= static_cast<int>(hyper.k)) throw ArgumentError("assignment outside [0, K)");
    q(static_cast<Eigen::Index>(i), z[i]) = 1.0;
  }
  return Responsibilities(v, hyper, std::move(q));
}

Responsibilities Responsibilities::from_q(const BinaryMatrix& v, const HyperParams& hyper, RowMatrix q) {
  for (Eigen::Index i = 0; i < q.rows(); ++i) {
    if ((q.row(i).array() < 0.0).any() || std::abs(q.row(i).sum() - 1.0) > 1e-9)
      throw ArgumentError("responsibility rows must be probability vectors");
  }
  return Responsibilities(v, hyper, std::move(q));
}

void Responsibilities::add_cell(std::size_t cell, double sign) {
  const auto [f, n] = v_->observed()[cell];
  const auto i = static_cast<Eigen::Index>(cell);
  el_.row(static_cast<Eigen::Index>(f)) += sign * q_.row(i);
  auto& own = v_->value(cell) ? ea_ : eb_;
  own.col(static_cast<Eigen::Index>(n)) += sign * q_.row(i).transpose();
}

void Responsibilities::recount() {
  const auto K = static_cast<Eigen::Index>(hyper_.k);
  el_ = RowMatrix::Zero(static_cast<Eigen::Index>(v_->rows()), K);
  ea_ = Eigen::MatrixXd::Zero(K, static_cast<Eigen::Index>(v_->cols()));
  eb_ = Eigen::MatrixXd::Zero(K, static_cast<Eigen::Index>(v_->cols()));
  for (std::size_t i = 0; i < v_->observed_count(); ++i) add_cell(i, 1.0);
  detached_.reset();
}

void Responsibilities::detach(std::size_t cell) {
  if (detached_) throw ContractError("another cell is already detached");
  if (cell >= v_->observed_count()) throw ContractError("cell id out of range");
  add_cell(cell, -1.0);
  detached_ = cell;
}

void Responsibilities::attach(std::size_t cell, std::span<const double> q) {
  if (detached_ != cell) throw ContractError("attach of a cell that is not detached");
  if (q.size() != hyper_.k) throw DimensionError("q must have K entries");
  const auto i = static_cast<Eigen::Index>(cell);
  for (std::size_t k = 0; k < hyper_.k; ++k) q_(i, static_cast<Eigen::Index>(k)) = q[k];
  add_cell(cell, 1.0);
  detached_.reset();
}

void Responsibilities::cvb0_weights(std::size_t cell, std::span<double> out) const {
  if (detached_ != cell) throw ContractError("CVB0 weights require the cell to be detached first");
  if (out.size() != hyper_.k) throw DimensionError("weight buffer must have K entries");
  const auto [f, n] = v_->observed()[cell];
  const auto fi = static_cast<Eigen::Index>(f);
  const auto ni = static_cast<Eigen::Index>(n);
  const bool one = v_->value(cell);
  for (std::size_t k = 0; k < hyper_.k; ++k) {
    const auto kk = static_cast<Eigen::Index>(k);
    // Expected counters can dip a hair below zero through cancellation.
    const double l = std::max(el_(fi, kk), 0.0);
    const double a = std::max(ea_(kk, ni), 0.0);
    const double b = std::max(eb_(kk, ni), 0.0);
    const double like = one ? hyper_.alpha[k] + a : hyper_.beta[k] + b;
    out[k] = (hyper_.gamma[k] + l) * like / (alpha_beta_[k] + a + b);
  }
}

double Responsibilities::update(std::size_t cell) {
  detach(cell);
  cvb0_weights(cell, scratch_);
  double total = 0.0;
  for (double w : scratch_) total += w;
  const auto i = static_cast<Eigen::Index>(cell);
  double change = 0.0;
  for (std::size_t k = 0; k < hyper_.k; ++k) {
    scratch_[k] /= total;
    change += std::abs(scratch_[k] - q_(i, static_cast<Eigen::Index>(k)));
  }
  attach(cell, scratch_);
  return change;
}

double Responsibilities::pass() {
  double worst = 0.0;
  for (std::size_t i = 0; i < v_->observed_count(); ++i) worst = std::max(worst, update(i));
  return worst;
}

double Responsibilities::max_normalization_error() const {
  double worst = 0.0;
  for (Eigen::Index i = 0; i < q_.rows(); ++i) worst = std::max(worst, std::abs(q_.row(i).sum() - 1.0));
  return worst;
}

bool Responsibilities::counters_consistent(double tol) const {
  if (detached_) return false;
  Responsibilities fresh(*v_, hyper_, q_);
  return (fresh.el_ - el_).cwiseAbs().maxCoeff() <= tol &&
         (fresh.ea_ - ea_).cwiseAbs().maxCoeff() <= tol &&
         (fresh.eb_ - eb_).cwiseAbs().maxCoeff() <= tol;
}

std::vector<double> Responsibilities::component_mass() const {
  std::vector<double> mass(hyper_.k);
  const Eigen::VectorXd sums = el_.colwise().sum().transpose();
  for (std::size_t k = 0; k < hyper_.k; ++k) mass[k] = sums(static_cast<Eigen::Index>(k));
  return mass;
}

CvbResult run_cvb(const BinaryMatrix& v, const HyperParams& hyper, const RunConfig& config,
                  std::uint64_t chain) {
  config.validate();
  hyper.validate(ModelKind::BetaDir);
  Rng rng(config.seed, chain);
  CvbResult result{Responsibilities::random_one_hot(v, hyper, rng), {}};
  result.diagnostics.reserve(config.vb_iterations);
  for (std::size_t p = 1; p <= config.vb_iterations; ++p) {
    const double change = result.resp.pass();
    if (p % config.recount_every == 0) result.resp.recount();
    result.diagnostics.push_back(
        {p, change, count_active(result.resp.component_mass(), kDefaultActiveThreshold)});
  }
  return result;
}

VariationalFactors variational_factors(const Responsibilities& resp) {
  const auto& hp = resp.hyper();
  const auto K = static_cast<Eigen::Index>(hp.k);
  VariationalFactors out;
  out.dirichlet = resp.expected_row_counts().cwiseMax(0.0);
  out.beta_a = resp.expected_one_counts().cwiseMax(0.0);
  out.beta_b = resp.expected_zero_counts().cwiseMax(0.0);
  for (Eigen::Index k = 0; k < K; ++k) {
    const auto kk = static_cast<std::size_t>(k);
    out.dirichlet.col(k).array() += hp.gamma[kk];
    out.beta_a.row(k).array() += hp.alpha[kk];
    out.beta_b.row(k).array() += hp.beta[kk];
  }
  return out;
}

}  // namespace nbmf
