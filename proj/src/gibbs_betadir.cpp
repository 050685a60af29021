#include "nbmf/gibbs_betadir.hpp"

#include <cmath>
#include <numeric>

#include "nbmf/errors.hpp"

namespace nbmf {

BetaDirState::BetaDirState(const BinaryMatrix& v, const HyperParams& hyper, std::vector<int> z)
    : v_(&v), hyper_(hyper), z_(std::move(z)) {
  hyper_.validate(ModelKind::BetaDir);
  if (z_.size() != v.observed_count())
    throw DimensionError("assignment vector length differs from the observed cell count");
  const auto k = static_cast<int>(hyper_.k);
  for (int zi : z_)
    if (zi < 0 || zi >= k) throw ArgumentError("assignment outside [0, K)");
  alpha_beta_.resize(hyper_.k);
  for (std::size_t j = 0; j < hyper_.k; ++j) alpha_beta_[j] = hyper_.alpha[j] + hyper_.beta[j];
  weights_.resize(hyper_.k);
  cumulative_.resize(hyper_.k);
  recount();
}

BetaDirState BetaDirState::random(const BinaryMatrix& v, const HyperParams& hyper, Rng& rng) {
  if (hyper.k == 0) throw ArgumentError("number of components must be at least 1");
  std::vector<int> z(v.observed_count());
  for (auto& zi : z) zi = static_cast<int>(rng.index(hyper.k));
  return BetaDirState(v, hyper, std::move(z));
}

BetaDirState BetaDirState::from_assignments(const BinaryMatrix& v, const HyperParams& hyper,
                                            std::vector<int> z) {
  return BetaDirState(v, hyper, std::move(z));
}

BetaDirState init_random(const BinaryMatrix& v, const HyperParams& hyper, std::uint64_t seed) {
  Rng rng(seed);
  return BetaDirState::random(v, hyper, rng);
}

void BetaDirState::recount() {
  const auto K = static_cast<Eigen::Index>(hyper_.k);
  l_ = RowCounts::Zero(static_cast<Eigen::Index>(v_->rows()), K);
  a_ = ColCounts::Zero(K, static_cast<Eigen::Index>(v_->cols()));
  b_ = ColCounts::Zero(K, static_cast<Eigen::Index>(v_->cols()));
  const auto& obs = v_->observed();
  for (std::size_t i = 0; i < obs.size(); ++i) {
    const auto f = static_cast<Eigen::Index>(obs[i].row);
    const auto n = static_cast<Eigen::Index>(obs[i].col);
    ++l_(f, z_[i]);
    if (v_->value(i))
      ++a_(z_[i], n);
    else
      ++b_(z_[i], n);
  }
  detached_.reset();
}

void BetaDirState::detach(std::size_t cell) {
  if (detached_) throw ContractError("another cell is already detached");
  if (cell >= z_.size()) throw ContractError("cell id out of range");
  const auto [f, n] = v_->observed()[cell];
  const int k = z_[cell];
  --l_(static_cast<Eigen::Index>(f), k);
  if (v_->value(cell))
    --a_(k, static_cast<Eigen::Index>(n));
  else
    --b_(k, static_cast<Eigen::Index>(n));
  detached_ = cell;
}

void BetaDirState::attach(std::size_t cell, int k) {
  if (detached_ != cell) throw ContractError("attach of a cell that is not detached");
  if (k < 0 || k >= static_cast<int>(hyper_.k)) throw ArgumentError("component outside [0, K)");
  const auto [f, n] = v_->observed()[cell];
  z_[cell] = k;
  ++l_(static_cast<Eigen::Index>(f), k);
  if (v_->value(cell))
    ++a_(k, static_cast<Eigen::Index>(n));
  else
    ++b_(k, static_cast<Eigen::Index>(n));
  detached_.reset();
}

namespace {

// Conditional weights for one cell; counters must exclude the cell.
inline void betadir_weights(const HyperParams& hp, const double* alpha_beta, const std::int32_t* l_row,
                            const std::int32_t* a_col, const std::int32_t* b_col, bool one,
                            double* out) {
  const std::size_t K = hp.k;
  const double* g = hp.gamma.data();
  if (one) {
    const double* a = hp.alpha.data();
    for (std::size_t k = 0; k < K; ++k)
      out[k] = (g[k] + l_row[k]) * (a[k] + a_col[k]) / (alpha_beta[k] + a_col[k] + b_col[k]);
  } else {
    const double* b = hp.beta.data();
    for (std::size_t k = 0; k < K; ++k)
      out[k] = (g[k] + l_row[k]) * (b[k] + b_col[k]) / (alpha_beta[k] + a_col[k] + b_col[k]);
  }
}

}  // namespace

void BetaDirState::conditional_weights(std::size_t cell, std::span<double> out) const {
  if (detached_ != cell)
    throw ContractError("conditional weights require the cell to be detached first");
  if (out.size() != hyper_.k) throw DimensionError("weight buffer must have K entries");
  const auto [f, n] = v_->observed()[cell];
  const auto fi = static_cast<Eigen::Index>(f);
  const auto ni = static_cast<Eigen::Index>(n);
  betadir_weights(hyper_, alpha_beta_.data(), l_.row(fi).data(), a_.col(ni).data(),
                  b_.col(ni).data(), v_->value(cell), out.data());
}

std::vector<double> BetaDirState::conditional_weights(std::size_t row, std::size_t col) const {
  const auto cell = v_->cell_id(row, col);
  if (!cell) throw ContractError("conditional weights requested for a missing cell");
  std::vector<double> out(hyper_.k);
  if (detached_ == *cell) {
    conditional_weights(*cell, out);
    return out;
  }
  if (detached_) throw ContractError("another cell is detached");
  const auto fi = static_cast<Eigen::Index>(row);
  const auto ni = static_cast<Eigen::Index>(col);
  const bool one = v_->value(*cell);
  std::vector<std::int32_t> l(l_.row(fi).data(), l_.row(fi).data() + hyper_.k);
  std::vector<std::int32_t> a(a_.col(ni).data(), a_.col(ni).data() + hyper_.k);
  std::vector<std::int32_t> b(b_.col(ni).data(), b_.col(ni).data() + hyper_.k);
  const auto k = static_cast<std::size_t>(z_[*cell]);
  --l[k];
  --(one ? a : b)[k];
  betadir_weights(hyper_, alpha_beta_.data(), l.data(), a.data(), b.data(), one, out.data());
  return out;
}

void BetaDirState::sweep(Rng& rng) {
  if (detached_) throw ContractError("sweep with a detached cell");
  const auto& obs = v_->observed();
  for (std::size_t i = 0; i < obs.size(); ++i) {
    const auto f = static_cast<Eigen::Index>(obs[i].row);
    const auto n = static_cast<Eigen::Index>(obs[i].col);
    const bool one = v_->value(i);
    std::int32_t* l_row = l_.row(f).data();
    std::int32_t* a_col = a_.col(n).data();
    std::int32_t* b_col = b_.col(n).data();
    std::int32_t* own = one ? a_col : b_col;

    int k = z_[i];
    --l_row[k];
    --own[k];
    betadir_weights(hyper_, alpha_beta_.data(), l_row, a_col, b_col, one, weights_.data());
    k = static_cast<int>(rng.categorical(weights_, cumulative_));
    z_[i] = k;
    ++l_row[k];
    ++own[k];
  }
}

double BetaDirState::log_joint() const {
  const std::size_t K = hyper_.k;
  const double gsum = hyper_.gamma_sum();
  const double lg_gsum = std::lgamma(gsum);
  std::vector<double> lg_gamma(K), lg_alpha(K), lg_beta(K), lg_ab(K);
  for (std::size_t k = 0; k < K; ++k) {
    lg_gamma[k] = std::lgamma(hyper_.gamma[k]);
    lg_alpha[k] = std::lgamma(hyper_.alpha[k]);
    lg_beta[k] = std::lgamma(hyper_.beta[k]);
    lg_ab[k] = std::lgamma(alpha_beta_[k]);
  }

  // Zero counters contribute lgamma(x + 0) - lgamma(x) = 0 and are skipped.
  double total = 0.0;
  for (Eigen::Index f = 0; f < l_.rows(); ++f) {
    const auto nf = v_->row_observed(static_cast<std::size_t>(f));
    if (nf == 0) continue;
    total += lg_gsum - std::lgamma(gsum + static_cast<double>(nf));
    for (std::size_t k = 0; k < K; ++k) {
      const auto c = l_(f, static_cast<Eigen::Index>(k));
      if (c > 0) total += std::lgamma(hyper_.gamma[k] + c) - lg_gamma[k];
    }
  }
  for (Eigen::Index n = 0; n < a_.cols(); ++n) {
    for (std::size_t k = 0; k < K; ++k) {
      const auto kk = static_cast<Eigen::Index>(k);
      const auto a = a_(kk, n);
      const auto b = b_(kk, n);
      if (a + b == 0) continue;
      total += lg_ab[k] - std::lgamma(alpha_beta_[k] + a + b);
      if (a > 0) total += std::lgamma(hyper_.alpha[k] + a) - lg_alpha[k];
      if (b > 0) total += std::lgamma(hyper_.beta[k] + b) - lg_beta[k];
    }
  }
  return total;
}

std::vector<double> BetaDirState::component_mass() const {
  std::vector<double> mass(hyper_.k, 0.0);
  for (Eigen::Index f = 0; f < l_.rows(); ++f)
    for (std::size_t k = 0; k < hyper_.k; ++k) mass[k] += l_(f, static_cast<Eigen::Index>(k));
  return mass;
}

Eigen::MatrixXd BetaDirState::conditional_w_mean() const {
  const double gsum = hyper_.gamma_sum();
  Eigen::MatrixXd w(l_.rows(), l_.cols());
  for (Eigen::Index f = 0; f < l_.rows(); ++f) {
    const double denom = gsum + static_cast<double>(v_->row_observed(static_cast<std::size_t>(f)));
    for (Eigen::Index k = 0; k < l_.cols(); ++k)
      w(f, k) = (hyper_.gamma[static_cast<std::size_t>(k)] + l_(f, k)) / denom;
  }
  return w;
}

Eigen::MatrixXd BetaDirState::conditional_h_mean() const {
  Eigen::MatrixXd h(a_.rows(), a_.cols());
  for (Eigen::Index n = 0; n < a_.cols(); ++n)
    for (Eigen::Index k = 0; k < a_.rows(); ++k) {
      const auto kk = static_cast<std::size_t>(k);
      h(k, n) = (hyper_.alpha[kk] + a_(k, n)) / (alpha_beta_[kk] + a_(k, n) + b_(k, n));
    }
  return h;
}

bool BetaDirState::counters_consistent() const {
  if (detached_) return false;
  BetaDirState fresh(*v_, hyper_, z_);
  return fresh.l_ == l_ && fresh.a_ == a_ && fresh.b_ == b_;
}

std::size_t count_active(std::span<const double> mass, double threshold) {
  const double total = std::accumulate(mass.begin(), mass.end(), 0.0);
  if (!(total > 0.0)) return 0;
  std::size_t active = 0;
  for (double m : mass)
    if (m / total > threshold) ++active;
  return active;
}

void BetaDirTrace::accumulate(const BetaDirState& state, Rng& rng, bool keep_snapshot) {
  const auto F = static_cast<Eigen::Index>(state.data().rows());
  const auto N = static_cast<Eigen::Index>(state.data().cols());
  const auto K = static_cast<Eigen::Index>(state.components());
  if (kept == 0) {
    row_assign_sum = Eigen::MatrixXd::Zero(F, K);
    h_mean_sum = Eigen::MatrixXd::Zero(K, N);
    ev_sum = Eigen::MatrixXd::Zero(F, N);
  }
  row_assign_sum += state.row_counts().cast<double>();
  const Eigen::MatrixXd h_mean = state.conditional_h_mean();
  h_mean_sum += h_mean;

  if (predictive == PredictiveMode::RaoBlackwell) {
    ev_sum.noalias() += state.conditional_w_mean() * h_mean;
  } else {
    const auto& hp = state.hyper();
    Eigen::MatrixXd w(F, K);
    Eigen::MatrixXd h(K, N);
    std::vector<double> conc(hp.k), draw(hp.k);
    for (Eigen::Index f = 0; f < F; ++f) {
      for (Eigen::Index k = 0; k < K; ++k)
        conc[static_cast<std::size_t>(k)] = hp.gamma[static_cast<std::size_t>(k)] + state.row_counts()(f, k);
      rng.dirichlet(conc, draw);
      for (Eigen::Index k = 0; k < K; ++k) w(f, k) = draw[static_cast<std::size_t>(k)];
    }
    for (Eigen::Index n = 0; n < N; ++n)
      for (Eigen::Index k = 0; k < K; ++k) {
        const auto kk = static_cast<std::size_t>(k);
        h(k, n) = rng.beta(hp.alpha[kk] + state.one_counts()(k, n),
                           hp.beta[kk] + state.zero_counts()(k, n));
      }
    ev_sum.noalias() += w * h;
  }
  final_mass = state.component_mass();
  if (keep_snapshot) snapshots.push_back(state.assignments());
  ++kept;
}

void BetaDirTrace::merge(const BetaDirTrace& other) {
  if (other.kept == 0) return;
  if (kept == 0) {
    *this = other;
    return;
  }
  if (other.row_assign_sum.rows() != row_assign_sum.rows() ||
      other.row_assign_sum.cols() != row_assign_sum.cols() ||
      other.ev_sum.cols() != ev_sum.cols())
    throw DimensionError("cannot merge traces of different shapes");
  if (other.predictive != predictive) throw ArgumentError("cannot merge traces with different predictive modes");
  kept += other.kept;
  row_assign_sum += other.row_assign_sum;
  h_mean_sum += other.h_mean_sum;
  ev_sum += other.ev_sum;
  for (std::size_t k = 0; k < final_mass.size(); ++k) final_mass[k] += other.final_mass[k];
  diagnostics.insert(diagnostics.end(), other.diagnostics.begin(), other.diagnostics.end());
  snapshots.insert(snapshots.end(), other.snapshots.begin(), other.snapshots.end());
}

BetaDirTrace run_gibbs_betadir(const BinaryMatrix& v, const HyperParams& hyper,
                               const RunConfig& config, std::uint64_t chain) {
  config.validate();
  hyper.validate(ModelKind::BetaDir);
  Rng rng(config.seed, chain);
  BetaDirState state = BetaDirState::random(v, hyper, rng);

  BetaDirTrace trace;
  trace.predictive = config.predictive;
  const std::size_t total = config.burn_in + config.kept_samples * config.thin;
  trace.diagnostics.reserve(total);
  for (std::size_t s = 1; s <= total; ++s) {
    state.sweep(rng);
    const auto mass = state.component_mass();
    trace.diagnostics.push_back(
        {s, state.log_joint(), count_active(mass, kDefaultActiveThreshold)});
    if (s > config.burn_in && (s - config.burn_in) % config.thin == 0)
      trace.accumulate(state, rng, config.store_snapshots);
  }
  return trace;
}

}  // namespace nbmf
