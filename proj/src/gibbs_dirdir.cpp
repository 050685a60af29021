#include "nbmf/gibbs_dirdir.hpp"

#include <cmath>

#include "nbmf/errors.hpp"

namespace nbmf {

DirDirState::DirDirState(const BinaryMatrix& v, const HyperParams& hyper, std::vector<int> z,
                         std::vector<int> c)
    : v_(&v), hyper_(hyper), z_(std::move(z)), c_(std::move(c)) {
  hyper_.validate(ModelKind::DirDir);
  if (z_.size() != v.observed_count() || c_.size() != v.observed_count())
    throw DimensionError("indicator vectors must have one entry per observed cell");
  const auto k = static_cast<int>(hyper_.k);
  for (std::size_t i = 0; i < z_.size(); ++i)
    if (z_[i] < 0 || z_[i] >= k || c_[i] < 0 || c_[i] >= k)
      throw ArgumentError("indicator outside [0, K)");
  if (!constraints_hold()) throw InvariantError("indicators violate v = [z == c]");
  weights_.resize(hyper_.k);
  cumulative_.resize(hyper_.k);
  recount();
}

DirDirState DirDirState::random(const BinaryMatrix& v, const HyperParams& hyper, Rng& rng) {
  if (hyper.k == 0) throw ArgumentError("number of components must be at least 1");
  if (hyper.k == 1 && v.ones() < v.observed_count())
    throw InfeasibleError("dir-dir with K = 1 cannot explain an observed zero (needs z != c)");
  const std::size_t n = v.observed_count();
  std::vector<int> z(n), c(n);
  for (std::size_t i = 0; i < n; ++i) {
    z[i] = static_cast<int>(rng.index(hyper.k));
    if (v.value(i)) {
      c[i] = z[i];
    } else {
      // uniform over the K - 1 components other than z
      auto other = static_cast<int>(rng.index(hyper.k - 1));
      c[i] = other >= z[i] ? other + 1 : other;
    }
  }
  return DirDirState(v, hyper, std::move(z), std::move(c));
}

DirDirState DirDirState::from_assignments(const BinaryMatrix& v, const HyperParams& hyper,
                                          std::vector<int> z, std::vector<int> c) {
  return DirDirState(v, hyper, std::move(z), std::move(c));
}

DirDirState init_consistent(const BinaryMatrix& v, const HyperParams& hyper, std::uint64_t seed) {
  Rng rng(seed);
  return DirDirState::random(v, hyper, rng);
}

void DirDirState::recount() {
  const auto K = static_cast<Eigen::Index>(hyper_.k);
  l_ = RowCounts::Zero(static_cast<Eigen::Index>(v_->rows()), K);
  q_ = ColCounts::Zero(K, static_cast<Eigen::Index>(v_->cols()));
  const auto& obs = v_->observed();
  for (std::size_t i = 0; i < obs.size(); ++i) {
    ++l_(static_cast<Eigen::Index>(obs[i].row), z_[i]);
    ++q_(c_[i], static_cast<Eigen::Index>(obs[i].col));
  }
  z_detached_.reset();
  c_detached_.reset();
}

bool DirDirState::constraints_hold() const {
  for (std::size_t i = 0; i < z_.size(); ++i)
    if ((z_[i] == c_[i]) != v_->value(i)) return false;
  return true;
}

void DirDirState::check_cell(std::size_t cell) const {
  if (cell >= z_.size()) throw ContractError("cell id out of range");
}

void DirDirState::detach_z(std::size_t cell) {
  check_cell(cell);
  if (z_detached_) throw ContractError("a z indicator is already detached");
  --l_(static_cast<Eigen::Index>(v_->observed()[cell].row), z_[cell]);
  z_detached_ = cell;
}

void DirDirState::attach_z(std::size_t cell, int k) {
  if (z_detached_ != cell) throw ContractError("attach_z of a cell whose z is not detached");
  if (k < 0 || k >= static_cast<int>(hyper_.k)) throw ArgumentError("component outside [0, K)");
  z_[cell] = k;
  ++l_(static_cast<Eigen::Index>(v_->observed()[cell].row), k);
  z_detached_.reset();
}

void DirDirState::detach_c(std::size_t cell) {
  check_cell(cell);
  if (c_detached_) throw ContractError("a c indicator is already detached");
  --q_(c_[cell], static_cast<Eigen::Index>(v_->observed()[cell].col));
  c_detached_ = cell;
}

void DirDirState::attach_c(std::size_t cell, int k) {
  if (c_detached_ != cell) throw ContractError("attach_c of a cell whose c is not detached");
  if (k < 0 || k >= static_cast<int>(hyper_.k)) throw ArgumentError("component outside [0, K)");
  c_[cell] = k;
  ++q_(k, static_cast<Eigen::Index>(v_->observed()[cell].col));
  c_detached_.reset();
}

void DirDirState::attach_pair(std::size_t cell, int k) {
  attach_z(cell, k);
  attach_c(cell, k);
}

void DirDirState::pair_weights_v1(std::size_t cell, std::span<double> out) const {
  check_cell(cell);
  if (!v_->value(cell)) throw ContractError("pair weights apply to cells observed as one");
  if (z_detached_ != cell || c_detached_ != cell)
    throw ContractError("pair weights require both indicators detached");
  if (out.size() != hyper_.k) throw DimensionError("weight buffer must have K entries");
  const auto [f, n] = v_->observed()[cell];
  const auto fi = static_cast<Eigen::Index>(f);
  const auto ni = static_cast<Eigen::Index>(n);
  for (std::size_t k = 0; k < hyper_.k; ++k) {
    const auto kk = static_cast<Eigen::Index>(k);
    out[k] = (hyper_.gamma[k] + l_(fi, kk)) * (hyper_.eta[k] + q_(kk, ni));
  }
}

void DirDirState::z_weights_v0(std::size_t cell, std::span<double> out) const {
  check_cell(cell);
  if (v_->value(cell)) throw ContractError("z weights apply to cells observed as zero");
  if (z_detached_ != cell) throw ContractError("z weights require z detached");
  if (out.size() != hyper_.k) throw DimensionError("weight buffer must have K entries");
  const auto fi = static_cast<Eigen::Index>(v_->observed()[cell].row);
  bool any = false;
  for (std::size_t k = 0; k < hyper_.k; ++k) {
    out[k] = static_cast<int>(k) == c_[cell]
                 ? 0.0
                 : hyper_.gamma[k] + l_(fi, static_cast<Eigen::Index>(k));
    any = any || out[k] > 0.0;
  }
  if (!any) throw InvariantError("z weights vanish for every component");
}

void DirDirState::c_weights_v0(std::size_t cell, std::span<double> out) const {
  check_cell(cell);
  if (v_->value(cell)) throw ContractError("c weights apply to cells observed as zero");
  if (c_detached_ != cell) throw ContractError("c weights require c detached");
  if (out.size() != hyper_.k) throw DimensionError("weight buffer must have K entries");
  const auto ni = static_cast<Eigen::Index>(v_->observed()[cell].col);
  bool any = false;
  for (std::size_t k = 0; k < hyper_.k; ++k) {
    out[k] = static_cast<int>(k) == z_[cell]
                 ? 0.0
                 : hyper_.eta[k] + q_(static_cast<Eigen::Index>(k), ni);
    any = any || out[k] > 0.0;
  }
  if (!any) throw InvariantError("c weights vanish for every component");
}

void DirDirState::sweep(Rng& rng) {
  if (z_detached_ || c_detached_) throw ContractError("sweep with a detached indicator");
  const std::size_t K = hyper_.k;
  const double* g = hyper_.gamma.data();
  const double* e = hyper_.eta.data();
  double* w = weights_.data();
  const auto& obs = v_->observed();
  for (std::size_t i = 0; i < obs.size(); ++i) {
    std::int32_t* l_row = l_.row(static_cast<Eigen::Index>(obs[i].row)).data();
    std::int32_t* q_col = q_.col(static_cast<Eigen::Index>(obs[i].col)).data();
    if (v_->value(i)) {
      --l_row[z_[i]];
      --q_col[c_[i]];
      for (std::size_t k = 0; k < K; ++k) w[k] = (g[k] + l_row[k]) * (e[k] + q_col[k]);
      const int x = static_cast<int>(rng.categorical(weights_, cumulative_));
      z_[i] = c_[i] = x;
      ++l_row[x];
      ++q_col[x];
    } else {
      --l_row[z_[i]];
      for (std::size_t k = 0; k < K; ++k) w[k] = g[k] + l_row[k];
      w[c_[i]] = 0.0;
      z_[i] = static_cast<int>(rng.categorical(weights_, cumulative_));
      ++l_row[z_[i]];

      --q_col[c_[i]];
      for (std::size_t k = 0; k < K; ++k) w[k] = e[k] + q_col[k];
      w[z_[i]] = 0.0;
      c_[i] = static_cast<int>(rng.categorical(weights_, cumulative_));
      ++q_col[c_[i]];
    }
  }
}

double DirDirState::log_joint() const {
  if (z_detached_ || c_detached_) throw ContractError("log_joint with a detached indicator");
  if (!constraints_hold()) throw InvariantError("indicators violate v = [z == c]; joint is zero");
  const std::size_t K = hyper_.k;
  const double gsum = hyper_.gamma_sum();
  const double esum = hyper_.eta_sum();
  const double lg_gsum = std::lgamma(gsum);
  const double lg_esum = std::lgamma(esum);
  std::vector<double> lg_gamma(K), lg_eta(K);
  for (std::size_t k = 0; k < K; ++k) {
    lg_gamma[k] = std::lgamma(hyper_.gamma[k]);
    lg_eta[k] = std::lgamma(hyper_.eta[k]);
  }
  double total = 0.0;
  for (Eigen::Index f = 0; f < l_.rows(); ++f) {
    const auto nf = v_->row_observed(static_cast<std::size_t>(f));
    if (nf == 0) continue;
    total += lg_gsum - std::lgamma(gsum + static_cast<double>(nf));
    for (std::size_t k = 0; k < K; ++k) {
      const auto cnt = l_(f, static_cast<Eigen::Index>(k));
      if (cnt > 0) total += std::lgamma(hyper_.gamma[k] + cnt) - lg_gamma[k];
    }
  }
  for (Eigen::Index n = 0; n < q_.cols(); ++n) {
    const auto fn = v_->col_observed(static_cast<std::size_t>(n));
    if (fn == 0) continue;
    total += lg_esum - std::lgamma(esum + static_cast<double>(fn));
    for (std::size_t k = 0; k < K; ++k) {
      const auto cnt = q_(static_cast<Eigen::Index>(k), n);
      if (cnt > 0) total += std::lgamma(hyper_.eta[k] + cnt) - lg_eta[k];
    }
  }
  return total;
}

bool DirDirState::counters_consistent() const {
  if (z_detached_ || c_detached_) return false;
  DirDirState fresh(*v_, hyper_, z_, c_);
  return fresh.l_ == l_ && fresh.q_ == q_;
}

std::vector<double> DirDirState::component_mass() const {
  std::vector<double> mass(hyper_.k, 0.0);
  for (Eigen::Index f = 0; f < l_.rows(); ++f)
    for (std::size_t k = 0; k < hyper_.k; ++k) mass[k] += l_(f, static_cast<Eigen::Index>(k));
  return mass;
}

Eigen::MatrixXd DirDirState::conditional_w_mean() const {
  const double gsum = hyper_.gamma_sum();
  Eigen::MatrixXd w(l_.rows(), l_.cols());
  for (Eigen::Index f = 0; f < l_.rows(); ++f) {
    const double denom = gsum + static_cast<double>(v_->row_observed(static_cast<std::size_t>(f)));
    for (Eigen::Index k = 0; k < l_.cols(); ++k)
      w(f, k) = (hyper_.gamma[static_cast<std::size_t>(k)] + l_(f, k)) / denom;
  }
  return w;
}

Eigen::MatrixXd DirDirState::conditional_h_mean() const {
  const double esum = hyper_.eta_sum();
  Eigen::MatrixXd h(q_.rows(), q_.cols());
  for (Eigen::Index n = 0; n < q_.cols(); ++n) {
    const double denom = esum + static_cast<double>(v_->col_observed(static_cast<std::size_t>(n)));
    for (Eigen::Index k = 0; k < q_.rows(); ++k)
      h(k, n) = (hyper_.eta[static_cast<std::size_t>(k)] + q_(k, n)) / denom;
  }
  return h;
}

void DirDirTrace::accumulate(const DirDirState& state, Rng& rng, bool keep_snapshot) {
  const auto F = static_cast<Eigen::Index>(state.data().rows());
  const auto N = static_cast<Eigen::Index>(state.data().cols());
  const auto K = static_cast<Eigen::Index>(state.components());
  if (kept == 0) {
    row_assign_sum = Eigen::MatrixXd::Zero(F, K);
    col_assign_sum = Eigen::MatrixXd::Zero(K, N);
    ev_sum = Eigen::MatrixXd::Zero(F, N);
  }
  row_assign_sum += state.row_counts().cast<double>();
  col_assign_sum += state.col_counts().cast<double>();
  if (predictive == PredictiveMode::RaoBlackwell) {
    ev_sum.noalias() += state.conditional_w_mean() * state.conditional_h_mean();
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
    for (Eigen::Index n = 0; n < N; ++n) {
      for (Eigen::Index k = 0; k < K; ++k)
        conc[static_cast<std::size_t>(k)] = hp.eta[static_cast<std::size_t>(k)] + state.col_counts()(k, n);
      rng.dirichlet(conc, draw);
      for (Eigen::Index k = 0; k < K; ++k) h(k, n) = draw[static_cast<std::size_t>(k)];
    }
    ev_sum.noalias() += w * h;
  }
  final_mass = state.component_mass();
  if (keep_snapshot) {
    z_snapshots.push_back(state.z());
    c_snapshots.push_back(state.c());
  }
  ++kept;
}

void DirDirTrace::merge(const DirDirTrace& other) {
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
  col_assign_sum += other.col_assign_sum;
  ev_sum += other.ev_sum;
  for (std::size_t k = 0; k < final_mass.size(); ++k) final_mass[k] += other.final_mass[k];
  diagnostics.insert(diagnostics.end(), other.diagnostics.begin(), other.diagnostics.end());
  z_snapshots.insert(z_snapshots.end(), other.z_snapshots.begin(), other.z_snapshots.end());
  c_snapshots.insert(c_snapshots.end(), other.c_snapshots.begin(), other.c_snapshots.end());
}

DirDirTrace run_gibbs_dirdir(const BinaryMatrix& v, const HyperParams& hyper,
                             const RunConfig& config, std::uint64_t chain) {
  config.validate();
  hyper.validate(ModelKind::DirDir);
  Rng rng(config.seed, chain);
  DirDirState state = DirDirState::random(v, hyper, rng);

  DirDirTrace trace;
  trace.predictive = config.predictive;
  const std::size_t total = config.burn_in + config.kept_samples * config.thin;
  trace.diagnostics.reserve(total);
  for (std::size_t s = 1; s <= total; ++s) {
    state.sweep(rng);
    trace.diagnostics.push_back(
        {s, state.log_joint(), count_active(state.component_mass(), kDefaultActiveThreshold)});
    if (s > config.burn_in && (s - config.burn_in) % config.thin == 0)
      trace.accumulate(state, rng, config.store_snapshots);
  }
  return trace;
}

}  // namespace nbmf
