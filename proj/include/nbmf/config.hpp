#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace nbmf {

/// Fitted model families. Dir-Beta is Beta-Dir on the transposed matrix with
/// the roles of W and H exchanged, so it has no kind of its own here.
enum class ModelKind { BetaDir, DirDir };

enum class Engine { Gibbs, Cvb };

/// How a Gibbs trace turns each kept sample into a predictive contribution:
/// conditional factor means (lower variance) or factor draws from the
/// conditional posteriors.
enum class PredictiveMode { RaoBlackwell, Sampled };

std::string to_string(ModelKind kind);
std::string to_string(Engine engine);
std::string to_string(PredictiveMode mode);
ModelKind parse_model_kind(const std::string& s);
Engine parse_engine(const std::string& s);
PredictiveMode parse_predictive_mode(const std::string& s);

/// Prior hyperparameters, one entry per component.
///
/// alpha/beta parameterize the Beta factor entries and gamma the Dirichlet
/// rows of W (Beta-Dir); gamma and eta parameterize the Dirichlet rows of W
/// and columns of H (Dir-Dir). Vectors a model does not use stay empty.
struct HyperParams {
  std::size_t k = 0;
  std::vector<double> alpha;
  std::vector<double> beta;
  std::vector<double> gamma;
  std::vector<double> eta;
  bool nonparametric = false;
  double gamma_total = 0.0;  // sum of gamma; gamma_k = gamma_total / k when nonparametric

  /// Throws ArgumentError unless every vector the kind needs has k strictly
  /// positive entries and the nonparametric split holds.
  void validate(ModelKind kind) const;

  bool has_beta_params() const { return alpha.size() == k && beta.size() == k; }
  bool has_eta() const { return eta.size() == k; }

  double gamma_sum() const;
  double eta_sum() const;
};

HyperParams default_betadir(std::size_t k, bool nonparametric);
HyperParams default_dirdir(std::size_t k, bool nonparametric);

/// Sets gamma_k = total / k and marks the parameters nonparametric.
void set_nonparametric_gamma(HyperParams& hyper, double total);

struct RunConfig {
  std::size_t burn_in = 4000;
  std::size_t kept_samples = 1000;
  std::size_t thin = 1;
  std::size_t vb_iterations = 500;
  std::uint64_t seed = 0;
  PredictiveMode predictive = PredictiveMode::RaoBlackwell;
  bool store_snapshots = false;
  std::size_t recount_every = 50;  // CVB0 full recount period, in passes

  void validate() const;
};

/// Everything a `fit` needs besides the data.
struct FitSettings {
  ModelKind model = ModelKind::BetaDir;
  Engine engine = Engine::Gibbs;
  HyperParams hyper = default_betadir(100, true);
  RunConfig run;
};

using KeyValues = std::map<std::string, std::string>;

/// Parses `key = value` lines; '#' starts a comment, blank lines are skipped.
KeyValues parse_key_values(const std::string& text);
KeyValues load_key_values(const std::string& path);
std::string format_key_values(const KeyValues& kv);

/// Per-component hyperparameter values from a scalar (broadcast to k
/// entries) or a comma-separated list of exactly k values.
std::vector<double> parse_component_values(const std::string& key, const std::string& value,
                                           std::size_t k);
/// Inverse of parse_component_values; constant vectors collapse to a scalar.
std::string format_component_values(const std::vector<double>& v);

/// Builds fit settings from keys: model, engine, k, nonparametric,
/// gamma_total, alpha, beta, gamma, eta (scalar or comma list of k values),
/// burn_in, samples, thin, vb_iterations, seed, predictive, snapshots,
/// recount_every. Unknown keys are an ArgumentError.
FitSettings fit_settings_from(const KeyValues& kv);
KeyValues to_key_values(const FitSettings& settings);

}  // namespace nbmf
