#include "nbmf/config.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "nbmf/errors.hpp"
#include "nbmf/io.hpp"

namespace nbmf {

std::string to_string(ModelKind kind) {
  return kind == ModelKind::BetaDir ? "beta-dir" : "dir-dir";
}

std::string to_string(Engine engine) { return engine == Engine::Gibbs ? "gibbs" : "cvb"; }

std::string to_string(PredictiveMode mode) {
  return mode == PredictiveMode::RaoBlackwell ? "rao-blackwell" : "sampled";
}

ModelKind parse_model_kind(const std::string& s) {
  if (s == "beta-dir") return ModelKind::BetaDir;
  if (s == "dir-dir") return ModelKind::DirDir;
  throw ArgumentError("unknown model '" + s + "' (expected beta-dir or dir-dir)");
}

Engine parse_engine(const std::string& s) {
  if (s == "gibbs") return Engine::Gibbs;
  if (s == "cvb") return Engine::Cvb;
  throw ArgumentError("unknown engine '" + s + "' (expected gibbs or cvb)");
}

PredictiveMode parse_predictive_mode(const std::string& s) {
  if (s == "rao-blackwell") return PredictiveMode::RaoBlackwell;
  if (s == "sampled") return PredictiveMode::Sampled;
  throw ArgumentError("unknown predictive mode '" + s + "'");
}

namespace {

void check_vector(const std::vector<double>& v, std::size_t k, const char* name) {
  if (v.size() != k)
    throw ArgumentError(std::string(name) + " needs " + std::to_string(k) + " entries, has " +
                        std::to_string(v.size()));
  for (double x : v)
    if (!(x > 0.0) || !std::isfinite(x))
      throw ArgumentError(std::string(name) + " entries must be positive and finite");
}

}  // namespace

void HyperParams::validate(ModelKind kind) const {
  if (k == 0) throw ArgumentError("number of components must be at least 1");
  check_vector(gamma, k, "gamma");
  if (kind == ModelKind::BetaDir) {
    check_vector(alpha, k, "alpha");
    check_vector(beta, k, "beta");
  } else {
    check_vector(eta, k, "eta");
  }
  if (nonparametric) {
    if (!(gamma_total > 0.0)) throw ArgumentError("nonparametric gamma_total must be positive");
    const double share = gamma_total / static_cast<double>(k);
    for (double g : gamma)
      if (g != share) throw ArgumentError("nonparametric gamma must equal gamma_total / k");
  }
}

double HyperParams::gamma_sum() const { return std::accumulate(gamma.begin(), gamma.end(), 0.0); }
double HyperParams::eta_sum() const { return std::accumulate(eta.begin(), eta.end(), 0.0); }

void set_nonparametric_gamma(HyperParams& hyper, double total) {
  if (!(total > 0.0)) throw ArgumentError("gamma_total must be positive");
  hyper.nonparametric = true;
  hyper.gamma_total = total;
  hyper.gamma.assign(hyper.k, total / static_cast<double>(hyper.k));
}

HyperParams default_betadir(std::size_t k, bool nonparametric) {
  if (k == 0) throw ArgumentError("number of components must be at least 1");
  HyperParams h;
  h.k = k;
  h.alpha.assign(k, 1.0);
  h.beta.assign(k, 1.0);
  h.gamma.assign(k, 1.0);
  if (nonparametric) set_nonparametric_gamma(h, 1.0);
  return h;
}

HyperParams default_dirdir(std::size_t k, bool nonparametric) {
  if (k == 0) throw ArgumentError("number of components must be at least 1");
  HyperParams h;
  h.k = k;
  h.gamma.assign(k, 1.0);
  h.eta.assign(k, 1.0);
  if (nonparametric) set_nonparametric_gamma(h, 1.0);
  return h;
}

void RunConfig::validate() const {
  if (kept_samples < 1) throw ArgumentError("kept_samples must be at least 1");
  if (thin < 1) throw ArgumentError("thin must be at least 1");
  if (recount_every < 1) throw ArgumentError("recount_every must be at least 1");
}

KeyValues parse_key_values(const std::string& text) {
  KeyValues kv;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return std::string();
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
  };
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ParseError("expected 'key = value'", lineno - 1, 0);
    auto key = trim(line.substr(0, eq));
    auto value = trim(line.substr(eq + 1));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"')
      value = value.substr(1, value.size() - 2);
    if (key.empty()) throw ParseError("empty key", lineno - 1, 0);
    kv[key] = value;
  }
  return kv;
}

KeyValues load_key_values(const std::string& path) { return parse_key_values(read_text_file(path)); }

std::string format_key_values(const KeyValues& kv) {
  std::string out;
  for (const auto& [k, v] : kv) out += k + " = " + v + "\n";
  return out;
}

namespace {

std::size_t parse_count(const std::string& key, const std::string& value) {
  if (value.empty() || value.find_first_not_of("0123456789") != std::string::npos)
    throw ArgumentError(key + " expects a nonnegative integer, got '" + value + "'");
  return static_cast<std::size_t>(std::stoull(value));
}

bool parse_flag(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw ArgumentError(key + " expects true or false, got '" + value + "'");
}

}  // namespace

std::vector<double> parse_component_values(const std::string& key, const std::string& value, std::size_t k) {
  std::vector<double> out;
  std::size_t start = 0;
  for (;;) {
    const auto end = value.find(',', start);
    std::string tok = value.substr(start, end == std::string::npos ? std::string::npos : end - start);
    tok.erase(0, tok.find_first_not_of(' '));
    tok.erase(tok.find_last_not_of(' ') + 1);
    out.push_back(parse_double(tok));
    if (end == std::string::npos) break;
    start = end + 1;
  }
  if (out.size() == 1) return std::vector<double>(k, out[0]);
  if (out.size() != k)
    throw ArgumentError(key + " lists " + std::to_string(out.size()) + " values for k = " +
                        std::to_string(k));
  return out;
}

std::string format_component_values(const std::vector<double>& v) {
  if (!v.empty() && std::all_of(v.begin(), v.end(), [&](double x) { return x == v[0]; }))
    return format_double(v[0]);
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ',';
    out += format_double(v[i]);
  }
  return out;
}

FitSettings fit_settings_from(const KeyValues& kv) {
  static const std::vector<std::string> known = {
      "model", "engine", "k", "nonparametric", "gamma_total", "alpha", "beta", "gamma", "eta",
      "burn_in", "samples", "thin", "vb_iterations", "seed", "predictive", "snapshots",
      "recount_every"};
  for (const auto& [key, value] : kv)
    if (std::find(known.begin(), known.end(), key) == known.end())
      throw ArgumentError("unknown config key '" + key + "'");

  auto get = [&](const std::string& key) -> const std::string* {
    const auto it = kv.find(key);
    return it == kv.end() ? nullptr : &it->second;
  };

  FitSettings s;
  if (auto v = get("model")) s.model = parse_model_kind(*v);
  if (auto v = get("engine")) s.engine = parse_engine(*v);
  const std::size_t k = get("k") ? parse_count("k", *get("k")) : 100;
  const bool nonparametric = get("nonparametric") ? parse_flag("nonparametric", *get("nonparametric")) : true;
  s.hyper = s.model == ModelKind::BetaDir ? default_betadir(k, nonparametric)
                                          : default_dirdir(k, nonparametric);

  if (auto v = get("gamma_total")) {
    if (!nonparametric) throw ArgumentError("gamma_total only applies to nonparametric priors");
    set_nonparametric_gamma(s.hyper, parse_double(*v));
  }
  if (auto v = get("gamma")) {
    if (nonparametric)
      throw ArgumentError("nonparametric priors set gamma through gamma_total");
    s.hyper.gamma = parse_component_values("gamma", *v, k);
  }
  if (s.model == ModelKind::BetaDir) {
    if (get("eta")) throw ArgumentError("eta is not a beta-dir hyperparameter");
    if (auto v = get("alpha")) s.hyper.alpha = parse_component_values("alpha", *v, k);
    if (auto v = get("beta")) s.hyper.beta = parse_component_values("beta", *v, k);
  } else {
    if (get("alpha") || get("beta"))
      throw ArgumentError("alpha/beta are not dir-dir hyperparameters");
    if (auto v = get("eta")) s.hyper.eta = parse_component_values("eta", *v, k);
  }

  if (auto v = get("burn_in")) s.run.burn_in = parse_count("burn_in", *v);
  if (auto v = get("samples")) s.run.kept_samples = parse_count("samples", *v);
  if (auto v = get("thin")) s.run.thin = parse_count("thin", *v);
  if (auto v = get("vb_iterations")) s.run.vb_iterations = parse_count("vb_iterations", *v);
  if (auto v = get("seed")) s.run.seed = parse_count("seed", *v);
  if (auto v = get("predictive")) s.run.predictive = parse_predictive_mode(*v);
  if (auto v = get("snapshots")) s.run.store_snapshots = parse_flag("snapshots", *v);
  if (auto v = get("recount_every")) s.run.recount_every = parse_count("recount_every", *v);

  s.hyper.validate(s.model);
  s.run.validate();
  return s;
}

KeyValues to_key_values(const FitSettings& s) {
  KeyValues kv;
  kv["model"] = to_string(s.model);
  kv["engine"] = to_string(s.engine);
  kv["k"] = std::to_string(s.hyper.k);
  kv["nonparametric"] = s.hyper.nonparametric ? "true" : "false";
  if (s.hyper.nonparametric)
    kv["gamma_total"] = format_double(s.hyper.gamma_total);
  else
    kv["gamma"] = format_component_values(s.hyper.gamma);
  if (s.model == ModelKind::BetaDir) {
    kv["alpha"] = format_component_values(s.hyper.alpha);
    kv["beta"] = format_component_values(s.hyper.beta);
  } else {
    kv["eta"] = format_component_values(s.hyper.eta);
  }
  kv["burn_in"] = std::to_string(s.run.burn_in);
  kv["samples"] = std::to_string(s.run.kept_samples);
  kv["thin"] = std::to_string(s.run.thin);
  kv["vb_iterations"] = std::to_string(s.run.vb_iterations);
  kv["seed"] = std::to_string(s.run.seed);
  kv["predictive"] = to_string(s.run.predictive);
  kv["snapshots"] = s.run.store_snapshots ? "true" : "false";
  kv["recount_every"] = std::to_string(s.run.recount_every);
  return kv;
}

}  // namespace nbmf
