#include "cli.hpp"

#include <chrono>
#include <exception>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"

#include "nbmf/binary_matrix.hpp"
#include "nbmf/config.hpp"
#include "nbmf/cvb_betadir.hpp"
#include "nbmf/errors.hpp"
#include "nbmf/estimators.hpp"
#include "nbmf/gibbs_betadir.hpp"
#include "nbmf/gibbs_dirdir.hpp"
#include "nbmf/io.hpp"
#include "nbmf/metrics.hpp"
#include "nbmf/synth.hpp"

namespace nbmf::cli {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

constexpr const char* kVersion = "1.0.0";

// Written before any long computation with status "incomplete" and
// rewritten once the command has produced all of its artifacts.
class Manifest {
 public:
  Manifest(fs::path dir, std::string command, const std::vector<std::string>& argv)
      : path_(dir / "manifest.json"), start_(std::chrono::steady_clock::now()) {
    doc_["command"] = std::move(command);
    doc_["version"] = kVersion;
    doc_["status"] = "incomplete";
    doc_["argv"] = argv;
    doc_["output_dir"] = dir.string();
  }

  json& operator[](const char* key) { return doc_[key]; }

  void add_input(const std::string& role, const fs::path& path) {
    doc_["inputs"][role] = {{"path", path.string()}, {"checksum", file_checksum(path)}};
  }

  void add_artifact(const fs::path& path) {
    doc_["artifacts"][path.filename().string()] = file_checksum(path);
  }

  void write() { write_text_file(path_, doc_.dump(2) + "\n"); }

  void complete() {
    doc_["status"] = "complete";
    doc_["wall_clock_seconds"] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    write();
  }

 private:
  fs::path path_;
  json doc_;
  std::chrono::steady_clock::time_point start_;
};

json hyper_json(const HyperParams& h) {
  json j;
  j["k"] = h.k;
  j["nonparametric"] = h.nonparametric;
  if (h.nonparametric) j["gamma_total"] = h.gamma_total;
  if (!h.alpha.empty()) j["alpha"] = h.alpha;
  if (!h.beta.empty()) j["beta"] = h.beta;
  if (!h.gamma.empty()) j["gamma"] = h.gamma;
  if (!h.eta.empty()) j["eta"] = h.eta;
  return j;
}

json run_json(const RunConfig& r) {
  return {{"burn_in", r.burn_in},         {"kept_samples", r.kept_samples},
          {"thin", r.thin},               {"vb_iterations", r.vb_iterations},
          {"seed", r.seed},               {"predictive", to_string(r.predictive)},
          {"store_snapshots", r.store_snapshots}, {"recount_every", r.recount_every}};
}

json report_json(const MetricReport& r) {
  return {{"neg_log_lik", r.neg_log_lik},
          {"perplexity", r.perplexity},
          {"n_cells", r.n_cells},
          {"clamp_count", r.clamp_count}};
}

CsvFormat csv_format(bool header) {
  CsvFormat f;
  f.header = header;
  return f;
}

fs::path prepare_dir(const std::string& dir) {
  fs::path p(dir);
  std::error_code ec;
  fs::create_directories(p, ec);
  if (ec) throw IoError("cannot create output directory '" + dir + "': " + ec.message());
  return p;
}

// ---- synth ----------------------------------------------------------------

struct SynthArgs {
  std::string kind;
  std::size_t rows = 100;
  std::size_t cols = 100;
  std::size_t k = 4;
  double value = 1.0;
  std::optional<std::string> alpha, beta, gamma, eta;
  std::uint64_t seed = 0;
  std::string out = ".";
};

void cmd_synth(const SynthArgs& a, const std::vector<std::string>& argv, std::ostream& out) {
  const SynthKind kind = parse_synth_kind(a.kind);
  if (a.k == 0) throw ArgumentError("k must be at least 1");
  if (!(a.value > 0.0)) throw ArgumentError("value must be positive");
  HyperParams h = uniform_synth_hyper(a.k, a.value);
  if (a.alpha) h.alpha = parse_component_values("alpha", *a.alpha, a.k);
  if (a.beta) h.beta = parse_component_values("beta", *a.beta, a.k);
  if (a.gamma) h.gamma = parse_component_values("gamma", *a.gamma, a.k);
  if (a.eta) h.eta = parse_component_values("eta", *a.eta, a.k);

  const fs::path dir = prepare_dir(a.out);
  Manifest m(dir, "synth", argv);
  m["kind"] = to_string(kind);
  m["rows"] = a.rows;
  m["cols"] = a.cols;
  m["hyper"] = hyper_json(h);
  m["seed"] = a.seed;
  m.write();

  const SynthResult r = generate(kind, a.rows, a.cols, h, a.seed);
  write_csv(dir / "V.csv", r.v);
  write_labeled_csv(dir / "W.csv", r.w, "f", "k");
  write_labeled_csv(dir / "H.csv", r.h, "k", "n");
  for (const char* name : {"V.csv", "W.csv", "H.csv"}) m.add_artifact(dir / name);
  m["density"] = density(r.v);
  m.complete();
  out << "wrote " << (dir / "V.csv").string() << " (" << a.rows << "x" << a.cols
      << ", density " << format_double(density(r.v)) << ")\n";
}

// ---- split ----------------------------------------------------------------

struct SplitArgs {
  std::string input;
  double fraction = 0.25;
  std::uint64_t seed = 0;
  std::string out = ".";
  bool header = false;
};

void cmd_split(const SplitArgs& a, const std::vector<std::string>& argv, std::ostream& out) {
  if (!(a.fraction > 0.0 && a.fraction < 1.0)) throw ArgumentError("fraction must lie in (0, 1)");
  const fs::path dir = prepare_dir(a.out);
  Manifest m(dir, "split", argv);
  m.add_input("data", a.input);
  m["fraction"] = a.fraction;
  m["seed"] = a.seed;
  m.write();

  const BinaryMatrix v = load_csv(a.input, csv_format(a.header));
  const HoldoutSplit s = split_holdout(v, a.fraction, a.seed);
  write_csv(dir / "train.csv", s.train);
  write_test_cells(dir / "test.csv", s.test);
  m.add_artifact(dir / "train.csv");
  m.add_artifact(dir / "test.csv");
  m["train_cells"] = s.train.observed_count();
  m["test_cells"] = s.test.size();
  m.complete();
  out << "train " << s.train.observed_count() << " cells, test " << s.test.size() << " cells\n";
}

// ---- fit ------------------------------------------------------------------

struct FitArgs {
  std::string input;
  std::optional<std::string> config;
  KeyValues overrides;
  std::size_t chains = 1;
  std::string out = ".";
  bool header = false;
};

void write_diagnostics(const fs::path& path, const std::vector<std::vector<SweepRecord>>& chains) {
  std::ostringstream s;
  s << "chain,sweep,log_joint,active_components\n";
  for (std::size_t c = 0; c < chains.size(); ++c)
    for (const auto& r : chains[c])
      s << c << ',' << r.sweep << ',' << format_double(r.log_joint) << ',' << r.active_components << '\n';
  write_text_file(path, s.str());
}

template <typename Trace, typename RunFn>
Trace run_chains(std::size_t chains, RunFn run_one, std::vector<std::vector<SweepRecord>>& diagnostics) {
  std::vector<std::optional<Trace>> traces(chains);
  std::vector<std::exception_ptr> errors(chains);
  auto work = [&](std::size_t c) {
    try {
      traces[c] = run_one(c);
    } catch (...) {
      errors[c] = std::current_exception();
    }
  };
  if (chains == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t c = 0; c < chains; ++c) pool.emplace_back(work, c);
    for (auto& t : pool) t.join();
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  Trace merged = std::move(*traces[0]);
  diagnostics.push_back(merged.diagnostics);
  for (std::size_t c = 1; c < chains; ++c) {
    diagnostics.push_back(traces[c]->diagnostics);
    merged.merge(*traces[c]);
  }
  return merged;
}

void write_snapshots(const fs::path& path, const std::vector<std::vector<int>>& z,
                     const std::vector<std::vector<int>>* c) {
  std::ostringstream s;
  s << (c ? "sample,cell,z,c\n" : "sample,cell,z\n");
  for (std::size_t j = 0; j < z.size(); ++j)
    for (std::size_t i = 0; i < z[j].size(); ++i) {
      s << j << ',' << i << ',' << z[j][i];
      if (c) s << ',' << (*c)[j][i];
      s << '\n';
    }
  write_text_file(path, s.str());
}

void cmd_fit(const FitArgs& a, const std::vector<std::string>& argv, std::ostream& out) {
  KeyValues kv;
  if (a.config) kv = load_key_values(*a.config);
  for (const auto& [key, value] : a.overrides) kv[key] = value;
  bool transpose = false;
  if (auto it = kv.find("model"); it != kv.end() && it->second == "dir-beta") {
    transpose = true;
    it->second = to_string(ModelKind::BetaDir);
  }
  const FitSettings settings = fit_settings_from(kv);
  if (settings.engine == Engine::Cvb && settings.model == ModelKind::DirDir)
    throw UnsupportedError("collapsed variational inference is only available for beta-dir");
  if (a.chains == 0) throw ArgumentError("chains must be at least 1");
  if (a.chains > 1 && settings.engine == Engine::Cvb)
    throw ArgumentError("multiple chains apply to the gibbs engine only");

  const fs::path dir = prepare_dir(a.out);
  Manifest m(dir, "fit", argv);
  m.add_input("data", a.input);
  if (a.config) m.add_input("config", *a.config);
  m["model"] = transpose ? std::string("dir-beta") : to_string(settings.model);
  m["engine"] = to_string(settings.engine);
  m["hyper"] = hyper_json(settings.hyper);
  m["run"] = run_json(settings.run);
  m["chains"] = a.chains;
  KeyValues resolved = to_key_values(settings);
  if (transpose) resolved["model"] = "dir-beta";
  m["settings"] = resolved;
  m.write();

  const BinaryMatrix data = load_csv(a.input, csv_format(a.header));
  const BinaryMatrix v = transpose ? data.transposed() : data;
  const HyperParams& h = settings.hyper;

  FactorEstimate est;
  std::vector<double> mass;
  if (settings.engine == Engine::Cvb) {
    const CvbResult res = run_cvb(v, h, settings.run);
    est = estimate_cvb(res.resp);
    mass = res.resp.component_mass();
    std::ostringstream s;
    s << "pass,max_q_change,active_components\n";
    for (const auto& r : res.diagnostics)
      s << r.pass << ',' << format_double(r.max_q_change) << ',' << r.active_components << '\n';
    write_text_file(dir / "diagnostics.csv", s.str());
  } else {
    std::vector<std::vector<SweepRecord>> diagnostics;
    if (settings.model == ModelKind::BetaDir) {
      const auto trace = run_chains<BetaDirTrace>(
          a.chains, [&](std::size_t c) { return run_gibbs_betadir(v, h, settings.run, c); }, diagnostics);
      est = estimate_betadir(trace, v, h);
      mass = trace.final_mass;
      if (settings.run.store_snapshots) write_snapshots(dir / "snapshots.csv", trace.snapshots, nullptr);
    } else {
      const auto trace = run_chains<DirDirTrace>(
          a.chains, [&](std::size_t c) { return run_gibbs_dirdir(v, h, settings.run, c); }, diagnostics);
      est = estimate_dirdir(trace, v, h);
      mass = trace.final_mass;
      if (settings.run.store_snapshots)
        write_snapshots(dir / "snapshots.csv", trace.z_snapshots, &trace.c_snapshots);
    }
    write_diagnostics(dir / "diagnostics.csv", diagnostics);
  }

  Eigen::MatrixXd ew = est.ew, eh = est.eh, ev = est.ev;
  if (transpose) {
    ew = est.eh.transpose();
    eh = est.ew.transpose();
    ev = est.ev.transpose();
  }
  write_labeled_csv(dir / "EW.csv", ew, "f", "k");
  write_labeled_csv(dir / "EH.csv", eh, "k", "n");
  write_labeled_csv(dir / "EV.csv", ev, "f", "n");
  for (const char* name : {"EW.csv", "EH.csv", "EV.csv", "diagnostics.csv"}) m.add_artifact(dir / name);
  if (settings.run.store_snapshots && settings.engine == Engine::Gibbs) m.add_artifact(dir / "snapshots.csv");

  const MetricReport fit = evaluate(data, ev);
  const std::size_t active = active_components(mass);
  m["source"] = to_string(est.source);
  m["samples"] = est.samples;
  m["active_components"] = active;
  m["train"] = report_json(fit);
  m.complete();
  out << "fit " << (transpose ? "dir-beta" : to_string(settings.model)) << '/'
      << to_string(settings.engine) << ": " << active << " active components, training neg-log-lik "
      << format_double(fit.neg_log_lik) << '\n';
}

// ---- predict / eval -------------------------------------------------------

struct PredictionSource {
  std::optional<std::string> ev;
  std::optional<std::string> fit_dir;
  std::optional<double> constant;
};

fs::path ev_path(const PredictionSource& p) {
  if (p.ev) return *p.ev;
  return fs::path(*p.fit_dir) / "EV.csv";
}

struct PredictArgs {
  PredictionSource source;
  std::string test;
  std::optional<std::string> out;
};

void cmd_predict(const PredictArgs& a, std::ostream& out) {
  const Eigen::MatrixXd ev = load_real_csv(ev_path(a.source));
  const auto cells = load_test_cells(a.test);
  std::ostringstream s;
  s << "row,col,value,prediction\n";
  for (const auto& c : cells) {
    if (c.row >= static_cast<std::size_t>(ev.rows()) || c.col >= static_cast<std::size_t>(ev.cols()))
      throw DimensionError("test cell lies outside the prediction matrix");
    s << c.row << ',' << c.col << ',' << (c.value ? 1 : 0) << ','
      << format_double(ev(static_cast<Eigen::Index>(c.row), static_cast<Eigen::Index>(c.col))) << '\n';
  }
  if (a.out)
    write_text_file(*a.out, s.str());
  else
    out << s.str();
}

struct EvalArgs {
  PredictionSource source;
  std::optional<std::string> test;
  std::optional<std::string> data;
  bool header = false;
};

void cmd_eval(const EvalArgs& a, std::ostream& out) {
  std::vector<TestCell> cells;
  std::size_t rows = 0, cols = 0;
  if (a.test) {
    cells = load_test_cells(*a.test);
    for (const auto& c : cells) {
      rows = std::max(rows, c.row + 1);
      cols = std::max(cols, c.col + 1);
    }
  } else {
    const BinaryMatrix v = load_csv(*a.data, csv_format(a.header));
    for (std::size_t i = 0; i < v.observed_count(); ++i)
      cells.push_back({v.observed()[i].row, v.observed()[i].col, v.value(i)});
    rows = v.rows();
    cols = v.cols();
  }
  if (cells.empty()) throw DimensionError("no cells to evaluate");

  Eigen::MatrixXd ev;
  if (a.source.constant) {
    if (!(*a.source.constant >= 0.0 && *a.source.constant <= 1.0))
      throw ArgumentError("constant prediction must lie in [0, 1]");
    ev = Eigen::MatrixXd::Constant(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols),
                                   *a.source.constant);
  } else {
    ev = load_real_csv(ev_path(a.source));
    try {
      validate_predictions(ev);
    } catch (const ArgumentError& e) {
      throw DimensionError(std::string("invalid predictions: ") + e.what());
    }
  }
  out << report_json(evaluate(cells, ev)).dump() << '\n';
}

void add_prediction_source(CLI::App* sub, PredictionSource& p) {
  auto* ev = sub->add_option("--ev", p.ev, "Predictive mean matrix (EV.csv)");
  auto* fit = sub->add_option("--fit", p.fit_dir, "Output directory of a fit run");
  auto* constant = sub->add_option("--constant", p.constant, "Predict this probability everywhere");
  ev->excludes(fit)->excludes(constant);
  fit->excludes(constant);
}

// Maps a CLI flag onto the config key it mirrors.
void add_override(CLI::App* sub, KeyValues& kv, const std::string& flag, const std::string& key,
                  const std::string& help) {
  sub->add_option_function<std::string>(flag, [&kv, key](const std::string& v) { kv[key] = v; }, help);
}

int exit_code_for(const std::exception_ptr& e, std::ostream& err) {
  try {
    std::rethrow_exception(e);
  } catch (const ArgumentError& x) {
    err << "nbmf: usage error: " << x.what() << '\n';
    return kExitUsage;
  } catch (const ParseError& x) {
    err << "nbmf: data error: " << x.what() << '\n';
    return kExitData;
  } catch (const DimensionError& x) {
    err << "nbmf: data error: " << x.what() << '\n';
    return kExitData;
  } catch (const IoError& x) {
    err << "nbmf: i/o error: " << x.what() << '\n';
    return kExitData;
  } catch (const InfeasibleError& x) {
    err << "nbmf: infeasible: " << x.what() << '\n';
    return kExitUnsupported;
  } catch (const UnsupportedError& x) {
    err << "nbmf: unsupported: " << x.what() << '\n';
    return kExitUnsupported;
  } catch (const std::exception& x) {
    err << "nbmf: internal error: " << x.what() << '\n';
    return kExitInternal;
  } catch (...) {
    err << "nbmf: internal error\n";
    return kExitInternal;
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Bayesian mean-parameterized nonnegative binary matrix factorization"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  SynthArgs sa;
  auto* synth = app.add_subcommand("synth", "Draw a synthetic (V, W, H) triple");
  synth->add_option("--kind", sa.kind, "beta-dir, dir-beta or dir-dir")->required();
  synth->add_option("--rows", sa.rows, "Rows F")->check(CLI::PositiveNumber);
  synth->add_option("--cols", sa.cols, "Columns N")->check(CLI::PositiveNumber);
  synth->add_option("--k", sa.k, "Components K")->check(CLI::PositiveNumber);
  synth->add_option("--value", sa.value, "Value of every hyperparameter not set individually");
  synth->add_option("--alpha", sa.alpha, "Beta shape alpha (scalar or list of K)");
  synth->add_option("--beta", sa.beta, "Beta shape beta (scalar or list of K)");
  synth->add_option("--gamma", sa.gamma, "Dirichlet concentration of W rows");
  synth->add_option("--eta", sa.eta, "Dirichlet concentration of H columns");
  synth->add_option("--seed", sa.seed, "Random seed");
  synth->add_option("--out", sa.out, "Output directory");

  SplitArgs pa;
  auto* split = app.add_subcommand("split", "Hold out a random subset of observed cells");
  split->add_option("--input", pa.input, "Binary matrix CSV")->required();
  split->add_option("--fraction", pa.fraction, "Held-out fraction of observed cells");
  split->add_option("--seed", pa.seed, "Random seed");
  split->add_option("--out", pa.out, "Output directory");
  split->add_flag("--header", pa.header, "Input has a header row");

  FitArgs fa;
  auto* fit = app.add_subcommand("fit", "Fit a model and write posterior-mean estimates");
  fit->add_option("--input", fa.input, "Training matrix CSV")->required();
  fit->add_option("--config", fa.config, "key = value settings file; flags override it");
  add_override(fit, fa.overrides, "--model", "model", "beta-dir, dir-beta or dir-dir");
  add_override(fit, fa.overrides, "--engine", "engine", "gibbs or cvb");
  add_override(fit, fa.overrides, "--k", "k", "Truncation level K");
  add_override(fit, fa.overrides, "--gamma-total", "gamma_total", "Sum of gamma in nonparametric mode");
  add_override(fit, fa.overrides, "--alpha", "alpha", "Beta prior alpha (scalar or list of K)");
  add_override(fit, fa.overrides, "--beta", "beta", "Beta prior beta (scalar or list of K)");
  add_override(fit, fa.overrides, "--gamma", "gamma", "Dirichlet prior of W rows (parametric mode)");
  add_override(fit, fa.overrides, "--eta", "eta", "Dirichlet prior of H columns (dir-dir)");
  add_override(fit, fa.overrides, "--burn-in", "burn_in", "Discarded sweeps");
  add_override(fit, fa.overrides, "--samples", "samples", "Kept samples J");
  add_override(fit, fa.overrides, "--thin", "thin", "Keep every thin-th sweep");
  add_override(fit, fa.overrides, "--vb-iterations", "vb_iterations", "CVB0 passes");
  add_override(fit, fa.overrides, "--seed", "seed", "Random seed");
  add_override(fit, fa.overrides, "--predictive", "predictive", "rao-blackwell or sampled");
  add_override(fit, fa.overrides, "--recount-every", "recount_every", "CVB0 recount period");
  auto* np = fit->add_flag_callback("--nonparametric", [&] { fa.overrides["nonparametric"] = "true"; },
                                    "gamma_k = gamma_total / K");
  auto* par = fit->add_flag_callback("--parametric", [&] { fa.overrides["nonparametric"] = "false"; },
                                     "Use the gamma values as given");
  np->excludes(par);
  fit->add_flag_callback("--snapshots", [&] { fa.overrides["snapshots"] = "true"; },
                         "Also write every kept assignment");
  fit->add_option("--chains", fa.chains, "Independent Gibbs chains, pooled");
  fit->add_option("--out", fa.out, "Output directory");
  fit->add_flag("--header", fa.header, "Input has a header row");

  PredictArgs ra;
  auto* predict = app.add_subcommand("predict", "Look up predictions for held-out cells");
  add_prediction_source(predict, ra.source);
  predict->add_option("--test", ra.test, "Held-out cells (row,col,value)")->required();
  predict->add_option("--out", ra.out, "Output CSV (default: stdout)");

  EvalArgs ea;
  auto* eval = app.add_subcommand("eval", "Negative log-likelihood and perplexity of predictions");
  add_prediction_source(eval, ea.source);
  auto* test = eval->add_option("--test", ea.test, "Held-out cells (row,col,value)");
  auto* data = eval->add_option("--data", ea.data, "Evaluate on the observed cells of this matrix");
  test->excludes(data);
  eval->add_flag("--header", ea.header, "Data file has a header row");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << kVersion << '\n';
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return kExitOk;
    }
    err << "nbmf: usage error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (synth->parsed()) cmd_synth(sa, args, out);
    if (split->parsed()) cmd_split(pa, args, out);
    if (fit->parsed()) cmd_fit(fa, args, out);
    if (predict->parsed()) {
      if (!ra.source.ev && !ra.source.fit_dir) throw ArgumentError("predict needs --ev or --fit");
      cmd_predict(ra, out);
    }
    if (eval->parsed()) {
      if (!ea.source.ev && !ea.source.fit_dir && !ea.source.constant)
        throw ArgumentError("eval needs --ev, --fit or --constant");
      if (!ea.test && !ea.data) throw ArgumentError("eval needs --test or --data");
      cmd_eval(ea, out);
    }
  } catch (...) {
    return exit_code_for(std::current_exception(), err);
  }
  return kExitOk;
}

}  // namespace nbmf::cli
