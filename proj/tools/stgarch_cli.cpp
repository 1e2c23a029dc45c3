// Command-line front end: fit, simulate, study, compare, forecast, surface.
#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "stgarch/forecast.hpp"
#include "stgarch/io.hpp"
#include "stgarch/selection.hpp"
#include "stgarch/simulate.hpp"

namespace fs = std::filesystem;
using namespace stgarch;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitNumeric = 4;

struct CommonOpts {
  std::string config_path;
  std::vector<std::string> overrides;
  std::string input;
  std::string column = "value";
  std::string transform = "none";
  std::string output = ".";
  std::uint64_t seed = 1;
  bool seed_set = false;
};

Config resolve_config(const CommonOpts& o) {
  Config cfg;
  if (!o.config_path.empty()) cfg = load_config(o.config_path);
  for (const auto& kv : o.overrides) apply_override(cfg, kv);
  if (o.seed_set) cfg["mcmc.seed"] = std::to_string(o.seed);
  return cfg;
}

std::string manifest_comment(const std::string& command, const Config& cfg,
                             std::uint64_t seed) {
  std::ostringstream os;
  os << "# command=" << command << "\n# seed=" << seed << "\n";
  for (const auto& [k, v] : cfg) os << "# " << k << "=" << v << "\n";
  return os.str();
}

void echo_manifest(const std::string& command, const Config& cfg,
                   std::uint64_t seed) {
  std::cout << "command=" << command << " seed=" << seed << "\n";
  for (const auto& [k, v] : cfg) std::cout << k << "=" << v << "\n";
}

Eigen::VectorXd load_series(const CommonOpts& o) {
  const ReturnsTransform tr = o.transform == "log_return"
                                  ? ReturnsTransform::LogReturn
                                  : ReturnsTransform::None;
  return ingest_returns(o.input, o.column, tr);
}

ParamState dgp_state_from_config(const Config& cfg) {
  ParamState st = default_study_config().true_params;
  auto get = [&](const char* key, double def) {
    const auto it = cfg.find(key);
    return it == cfg.end() ? def : std::stod(it->second);
  };
  st.mu = get("dgp.mu", st.mu);
  if (st.phi.size() > 0) st.phi[0] = get("dgp.phi", st.phi[0]);
  if (st.theta.size() > 0) st.theta[0] = get("dgp.theta", st.theta[0]);
  st.delta = get("dgp.delta", st.delta);
  st.omega0 = get("dgp.omega", st.omega0);
  if (st.alpha.size() > 0) st.alpha[0] = get("dgp.alpha", st.alpha[0]);
  if (st.beta.size() > 0) st.beta[0] = get("dgp.beta", st.beta[0]);
  st.lambda = get("dgp.lambda", st.lambda);
  st.gamma = get("dgp.gamma", st.gamma);
  st.nu = get("dgp.nu", st.nu);
  return st;
}

std::string csv_num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

int cmd_fit(const CommonOpts& o) {
  const Config cfg = resolve_config(o);
  const ModelSpec spec = spec_from_config(cfg);
  const PriorConfig prior = prior_from_config(cfg);
  const McmcConfig mcmc = mcmc_from_config(cfg);
  echo_manifest("fit", cfg, mcmc.seed);

  const Eigen::VectorXd y = load_series(o);
  const Chain chain = run_chain(y, spec, prior, mcmc);

  fs::create_directories(o.output);
  atomic_write((fs::path(o.output) / "chain.csv").string(),
               manifest_comment("fit", cfg, mcmc.seed) + chain_to_csv(chain));
  atomic_write((fs::path(o.output) / "summary.json").string(),
               summarize_chain(chain, cfg, mcmc.seed));
  std::cout << "wrote chain.csv and summary.json to " << o.output << "\n";
  return 0;
}

int cmd_simulate(const CommonOpts& o, int n) {
  const Config cfg = resolve_config(o);
  ModelSpec spec = spec_from_config(cfg);
  const ParamState st = dgp_state_from_config(cfg);
  const std::uint64_t seed = o.seed_set ? o.seed : 1;
  echo_manifest("simulate", cfg, seed);

  const Eigen::VectorXd y = simulate_dataset(spec, st, n, seed);
  std::ostringstream os;
  os << manifest_comment("simulate", cfg, seed) << "t,value\n";
  for (int t = 0; t < y.size(); ++t) os << t + 1 << "," << csv_num(y[t]) << "\n";
  fs::create_directories(o.output);
  atomic_write((fs::path(o.output) / "simulated.csv").string(), os.str());
  std::cout << "wrote simulated.csv to " << o.output << "\n";
  return 0;
}

int cmd_study(const CommonOpts& o, int reps, const std::vector<int>& sizes,
              int threads) {
  const Config cfg = resolve_config(o);
  const PriorConfig prior = prior_from_config(cfg);
  const McmcConfig mcmc = mcmc_from_config(cfg);
  StudyConfig sc = default_study_config();
  sc.seed = mcmc.seed;
  if (reps > 0) sc.n_reps = reps;
  if (!sizes.empty()) sc.sample_sizes = sizes;
  if (threads > 0) sc.n_threads = threads;
  echo_manifest("study", cfg, sc.seed);

  const StudyReport rep = run_study(sc, mcmc, prior);

  std::ostringstream mse;
  mse << manifest_comment("study", cfg, sc.seed) << "dgp,n,model,parameter,mse\n";
  for (const auto& [key, v] : rep.mse) {
    const auto& [dgp, n, model, param] = key;
    mse << dgp << "," << n << "," << model << "," << param << "," << csv_num(v)
        << "\n";
  }
  std::ostringstream dec;
  dec << manifest_comment("study", cfg, sc.seed) << "dgp,n,correct_rate\n";
  for (const auto& [key, v] : rep.decision_rates) {
    const auto& [dgp, n] = key;
    dec << dgp << "," << n << "," << csv_num(v) << "\n";
  }
  std::ostringstream pred;
  pred << manifest_comment("study", cfg, sc.seed)
       << "dgp,n,model,pred_mse_mean,pred_mse_median\n";
  for (const auto& [key, v] : rep.pred_mse_mean) {
    const auto& [dgp, n, model] = key;
    pred << dgp << "," << n << "," << model << "," << csv_num(v) << ","
         << csv_num(rep.pred_mse_median.at(key)) << "\n";
  }
  fs::create_directories(o.output);
  atomic_write((fs::path(o.output) / "study_mse.csv").string(), mse.str());
  atomic_write((fs::path(o.output) / "study_decisions.csv").string(), dec.str());
  atomic_write((fs::path(o.output) / "study_pred.csv").string(), pred.str());

  nlohmann::json j;
  j["schema_version"] = 1;
  j["seed"] = sc.seed;
  j["config"] = cfg;
  j["n_reps"] = sc.n_reps;
  j["failed_replications"] = rep.failed_replications;
  atomic_write((fs::path(o.output) / "study.json").string(), j.dump(2) + "\n");
  std::cout << "wrote study report to " << o.output << "\n";
  return 0;
}

int cmd_compare(const std::string& file1, const std::string& file2,
                const std::string& estimator, double threshold) {
  auto read_logml = [&](const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path, 0);
    nlohmann::json j;
    in >> j;
    return j.at("log_marginal").at(estimator).get<double>();
  };
  MarginalLikelihood m1, m2;
  m1.log_value = read_logml(file1);
  m2.log_value = read_logml(file2);
  const BayesDecision d = bayes_test(m1, m2, 1.0, threshold);
  std::cout << "log_B12=" << d.log_b12 << "\n"
            << "threshold=" << d.threshold << "\n"
            << "verdict=" << (d.verdict == Verdict::AcceptM1 ? "model1" : "model2")
            << "\n"
            << "evidence=" << d.evidence_label << "\n";
  return 0;
}

int cmd_forecast(const CommonOpts& o, int split, int refit_iters) {
  const Config cfg = resolve_config(o);
  ModelSpec spec = spec_from_config(cfg);
  const PriorConfig prior = prior_from_config(cfg);
  const McmcConfig mcmc = mcmc_from_config(cfg);
  echo_manifest("forecast", cfg, mcmc.seed);

  const Eigen::VectorXd y = load_series(o);
  RollingConfig roll;
  roll.refit_iterations = refit_iters;

  std::ostringstream os;
  os << manifest_comment("forecast", cfg, mcmc.seed)
     << "t,model_tag,h_hat,realized_proxy\n";
  std::map<std::string, std::vector<ForecastRecord>> all;
  for (const auto family : {ErrorFamily::Gaussian, ErrorFamily::StudentT}) {
    ModelSpec fspec = spec;
    fspec.error_family = family;
    const std::string tag =
        family == ErrorFamily::Gaussian ? "gaussian" : "student_t";
    const auto records = rolling_forecast(y, split, fspec, prior, mcmc, tag, roll);
    for (const auto& r : records)
      os << r.t << "," << r.model_tag << "," << csv_num(r.h_hat) << ","
         << csv_num(r.realized_proxy) << "\n";
    all[tag] = records;
  }
  fs::create_directories(o.output);
  atomic_write((fs::path(o.output) / "forecast.csv").string(), os.str());

  if (all["gaussian"].size() == all["student_t"].size() &&
      all["gaussian"].size() >= 5) {
    const auto ratios = mse_ratio(all["gaussian"], all["student_t"], 5);
    std::ostringstream rs;
    rs << manifest_comment("forecast", cfg, mcmc.seed) << "window_start_t,mse_ratio\n";
    for (size_t i = 0; i < ratios.size(); ++i)
      rs << all["gaussian"][i].t << "," << csv_num(ratios[i]) << "\n";
    atomic_write((fs::path(o.output) / "mse_ratio.csv").string(), rs.str());
  }
  std::cout << "wrote forecast outputs to " << o.output << "\n";
  return 0;
}

int cmd_surface(const CommonOpts& o) {
  const Config cfg = resolve_config(o);
  ModelSpec spec = spec_from_config(cfg);
  spec.error_family = ErrorFamily::StudentT;  // the surface is over (gamma, nu)
  const ParamState base = dgp_state_from_config(cfg);
  const std::uint64_t seed = o.seed_set ? o.seed : 1;
  echo_manifest("surface", cfg, seed);

  auto grid = [&](const char* pre, double lo, double hi, int steps) {
    auto get = [&](std::string key, double def) {
      const auto it = cfg.find(key);
      return it == cfg.end() ? def : std::stod(it->second);
    };
    const double a = get(std::string(pre) + "_min", lo);
    const double b = get(std::string(pre) + "_max", hi);
    const int k = static_cast<int>(get(std::string(pre) + "_steps", steps));
    Eigen::VectorXd g(k);
    for (int i = 0; i < k; ++i)
      g[i] = a * std::pow(b / a, k > 1 ? static_cast<double>(i) / (k - 1) : 0.0);
    return g;
  };
  const Eigen::VectorXd ggrid = grid("surface.gamma", 0.5, 50.0, 25);
  const Eigen::VectorXd ngrid = grid("surface.nu", 2.5, 200.0, 25);

  const Eigen::VectorXd y = load_series(o);
  const Eigen::MatrixXd surf = likelihood_surface(y, spec, base, ggrid, ngrid);
  const auto verdict = likelihood_wellbehaved_test(standardized_residuals(y, spec, base));
  std::cout << "likelihood_diag="
            << (verdict == LikelihoodDiag::IllBehaved ? "ill_behaved" : "no_evidence")
            << "\n";

  std::ostringstream os;
  os << manifest_comment("surface", cfg, seed) << "gamma";
  for (int j = 0; j < ngrid.size(); ++j) os << ",nu_" << csv_num(ngrid[j]);
  os << "\n";
  for (int i = 0; i < ggrid.size(); ++i) {
    os << csv_num(ggrid[i]);
    for (int j = 0; j < ngrid.size(); ++j) {
      os << ",";
      if (std::isfinite(surf(i, j))) os << csv_num(surf(i, j));
    }
    os << "\n";
  }
  fs::create_directories(o.output);
  atomic_write((fs::path(o.output) / "surface.csv").string(), os.str());
  std::cout << "wrote surface.csv to " << o.output << "\n";
  return 0;
}

void add_common(CLI::App* app, CommonOpts& o) {
  app->add_option("--config", o.config_path, "flat key=value config file");
  app->add_option("--set", o.overrides, "config override key=value")
      ->take_all();
  app->add_option("--input", o.input, "input CSV path");
  app->add_option("--column", o.column, "CSV column name");
  app->add_option("--transform", o.transform, "none | log_return")
      ->check(CLI::IsMember({"none", "log_return"}));
  app->add_option("--output", o.output, "output directory");
  app->add_option("--seed", o.seed, "RNG seed")->each([&](const std::string&) {
    o.seed_set = true;
  });
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bayesian smooth-transition ARMA-GARCH estimation"};
  app.require_subcommand(1);

  CommonOpts o;
  int sim_n = 500, split = 0, reps = 0, refit_iters = 0, threads = 0;
  double threshold = 3.0;
  std::vector<int> sizes;
  std::string cmp1, cmp2, estimator = "newton_raftery";

  auto* fit = app.add_subcommand("fit", "run the MCMC sampler on a series");
  add_common(fit, o);
  auto* sim = app.add_subcommand("simulate", "simulate a dataset from the DGP");
  add_common(sim, o);
  sim->add_option("--n", sim_n, "number of observations");
  auto* study = app.add_subcommand("study", "Monte Carlo simulation study");
  add_common(study, o);
  study->add_option("--reps", reps, "replications per cell");
  study->add_option("--sizes", sizes, "sample sizes")->take_all();
  study->add_option("--chains", threads, "parallel worker count");
  auto* cmp = app.add_subcommand("compare", "Bayes test between two fit summaries");
  cmp->add_option("summary1", cmp1)->required();
  cmp->add_option("summary2", cmp2)->required();
  cmp->add_option("--estimator", estimator, "newton_raftery | shifted_gamma");
  cmp->add_option("--threshold", threshold, "Bayes factor threshold");
  auto* fc = app.add_subcommand("forecast", "rolling one-step variance backtest");
  add_common(fc, o);
  fc->add_option("--split", split, "first predicted index")->required();
  fc->add_option("--refit-iterations", refit_iters,
                 "shorter per-step chains (0 = full config)");
  auto* surf = app.add_subcommand("surface", "(gamma, nu) log-likelihood grid");
  add_common(surf, o);

  CLI11_PARSE(app, argc, argv);

  try {
    if (fit->parsed()) return cmd_fit(o);
    if (sim->parsed()) return cmd_simulate(o, sim_n);
    if (study->parsed()) return cmd_study(o, reps, sizes, threads);
    if (cmp->parsed()) return cmd_compare(cmp1, cmp2, estimator, threshold);
    if (fc->parsed()) return cmd_forecast(o, split, refit_iters);
    if (surf->parsed()) return cmd_surface(o);
  } catch (const DataError& e) {
    std::cerr << "data error";
    if (e.line > 0) std::cerr << " (line " << e.line << ")";
    std::cerr << ": " << e.what() << "\n";
    return kExitData;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return kExitNumeric;
  }
  return kExitUsage;
}
