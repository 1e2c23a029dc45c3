#include "stgarch/simulate.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <future>
#include <stdexcept>

#include "stgarch/forecast.hpp"
#include "stgarch/selection.hpp"

namespace stgarch {

namespace {

std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
  // splitmix64 finalizer over the combined words
  std::uint64_t z = a + 0x9e3779b97f4a7c15ULL * (b + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

SimPath simulate_once(const ModelSpec& spec, const ParamState& st, int T,
                      std::uint64_t seed, int burn, bool& ok) {
  Rng rng(seed);
  const int L = burn + T;
  const int lag = std::max({spec.p, spec.q, spec.r, spec.s, 1});
  Eigen::VectorXd u = Eigen::VectorXd::Zero(L + lag);
  Eigen::VectorXd y = Eigen::VectorXd::Zero(L + lag);
  Eigen::VectorXd h = Eigen::VectorXd::Zero(L + lag);
  const double denom = 1.0 - st.alpha.sum() - st.beta.sum();
  h.head(lag).setConstant(st.omega0 / std::max(denom, 1e-3));

  const double c = (st.nu - 2.0) / st.nu;
  ok = true;
  for (int t = lag; t < L + lag; ++t) {
    double ht = st.omega0;
    for (int j = 1; j <= spec.r; ++j) ht += st.beta[j - 1] * h[t - j];
    for (int j = 1; j <= spec.s; ++j) ht += st.alpha[j - 1] * u[t - j] * u[t - j];
    if (spec.transition != Transition::None)
      ht += st.lambda * u[t - 1] * u[t - 1] *
            transition(spec.transition, u[t - 1], st.gamma);
    if (!std::isfinite(ht) || ht > 1e12) {
      ok = false;
      break;
    }
    h[t] = ht;
    const double eps = rng.normal();
    double ut;
    if (spec.error_family == ErrorFamily::StudentT) {
      const double wt = rng.inverse_gamma(0.5 * st.nu, 0.5 * st.nu);
      ut = eps * std::sqrt(c * ht * wt);
    } else {
      ut = eps * std::sqrt(ht);
    }
    u[t] = ut;
    double yt = st.mu + ut;
    for (int j = 1; j <= spec.p; ++j) yt += st.phi[j - 1] * y[t - j];
    for (int j = 1; j <= spec.q; ++j) yt += st.theta[j - 1] * u[t - j];
    if (spec.include_m_term) yt += st.delta * std::sqrt(ht);
    if (!std::isfinite(yt)) {
      ok = false;
      break;
    }
    y[t] = yt;
  }
  SimPath path;
  if (ok) {
    path.y = y.segment(lag + burn, T);
    path.u = u.segment(lag + burn, T);
    path.h = h.segment(lag + burn, T);
  }
  return path;
}

}  // namespace

std::string dgp_name(Dgp d) {
  switch (d) {
    case Dgp::Gaussian: return "gaussian";
    case Dgp::StudentT3: return "student_t3";
    case Dgp::StudentT6: return "student_t6";
  }
  return "?";
}

SimPath simulate_path(const ModelSpec& spec, const ParamState& true_state, int T,
                      std::uint64_t seed, int burn_in_steps) {
  if (!true_state.in_support(spec))
    throw std::invalid_argument("simulate_path: state outside support");
  for (int attempt = 0; attempt < 10; ++attempt) {
    bool ok = false;
    SimPath p = simulate_once(spec, true_state, T,
                              seed + 1000003ULL * attempt, burn_in_steps, ok);
    if (ok) return p;
  }
  throw std::runtime_error("simulate_path: explosive path after 10 attempts");
}

Eigen::VectorXd simulate_dataset(const ModelSpec& spec, const ParamState& true_state,
                                 int T, std::uint64_t seed) {
  return simulate_path(spec, true_state, T, seed).y;
}

StudyConfig default_study_config() {
  StudyConfig cfg;
  cfg.dgp_spec.p = 1;
  cfg.dgp_spec.q = 1;
  cfg.dgp_spec.r = 1;
  cfg.dgp_spec.s = 1;
  cfg.dgp_spec.transition = Transition::Exponential;
  cfg.dgp_spec.error_family = ErrorFamily::Gaussian;  // overridden per DGP

  ParamState st;
  st.phi = Eigen::VectorXd::Constant(1, 0.8);
  st.theta = Eigen::VectorXd::Constant(1, 0.1);
  st.omega0 = 0.25;
  st.alpha = Eigen::VectorXd::Constant(1, 0.5);
  st.beta = Eigen::VectorXd::Constant(1, 0.1);
  st.gamma = 5.0;
  st.lambda = 1.0;
  st.delta = 0.0;
  st.nu = 3.0;  // overridden per DGP
  cfg.true_params = st;
  return cfg;
}

namespace {

struct RepResult {
  bool ok = false;
  // per model: squared errors for alpha, beta, lambda, gamma
  std::map<std::string, std::array<double, 4>> sqerr;
  std::map<std::string, double> pred_sqerr;
  bool correct_selection = false;
};

RepResult run_replication(const StudyConfig& cfg, const McmcConfig& mcmc,
                          const PriorConfig& prior, Dgp dgp, int n, int rep) {
  RepResult res;
  ModelSpec sim_spec = cfg.dgp_spec;
  ParamState truth = cfg.true_params;
  if (dgp == Dgp::Gaussian) {
    sim_spec.error_family = ErrorFamily::Gaussian;
  } else {
    sim_spec.error_family = ErrorFamily::StudentT;
    truth.nu = dgp == Dgp::StudentT3 ? 3.0 : 6.0;
  }
  const std::uint64_t data_seed =
      mix_seed(cfg.seed, mix_seed(static_cast<std::uint64_t>(dgp) * 131 + n, rep));
  const Eigen::VectorXd y_all =
      simulate_dataset(sim_spec, truth, n + 1, data_seed);
  const Eigen::VectorXd y = y_all.head(n);
  const double realized = y_all[n] * y_all[n];

  std::map<std::string, Chain> chains;
  std::map<std::string, double> logml;
  for (const auto family : {ErrorFamily::Gaussian, ErrorFamily::StudentT}) {
    ModelSpec fit_spec = cfg.dgp_spec;
    fit_spec.error_family = family;
    McmcConfig mc = mcmc;
    mc.seed = mix_seed(data_seed, family == ErrorFamily::Gaussian ? 1 : 2);
    const std::string tag =
        family == ErrorFamily::Gaussian ? "gaussian" : "student_t";
    Chain chain = run_chain(y, fit_spec, prior, mc);

    const int m = static_cast<int>(chain.draws.size());
    Eigen::VectorXd a(m), b(m), l(m), g(m);
    for (int i = 0; i < m; ++i) {
      a[i] = chain.draws[i].alpha[0];
      b[i] = chain.draws[i].beta[0];
      l[i] = chain.draws[i].lambda;
      g[i] = chain.draws[i].gamma;
    }
    auto sq = [](double x) { return x * x; };
    res.sqerr[tag] = {sq(a.mean() - truth.alpha[0]), sq(b.mean() - truth.beta[0]),
                      sq(l.mean() - truth.lambda), sq(g.mean() - truth.gamma)};
    res.pred_sqerr[tag] = sq(predict_variance(chain, y, fit_spec) - realized);
    int n_params = 2 + fit_spec.p + fit_spec.q + fit_spec.s + fit_spec.r;
    if (fit_spec.include_m_term) ++n_params;
    if (fit_spec.transition != Transition::None) n_params += 2;
    if (fit_spec.error_family == ErrorFamily::StudentT) ++n_params;
    logml[tag] = shifted_gamma(chain.logliks, n_params).log_value;
    chains.emplace(tag, std::move(chain));
  }

  const std::string true_tag =
      sim_spec.error_family == ErrorFamily::Gaussian ? "gaussian" : "student_t";
  const std::string other_tag =
      true_tag == "gaussian" ? "student_t" : "gaussian";
  // success: the optimal decision under symmetric losses and equal prior
  // odds (accept the model with the larger marginal) picks the true model
  res.correct_selection = logml[true_tag] > logml[other_tag];
  res.ok = true;
  return res;
}

}  // namespace

StudyReport run_study(const StudyConfig& cfg, const McmcConfig& mcmc,
                      const PriorConfig& prior) {
  StudyReport report;
  report.seed = cfg.seed;
  const char* params[4] = {"alpha", "beta", "lambda", "gamma"};

  for (Dgp dgp : cfg.dgps) {
    for (int n : cfg.sample_sizes) {
      std::vector<RepResult> results(cfg.n_reps);
      const int batch = std::max(1, cfg.n_threads);
      for (int base = 0; base < cfg.n_reps; base += batch) {
        std::vector<std::future<RepResult>> futs;
        for (int rep = base; rep < std::min(base + batch, cfg.n_reps); ++rep)
          futs.push_back(std::async(std::launch::async, [&, rep] {
            try {
              return run_replication(cfg, mcmc, prior, dgp, n, rep);
            } catch (const std::exception&) {
              return RepResult{};
            }
          }));
        for (int k = 0; k < static_cast<int>(futs.size()); ++k)
          results[base + k] = futs[k].get();
      }

      int n_ok = 0, n_correct = 0;
      std::map<std::string, std::array<double, 4>> sums;
      std::map<std::string, std::vector<double>> preds;
      for (const RepResult& r : results) {
        if (!r.ok) {
          ++report.failed_replications;
          continue;
        }
        ++n_ok;
        n_correct += r.correct_selection;
        for (const auto& [tag, se] : r.sqerr) {
          auto& acc = sums[tag];
          for (int k = 0; k < 4; ++k) acc[k] += se[k];
        }
        for (const auto& [tag, pe] : r.pred_sqerr) preds[tag].push_back(pe);
      }
      if (n_ok < cfg.n_reps - cfg.n_reps / 5)
        throw std::runtime_error("run_study: more than 20% of replications failed in cell " +
                                 dgp_name(dgp) + "/" + std::to_string(n));

      const std::string dn = dgp_name(dgp);
      for (const auto& [tag, acc] : sums)
        for (int k = 0; k < 4; ++k)
          report.mse[{dn, n, tag, params[k]}] = acc[k] / n_ok;
      report.decision_rates[{dn, n}] = static_cast<double>(n_correct) / n_ok;
      for (auto& [tag, v] : preds) {
        double mean = 0.0;
        for (double x : v) mean += x;
        report.pred_mse_mean[{dn, n, tag}] = mean / v.size();
        std::sort(v.begin(), v.end());
        report.pred_mse_median[{dn, n, tag}] = v[v.size() / 2];
      }
    }
  }
  return report;
}

}  // namespace stgarch
