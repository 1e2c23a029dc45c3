#pragma once

#include <map>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "stgarch/model.hpp"
#include "stgarch/priors.hpp"
#include "stgarch/sampler.hpp"

namespace stgarch {

enum class Dgp { Gaussian, StudentT3, StudentT6 };

std::string dgp_name(Dgp d);

struct StudyConfig {
  int n_reps = 20;
  std::vector<int> sample_sizes = {150, 500};
  std::vector<Dgp> dgps = {Dgp::Gaussian, Dgp::StudentT3, Dgp::StudentT6};
  ParamState true_params;  // defaults set by default_study_config()
  ModelSpec dgp_spec;
  std::uint64_t seed = 42;
  int burn_in_steps = 200;  // pre-sample steps discarded before the series
  int n_threads = 4;
};

/// Study configuration with the simulation-design parameter values
/// (omega=0.25, alpha=0.5, beta=0.1, gamma=5, phi=0.8, theta=0.1, delta=0,
/// lambda=1) and the AR(1)-MA(1) GARCH(1,1) exponential-transition spec.
StudyConfig default_study_config();

struct StudyReport {
  // (dgp, n, model, parameter) -> MSE of posterior means over replications
  std::map<std::tuple<std::string, int, std::string, std::string>, double> mse;
  // (dgp, n) -> rate of correct model selection
  std::map<std::tuple<std::string, int>, double> decision_rates;
  // (dgp, n, model) -> mean / median squared error of the one-step
  // predictive variance against the realized squared return
  std::map<std::tuple<std::string, int, std::string>, double> pred_mse_mean;
  std::map<std::tuple<std::string, int, std::string>, double> pred_mse_median;
  int failed_replications = 0;
  std::uint64_t seed = 0;
};

/// Simulated series with its generating innovations and variances
/// (post burn-in), for round-trip checks against the filter.
struct SimPath {
  Eigen::VectorXd y, u, h;
};

/// Simulates T observations from the smooth-transition GARCH DGP.
/// Deterministic in (seed); explosive paths are re-drawn with an
/// incremented sub-seed, at most 10 times.
Eigen::VectorXd simulate_dataset(const ModelSpec& spec, const ParamState& true_state,
                                 int T, std::uint64_t seed);

SimPath simulate_path(const ModelSpec& spec, const ParamState& true_state, int T,
                      std::uint64_t seed, int burn_in_steps = 200);

StudyReport run_study(const StudyConfig& cfg, const McmcConfig& mcmc,
                      const PriorConfig& prior);

}  // namespace stgarch
