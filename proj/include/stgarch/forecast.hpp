#pragma once

#include <string>
#include <vector>

#include "stgarch/sampler.hpp"

namespace stgarch {

struct ForecastRecord {
  int t = 0;                    // index of the predicted observation
  double h_hat = 0.0;           // posterior-mean one-step predictive variance
  double realized_proxy = 0.0;  // squared return at t
  std::string model_tag;
};

/// Posterior mean of the one-step-ahead conditional variance h_{T+1},
/// averaging the variance-recursion extension over all chain draws.
/// Throws if more than 5% of the draws produce a non-finite extension.
double predict_variance(const Chain& chain, const Eigen::VectorXd& y,
                        const ModelSpec& spec);

struct RollingConfig {
  int refit_iterations = 0;  // 0: full mcmc config each step
};

/// Expanding-window one-step-ahead backtest: fit on y[0..t), predict
/// variance of y[t], record against the squared return.
std::vector<ForecastRecord> rolling_forecast(const Eigen::VectorXd& y_full,
                                             int split, const ModelSpec& spec,
                                             const PriorConfig& prior,
                                             const McmcConfig& mcmc,
                                             const std::string& model_tag,
                                             const RollingConfig& roll = {});

/// Sliding five-day MSE ratio of model-1 predictions against model-2
/// predictions; values above 1 favor model 2. Exact zero denominators
/// yield +inf.
std::vector<double> mse_ratio(const std::vector<ForecastRecord>& records_g,
                              const std::vector<ForecastRecord>& records_t,
                              int window = 5);

}  // namespace stgarch
