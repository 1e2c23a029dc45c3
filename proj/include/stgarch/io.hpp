#pragma once

#include <map>
#include <string>

#include "stgarch/model.hpp"
#include "stgarch/priors.hpp"
#include "stgarch/sampler.hpp"

namespace stgarch {

enum class ReturnsTransform { None, LogReturn };

struct DataError : std::runtime_error {
  int line;
  DataError(const std::string& msg, int ln) : std::runtime_error(msg), line(ln) {}
};

/// Reads one numeric column from a headered CSV. LogReturn maps prices to
/// r_t = 100 ln(P_t / P_{t-1}); prices must then be strictly positive.
/// Bad cells raise DataError carrying the 1-based file line.
Eigen::VectorXd ingest_returns(const std::string& path, const std::string& column,
                               ReturnsTransform transform);

/// Flat dotted-key configuration (spec.p, mcmc.iterations, prior.gamma0, ...).
using Config = std::map<std::string, std::string>;

Config load_config(const std::string& path);
void apply_override(Config& cfg, const std::string& key_equals_value);

ModelSpec spec_from_config(const Config& cfg);
PriorConfig prior_from_config(const Config& cfg);
McmcConfig mcmc_from_config(const Config& cfg);

/// Whole-file atomic write (temp file + rename).
void atomic_write(const std::string& path, const std::string& content);

/// One row per draw, one column per scalar parameter, plus the loglik.
std::string chain_to_csv(const Chain& chain);
Chain chain_from_csv(const std::string& csv, const ModelSpec& spec);

/// JSON summary: posterior means, medians, central 95% intervals,
/// acceptance rates and both marginal-likelihood estimates.
std::string summarize_chain(const Chain& chain, const Config& resolved,
                            std::uint64_t seed);

/// Marginal log-likelihood on a (gamma, nu) grid with the remaining
/// parameters held at base_state; non-finite cells become NaN.
Eigen::MatrixXd likelihood_surface(const Eigen::VectorXd& y, const ModelSpec& spec,
                                   const ParamState& base_state,
                                   const Eigen::VectorXd& grid_gamma,
                                   const Eigen::VectorXd& grid_nu);

/// Standardized residuals of a Gaussian-family pass at base_state,
/// feeding the likelihood pathology diagnostic.
Eigen::VectorXd standardized_residuals(const Eigen::VectorXd& y,
                                       const ModelSpec& spec,
                                       const ParamState& base_state);

}  // namespace stgarch
