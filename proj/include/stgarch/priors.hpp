#pragma once

#include <optional>

#include "stgarch/model.hpp"

namespace stgarch {

enum class NuPrior { IndependentJeffreys, Exponential };

/// Optional box bounds turning the flat block prior into a proper uniform;
/// used by simulation-consistency checks that need proper priors.
struct SupportBox {
  double omega_lo = 0.0, omega_hi = 0.0;
  double alpha_lo = 0.0, alpha_hi = 0.0;
  double beta_lo = 0.0, beta_hi = 0.0;
  double lambda_lo = 0.0, lambda_hi = 0.0;
  double gamma_lo = 0.0, gamma_hi = 0.0;
};

struct PriorConfig {
  double gamma0 = 5.0;                       // location of the gamma prior
  NuPrior nu_prior = NuPrior::IndependentJeffreys;
  double nu_exp_rate = 0.1;                  // only for the Exponential baseline
  double nu_max = 0.0;                       // > 2 truncates the nu prior support
  std::optional<SupportBox> bounds;          // proper uniform block prior if set
};

/// Log of the independent Jeffreys prior density for the degrees of freedom,
/// up to the normalizing constant. Cancellation-safe for large nu via an
/// asymptotic expansion of the trigamma difference.
double log_jeffreys_nu(double nu);

/// Log of the Cauchy-type prior kernel for the transition slope,
/// -log(1 + (gamma - gamma0)^2).
double log_gamma_prior(double gamma, double gamma0);

/// 0 inside the support of the flat block prior, -inf outside.
double flat_block_logprior(const ParamState& state, const ModelSpec& spec,
                           const PriorConfig& cfg);

enum class LikelihoodDiag { IllBehaved, NoEvidence };

/// Residual-moment diagnostic: the likelihood of nu has no interior maximum
/// when sum (zhat^2 - 1)^2 < 2n for standardized residuals zhat.
LikelihoodDiag likelihood_wellbehaved_test(const Eigen::VectorXd& zhat);

/// Log prior for nu per cfg (Jeffreys by default), -inf outside support.
double log_nu_prior(double nu, const PriorConfig& cfg);

/// Joint log posterior kernel: mixture-conditional likelihood, the inverse
/// gamma prior terms for the latent weights (Student-t only), the nu prior,
/// the gamma prior (when a transition is active) and the flat block prior.
double log_posterior(const Eigen::VectorXd& y, const ModelSpec& spec,
                     const ParamState& state, const PriorConfig& cfg);

}  // namespace stgarch
