#pragma once

#include <map>
#include <string>
#include <vector>

#include "stgarch/model.hpp"
#include "stgarch/priors.hpp"
#include "stgarch/rng.hpp"

namespace stgarch {

struct McmcConfig {
  int iterations = 6000;
  int burn_in = 2000;
  int thin = 1;
  std::uint64_t seed = 1;
  double scale_variance = 0.25;  // initial RW scale, variance block
  double scale_nu = 0.6;         // initial RW scale, log(nu-2)
  double accept_lo = 0.2;        // adaptation target band
  double accept_hi = 0.4;
};

struct Chain {
  ModelSpec spec;
  std::vector<ParamState> draws;             // post burn-in, thinned
  Eigen::VectorXd logliks;                   // marginal loglik per draw
  std::map<std::string, double> acceptance;  // block -> rate
  std::uint64_t seed = 0;
};

struct SingularDesign : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Mean and covariance of a Gaussian complete conditional for the weighted
/// regression b = M x + e, e ~ N(0, diag(hdiag)). Throws SingularDesign when
/// M' H^-1 M has condition number above 1e12.
struct GlsMoments {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
};
GlsMoments gls_conditional(const Eigen::MatrixXd& M, const Eigen::VectorXd& hdiag,
                           const Eigen::VectorXd& b);

Eigen::VectorXd gaussian_draw(const GlsMoments& g, Rng& rng);

/// Standard Metropolis accept test for a symmetric proposal in the working
/// coordinates; log densities may be -inf.
bool metropolis_accept(double logp_current, double logp_proposal, Rng& rng);

/// Exact Gaussian draws from the complete conditionals of the mean blocks.
Eigen::VectorXd draw_phi(const Eigen::VectorXd& y, const ModelSpec& spec,
                         const ParamState& state, Rng& rng);
Eigen::VectorXd draw_theta(const Eigen::VectorXd& y, const ModelSpec& spec,
                           const ParamState& state, Rng& rng);
double draw_psi(const Eigen::VectorXd& y, const ModelSpec& spec,
                const ParamState& state, Rng& rng);

/// One random-walk Metropolis update of (omega0, alpha, beta, lambda, gamma)
/// on unconstrained transforms, targeting the joint posterior.
struct VarianceDraw {
  double omega0;
  Eigen::VectorXd alpha, beta;
  double lambda, gamma;
  bool accepted;
};
VarianceDraw draw_variance_block(const Eigen::VectorXd& y, const ModelSpec& spec,
                                 const ParamState& state, const PriorConfig& prior,
                                 double scale, Rng& rng);

/// One Metropolis update of nu on the log(nu-2) scale.
struct NuDraw {
  double nu;
  bool accepted;
};
NuDraw draw_nu(const Eigen::VectorXd& y, const ModelSpec& spec,
               const ParamState& state, const PriorConfig& prior, double scale,
               Rng& rng);

/// Independent inverse-gamma draws of the latent mixing weights.
Eigen::VectorXd draw_mixing_weights(const Eigen::VectorXd& y, const ModelSpec& spec,
                                    const ParamState& state, Rng& rng);

/// Systematic-scan Gibbs-within-Metropolis sampler. Proposal scales adapt
/// during burn-in toward the configured acceptance band, then freeze.
class Sampler {
 public:
  Sampler(Eigen::VectorXd y, ModelSpec spec, PriorConfig prior, McmcConfig cfg);

  /// One full scan over all blocks, updating state in place.
  void sweep(ParamState& state, Rng& rng);

  Chain run();

  /// A support-respecting default initial state for this data/spec.
  ParamState initial_state() const;

  double& scale_variance() { return scale_variance_; }
  double& scale_nu() { return scale_nu_; }
  void adapt(double step);

 private:
  Eigen::VectorXd y_;
  ModelSpec spec_;
  PriorConfig prior_;
  McmcConfig cfg_;
  double scale_variance_, scale_nu_;
  long n_var_ = 0, n_var_acc_ = 0, n_nu_ = 0, n_nu_acc_ = 0;
  bool last_var_acc_ = false, last_nu_acc_ = false;
  friend Chain run_chain(const Eigen::VectorXd&, const ModelSpec&,
                         const PriorConfig&, const McmcConfig&);
};

Chain run_chain(const Eigen::VectorXd& y, const ModelSpec& spec,
                const PriorConfig& prior, const McmcConfig& cfg);

}  // namespace stgarch
