#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <limits>

namespace stgarch {

enum class ErrorFamily { Gaussian, StudentT };
enum class Transition { None, Exponential, Logistic, Logistic2 };

/// Model orders and structural switches.
struct ModelSpec {
  int p = 0;  // AR order
  int q = 0;  // MA order
  int r = 0;  // GARCH lag order (on h)
  int s = 0;  // ARCH lag order (on u^2)
  ErrorFamily error_family = ErrorFamily::Gaussian;
  Transition transition = Transition::None;
  bool include_m_term = false;

  bool valid() const {
    if (p < 0 || q < 0 || r < 0 || s < 0) return false;
    if (p + q + r + s < 1) return false;
    if (transition != Transition::None && s < 1) return false;
    return true;
  }
};

/// One point in parameter space. Vector lengths must match the ModelSpec;
/// w (latent mixing variables) has length N-p and is only used for Student-t.
struct ParamState {
  double mu = 0.0;
  Eigen::VectorXd phi;    // length p
  Eigen::VectorXd theta;  // length q
  double delta = 0.0;
  double omega0 = 1.0;    // variance intercept, > 0
  Eigen::VectorXd alpha;  // length s, >= 0
  Eigen::VectorXd beta;   // length r, >= 0
  double lambda = 1.0;    // asymmetry magnitude, > 0 when transition active
  double gamma = 1.0;     // transition slope, > 0
  double nu = 10.0;       // degrees of freedom, > 2
  Eigen::VectorXd w;      // length N-p, > 0

  /// Support check for the non-latent block (omega0, alpha, beta, lambda, nu).
  bool in_support(const ModelSpec& spec) const {
    if (!(omega0 > 0.0)) return false;
    if ((alpha.array() < 0.0).any() || (beta.array() < 0.0).any()) return false;
    if (alpha.sum() + beta.sum() >= 1.0) return false;
    if (spec.transition != Transition::None && !(lambda > 0.0)) return false;
    if (spec.error_family == ErrorFamily::StudentT && !(nu > 2.0)) return false;
    return true;
  }
};

/// Residuals and conditional variances aligned to t = p+1..N, plus the
/// marginal log-likelihood. finite == false means the recursion left the
/// representable range; loglik is then -inf.
struct FilterOutput {
  Eigen::VectorXd u;
  Eigen::VectorXd h;
  double loglik = -std::numeric_limits<double>::infinity();
  bool finite = false;
};

/// Vectorized regression form of the mean equation: y = X phi + A theta
/// + Htilde psi + u, with diagonal matrices stored as vectors.
struct DesignMatrices {
  Eigen::MatrixXd X;        // (N-p) x p lagged y
  Eigen::MatrixXd A;        // (N-p) x q lagged u
  Eigen::VectorXd htilde;   // diag sqrt(h_t)
  Eigen::VectorXd hdiag;    // diag w_t ((nu-2)/nu) h_t, or h_t for Gaussian
};

/// Smooth transition function f(u, gamma) in [0,1]. kind must not be None.
double transition(Transition kind, double u, double gamma);

/// Gaussian log-density with mean 0 and variance h.
double logpdf_gaussian(double u, double h);

/// Log-density of the variance-h Student-t: the classical t density in
/// u / sqrt(((nu-2)/nu) h) so that Var(u) = h for nu > 2.
double logpdf_student_t(double u, double nu, double h);

/// Runs the residual/variance recursions over y and accumulates the
/// marginal log-likelihood under spec.error_family. Pre-sample residuals
/// are zero; pre-sample variances equal the sample variance of y.
FilterOutput filter(const Eigen::VectorXd& y, const ModelSpec& spec,
                    const ParamState& state);

/// One-step variance extension: h at time N+1 given the filtered series.
double one_step_variance(const Eigen::VectorXd& y, const ModelSpec& spec,
                         const ParamState& state, const FilterOutput& f);

/// Builds the regression-form matrices from y and a filter pass.
DesignMatrices design_matrices(const Eigen::VectorXd& y, const ModelSpec& spec,
                               const ParamState& state, const FilterOutput& f);

/// Mixture-conditional log-likelihood given the latent weights w:
/// -1/2 sum_t [ log(2 pi d_t) + z_t^2 / d_t ] with d_t the diagonal of H.
/// For the Gaussian family d_t = h_t and w is ignored.
double conditional_loglik(const Eigen::VectorXd& y, const ModelSpec& spec,
                          const ParamState& state);

}  // namespace stgarch
