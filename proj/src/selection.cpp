#include "stgarch/selection.hpp"

#include <cmath>
#include <stdexcept>

namespace stgarch {

namespace {

double logsumexp2(double a, double b) {
  const double m = std::max(a, b);
  if (!std::isfinite(m)) return m;
  return m + std::log(std::exp(a - m) + std::exp(b - m));
}

double logsumexp(const Eigen::ArrayXd& v) {
  const double m = v.maxCoeff();
  if (!std::isfinite(m)) return m;
  return m + std::log((v - m).exp().sum());
}

}  // namespace

MarginalLikelihood newton_raftery(const Eigen::VectorXd& logliks, double d) {
  if (logliks.size() < 100)
    throw std::invalid_argument("newton_raftery: need at least 100 draws");
  if (!(d > 0.0 && d < 1.0))
    throw std::invalid_argument("newton_raftery: d must lie in (0,1)");
  const int m = static_cast<int>(logliks.size());
  const double shift = logliks.maxCoeff();
  const Eigen::ArrayXd lam = logliks.array() - shift;

  const double log_d = std::log(d);
  const double log_1md = std::log1p(-d);
  const double log_const = log_d + std::log(static_cast<double>(m)) - log_1md;

  // init at the plain harmonic mean
  double ell = std::log(static_cast<double>(m)) - logsumexp(-lam);

  MarginalLikelihood out;
  out.estimator = MlEstimator::NewtonRaftery;
  out.d_or_lambda = d;
  int it = 0;
  for (; it < 500; ++it) {
    Eigen::ArrayXd s(m), num_t(m), den_t(m);
    for (int i = 0; i < m; ++i) {
      s[i] = logsumexp2(log_d + ell, log_1md + lam[i]);
      num_t[i] = lam[i] - s[i];
      den_t[i] = -s[i];
    }
    const double num = logsumexp2(log_const, logsumexp(num_t));
    const double den = logsumexp2(log_const - ell, logsumexp(den_t));
    const double ell_new = num - den;
    const bool done = std::abs(ell_new - ell) < 1e-8;
    ell = ell_new;
    if (done) break;
  }
  out.iterations_used = it + 1;
  out.converged = it < 500;
  out.log_value = ell + shift;
  return out;
}

MarginalLikelihood shifted_gamma(const Eigen::VectorXd& logliks, int n_params) {
  if (logliks.size() < 100)
    throw std::invalid_argument("shifted_gamma: need at least 100 draws");
  if (n_params < 1)
    throw std::invalid_argument("shifted_gamma: n_params must be positive");
  MarginalLikelihood out;
  out.estimator = MlEstimator::ShiftedGamma;

  // The observed maximum is used directly: moment-implied corrections are
  // fragile when occasional deep log-likelihood excursions inflate the
  // sample variance far beyond what the gamma tail model allows.
  const double lmax_obs = logliks.maxCoeff();
  const double lbar = logliks.mean();
  const double s2 =
      (logliks.array() - lbar).square().sum() / (logliks.size() - 1.0);

  if (s2 == 0.0) {  // degenerate sample, lambda undefined
    out.log_value = lmax_obs;
    out.d_or_lambda = 0.0;
    return out;
  }
  const double alpha = 0.5 * n_params;
  // moment match of the gamma scale with the shape held fixed, on lambda < 1
  const double lambda = std::min((lmax_obs - lbar) / alpha, 1.0 - 1e-6);
  out.d_or_lambda = lambda;
  out.log_value = lmax_obs + alpha * std::log1p(-lambda);
  return out;
}

BayesDecision bayes_test(const MarginalLikelihood& ml1, const MarginalLikelihood& ml2,
                         double k1, double k2, double p1, double p2) {
  BayesDecision d;
  d.log_b12 = ml1.log_value - ml2.log_value;
  d.threshold = k2 * p2 / (k1 * p1);
  d.verdict = d.log_b12 > std::log(d.threshold) ? Verdict::AcceptM1 : Verdict::AcceptM2;
  const double band = std::abs(2.0 * d.log_b12);
  if (band <= 2.0)
    d.evidence_label = "Not worth more than a bare mention";
  else if (band <= 6.0)
    d.evidence_label = "Positive";
  else if (band <= 10.0)
    d.evidence_label = "Strong";
  else
    d.evidence_label = "Very strong";
  return d;
}

}  // namespace stgarch
