#include "stgarch/model.hpp"

#include <cmath>
#include <stdexcept>

namespace stgarch {

namespace {

constexpr double kLogPi = 1.1447298858494001741434273513531;
constexpr double kLog2Pi = 1.8378770664093454835606594728112;

double stable_logistic(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

}  // namespace

double transition(Transition kind, double u, double gamma) {
  switch (kind) {
    case Transition::Exponential: {
      const double a = gamma * u * u;
      return -std::expm1(-a);
    }
    case Transition::Logistic:
      return stable_logistic(gamma * u);
    case Transition::Logistic2:
      return stable_logistic(-gamma * u);
    case Transition::None:
      break;
  }
  throw std::invalid_argument("transition: kind must not be None");
}

double logpdf_gaussian(double u, double h) {
  if (!(h > 0.0)) throw std::domain_error("logpdf_gaussian: h must be positive");
  return -0.5 * (kLog2Pi + std::log(h) + u * u / h);
}

double logpdf_student_t(double u, double nu, double h) {
  if (!(nu > 2.0)) throw std::domain_error("logpdf_student_t: nu must exceed 2");
  if (!(h > 0.0)) throw std::domain_error("logpdf_student_t: h must be positive");
  const double sc = (nu - 2.0) * h;
  return std::lgamma(0.5 * (nu + 1.0)) - std::lgamma(0.5 * nu) -
         0.5 * std::log(sc) - 0.5 * kLogPi -
         0.5 * (nu + 1.0) * std::log1p(u * u / sc);
}

FilterOutput filter(const Eigen::VectorXd& y, const ModelSpec& spec,
                    const ParamState& state) {
  const int n = static_cast<int>(y.size());
  const int p = spec.p;
  if (n <= p) throw std::invalid_argument("filter: series shorter than AR order");
  const int m = n - p;

  // pre-sample variance level: sample variance of y
  double h0 = 1.0;
  if (n > 1) {
    const double mean = y.mean();
    h0 = (y.array() - mean).square().sum() / static_cast<double>(n - 1);
  }
  if (!(h0 > 0.0)) h0 = 1.0;

  Eigen::VectorXd ufull = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd hfull = Eigen::VectorXd::Constant(n, h0);

  auto u_at = [&](int t) { return t >= 0 ? ufull[t] : 0.0; };
  auto h_at = [&](int t) { return t >= 0 ? hfull[t] : h0; };

  FilterOutput out;
  out.u.resize(m);
  out.h.resize(m);

  double loglik = 0.0;
  for (int t = p; t < n; ++t) {
    double h = state.omega0;
    for (int j = 1; j <= spec.r; ++j) h += state.beta[j - 1] * h_at(t - j);
    for (int j = 1; j <= spec.s; ++j) {
      const double ul = u_at(t - j);
      h += state.alpha[j - 1] * ul * ul;
    }
    if (spec.transition != Transition::None) {
      const double ul = u_at(t - 1);
      h += state.lambda * ul * ul * transition(spec.transition, ul, state.gamma);
    }
    if (!std::isfinite(h) || !(h > 0.0)) return out;
    hfull[t] = h;

    double u = y[t] - state.mu;
    for (int j = 1; j <= spec.p; ++j) u -= state.phi[j - 1] * y[t - j];
    for (int j = 1; j <= spec.q; ++j) u -= state.theta[j - 1] * u_at(t - j);
    if (spec.include_m_term) u -= state.delta * std::sqrt(h);
    if (!std::isfinite(u)) return out;
    ufull[t] = u;

    out.u[t - p] = u;
    out.h[t - p] = h;
    loglik += spec.error_family == ErrorFamily::StudentT
                  ? logpdf_student_t(u, state.nu, h)
                  : logpdf_gaussian(u, h);
  }
  if (!std::isfinite(loglik)) return out;
  out.loglik = loglik;
  out.finite = true;
  return out;
}

double one_step_variance(const Eigen::VectorXd& y, const ModelSpec& spec,
                         const ParamState& state, const FilterOutput& f) {
  const int m = static_cast<int>(f.u.size());
  double h = state.omega0;
  for (int j = 1; j <= spec.r; ++j)
    h += state.beta[j - 1] * (m - j >= 0 ? f.h[m - j] : f.h[0]);
  for (int j = 1; j <= spec.s; ++j) {
    const double ul = m - j >= 0 ? f.u[m - j] : 0.0;
    h += state.alpha[j - 1] * ul * ul;
  }
  if (spec.transition != Transition::None) {
    const double ul = m >= 1 ? f.u[m - 1] : 0.0;
    h += state.lambda * ul * ul * transition(spec.transition, ul, state.gamma);
  }
  return h;
}

DesignMatrices design_matrices(const Eigen::VectorXd& y, const ModelSpec& spec,
                               const ParamState& state, const FilterOutput& f) {
  const int n = static_cast<int>(y.size());
  const int p = spec.p;
  const int m = n - p;
  DesignMatrices d;
  d.X.resize(m, spec.p);
  d.A.resize(m, spec.q);
  for (int t = 0; t < m; ++t) {
    for (int j = 1; j <= spec.p; ++j) d.X(t, j - 1) = y[p + t - j];
    for (int j = 1; j <= spec.q; ++j) {
      const int idx = t - j;  // lagged residual index into f.u; pre-sample = 0
      d.A(t, j - 1) = idx >= 0 ? f.u[idx] : 0.0;
    }
  }
  d.htilde = f.h.array().sqrt();
  if (spec.error_family == ErrorFamily::StudentT) {
    const double c = (state.nu - 2.0) / state.nu;
    d.hdiag = state.w.array() * c * f.h.array();
  } else {
    d.hdiag = f.h;
  }
  return d;
}

double conditional_loglik(const Eigen::VectorXd& y, const ModelSpec& spec,
                          const ParamState& state) {
  const FilterOutput f = filter(y, spec, state);
  if (!f.finite) return -std::numeric_limits<double>::infinity();
  const int m = static_cast<int>(f.u.size());
  Eigen::ArrayXd d;
  if (spec.error_family == ErrorFamily::StudentT) {
    if (state.w.size() != m)
      throw std::invalid_argument("conditional_loglik: w length mismatch");
    const double c = (state.nu - 2.0) / state.nu;
    d = state.w.array() * c * f.h.array();
  } else {
    d = f.h.array();
  }
  const double ll =
      -0.5 * (m * kLog2Pi + d.log().sum() + (f.u.array().square() / d).sum());
  return std::isfinite(ll) ? ll : -std::numeric_limits<double>::infinity();
}

}  // namespace stgarch
