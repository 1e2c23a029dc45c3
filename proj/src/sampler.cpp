#include "stgarch/sampler.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <cmath>

namespace stgarch {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// regression target for one mean block, with the other blocks subtracted
Eigen::VectorXd block_residual(const Eigen::VectorXd& y, const ModelSpec& spec,
                               const ParamState& state, const DesignMatrices& d,
                               bool keep_phi, bool keep_theta, bool keep_psi) {
  const int m = static_cast<int>(d.htilde.size());
  Eigen::VectorXd b = y.tail(m).array() - state.mu;
  if (!keep_phi && spec.p > 0) b -= d.X * state.phi;
  if (!keep_theta && spec.q > 0) b -= d.A * state.theta;
  if (!keep_psi && spec.include_m_term) b -= state.delta * d.htilde;
  return b;
}

struct VarianceTransform {
  const ModelSpec& spec;
  int dim() const {
    return 1 + spec.s + spec.r +
           (spec.transition != Transition::None ? 2 : 0);
  }
  Eigen::VectorXd pack(const ParamState& st) const {
    Eigen::VectorXd z(dim());
    int k = 0;
    z[k++] = std::log(st.omega0);
    const double rest = 1.0 - st.alpha.sum() - st.beta.sum();
    for (int j = 0; j < spec.s; ++j) z[k++] = std::log(st.alpha[j] / rest);
    for (int j = 0; j < spec.r; ++j) z[k++] = std::log(st.beta[j] / rest);
    if (spec.transition != Transition::None) {
      z[k++] = std::log(st.lambda);
      z[k++] = std::log(st.gamma);
    }
    return z;
  }
  // writes the coefficient block of state; returns log |d(params)/d(z)|
  double unpack(const Eigen::VectorXd& z, ParamState& st) const {
    int k = 0;
    st.omega0 = std::exp(z[k]);
    double logjac = z[k];
    ++k;
    const int nc = spec.s + spec.r;
    double denom = 1.0;
    for (int j = 0; j < nc; ++j) denom += std::exp(z[k + j]);
    double logsum = 0.0;
    for (int j = 0; j < spec.s; ++j) {
      st.alpha[j] = std::exp(z[k + j]) / denom;
      logsum += std::log(st.alpha[j]);
    }
    for (int j = 0; j < spec.r; ++j) {
      st.beta[j] = std::exp(z[k + spec.s + j]) / denom;
      logsum += std::log(st.beta[j]);
    }
    k += nc;
    logjac += logsum + std::log(1.0 / denom);  // det of the logistic map
    if (spec.transition != Transition::None) {
      st.lambda = std::exp(z[k]);
      st.gamma = std::exp(z[k + 1]);
      logjac += z[k] + z[k + 1];
      k += 2;
    }
    return logjac;
  }
};

}  // namespace

GlsMoments gls_conditional(const Eigen::MatrixXd& M, const Eigen::VectorXd& hdiag,
                           const Eigen::VectorXd& b) {
  const Eigen::ArrayXd wts = hdiag.array().inverse();
  const Eigen::MatrixXd P =
      M.transpose() * (M.array().colwise() * wts).matrix();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(P);
  const double emin = es.eigenvalues().minCoeff();
  const double emax = es.eigenvalues().maxCoeff();
  if (!(emin > 0.0) || emax / emin > 1e12)
    throw SingularDesign("gls_conditional: design is numerically singular");
  GlsMoments g;
  g.cov = P.inverse();
  g.mean = g.cov * (M.transpose() * (b.array() * wts).matrix());
  return g;
}

Eigen::VectorXd gaussian_draw(const GlsMoments& g, Rng& rng) {
  Eigen::LLT<Eigen::MatrixXd> llt(g.cov);
  Eigen::VectorXd z(g.mean.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = rng.normal();
  return g.mean + llt.matrixL() * z;
}

bool metropolis_accept(double logp_current, double logp_proposal, Rng& rng) {
  if (logp_proposal == kNegInf) {
    rng.uniform();  // keep the stream aligned regardless of outcome
    return false;
  }
  const double u = rng.uniform();
  if (logp_current == kNegInf) return true;
  return std::log(u) < logp_proposal - logp_current;
}

Eigen::VectorXd draw_phi(const Eigen::VectorXd& y, const ModelSpec& spec,
                         const ParamState& state, Rng& rng) {
  const FilterOutput f = filter(y, spec, state);
  const DesignMatrices d = design_matrices(y, spec, state, f);
  const Eigen::VectorXd b = block_residual(y, spec, state, d, true, false, false);
  return gaussian_draw(gls_conditional(d.X, d.hdiag, b), rng);
}

Eigen::VectorXd draw_theta(const Eigen::VectorXd& y, const ModelSpec& spec,
                           const ParamState& state, Rng& rng) {
  const FilterOutput f = filter(y, spec, state);
  const DesignMatrices d = design_matrices(y, spec, state, f);
  const Eigen::VectorXd b = block_residual(y, spec, state, d, false, true, false);
  return gaussian_draw(gls_conditional(d.A, d.hdiag, b), rng);
}

double draw_psi(const Eigen::VectorXd& y, const ModelSpec& spec,
                const ParamState& state, Rng& rng) {
  const FilterOutput f = filter(y, spec, state);
  const DesignMatrices d = design_matrices(y, spec, state, f);
  const Eigen::VectorXd b = block_residual(y, spec, state, d, false, false, true);
  return gaussian_draw(gls_conditional(d.htilde, d.hdiag, b), rng)[0];
}

VarianceDraw draw_variance_block(const Eigen::VectorXd& y, const ModelSpec& spec,
                                 const ParamState& state, const PriorConfig& prior,
                                 double scale, Rng& rng) {
  const VarianceTransform tr{spec};
  ParamState cur = state;
  Eigen::VectorXd z = tr.pack(state);
  const double jac_cur = tr.unpack(z, cur);
  const double lp_cur = log_posterior(y, spec, cur, prior) + jac_cur;

  Eigen::VectorXd zp = z;
  for (Eigen::Index i = 0; i < zp.size(); ++i) zp[i] += scale * rng.normal();
  ParamState prop = state;
  const double jac_prop = tr.unpack(zp, prop);
  const double lp_prop = log_posterior(y, spec, prop, prior) + jac_prop;

  VarianceDraw out;
  const bool acc = metropolis_accept(lp_cur, lp_prop, rng);
  const ParamState& chosen = acc ? prop : state;
  out.omega0 = chosen.omega0;
  out.alpha = chosen.alpha;
  out.beta = chosen.beta;
  out.lambda = chosen.lambda;
  out.gamma = chosen.gamma;
  out.accepted = acc;
  return out;
}

NuDraw draw_nu(const Eigen::VectorXd& y, const ModelSpec& spec,
               const ParamState& state, const PriorConfig& prior, double scale,
               Rng& rng) {
  const double z = std::log(state.nu - 2.0);
  const double zp = z + scale * rng.normal();
  ParamState prop = state;
  prop.nu = 2.0 + std::exp(zp);
  const double lp_cur = log_posterior(y, spec, state, prior) + z;
  const double lp_prop = log_posterior(y, spec, prop, prior) + zp;
  const bool acc = metropolis_accept(lp_cur, lp_prop, rng);
  return {acc ? prop.nu : state.nu, acc};
}

Eigen::VectorXd draw_mixing_weights(const Eigen::VectorXd& y, const ModelSpec& spec,
                                    const ParamState& state, Rng& rng) {
  if (!(state.nu > 2.0))
    throw std::domain_error("draw_mixing_weights: nu must exceed 2");
  const FilterOutput f = filter(y, spec, state);
  const int m = static_cast<int>(f.u.size());
  const double nu = state.nu;
  const double a = 0.5 * (nu + 1.0);
  Eigen::VectorXd w(m);
  for (int t = 0; t < m; ++t) {
    const double b = 0.5 * (nu + f.u[t] * f.u[t] * nu / ((nu - 2.0) * f.h[t]));
    w[t] = rng.inverse_gamma(a, b);
  }
  return w;
}

Sampler::Sampler(Eigen::VectorXd y, ModelSpec spec, PriorConfig prior,
                 McmcConfig cfg)
    : y_(std::move(y)),
      spec_(spec),
      prior_(std::move(prior)),
      cfg_(cfg),
      scale_variance_(cfg.scale_variance),
      scale_nu_(cfg.scale_nu) {
  if (!spec_.valid()) throw std::invalid_argument("Sampler: invalid ModelSpec");
  if (y_.size() <= spec_.p + 10)
    throw std::invalid_argument("Sampler: not enough data");
}

ParamState Sampler::initial_state() const {
  ParamState st;
  st.phi = Eigen::VectorXd::Zero(spec_.p);
  st.theta = Eigen::VectorXd::Zero(spec_.q);
  const double mean = y_.mean();
  const double var =
      (y_.array() - mean).square().sum() / std::max<double>(1, y_.size() - 1);
  st.omega0 = 0.2 * std::max(var, 1e-6);
  st.alpha = Eigen::VectorXd::Constant(spec_.s, spec_.s > 0 ? 0.2 / spec_.s : 0.0);
  st.beta = Eigen::VectorXd::Constant(spec_.r, spec_.r > 0 ? 0.4 / spec_.r : 0.0);
  st.lambda = 0.5;
  st.gamma = prior_.gamma0;
  st.nu = 8.0;
  if (prior_.nu_max > 2.0) st.nu = std::min(st.nu, 0.5 * (2.0 + prior_.nu_max));
  if (prior_.bounds) {
    const SupportBox& b = *prior_.bounds;
    st.omega0 = 0.5 * (b.omega_lo + b.omega_hi);
    st.alpha.setConstant(0.5 * (b.alpha_lo + b.alpha_hi));
    st.beta.setConstant(0.5 * (b.beta_lo + b.beta_hi));
    st.lambda = 0.5 * (b.lambda_lo + b.lambda_hi);
    st.gamma = 0.5 * (b.gamma_lo + b.gamma_hi);
  }
  st.w = Eigen::VectorXd::Ones(y_.size() - spec_.p);
  return st;
}

void Sampler::sweep(ParamState& state, Rng& rng) {
  // mean blocks: exact Gaussian conditionals, reverted if the refreshed
  // recursion leaves the representable range
  auto try_mean_update = [&](auto&& apply) {
    ParamState backup = state;
    apply(state);
    if (!filter(y_, spec_, state).finite) state = backup;
  };
  if (spec_.p > 0)
    try_mean_update([&](ParamState& st) { st.phi = draw_phi(y_, spec_, st, rng); });
  if (spec_.q > 0)
    try_mean_update(
        [&](ParamState& st) { st.theta = draw_theta(y_, spec_, st, rng); });
  if (spec_.include_m_term)
    try_mean_update(
        [&](ParamState& st) { st.delta = draw_psi(y_, spec_, st, rng); });

  const VarianceDraw vd =
      draw_variance_block(y_, spec_, state, prior_, scale_variance_, rng);
  state.omega0 = vd.omega0;
  state.alpha = vd.alpha;
  state.beta = vd.beta;
  state.lambda = vd.lambda;
  state.gamma = vd.gamma;
  ++n_var_;
  n_var_acc_ += vd.accepted;
  last_var_acc_ = vd.accepted;

  if (spec_.error_family == ErrorFamily::StudentT) {
    state.w = draw_mixing_weights(y_, spec_, state, rng);
    const NuDraw nd = draw_nu(y_, spec_, state, prior_, scale_nu_, rng);
    state.nu = nd.nu;
    ++n_nu_;
    n_nu_acc_ += nd.accepted;
    last_nu_acc_ = nd.accepted;
  }
}

void Sampler::adapt(double step) {
  const double target = 0.5 * (cfg_.accept_lo + cfg_.accept_hi);
  scale_variance_ *= std::exp(step * ((last_var_acc_ ? 1.0 : 0.0) - target));
  scale_variance_ = std::clamp(scale_variance_, 1e-4, 10.0);
  if (spec_.error_family == ErrorFamily::StudentT) {
    scale_nu_ *= std::exp(step * ((last_nu_acc_ ? 1.0 : 0.0) - target));
    scale_nu_ = std::clamp(scale_nu_, 1e-4, 10.0);
  }
}

Chain Sampler::run() {
  Rng rng(cfg_.seed);
  ParamState state = initial_state();
  Chain chain;
  chain.spec = spec_;
  chain.seed = cfg_.seed;
  std::vector<double> lls;
  n_var_ = n_var_acc_ = n_nu_ = n_nu_acc_ = 0;

  for (int it = 0; it < cfg_.iterations; ++it) {
    sweep(state, rng);
    if (it < cfg_.burn_in) {
      adapt(std::pow(it + 10.0, -0.6));
      if (it == cfg_.burn_in - 1) n_var_ = n_var_acc_ = n_nu_ = n_nu_acc_ = 0;
      continue;
    }
    if ((it - cfg_.burn_in) % cfg_.thin == 0) {
      chain.draws.push_back(state);
      lls.push_back(filter(y_, spec_, state).loglik);
    }
  }
  chain.logliks = Eigen::Map<Eigen::VectorXd>(lls.data(), lls.size());
  chain.acceptance["variance"] =
      n_var_ > 0 ? static_cast<double>(n_var_acc_) / n_var_ : 0.0;
  if (spec_.error_family == ErrorFamily::StudentT)
    chain.acceptance["nu"] =
        n_nu_ > 0 ? static_cast<double>(n_nu_acc_) / n_nu_ : 0.0;
  return chain;
}

Chain run_chain(const Eigen::VectorXd& y, const ModelSpec& spec,
                const PriorConfig& prior, const McmcConfig& cfg) {
  Sampler s(y, spec, prior, cfg);
  return s.run();
}

}  // namespace stgarch
