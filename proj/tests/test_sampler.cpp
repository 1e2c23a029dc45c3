#include <doctest.h>

#include <cmath>

#include "stgarch/sampler.hpp"
#include "stgarch/simulate.hpp"

using namespace stgarch;

namespace {

// dense textbook GLS, no shortcuts: (M' H^-1 M)^-1 M' H^-1 b
GlsMoments gls_oracle(const Eigen::MatrixXd& M, const Eigen::VectorXd& hdiag,
                      const Eigen::VectorXd& b) {
  const Eigen::MatrixXd Hinv = hdiag.asDiagonal().inverse();
  GlsMoments g;
  g.cov = (M.transpose() * Hinv * M).inverse();
  g.mean = g.cov * M.transpose() * Hinv * b;
  return g;
}

ModelSpec garch11_spec(ErrorFamily fam) {
  ModelSpec s;
  s.p = 1;
  s.q = 1;
  s.r = 1;
  s.s = 1;
  s.error_family = fam;
  s.transition = Transition::Exponential;
  return s;
}

}  // namespace

TEST_CASE("gls conditional matches the dense oracle") {
  Rng rng(3);
  const int n = 40, k = 3;
  Eigen::MatrixXd M(n, k);
  Eigen::VectorXd hdiag(n), b(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < k; ++j) M(i, j) = rng.normal();
    hdiag[i] = 0.5 + rng.uniform();
    b[i] = rng.normal();
  }
  const GlsMoments got = gls_conditional(M, hdiag, b);
  const GlsMoments want = gls_oracle(M, hdiag, b);
  CHECK((got.mean - want.mean).cwiseAbs().maxCoeff() < 1e-10);
  CHECK((got.cov - want.cov).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("gls conditional rejects singular designs") {
  Eigen::MatrixXd M(10, 2);
  M.col(0).setOnes();
  M.col(1).setOnes();  // exactly collinear
  Eigen::VectorXd hdiag = Eigen::VectorXd::Ones(10);
  Eigen::VectorXd b = Eigen::VectorXd::LinSpaced(10, 0.0, 1.0);
  CHECK_THROWS_AS(gls_conditional(M, hdiag, b), SingularDesign);
}

TEST_CASE("gaussian draws reproduce the target moments") {
  GlsMoments g;
  g.mean = Eigen::Vector2d(1.0, -2.0);
  g.cov.resize(2, 2);
  g.cov << 2.0, 0.6, 0.6, 0.5;
  Rng rng(11);
  const int n = 200000;
  Eigen::Vector2d sum = Eigen::Vector2d::Zero();
  Eigen::Matrix2d sum2 = Eigen::Matrix2d::Zero();
  for (int i = 0; i < n; ++i) {
    const Eigen::Vector2d x = gaussian_draw(g, rng);
    sum += x;
    sum2 += x * x.transpose();
  }
  const Eigen::Vector2d mean = sum / n;
  const Eigen::Matrix2d cov = sum2 / n - mean * mean.transpose();
  // 4 standard errors of the mean: 4 sqrt(var/n)
  CHECK(std::abs(mean[0] - 1.0) < 4.0 * std::sqrt(2.0 / n));
  CHECK(std::abs(mean[1] + 2.0) < 4.0 * std::sqrt(0.5 / n));
  CHECK((cov - g.cov).cwiseAbs().maxCoeff() < 0.05);
}

TEST_CASE("metropolis accept: sure moves and blocked moves") {
  Rng rng(5);
  for (int i = 0; i < 50; ++i) {
    CHECK(metropolis_accept(-10.0, -5.0, rng));  // uphill always accepted
    CHECK_FALSE(metropolis_accept(
        -1.0, -std::numeric_limits<double>::infinity(), rng));
    CHECK(metropolis_accept(-std::numeric_limits<double>::infinity(), -3.0, rng));
  }
}

TEST_CASE("metropolis accept targets a two-state distribution") {
  // states {0, 1} with pi = (0.3, 0.7); symmetric flip proposal
  const double logp[2] = {std::log(0.3), std::log(0.7)};
  Rng rng(29);
  int state = 0;
  long in_one = 0;
  const long steps = 400000;
  for (long i = 0; i < steps; ++i) {
    const int prop = 1 - state;
    if (metropolis_accept(logp[state], logp[prop], rng)) state = prop;
    in_one += state;
  }
  const double freq = static_cast<double>(in_one) / steps;
  CHECK(freq == doctest::Approx(0.7).epsilon(0.01));
}

TEST_CASE("mean-block draws match the analytic conditional mean") {
  // phi | rest is Gaussian with a closed-form GLS mean; the empirical mean
  // of repeated draws has to land on it
  const ModelSpec spec = garch11_spec(ErrorFamily::Gaussian);
  ParamState st;
  st.phi = Eigen::VectorXd::Constant(1, 0.5);
  st.theta = Eigen::VectorXd::Constant(1, 0.1);
  st.omega0 = 0.25;
  st.alpha = Eigen::VectorXd::Constant(1, 0.3);
  st.beta = Eigen::VectorXd::Constant(1, 0.2);
  st.lambda = 1.0;
  st.gamma = 5.0;
  const Eigen::VectorXd y = simulate_dataset(spec, st, 300, 7);

  const FilterOutput f = filter(y, spec, st);
  const DesignMatrices d = design_matrices(y, spec, st, f);
  Eigen::VectorXd b = y.tail(d.htilde.size()).array() - st.mu;
  b -= d.A * st.theta;
  const GlsMoments g = gls_conditional(d.X, d.hdiag, b);

  Rng rng(31);
  const int n = 20000;
  double sum = 0.0, sum2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = draw_phi(y, spec, st, rng)[0];
    sum += x;
    sum2 += x * x;
  }
  const double mean = sum / n;
  const double var = sum2 / n - mean * mean;
  CHECK(std::abs(mean - g.mean[0]) < 4.0 * std::sqrt(g.cov(0, 0) / n));
  CHECK(var == doctest::Approx(g.cov(0, 0)).epsilon(0.1));
}

TEST_CASE("mixing-weight conditional is the posterior slice") {
  // holding everything else fixed, log_posterior as a function of one w_t
  // must be an inverse-gamma log kernel with the sampled parameters
  const ModelSpec spec = garch11_spec(ErrorFamily::StudentT);
  ParamState st;
  st.phi = Eigen::VectorXd::Constant(1, 0.5);
  st.theta = Eigen::VectorXd::Constant(1, 0.1);
  st.omega0 = 0.25;
  st.alpha = Eigen::VectorXd::Constant(1, 0.3);
  st.beta = Eigen::VectorXd::Constant(1, 0.2);
  st.lambda = 1.0;
  st.gamma = 5.0;
  st.nu = 6.0;
  const Eigen::VectorXd y = simulate_dataset(spec, st, 120, 9);
  const int m = static_cast<int>(y.size()) - spec.p;
  st.w = Eigen::VectorXd::Ones(m);

  const FilterOutput f = filter(y, spec, st);
  const int t = 17;
  const double a = 0.5 * (st.nu + 1.0);
  const double bb =
      0.5 * (st.nu + f.u[t] * f.u[t] * st.nu / ((st.nu - 2.0) * f.h[t]));
  const PriorConfig prior;

  auto slice = [&](double w) {
    ParamState s2 = st;
    s2.w[t] = w;
    return log_posterior(y, spec, s2, prior);
  };
  auto ig_kernel = [&](double w) { return -(a + 1.0) * std::log(w) - bb / w; };
  const double c0 = slice(1.0) - ig_kernel(1.0);
  for (double w : {0.2, 0.5, 2.0, 7.0}) {
    CHECK(slice(w) - ig_kernel(w) == doctest::Approx(c0).epsilon(1e-10));
  }

  // and the sampled weights have the matching conditional mean b/(a-1)
  Rng rng(41);
  const int reps = 30000;
  double sum = 0.0;
  for (int i = 0; i < reps; ++i) sum += draw_mixing_weights(y, spec, st, rng)[t];
  const double expect = bb / (a - 1.0);
  // IG variance b^2/((a-1)^2 (a-2))
  const double sd = expect / std::sqrt(a - 2.0);
  CHECK(std::abs(sum / reps - expect) < 4.0 * sd / std::sqrt(double(reps)));
}

TEST_CASE("nu draws hold a posterior slice invariant in distribution") {
  // with data simulated from the model, the log(nu-2) walk must stay inside
  // the support and accept at a sane rate
  const ModelSpec spec = garch11_spec(ErrorFamily::StudentT);
  ParamState st;
  st.phi = Eigen::VectorXd::Constant(1, 0.5);
  st.theta = Eigen::VectorXd::Constant(1, 0.1);
  st.omega0 = 0.25;
  st.alpha = Eigen::VectorXd::Constant(1, 0.3);
  st.beta = Eigen::VectorXd::Constant(1, 0.2);
  st.lambda = 1.0;
  st.gamma = 5.0;
  st.nu = 6.0;
  const Eigen::VectorXd y = simulate_dataset(spec, st, 200, 13);
  st.w = Eigen::VectorXd::Ones(y.size() - spec.p);
  const PriorConfig prior;

  Rng rng(17);
  int acc = 0;
  double nu = st.nu;
  for (int i = 0; i < 2000; ++i) {
    ParamState s2 = st;
    s2.nu = nu;
    const NuDraw nd = draw_nu(y, spec, s2, prior, 0.6, rng);
    nu = nd.nu;
    acc += nd.accepted;
    CHECK(nu > 2.0);
  }
  CHECK(acc > 100);
  CHECK(acc < 1950);
}

TEST_CASE("chains are reproducible bit for bit") {
  const ModelSpec spec = garch11_spec(ErrorFamily::StudentT);
  ParamState truth;
  truth.phi = Eigen::VectorXd::Constant(1, 0.8);
  truth.theta = Eigen::VectorXd::Constant(1, 0.1);
  truth.omega0 = 0.25;
  truth.alpha = Eigen::VectorXd::Constant(1, 0.5);
  truth.beta = Eigen::VectorXd::Constant(1, 0.1);
  truth.lambda = 1.0;
  truth.gamma = 5.0;
  truth.nu = 6.0;
  const Eigen::VectorXd y = simulate_dataset(spec, truth, 150, 21);

  McmcConfig cfg;
  cfg.iterations = 120;
  cfg.burn_in = 40;
  cfg.seed = 99;
  const PriorConfig prior;
  const Chain a = run_chain(y, spec, prior, cfg);
  const Chain b = run_chain(y, spec, prior, cfg);
  REQUIRE(a.draws.size() == b.draws.size());
  CHECK(a.logliks == b.logliks);
  for (std::size_t i = 0; i < a.draws.size(); ++i) {
    CHECK(a.draws[i].omega0 == b.draws[i].omega0);
    CHECK(a.draws[i].alpha == b.draws[i].alpha);
    CHECK(a.draws[i].beta == b.draws[i].beta);
    CHECK(a.draws[i].lambda == b.draws[i].lambda);
    CHECK(a.draws[i].gamma == b.draws[i].gamma);
    CHECK(a.draws[i].nu == b.draws[i].nu);
    CHECK(a.draws[i].phi == b.draws[i].phi);
  }
}

TEST_CASE("adaptation lands acceptance rates in a workable band") {
  const ModelSpec spec = garch11_spec(ErrorFamily::StudentT);
  ParamState truth;
  truth.phi = Eigen::VectorXd::Constant(1, 0.8);
  truth.theta = Eigen::VectorXd::Constant(1, 0.1);
  truth.omega0 = 0.25;
  truth.alpha = Eigen::VectorXd::Constant(1, 0.5);
  truth.beta = Eigen::VectorXd::Constant(1, 0.1);
  truth.lambda = 1.0;
  truth.gamma = 5.0;
  truth.nu = 6.0;
  const Eigen::VectorXd y = simulate_dataset(spec, truth, 500, 33);

  McmcConfig cfg;
  cfg.iterations = 2000;
  cfg.burn_in = 1000;
  cfg.seed = 7;
  const PriorConfig prior;
  const Chain c = run_chain(y, spec, prior, cfg);
  REQUIRE(c.draws.size() == 1000);
  CHECK(c.acceptance.at("variance") > 0.1);
  CHECK(c.acceptance.at("variance") < 0.6);
  CHECK(c.acceptance.at("nu") > 0.1);
  CHECK(c.acceptance.at("nu") < 0.7);
  // every retained draw stays in the support
  for (const ParamState& st : c.draws) CHECK(st.in_support(spec));
  for (int i = 0; i < c.logliks.size(); ++i) CHECK(std::isfinite(c.logliks[i]));
}
