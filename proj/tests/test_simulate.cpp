#include <doctest.h>

#include <cmath>

#include "stgarch/simulate.hpp"

using namespace stgarch;

namespace {

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

ParamState garch11_state(double nu) {
  ParamState st;
  st.phi = Eigen::VectorXd::Constant(1, 0.8);
  st.theta = Eigen::VectorXd::Constant(1, 0.1);
  st.omega0 = 0.25;
  st.alpha = Eigen::VectorXd::Constant(1, 0.5);
  st.beta = Eigen::VectorXd::Constant(1, 0.1);
  st.lambda = 1.0;
  st.gamma = 5.0;
  st.nu = nu;
  return st;
}

}  // namespace

TEST_CASE("constant-variance gaussian draws have the right moments") {
  ModelSpec spec;  // no dynamics: y_t = mu + sqrt(omega) eps_t
  spec.error_family = ErrorFamily::Gaussian;
  spec.transition = Transition::None;
  ParamState st;
  st.mu = 1.5;
  st.omega0 = 2.25;
  const Eigen::VectorXd y = simulate_dataset(spec, st, 200000, 3);
  const double mean = y.mean();
  const double var = (y.array() - mean).square().mean();
  CHECK(mean == doctest::Approx(1.5).epsilon(0.01));
  CHECK(var == doctest::Approx(2.25).epsilon(0.02));
}

TEST_CASE("student-t innovations keep unit variance scaling and fat tails") {
  // the scale mixture is normalized so Var(u_t | h_t) = h_t for every nu
  ModelSpec spec;
  spec.error_family = ErrorFamily::StudentT;
  spec.transition = Transition::None;
  ParamState st;
  st.omega0 = 1.0;
  st.nu = 12.0;
  const Eigen::VectorXd y = simulate_dataset(spec, st, 400000, 5);
  const double var = y.array().square().mean();
  CHECK(var == doctest::Approx(1.0).epsilon(0.02));
  // kurtosis 3(nu-2)/(nu-4) = 3.75 at nu = 12
  const double kurt = y.array().pow(4).mean() / (var * var);
  CHECK(kurt == doctest::Approx(3.75).epsilon(0.06));

  st.nu = 4.0;
  const Eigen::VectorXd z = simulate_dataset(spec, st, 400000, 7);
  CHECK(z.array().square().mean() == doctest::Approx(1.0).epsilon(0.05));
  CHECK(z.array().pow(4).mean() / std::pow(z.array().square().mean(), 2) > 6.0);
}

TEST_CASE("filter recovers the generating innovations and variances") {
  const ModelSpec spec = garch11_spec(ErrorFamily::StudentT);
  const ParamState st = garch11_state(6.0);
  const SimPath path = simulate_path(spec, st, 400, 17);
  const FilterOutput f = filter(path.y, spec, st);
  REQUIRE(f.finite);
  // the filter starts from flat pre-sample values; the MA and GARCH
  // recursions forget them geometrically, so compare after a transient
  const int skip = 60;
  for (int k = skip; k < 400 - spec.p; ++k) {
    CHECK(std::abs(f.u[k] - path.u[spec.p + k]) < 1e-10);
    CHECK(std::abs(f.h[k] - path.h[spec.p + k]) < 1e-8);
  }
}

TEST_CASE("simulation is seed deterministic") {
  const ModelSpec spec = garch11_spec(ErrorFamily::StudentT);
  const ParamState st = garch11_state(5.0);
  const Eigen::VectorXd a = simulate_dataset(spec, st, 200, 42);
  const Eigen::VectorXd b = simulate_dataset(spec, st, 200, 42);
  const Eigen::VectorXd c = simulate_dataset(spec, st, 200, 43);
  CHECK(a == b);
  CHECK(a != c);
}

TEST_CASE("explosive parameterizations are rejected after retries") {
  const ModelSpec spec = garch11_spec(ErrorFamily::Gaussian);
  ParamState st = garch11_state(5.0);
  st.lambda = 80.0;  // in the support, but the recursion diverges
  st.gamma = 50.0;
  CHECK_THROWS_AS(simulate_dataset(spec, st, 500, 1), std::runtime_error);
}

TEST_CASE("states outside the support are rejected up front") {
  const ModelSpec spec = garch11_spec(ErrorFamily::Gaussian);
  ParamState st = garch11_state(5.0);
  st.alpha[0] = 0.7;
  st.beta[0] = 0.5;
  CHECK_THROWS_AS(simulate_dataset(spec, st, 100, 1), std::invalid_argument);
}

TEST_CASE("dgp labels") {
  CHECK(dgp_name(Dgp::Gaussian) == "gaussian");
  CHECK(dgp_name(Dgp::StudentT3) == "student_t3");
  CHECK(dgp_name(Dgp::StudentT6) == "student_t6");
}

TEST_CASE("small replication study produces a complete report") {
  StudyConfig cfg = default_study_config();
  cfg.n_reps = 4;
  cfg.sample_sizes = {120};
  cfg.dgps = {Dgp::Gaussian};
  cfg.seed = 11;
  cfg.n_threads = 4;
  McmcConfig mcmc;
  mcmc.iterations = 400;
  mcmc.burn_in = 200;
  const PriorConfig prior;
  const StudyReport rep = run_study(cfg, mcmc, prior);

  CHECK(rep.seed == 11);
  CHECK(rep.failed_replications == 0);
  const double rate = rep.decision_rates.at({"gaussian", 120});
  CHECK(rate >= 0.0);
  CHECK(rate <= 1.0);
  for (const std::string& tag : {std::string("gaussian"), std::string("student_t")}) {
    for (const std::string& par :
         {std::string("alpha"), std::string("beta"), std::string("lambda"),
          std::string("gamma")}) {
      const double mse = rep.mse.at({"gaussian", 120, tag, par});
      CHECK(std::isfinite(mse));
      CHECK(mse >= 0.0);
    }
    CHECK(rep.pred_mse_mean.at({"gaussian", 120, tag}) >= 0.0);
    CHECK(rep.pred_mse_median.at({"gaussian", 120, tag}) >= 0.0);
  }
}

TEST_CASE("studies are reproducible for a fixed seed") {
  StudyConfig cfg = default_study_config();
  cfg.n_reps = 2;
  cfg.sample_sizes = {100};
  cfg.dgps = {Dgp::StudentT6};
  cfg.seed = 5;
  McmcConfig mcmc;
  mcmc.iterations = 200;
  mcmc.burn_in = 100;
  const PriorConfig prior;
  const StudyReport a = run_study(cfg, mcmc, prior);
  const StudyReport b = run_study(cfg, mcmc, prior);
  CHECK(a.mse == b.mse);
  CHECK(a.decision_rates == b.decision_rates);
  CHECK(a.pred_mse_mean == b.pred_mse_mean);
}
