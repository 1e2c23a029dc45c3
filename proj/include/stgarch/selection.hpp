#pragma once

#include <Eigen/Dense>
#include <string>

namespace stgarch {

enum class MlEstimator { NewtonRaftery, ShiftedGamma };

struct MarginalLikelihood {
  double log_value = 0.0;
  MlEstimator estimator = MlEstimator::NewtonRaftery;
  double d_or_lambda = 0.0;  // damping d, or fitted lambda
  int iterations_used = 0;
  bool converged = true;
};

/// Damped harmonic-mean fixed-point estimator of the log marginal
/// likelihood, iterated in log space with log-sum-exp accumulation.
MarginalLikelihood newton_raftery(const Eigen::VectorXd& logliks, double d = 0.01);

/// Shifted-gamma estimator: fits l_max - l_k ~ Gamma(n_params/2, scale)
/// and applies the harmonic-mean identity.
MarginalLikelihood shifted_gamma(const Eigen::VectorXd& logliks, int n_params);

enum class Verdict { AcceptM1, AcceptM2 };

struct BayesDecision {
  double log_b12 = 0.0;
  double threshold = 1.0;
  Verdict verdict = Verdict::AcceptM2;
  std::string evidence_label;
};

/// Decision rule B12 > k2 P(H2) / (k1 P(H1)), with the evidence label from
/// the 2 ln B bands (0-2, 2-6, 6-10, >10). Exact ties keep model 2.
BayesDecision bayes_test(const MarginalLikelihood& ml1, const MarginalLikelihood& ml2,
                         double k1 = 1.0, double k2 = 1.0, double p1 = 0.5,
                         double p2 = 0.5);

}  // namespace stgarch
