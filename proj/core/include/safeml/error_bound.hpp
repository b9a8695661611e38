#pragma once

#include "safeml/stats.hpp"

namespace safeml {

// Chernoff upper bound on the misclassification probability between two
// Gaussian classes:
//
//   P(error) = P1^l * P2^(1-l) * exp(-theta(l))
//   theta(l) = l(1-l)/2 * dmu' [l S1 + (1-l) S2]^-1 dmu
//              + 1/2 * log(|l S1 + (1-l) S2| / (|S1|^l |S2|^(1-l)))
//
// with dmu = mu2 - mu1. At l = 1/2 theta is the Bhattacharyya distance.
// A covariance whose Cholesky factor has a pivot at or below
// eps = 1e-9 * trace(S) / d (or that is not positive definite at all) is
// replaced by S + eps * I before any factorization. Determinants are taken
// as log-determinants from a Cholesky factor so they do not underflow for
// wide feature vectors.

struct BoundInput {
  double prior1 = 0.5;
  double prior2 = 0.5;
  GaussianSummary s1;
  GaussianSummary s2;
  double lambda = 0.5;
};

struct BoundResult {
  double theta = 0.0;
  double p_error = 0.0;
  double p_correct = 1.0;
};

/// cov, or cov + eps * I when cov is rank deficient or ill-conditioned.
Eigen::MatrixXd regularized_covariance(const Eigen::MatrixXd& cov);

/// log |m| for a symmetric positive definite matrix; throws SingularCovariance otherwise.
double log_determinant_spd(const Eigen::MatrixXd& m);

double theta(double lambda, const GaussianSummary& s1, const GaussianSummary& s2);

BoundResult chernoff_bound(const BoundInput& input);

/// chernoff_bound with lambda forced to 0.5.
BoundResult bhattacharyya(BoundInput input);

}  // namespace safeml
