#include "safeml/error_bound.hpp"

#include <cmath>

#include <Eigen/Cholesky>

#include "safeml/error.hpp"

namespace safeml {

namespace {

constexpr double kRelativeRidge = 1e-9;
// Used when the trace itself is zero (every sample identical).
constexpr double kAbsoluteRidge = 1e-12;

void check_summary(const GaussianSummary& s) {
  if (s.cov.rows() != s.dim() || s.cov.cols() != s.dim() || s.dim() == 0) {
    throw Error(ErrorCode::DimensionMismatch, "covariance shape does not match mean length");
  }
  if (!s.mean.allFinite() || !s.cov.allFinite()) {
    throw Error(ErrorCode::NonFiniteValue, "Gaussian summary contains non-finite values");
  }
}

}  // namespace

Eigen::MatrixXd regularized_covariance(const Eigen::MatrixXd& cov) {
  const double d = static_cast<double>(cov.rows());
  double eps = kRelativeRidge * cov.trace() / d;
  if (!(eps > kAbsoluteRidge)) eps = kAbsoluteRidge;
  // Well-conditioned matrices pass through untouched; the ridge is applied
  // only when some Cholesky pivot falls to the ridge scale or below.
  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() == Eigen::Success) {
    const Eigen::VectorXd pivots = llt.matrixL().toDenseMatrix().diagonal();
    if ((pivots.array().square() > eps).all()) return cov;
  }
  Eigen::MatrixXd out = cov;
  out.diagonal().array() += eps;
  return out;
}

double log_determinant_spd(const Eigen::MatrixXd& m) {
  Eigen::LLT<Eigen::MatrixXd> llt(m);
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorCode::SingularCovariance, "matrix is not positive definite");
  }
  return 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
}

double theta(double lambda, const GaussianSummary& s1, const GaussianSummary& s2) {
  if (!(lambda > 0.0 && lambda < 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "lambda must lie strictly between 0 and 1");
  }
  check_summary(s1);
  check_summary(s2);
  if (s1.dim() != s2.dim()) {
    throw Error(ErrorCode::DimensionMismatch, "class summaries have different dimensions");
  }

  const Eigen::MatrixXd c1 = regularized_covariance(s1.cov);
  const Eigen::MatrixXd c2 = regularized_covariance(s2.cov);
  const Eigen::MatrixXd blend = lambda * c1 + (1.0 - lambda) * c2;

  Eigen::LLT<Eigen::MatrixXd> llt(blend);
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorCode::SingularCovariance, "blended covariance is not invertible");
  }
  const Eigen::VectorXd dmu = s2.mean - s1.mean;
  const double quadratic = dmu.dot(llt.solve(dmu));
  const double log_det_blend =
      2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
  const double log_det_ratio = log_det_blend - lambda * log_determinant_spd(c1) -
                               (1.0 - lambda) * log_determinant_spd(c2);

  return 0.5 * lambda * (1.0 - lambda) * quadratic + 0.5 * log_det_ratio;
}

BoundResult chernoff_bound(const BoundInput& input) {
  const double p1 = input.prior1;
  const double p2 = input.prior2;
  if (!(p1 >= 0.0 && p1 <= 1.0 && p2 >= 0.0 && p2 <= 1.0) || std::fabs(p1 + p2 - 1.0) > 1e-12) {
    throw Error(ErrorCode::InvalidArgument, "class priors must be probabilities summing to 1");
  }
  BoundResult out;
  out.theta = theta(input.lambda, input.s1, input.s2);
  out.p_error = std::pow(p1, input.lambda) * std::pow(p2, 1.0 - input.lambda) *
                std::exp(-out.theta);
  out.p_correct = 1.0 - out.p_error;
  return out;
}

BoundResult bhattacharyya(BoundInput input) {
  input.lambda = 0.5;
  return chernoff_bound(input);
}

}  // namespace safeml
