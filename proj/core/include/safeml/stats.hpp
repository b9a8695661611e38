#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace safeml {

/// Mean vector and unbiased (n - 1) covariance of a set of row vectors.
struct GaussianSummary {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
  std::size_t count = 0;

  Eigen::Index dim() const noexcept { return mean.size(); }
};

/// Rows are observations, columns are features. Requires at least two rows.
GaussianSummary summarize(const Eigen::Ref<const Eigen::MatrixXd>& rows);

struct CorrelationResult {
  double r = 0.0;
  double p_value = 1.0;
  std::size_t n = 0;
};

/// Sample Pearson correlation with a two-sided p-value from Student's t with
/// n - 2 degrees of freedom. Throws DegenerateInput on length mismatch,
/// n < 3, or a constant series.
CorrelationResult pearson(std::span<const double> x, std::span<const double> y);

/// Spearman rank correlation (average ranks for ties); p-value uses the same
/// t approximation as pearson.
CorrelationResult spearman(std::span<const double> x, std::span<const double> y);

/// Average ranks (1-based) with ties sharing the mean of their positions.
std::vector<double> ranks(std::span<const double> values);

/// Regularized incomplete beta I_x(a, b) via Lentz's continued fraction.
double incomplete_beta(double a, double b, double x);

/// Two-sided tail probability P(|T| >= |t|) for Student's t with df degrees of freedom.
double student_t_two_sided(double t, double df);

double mean(std::span<const double> values);

/// Linear-interpolation quantile (Hyndman-Fan type 7) of an unsorted sample.
double quantile(std::span<const double> values, double q);

struct FiveNumberSummary {
  double min = 0.0;
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
  double max = 0.0;
};

FiveNumberSummary five_number_summary(std::span<const double> values);

}  // namespace safeml
