#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace safeml {

/// Empirical CDF of a one-dimensional sample.
///
/// Stores the sample as a sorted multiset (ties are kept). Evaluation is the
/// right-continuous step function F(x) = #{v <= x} / n, so F is 0 below the
/// minimum and exactly 1 at and above the maximum.
class Ecdf {
 public:
  /// Throws Error(EmptySample) for an empty span and Error(NonFiniteValue)
  /// if any element is NaN or infinite.
  explicit Ecdf(std::span<const double> samples);
  Ecdf(std::initializer_list<double> samples);

  double evaluate(double x) const;

  /// Number of stored values <= x.
  std::size_t count_at_or_below(double x) const noexcept;

  std::span<const double> values() const noexcept { return values_; }
  std::size_t size() const noexcept { return values_.size(); }
  double min() const noexcept { return values_.front(); }
  double max() const noexcept { return values_.back(); }

  friend bool operator==(const Ecdf&, const Ecdf&) = default;

 private:
  std::vector<double> values_;
};

inline Ecdf build_ecdf(std::span<const double> samples) { return Ecdf(samples); }

/// Sorted, duplicate-free union of both samples.
std::vector<double> pooled_grid(const Ecdf& a, const Ecdf& b);

}  // namespace safeml
