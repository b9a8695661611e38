#include "safeml/ecdf.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>

#include "safeml/error.hpp"

namespace safeml {

namespace {

std::vector<double> sorted_checked(std::span<const double> samples) {
  if (samples.empty()) {
    throw Error(ErrorCode::EmptySample, "cannot build an ECDF from an empty sample");
  }
  std::vector<double> values(samples.begin(), samples.end());
  for (double v : values) {
    if (!std::isfinite(v)) {
      throw Error(ErrorCode::NonFiniteValue, "ECDF sample contains a non-finite value");
    }
  }
  std::sort(values.begin(), values.end());
  return values;
}

}  // namespace

Ecdf::Ecdf(std::span<const double> samples) : values_(sorted_checked(samples)) {}

Ecdf::Ecdf(std::initializer_list<double> samples)
    : values_(sorted_checked(std::span<const double>(samples.begin(), samples.size()))) {}

std::size_t Ecdf::count_at_or_below(double x) const noexcept {
  return static_cast<std::size_t>(
      std::distance(values_.begin(), std::upper_bound(values_.begin(), values_.end(), x)));
}

double Ecdf::evaluate(double x) const {
  if (!std::isfinite(x)) {
    throw Error(ErrorCode::NonFiniteValue, "ECDF evaluation point is not finite");
  }
  return static_cast<double>(count_at_or_below(x)) / static_cast<double>(values_.size());
}

std::vector<double> pooled_grid(const Ecdf& a, const Ecdf& b) {
  std::vector<double> grid;
  grid.reserve(a.size() + b.size());
  std::merge(a.values().begin(), a.values().end(), b.values().begin(), b.values().end(),
             std::back_inserter(grid));
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  return grid;
}

}  // namespace safeml
