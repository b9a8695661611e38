#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string_view>

#include "safeml/ecdf.hpp"

namespace safeml {

enum class Measure { KSD = 0, Kuiper, ADD, WD, WAD };

inline constexpr std::size_t kMeasureCount = 5;
inline constexpr std::array<Measure, kMeasureCount> kAllMeasures = {
    Measure::KSD, Measure::Kuiper, Measure::ADD, Measure::WD, Measure::WAD};

std::string_view to_string(Measure m) noexcept;
std::optional<Measure> parse_measure(std::string_view name) noexcept;

constexpr std::size_t index_of(Measure m) noexcept { return static_cast<std::size_t>(m); }

struct DistanceValue {
  Measure measure = Measure::KSD;
  double value = 0.0;
};

// Two-sample ECDF distances. Every measure is evaluated on the pooled grid of
// both samples; between consecutive grid points both ECDFs are constant, so
// the sums below are exact integrals of the step functions.

/// sup |F_a - F_b|, in [0, 1].
DistanceValue ks_distance(const Ecdf& a, const Ecdf& b);

/// sup (F_a - F_b) + sup (F_b - F_a), each side floored at 0; in [0, 2].
DistanceValue kuiper_distance(const Ecdf& a, const Ecdf& b);

/// Integral of |F_a - F_b| dx (1-Wasserstein distance).
DistanceValue wasserstein_distance(const Ecdf& a, const Ecdf& b);

/// Integral of (F_a - F_b)^2 / (H (1 - H)) dH, H being the pooled-sample ECDF.
/// Grid points where H is 0 or 1 contribute nothing.
DistanceValue anderson_darling_distance(const Ecdf& a, const Ecdf& b);

/// Integral of |F_a - F_b| / sqrt(H (1 - H)) dx with the pooled ECDF H.
DistanceValue wad_distance(const Ecdf& a, const Ecdf& b);

using DistanceSet = std::array<DistanceValue, kMeasureCount>;

/// All five measures from a single pass over the pooled grid, ordered as kAllMeasures.
DistanceSet all_distances(const Ecdf& a, const Ecdf& b);

}  // namespace safeml
