#include "safeml/distances.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

namespace safeml {

std::string_view to_string(Measure m) noexcept {
  switch (m) {
    case Measure::KSD: return "KSD";
    case Measure::Kuiper: return "Kuiper";
    case Measure::ADD: return "ADD";
    case Measure::WD: return "WD";
    case Measure::WAD: return "WAD";
  }
  return "?";
}

std::optional<Measure> parse_measure(std::string_view name) noexcept {
  auto lower = [](char c) { return static_cast<char>(std::tolower(static_cast<unsigned char>(c))); };
  for (Measure m : kAllMeasures) {
    const std::string_view id = to_string(m);
    if (id.size() == name.size() && std::equal(id.begin(), id.end(), name.begin(),
                                               [&](char a, char b) { return lower(a) == lower(b); })) {
      return m;
    }
  }
  return std::nullopt;
}

namespace {

struct Accumulator {
  double ks = 0.0;
  double sup_ab = 0.0;
  double sup_ba = 0.0;
  double wd = 0.0;
  double ad = 0.0;
  double wad = 0.0;
};

// Walks the distinct pooled grid z_0 < z_1 < ... while tracking how many
// values of each sample are <= z_i. Each step sees both ECDFs on the segment
// [z_i, z_{i+1}), where they are constant.
Accumulator accumulate(const Ecdf& a, const Ecdf& b) {
  const auto va = a.values();
  const auto vb = b.values();
  const double na = static_cast<double>(va.size());
  const double nb = static_cast<double>(vb.size());
  const double nw = na + nb;

  Accumulator acc;
  std::size_t ia = 0;
  std::size_t ib = 0;
  while (ia < va.size() || ib < vb.size()) {
    double z;
    if (ib == vb.size() || (ia < va.size() && va[ia] <= vb[ib])) {
      z = va[ia];
    } else {
      z = vb[ib];
    }
    while (ia < va.size() && va[ia] == z) ++ia;
    while (ib < vb.size() && vb[ib] == z) ++ib;

    const double fa = static_cast<double>(ia) / na;
    const double fb = static_cast<double>(ib) / nb;
    const double diff = fa - fb;
    const double abs_diff = std::fabs(diff);

    acc.ks = std::max(acc.ks, abs_diff);
    acc.sup_ab = std::max(acc.sup_ab, diff);
    acc.sup_ba = std::max(acc.sup_ba, -diff);

    const bool last = ia == va.size() && ib == vb.size();
    if (last) break;  // both ECDFs are 1 from here on

    const double z_next = (ib == vb.size() || (ia < va.size() && va[ia] <= vb[ib])) ? va[ia] : vb[ib];
    const double dx = z_next - z;
    acc.wd += abs_diff * dx;

    // Pooled ECDF at z, and its jump at z_next.
    const auto count_w = static_cast<double>(ia + ib);
    const double fw = count_w / nw;
    const double weight = fw * (1.0 - fw);
    if (weight > 0.0) {
      std::size_t jump = 0;
      for (std::size_t j = ia; j < va.size() && va[j] == z_next; ++j) ++jump;
      for (std::size_t j = ib; j < vb.size() && vb[j] == z_next; ++j) ++jump;
      const double dfw = static_cast<double>(jump) / nw;
      acc.ad += diff * diff / weight * dfw;
      acc.wad += abs_diff / std::sqrt(weight) * dx;
    }
  }
  return acc;
}

}  // namespace

DistanceValue ks_distance(const Ecdf& a, const Ecdf& b) {
  return {Measure::KSD, accumulate(a, b).ks};
}

DistanceValue kuiper_distance(const Ecdf& a, const Ecdf& b) {
  const auto acc = accumulate(a, b);
  return {Measure::Kuiper, acc.sup_ab + acc.sup_ba};
}

DistanceValue wasserstein_distance(const Ecdf& a, const Ecdf& b) {
  return {Measure::WD, accumulate(a, b).wd};
}

DistanceValue anderson_darling_distance(const Ecdf& a, const Ecdf& b) {
  return {Measure::ADD, accumulate(a, b).ad};
}

DistanceValue wad_distance(const Ecdf& a, const Ecdf& b) {
  return {Measure::WAD, accumulate(a, b).wad};
}

DistanceSet all_distances(const Ecdf& a, const Ecdf& b) {
  const auto acc = accumulate(a, b);
  return {{{Measure::KSD, acc.ks},
           {Measure::Kuiper, acc.sup_ab + acc.sup_ba},
           {Measure::ADD, acc.ad},
           {Measure::WD, acc.wd},
           {Measure::WAD, acc.wad}}};
}

}  // namespace safeml
