#pragma once

// Independent reference implementations used to cross-check the library.
// They favour obviousness over speed: every ECDF value is a direct count.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

namespace oracle {

inline double ecdf_at(const std::vector<double>& sample, double x) {
  std::size_t count = 0;
  for (double v : sample) {
    if (v <= x) ++count;
  }
  return static_cast<double>(count) / static_cast<double>(sample.size());
}

inline std::vector<double> pooled_points(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> z = a;
  z.insert(z.end(), b.begin(), b.end());
  std::sort(z.begin(), z.end());
  z.erase(std::unique(z.begin(), z.end()), z.end());
  return z;
}

inline std::vector<double> concat(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> w = a;
  w.insert(w.end(), b.begin(), b.end());
  return w;
}

inline double ks(const std::vector<double>& a, const std::vector<double>& b) {
  double best = 0.0;
  for (double z : pooled_points(a, b)) best = std::max(best, std::abs(ecdf_at(a, z) - ecdf_at(b, z)));
  return best;
}

inline double kuiper(const std::vector<double>& a, const std::vector<double>& b) {
  double up = 0.0;
  double down = 0.0;
  for (double z : pooled_points(a, b)) {
    up = std::max(up, ecdf_at(a, z) - ecdf_at(b, z));
    down = std::max(down, ecdf_at(b, z) - ecdf_at(a, z));
  }
  return up + down;
}

inline double wasserstein(const std::vector<double>& a, const std::vector<double>& b) {
  const auto z = pooled_points(a, b);
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < z.size(); ++i) {
    sum += std::abs(ecdf_at(a, z[i]) - ecdf_at(b, z[i])) * (z[i + 1] - z[i]);
  }
  return sum;
}

inline double anderson_darling(const std::vector<double>& a, const std::vector<double>& b) {
  const auto z = pooled_points(a, b);
  const auto w = concat(a, b);
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < z.size(); ++i) {
    const double fw = ecdf_at(w, z[i]);
    if (fw <= 0.0 || fw >= 1.0) continue;
    const double diff = ecdf_at(a, z[i]) - ecdf_at(b, z[i]);
    sum += diff * diff / (fw * (1.0 - fw)) * (ecdf_at(w, z[i + 1]) - fw);
  }
  return sum;
}

inline double wad(const std::vector<double>& a, const std::vector<double>& b) {
  const auto z = pooled_points(a, b);
  const auto w = concat(a, b);
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < z.size(); ++i) {
    const double fw = ecdf_at(w, z[i]);
    if (fw <= 0.0 || fw >= 1.0) continue;
    sum += std::abs(ecdf_at(a, z[i]) - ecdf_at(b, z[i])) / std::sqrt(fw * (1.0 - fw)) * (z[i + 1] - z[i]);
  }
  return sum;
}

inline double normal_pdf(double x, double mu, double sigma) {
  const double u = (x - mu) / sigma;
  return std::exp(-0.5 * u * u) / (sigma * std::sqrt(2.0 * std::numbers::pi));
}

/// Bayes error of two 1-D Gaussian classes, integral of min(P1 p1, P2 p2),
/// by composite Simpson over +-12 sigma around both means.
inline double bayes_error(double mu1, double s1, double mu2, double s2, double p1 = 0.5, int panels = 200000) {
  const double lo = std::min(mu1 - 12.0 * s1, mu2 - 12.0 * s2);
  const double hi = std::max(mu1 + 12.0 * s1, mu2 + 12.0 * s2);
  const double h = (hi - lo) / panels;
  auto f = [&](double x) { return std::min(p1 * normal_pdf(x, mu1, s1), (1.0 - p1) * normal_pdf(x, mu2, s2)); };
  double sum = f(lo) + f(hi);
  for (int i = 1; i < panels; ++i) sum += f(lo + i * h) * (i % 2 == 1 ? 4.0 : 2.0);
  return sum * h / 3.0;
}

/// Random samples of size 2..max_size; about half are drawn from a small
/// integer lattice so ties are common.
class SampleGen {
 public:
  explicit SampleGen(std::uint64_t seed) : rng_(seed) {}

  std::vector<double> sample(std::size_t min_size = 2, std::size_t max_size = 50) {
    std::uniform_int_distribution<std::size_t> size(min_size, max_size);
    const std::size_t n = size(rng_);
    std::vector<double> out(n);
    if (std::bernoulli_distribution(0.5)(rng_)) {
      std::uniform_int_distribution<int> lattice(-5, 5);
      for (double& v : out) v = lattice(rng_) * 0.5;
    } else {
      std::normal_distribution<double> normal(std::uniform_real_distribution<double>(-2.0, 2.0)(rng_),
                                              std::uniform_real_distribution<double>(0.1, 3.0)(rng_));
      for (double& v : out) v = normal(rng_);
    }
    return out;
  }

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

}  // namespace oracle
