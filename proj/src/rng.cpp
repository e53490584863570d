#include "qrg/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace qrg {

double RngStream::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u, v, s;
  do {
    u = 2.0 * uniform() - 1.0;
    v = 2.0 * uniform() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  double f = std::sqrt(-2.0 * std::log(s) / s);
  spare_ = v * f;
  has_spare_ = true;
  return u * f;
}

namespace {

// Knuth's product-of-uniforms method; cost grows linearly in the mean.
std::uint64_t poisson_small(RngStream& rng, double mean) {
  const double limit = std::exp(-mean);
  double prod = 1.0;
  std::uint64_t k = 0;
  do {
    ++k;
    prod *= rng.uniform();
  } while (prod > limit);
  return k - 1;
}

// Transformed rejection with squeeze (Hormann's PTRS), valid for mean >= 10.
std::uint64_t poisson_ptrs(RngStream& rng, double mean) {
  const double slam = std::sqrt(mean);
  const double loglam = std::log(mean);
  const double b = 0.931 + 2.53 * slam;
  const double a = -0.059 + 0.02483 * b;
  const double invalpha = 1.1239 + 1.1328 / (b - 3.4);
  const double vr = 0.9277 - 3.6224 / (b - 2.0);
  while (true) {
    const double u = rng.uniform() - 0.5;
    const double v = rng.uniform();
    const double us = 0.5 - std::fabs(u);
    const double kf = std::floor((2.0 * a / us + b) * u + mean + 0.43);
    if (us >= 0.07 && v <= vr) return static_cast<std::uint64_t>(kf);
    if (kf < 0.0 || (us < 0.013 && v > us)) continue;
    if (std::log(v) + std::log(invalpha) - std::log(a / (us * us) + b) <=
        kf * loglam - mean - std::lgamma(kf + 1.0)) {
      return static_cast<std::uint64_t>(kf);
    }
  }
}

}  // namespace

std::uint64_t RngStream::poisson(double mean) {
  if (!(mean >= 0.0) || !std::isfinite(mean)) {
    throw std::domain_error("poisson: mean must be finite and nonnegative");
  }
  if (mean == 0.0) return 0;
  return mean < 10.0 ? poisson_small(*this, mean) : poisson_ptrs(*this, mean);
}

std::uint64_t RngStream::binomial(std::uint64_t n, double p) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw std::domain_error("binomial: p must lie in [0, 1]");
  }
  if (n == 0 || p == 0.0) return 0;
  if (p == 1.0) return n;
  if (p > 0.5) return n - binomial(n, 1.0 - p);
  // Geometric skipping: cost O(n*p + 1). All call sites here keep n*p small.
  const double log_q = std::log1p(-p);
  std::uint64_t count = 0;
  std::uint64_t pos = 0;
  while (true) {
    double u;
    do {
      u = 1.0 - uniform();
    } while (u == 0.0);
    const double skip = std::floor(std::log(u) / log_q);
    if (skip >= static_cast<double>(n)) break;  // jumped past the end
    pos += static_cast<std::uint64_t>(skip) + 1;
    if (pos > n) break;
    ++count;
  }
  return count;
}

std::uint64_t RngStream::uniform_int(std::uint64_t n) {
  if (n == 0) throw std::domain_error("uniform_int: n must be positive");
  while (true) {
    const std::uint64_t x = engine_();
    const __uint128_t m = static_cast<__uint128_t>(x) * n;
    const std::uint64_t lo = static_cast<std::uint64_t>(m);
    if (lo < n) {
      const std::uint64_t threshold = (0ull - n) % n;
      if (lo < threshold) continue;
    }
    return static_cast<std::uint64_t>(m >> 64);
  }
}

}  // namespace qrg
