#include "qrg/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace qrg {

namespace {

constexpr double kZ95 = 1.959963984540054;
constexpr double kZ999 = 3.090232306167814;  // standard normal 0.999 quantile

}  // namespace

double l2_desc_distance(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end(), std::greater<>());
  std::sort(b.begin(), b.end(), std::greater<>());
  const std::size_t n = std::max(a.size(), b.size());
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double ai = i < a.size() ? a[i] : 0.0;
    const double bi = i < b.size() ? b[i] : 0.0;
    s += (ai - bi) * (ai - bi);
  }
  return std::sqrt(s);
}

double ks_distance(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("ks_distance: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  double d = 0.0;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::fabs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return d;
}

double ks_distance_cdf(std::vector<double> sample, const std::function<double(double)>& cdf) {
  if (sample.empty()) throw std::invalid_argument("ks_distance_cdf: empty sample");
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double f = cdf(sample[i]);
    d = std::max(d, std::fabs(static_cast<double>(i + 1) / n - f));
    d = std::max(d, std::fabs(f - static_cast<double>(i) / n));
  }
  return d;
}

WilsonInterval wilson_interval(std::int64_t successes, std::int64_t trials) {
  if (trials <= 0 || successes < 0 || successes > trials) {
    throw std::invalid_argument("wilson_interval: bad counts");
  }
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double z2 = kZ95 * kZ95;
  const double denom = 1.0 + z2 / n;
  const double center = (p + z2 / (2.0 * n)) / denom;
  const double half = kZ95 * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
  return WilsonInterval{std::max(0.0, center - half), std::min(1.0, center + half)};
}

double empirical_tail(const std::vector<double>& values, double threshold) {
  if (values.empty()) throw std::invalid_argument("empirical_tail: empty sample");
  std::int64_t k = 0;
  for (double v : values) k += v > threshold ? 1 : 0;
  return static_cast<double>(k) / static_cast<double>(values.size());
}

double tv_distance_pmf(const std::vector<double>& p, const std::vector<double>& q) {
  if (p.size() != q.size()) throw std::invalid_argument("tv_distance_pmf: size mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) s += std::fabs(p[i] - q[i]);
  return 0.5 * s;
}

double least_squares_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw std::invalid_argument("least_squares_slope: need two matched points");
  }
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0) throw std::invalid_argument("least_squares_slope: degenerate x");
  return sxy / sxx;
}

ChiSquareResult two_sample_chi_square(const std::vector<std::int64_t>& a,
                                      const std::vector<std::int64_t>& b) {
  if (a.size() != b.size() || a.empty()) {
    throw std::invalid_argument("two_sample_chi_square: size mismatch");
  }
  const double na = static_cast<double>(std::accumulate(a.begin(), a.end(), std::int64_t{0}));
  const double nb = static_cast<double>(std::accumulate(b.begin(), b.end(), std::int64_t{0}));
  if (na <= 0.0 || nb <= 0.0) throw std::invalid_argument("two_sample_chi_square: empty sample");
  const double total = na + nb;

  // Pool bins right to left until every pooled expected count reaches 5.
  std::vector<std::pair<double, double>> bins;
  double ca = 0.0, cb = 0.0;
  for (std::size_t i = a.size(); i-- > 0;) {
    ca += static_cast<double>(a[i]);
    cb += static_cast<double>(b[i]);
    const double col = ca + cb;
    if (na * col / total >= 5.0 && nb * col / total >= 5.0) {
      bins.emplace_back(ca, cb);
      ca = cb = 0.0;
    }
  }
  if (ca + cb > 0.0) {
    if (bins.empty()) {
      bins.emplace_back(ca, cb);
    } else {
      bins.back().first += ca;
      bins.back().second += cb;
    }
  }

  double stat = 0.0;
  for (const auto& [oa, ob] : bins) {
    const double col = oa + ob;
    const double ea = na * col / total;
    const double eb = nb * col / total;
    stat += (oa - ea) * (oa - ea) / ea + (ob - eb) * (ob - eb) / eb;
  }
  const auto dof = static_cast<std::int64_t>(bins.size()) - 1;
  if (dof < 1) return ChiSquareResult{stat, 0.0, 0, true};

  // Wilson-Hilferty approximation to the chi-square 0.999 quantile.
  const double k = static_cast<double>(dof);
  const double t = 1.0 - 2.0 / (9.0 * k) + kZ999 * std::sqrt(2.0 / (9.0 * k));
  const double threshold = k * t * t * t;
  return ChiSquareResult{stat, threshold, dof, stat <= threshold};
}

void DiscreteKernel::validate() const {
  if (k_states < 1) throw std::invalid_argument("kernel: need at least one state");
  if (rows.size() != static_cast<std::size_t>(k_states * k_states)) {
    throw std::invalid_argument("kernel: row storage size mismatch");
  }
  const double floor_mass = epsilon / static_cast<double>(k_states);
  for (std::int64_t i = 0; i < k_states; ++i) {
    double s = 0.0;
    for (std::int64_t j = 0; j < k_states; ++j) {
      const double e = entry(i, j);
      if (e < floor_mass - 1e-15) throw std::invalid_argument("kernel: entry below floor");
      s += e;
    }
    if (std::fabs(s - 1.0) > 1e-12) throw std::invalid_argument("kernel: row not stochastic");
  }
}

std::vector<double> DiscreteKernel::step(const std::vector<double>& dist) const {
  if (dist.size() != static_cast<std::size_t>(k_states)) {
    throw std::invalid_argument("kernel: distribution size mismatch");
  }
  std::vector<double> out(static_cast<std::size_t>(k_states), 0.0);
  for (std::int64_t i = 0; i < k_states; ++i) {
    const double di = dist[static_cast<std::size_t>(i)];
    if (di == 0.0) continue;
    for (std::int64_t j = 0; j < k_states; ++j) {
      out[static_cast<std::size_t>(j)] += di * entry(i, j);
    }
  }
  return out;
}

DiscreteKernel mixture_circulant_kernel(std::int64_t k_states, double epsilon,
                                        const std::vector<double>& shift_weights) {
  if (k_states < 1) throw std::invalid_argument("kernel: need at least one state");
  if (!(epsilon > 0.0 && epsilon <= 1.0)) {
    throw std::invalid_argument("kernel: epsilon must lie in (0,1]");
  }
  if (shift_weights.size() != static_cast<std::size_t>(k_states)) {
    throw std::invalid_argument("kernel: need one weight per shift");
  }
  double ws = 0.0;
  for (double w : shift_weights) {
    if (w < 0.0) throw std::invalid_argument("kernel: negative shift weight");
    ws += w;
  }
  if (ws <= 0.0) throw std::invalid_argument("kernel: zero shift weights");

  DiscreteKernel k;
  k.k_states = k_states;
  k.epsilon = epsilon;
  k.rows.assign(static_cast<std::size_t>(k_states * k_states), 0.0);
  const double u = epsilon / static_cast<double>(k_states);
  for (std::int64_t i = 0; i < k_states; ++i) {
    for (std::int64_t s = 0; s < k_states; ++s) {
      const std::int64_t j = (i + s) % k_states;
      k.rows[static_cast<std::size_t>(i * k_states + j)] =
          u + (1.0 - epsilon) * shift_weights[static_cast<std::size_t>(s)] / ws;
    }
  }
  return k;
}

double tv_to_uniform(const std::vector<double>& dist) {
  if (dist.empty()) throw std::invalid_argument("tv_to_uniform: empty distribution");
  const double u = 1.0 / static_cast<double>(dist.size());
  double s = 0.0;
  for (double d : dist) s += std::fabs(d - u);
  return 0.5 * s;
}

}  // namespace qrg
