#pragma once

#include <cstdint>
#include <functional>
#include <vector>

namespace qrg {

// Euclidean distance between descending-sorted vectors, shorter one padded
// with zeros.
double l2_desc_distance(std::vector<double> a, std::vector<double> b);

// Two-sample Kolmogorov-Smirnov statistic.
double ks_distance(std::vector<double> a, std::vector<double> b);

// One-sample KS statistic against a CDF evaluated at the sample points.
double ks_distance_cdf(std::vector<double> sample, const std::function<double(double)>& cdf);

struct WilsonInterval {
  double lower;
  double upper;
};

// 95% score interval for a binomial proportion (z = 1.959963984540054).
WilsonInterval wilson_interval(std::int64_t successes, std::int64_t trials);

// Fraction of entries strictly greater than threshold.
double empirical_tail(const std::vector<double>& values, double threshold);

// Total variation between two pmfs on the same support size.
double tv_distance_pmf(const std::vector<double>& p, const std::vector<double>& q);

// Least-squares slope of y against x.
double least_squares_slope(const std::vector<double>& x, const std::vector<double>& y);

// Two-sample chi-square homogeneity test on integer counts. Bins are pooled
// from the right until every expected count is at least 5; accept means the
// statistic is below the chi-square 0.999 quantile for the pooled dof.
struct ChiSquareResult {
  double statistic;
  double threshold;
  std::int64_t dof;
  bool accept;
};

ChiSquareResult two_sample_chi_square(const std::vector<std::int64_t>& a,
                                      const std::vector<std::int64_t>& b);

// Row-stochastic kernel on k_states points with every entry >= epsilon / k.
struct DiscreteKernel {
  std::int64_t k_states;
  double epsilon;
  std::vector<double> rows;  // row-major, k_states * k_states

  void validate() const;
  double entry(std::int64_t i, std::int64_t j) const {
    return rows[static_cast<std::size_t>(i * k_states + j)];
  }
  std::vector<double> step(const std::vector<double>& dist) const;
};

// epsilon * uniform + (1 - epsilon) * circulant shift mixture; doubly
// stochastic, so the uniform law is stationary.
DiscreteKernel mixture_circulant_kernel(std::int64_t k_states, double epsilon,
                                        const std::vector<double>& shift_weights);

double tv_to_uniform(const std::vector<double>& dist);

}  // namespace qrg
