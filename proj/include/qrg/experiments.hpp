#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "qrg/stats.hpp"

namespace qrg {

class RngStream;

struct MetricRecord {
  std::string name;
  double estimate;
  double error;  // standard error or bound slack, metric-dependent
  bool pass;
  std::string note;
};

struct RawTable {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

// Deterministic given (config, master_seed): replica r always uses the
// stream derived from (master_seed, stream_base + r), and nothing about the
// worker pool is echoed into the report.
struct ExperimentReport {
  std::string experiment;
  std::vector<std::pair<std::string, std::string>> config;
  std::int64_t replicas = 0;
  std::uint64_t master_seed = 0;
  std::vector<MetricRecord> metrics;
  std::vector<RawTable> raw;

  bool all_pass() const;
  std::string to_json() const;
  std::string to_text() const;
  std::string raw_csv() const;
};

// Runs fn(replica, rng) for replica in [0, replicas) on a pool of workers.
// Streams are keyed by replica index, so the worker count cannot change any
// result; the first exception thrown by a replica is rethrown after join.
void run_replicas(std::int64_t replicas, std::uint64_t master_seed, int workers,
                  std::uint64_t stream_base,
                  const std::function<void(std::int64_t, RngStream&)>& fn);

struct Theorem1Config {
  double c = 1.0;
  std::int64_t n = 10000;
  std::int64_t replicas = 2000;
  std::vector<double> big_a = {1.0, 2.0, 4.0};
  std::vector<double> small_delta = {0.05, 0.1, 0.2};
  std::uint64_t seed = 0;
  int workers = 1;
};

// Largest-component tail at exact criticality (a = 0): upper-tail decay over
// the big_a grid and the lower-tail bound 15 delta^{3/5}.
ExperimentReport experiment_theorem1(const Theorem1Config& cfg);

struct WalkConvergenceConfig {
  double c = 1.0;
  double a = 1.0;
  std::int64_t n = 100000;
  std::int64_t replicas = 200;
  std::vector<double> s_grid = {0.5, 1.0, 2.0};
  std::uint64_t seed = 0;
  int workers = 1;
};

// Rescaled walk against the drift curve a*s - lambda*s^2/(2c), variance at
// s = 1, and the scaled maximal jump.
ExperimentReport experiment_walk_convergence(const WalkConvergenceConfig& cfg);

struct Theorem2Config {
  double c = 1.0;
  double a = 1.0;
  std::int64_t n = 30000;
  std::int64_t replicas = 2000;
  double dt = 1e-3;
  double horizon = 10.0;
  double mark_rate_factor = -1.0;  // < 0 means the lambda/c default
  double min_length = -1.0;        // < 0 means the 5*dt default
  std::uint64_t seed = 0;
  int workers = 1;
};

// Ordered rescaled component sizes and largest-component surplus against
// excursion lengths and marks of the limit reflection.
ExperimentReport experiment_theorem2(const Theorem2Config& cfg);

struct LateComponentsConfig {
  double c = 1.0;
  double a = 0.0;
  std::int64_t n = 10000;
  std::int64_t replicas = 2000;
  double delta = 0.5;
  std::vector<double> y_grid = {1.0, 2.0, 4.0, 8.0};
  std::uint64_t seed = 0;
  int workers = 1;
};

// Probability that a component of size >= delta*n^{2/3} avoids every vertex
// label up to y*n^{1/3}, per y; the flag is pointwise monotone in y.
ExperimentReport experiment_late_components(const LateComponentsConfig& cfg);

struct DoeblinConfig {
  std::int64_t k_states = 64;
  double epsilon = 0.5;
  std::int64_t start_state = 0;
  std::int64_t n_max = 20;
  std::int64_t kernels = 5;
  std::uint64_t seed = 0;
};

// Exact distribution iteration on mixture circulant kernels: geometric
// total-variation bound, monotone decay, uniform stationarity.
ExperimentReport doeblin_check(const DiscreteKernel& kernel, std::int64_t start_state,
                               std::int64_t n_max);
ExperimentReport experiment_doeblin(const DoeblinConfig& cfg);

}  // namespace qrg
