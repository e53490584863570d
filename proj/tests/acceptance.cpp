// Acceptance gate: fourteen go/no-go checks at full scale, one line each.
// Every threshold is pinned here; the exit code is the number of failures.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "qrg/cli.hpp"
#include "qrg/experiments.hpp"
#include "qrg/exploration.hpp"
#include "qrg/model.hpp"
#include "qrg/rng.hpp"
#include "qrg/sampler.hpp"
#include "qrg/stats.hpp"

namespace {

using namespace qrg;

constexpr std::uint64_t kSeed = cli::kDefaultSeed;
int g_workers = 1;

// Disjoint stream bases for the direct loops; experiments key their own.
constexpr std::uint64_t kBaseOracle = 100000;
constexpr std::uint64_t kBaseLaw = 200000;
constexpr std::uint64_t kBaseVisits = 300000;
constexpr std::uint64_t kBaseStopped = 400000;

const MetricRecord* find_metric(const ExperimentReport& rep, const std::string& name) {
  for (const auto& m : rep.metrics) {
    if (m.name == name) return &m;
  }
  return nullptr;
}

bool metric_pass(const ExperimentReport& rep, const std::string& name, std::ostream& out) {
  const MetricRecord* m = find_metric(rep, name);
  if (m == nullptr) {
    out << " [missing metric " << name << "]";
    return false;
  }
  out << " " << name << "=" << m->estimate << (m->pass ? "" : " FAIL");
  return m->pass;
}

double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// Shared full-scale runs, each paid for by the first criterion that needs it.
std::optional<ExperimentReport> g_tail;
std::optional<ExperimentReport> g_walk;

const ExperimentReport& tail_report() {
  if (!g_tail) {
    Theorem1Config cfg;
    cfg.c = 1.0;
    cfg.n = 10000;
    cfg.replicas = 2000;
    cfg.big_a = {1.0, 2.0, 4.0};
    cfg.small_delta = {0.05, 0.1, 0.2};
    cfg.seed = kSeed;
    cfg.workers = g_workers;
    g_tail = experiment_theorem1(cfg);
  }
  return *g_tail;
}

const ExperimentReport& walk_report() {
  if (!g_walk) {
    WalkConvergenceConfig cfg;
    cfg.c = 1.0;
    cfg.a = 1.0;
    cfg.n = 100000;
    cfg.replicas = 200;
    cfg.s_grid = {0.5, 1.0, 2.0};
    cfg.seed = kSeed;
    cfg.workers = g_workers;
    g_walk = experiment_walk_convergence(cfg);
  }
  return *g_walk;
}

// 1. Walk replay and union-find agree exactly on sizes and surpluses.
bool check_oracle_equivalence(std::ostream& out) {
  std::int64_t mismatches = 0, total = 0;
  for (std::int64_t n = 2; n <= 30; ++n) {
    const ModelParams params = window_params(1.0, 0.0, n);
    for (std::int64_t rep = 0; rep < 500; ++rep) {
      RngStream rng = RngStream::for_replica(kSeed, kBaseOracle + static_cast<std::uint64_t>(n) * 1000 +
                                                         static_cast<std::uint64_t>(rep));
      const GraphRealization g = sample_realization(params, rng);
      const Decomposition ref = decompose(g);
      const auto [path, got] = explore_realization(g);
      ++total;
      bool ok = got.ordered_sizes == ref.ordered_sizes;
      if (ok) {
        auto key = [](const Decomposition& d) {
          std::vector<std::pair<std::int64_t, std::int64_t>> k;
          for (const auto& comp : d.components) {
            k.emplace_back(static_cast<std::int64_t>(comp.interval_ids.size()), comp.surplus);
          }
          std::sort(k.begin(), k.end());
          return k;
        };
        ok = key(got) == key(ref);
      }
      if (!ok) ++mismatches;
    }
  }
  out << " " << mismatches << " mismatches over " << total << " realizations";
  return mismatches == 0;
}

// 2. Interval-length law: mean, boundary atom, KS of the continuous part.
bool check_interval_law(std::ostream& out) {
  const CutGammaLaw law(1.0);
  RngStream rng = RngStream::for_replica(kSeed, kBaseLaw);
  const std::int64_t reps = 1000000;
  double sum = 0.0;
  std::int64_t at_cut = 0;
  std::vector<double> continuous;
  continuous.reserve(300000);
  for (std::int64_t i = 0; i < reps; ++i) {
    const double x = law.sample(rng);
    sum += x;
    if (x == law.c) {
      ++at_cut;
    } else {
      continuous.push_back(x);
    }
  }
  const double mean = sum / static_cast<double>(reps);
  const double atom = static_cast<double>(at_cut) / static_cast<double>(reps);
  const double ks =
      ks_distance_cdf(std::move(continuous), [&law](double x) { return law.continuous_cdf(x); });
  out << " mean=" << mean << " atom=" << atom << " ks=" << ks;
  return std::fabs(mean - 0.89636168) < 0.003 && std::fabs(atom - 0.73575888) < 0.003 &&
         ks < 0.005;
}

// 3. Curve identity F(beta, lambda) = mean_interval_length(lambda*beta)/lambda.
bool check_curve_identity(std::ostream& out) {
  double worst = 0.0;
  for (int i = 0; i < 10; ++i) {
    const double beta = 0.25 + 0.25 * i;
    for (int j = 0; j < 10; ++j) {
      const double lambda = 0.4 + 0.15 * j;
      const double lhs = critical_curve_F(beta, lambda);
      const double rhs = mean_interval_length(lambda * beta) / lambda;
      worst = std::max(worst, std::fabs(lhs - rhs));
    }
  }
  out << " max identity gap " << worst << " over 100 grid points";
  return worst < 1e-12;
}

// 4. Largest-component upper tail: strictly decreasing, slope in [-2.2, -1.0].
bool check_tail_exponent(std::ostream& out) {
  const ExperimentReport& rep = tail_report();
  bool ok = metric_pass(rep, "tail_strictly_decreasing", out);
  ok = metric_pass(rep, "tail_loglog_slope", out) && ok;
  ok = metric_pass(rep, "partial_fraction", out) && ok;
  return ok;
}

// 5. Small-component bound 15*delta^{3/5} plus the Wilson margin.
bool check_small_component_bound(std::ostream& out) {
  const ExperimentReport& rep = tail_report();
  bool ok = true;
  for (const auto& m : rep.metrics) {
    if (m.name.rfind("small_p_d", 0) == 0) {
      out << " " << m.name << "=" << m.estimate << (m.pass ? "" : " FAIL");
      ok = ok && m.pass;
    }
  }
  return ok;
}

// 6. Rescaled walk mean against the drift curve a*s - lambda*s^2/2.
bool check_drift_curve(std::ostream& out) {
  const ExperimentReport& rep = walk_report();
  bool ok = true;
  for (const auto& m : rep.metrics) {
    if (m.name.rfind("drift_absdev_s", 0) == 0) {
      out << " " << m.name << "=" << m.estimate << (m.pass ? "" : " FAIL");
      ok = ok && m.pass;
    }
  }
  return ok;
}

// 7. Unit quadratic variation at s = 1.
bool check_quadratic_variation(std::ostream& out) {
  return metric_pass(walk_report(), "var_zbar_s1", out);
}

// 8. Scaled maximal jump stays small.
bool check_max_jump(std::ostream& out) {
  return metric_pass(walk_report(), "max_jump_scaled_mean", out);
}

// 9. Visit-count scaling: medians of nu_2 and of max |nu_1 - i|, each over
// n^{1/3}, stay within a factor 3 across three decades of n.
bool check_visit_counts(std::ostream& out) {
  const std::vector<std::int64_t> sizes = {1000, 10000, 100000};
  std::vector<double> med2, med1;
  for (std::size_t d = 0; d < sizes.size(); ++d) {
    const std::int64_t n = sizes[d];
    const double n13 = std::cbrt(static_cast<double>(n));
    const auto budget = static_cast<std::int64_t>(2.0 * n13 * n13);
    const ModelParams params = window_params(1.0, 0.0, n);
    std::vector<double> r2, r1;
    for (std::int64_t rep = 0; rep < 200; ++rep) {
      RngStream rng = RngStream::for_replica(
          kSeed, kBaseVisits + d * 1000 + static_cast<std::uint64_t>(rep));
      const WalkPath path = explore_lazy(params, rng, budget);
      const auto vc = visit_counts(path);
      const auto steps = static_cast<std::size_t>(path.steps());
      const auto it2 = vc.find(2);
      const double nu2 =
          it2 == vc.end() ? 0.0 : static_cast<double>(it2->second[steps - 1]);
      const auto& nu1 = vc.at(1);
      double dev = 0.0;
      for (std::size_t i = 0; i < steps; ++i) {
        dev = std::max(dev, std::fabs(static_cast<double>(nu1[i]) - static_cast<double>(i + 1)));
      }
      r2.push_back(nu2 / n13);
      r1.push_back(dev / n13);
    }
    med2.push_back(median_of(r2));
    med1.push_back(median_of(r1));
  }
  const auto spread = [](const std::vector<double>& v) {
    const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    return *lo > 0.0 ? *hi / *lo : std::numeric_limits<double>::infinity();
  };
  const double s2 = spread(med2), s1 = spread(med1);
  out << " nu2 medians";
  for (double v : med2) out << " " << v;
  out << " (spread " << s2 << "), nu1 dev medians";
  for (double v : med1) out << " " << v;
  out << " (spread " << s1 << ")";
  return s2 < 3.0 && s1 < 3.0;
}

// 10. Size and surplus against the reflected-path limit: KS of the largest
// rescaled component and TV of surplus vs marks.
bool check_limit_match(std::ostream& out) {
  Theorem2Config cfg;
  cfg.c = 1.0;
  cfg.a = 1.0;
  cfg.n = 30000;
  cfg.replicas = 2000;
  cfg.dt = 1e-3;
  cfg.horizon = 10.0;
  cfg.seed = kSeed;
  cfg.workers = g_workers;
  const ExperimentReport rep = experiment_theorem2(cfg);
  bool ok = metric_pass(rep, "ks_rank1", out);
  ok = metric_pass(rep, "tv_surplus_marks", out) && ok;
  return ok;
}

// 11. Stopped overcounting martingale: unit mean, Markov bound at the level.
bool check_stopped_martingale(std::ostream& out) {
  const ModelParams params = window_params(1.0, 0.0, 10000);
  bool ok = true;
  for (const double level : {20.0, 50.0}) {
    const std::int64_t reps = 10000;
    double sum = 0.0, sumsq = 0.0;
    std::int64_t upper = 0, unstopped = 0;
    for (std::int64_t r = 0; r < reps; ++r) {
      RngStream rng = RngStream::for_replica(
          kSeed, kBaseStopped + static_cast<std::uint64_t>(level) * 20000 +
                     static_cast<std::uint64_t>(r));
      const DominatingWalk w = overcount_walk(params, rng, level, 2000000);
      if (!w.stopped) {
        ++unstopped;
        continue;
      }
      const double last = w.martingale.back();
      if (last > level) ++upper;
      sum += last;
      sumsq += last * last;
    }
    const auto done = static_cast<double>(reps - unstopped);
    const double mean = sum / done;
    const double se = std::sqrt((sumsq / done - mean * mean) / done);
    const double phat = static_cast<double>(upper) / done;
    const double pse = std::sqrt(phat * (1.0 - phat) / done);
    const bool mean_ok = std::fabs(mean - 1.0) < 3.0 * se;
    const bool tail_ok = phat <= 1.0 / level + 3.0 * pse;
    out << " H=" << level << ": mean=" << mean << " (se " << se << ")"
        << (mean_ok ? "" : " FAIL") << " p=" << phat << " vs " << 1.0 / level
        << (tail_ok ? "" : " FAIL");
    if (unstopped > 0) out << " [" << unstopped << " hit budget]";
    ok = ok && mean_ok && tail_ok && unstopped == 0;
  }
  return ok;
}

// 12. Late-start components get rarer as the start threshold grows.
bool check_late_components(std::ostream& out) {
  LateComponentsConfig cfg;
  cfg.n = 10000;
  cfg.replicas = 2000;
  cfg.delta = 0.5;
  cfg.y_grid = {1.0, 2.0, 4.0, 8.0};
  cfg.seed = kSeed;
  cfg.workers = g_workers;
  const ExperimentReport rep = experiment_late_components(cfg);
  for (const auto& m : rep.metrics) {
    if (m.name.rfind("p_hat_y", 0) == 0) out << " " << m.name << "=" << m.estimate;
  }
  return metric_pass(rep, "monotone_in_y", out);
}

// 13. Exact kernel iteration meets the geometric mixing bound.
bool check_kernel_mixing(std::ostream& out) {
  DoeblinConfig cfg;
  cfg.k_states = 64;
  cfg.epsilon = 0.5;
  cfg.n_max = 20;
  cfg.kernels = 5;
  cfg.seed = kSeed;
  const ExperimentReport rep = experiment_doeblin(cfg);
  bool ok = metric_pass(rep, "doeblin_bound_slack", out);
  ok = metric_pass(rep, "tv_nonincreasing", out) && ok;
  ok = metric_pass(rep, "uniform_stationary_residual", out) && ok;
  return ok;
}

// 14. Reports are byte-identical across worker counts 1 and 8.
bool check_worker_invariance(std::ostream& out) {
  int diffs = 0;
  const auto same = [&](const ExperimentReport& a, const ExperimentReport& b,
                        const char* name) {
    const bool eq = a.to_json() == b.to_json() && a.raw_csv() == b.raw_csv();
    if (!eq) {
      out << " " << name << " differs";
      ++diffs;
    }
  };

  Theorem1Config t1;
  t1.n = 500;
  t1.replicas = 50;
  t1.big_a = {0.5, 1.0};
  t1.small_delta = {0.1};
  t1.seed = kSeed;
  t1.workers = 1;
  Theorem1Config t1b = t1;
  t1b.workers = 8;
  same(experiment_theorem1(t1), experiment_theorem1(t1b), "tail");

  WalkConvergenceConfig wc;
  wc.n = 2000;
  wc.replicas = 20;
  wc.s_grid = {0.5, 1.0};
  wc.seed = kSeed;
  wc.workers = 1;
  WalkConvergenceConfig wcb = wc;
  wcb.workers = 8;
  same(experiment_walk_convergence(wc), experiment_walk_convergence(wcb), "walk");

  Theorem2Config t2;
  t2.n = 600;
  t2.replicas = 40;
  t2.dt = 0.01;
  t2.horizon = 4.0;
  t2.seed = kSeed;
  t2.workers = 1;
  Theorem2Config t2b = t2;
  t2b.workers = 8;
  same(experiment_theorem2(t2), experiment_theorem2(t2b), "limit-match");

  LateComponentsConfig lc;
  lc.n = 500;
  lc.replicas = 50;
  lc.y_grid = {1.0, 2.0};
  lc.seed = kSeed;
  lc.workers = 1;
  LateComponentsConfig lcb = lc;
  lcb.workers = 8;
  same(experiment_late_components(lc), experiment_late_components(lcb), "late");

  DoeblinConfig dc;
  dc.seed = kSeed;
  same(experiment_doeblin(dc), experiment_doeblin(dc), "mixing");

  if (diffs == 0) out << " five experiment types byte-identical";
  return diffs == 0;
}

}  // namespace

int main() {
  g_workers = std::max(1, static_cast<int>(std::thread::hardware_concurrency()));
  std::printf("acceptance gate: seed %llu, %d worker(s)\n",
              static_cast<unsigned long long>(kSeed), g_workers);

  struct Gate {
    const char* name;
    std::function<bool(std::ostream&)> run;
  };
  const std::vector<Gate> gates = {
      {"oracle equivalence", check_oracle_equivalence},
      {"interval law", check_interval_law},
      {"curve identity", check_curve_identity},
      {"tail exponent", check_tail_exponent},
      {"small-component bound", check_small_component_bound},
      {"drift curve", check_drift_curve},
      {"quadratic variation", check_quadratic_variation},
      {"max jump", check_max_jump},
      {"visit counts", check_visit_counts},
      {"limit match", check_limit_match},
      {"stopped martingale", check_stopped_martingale},
      {"late components", check_late_components},
      {"kernel mixing", check_kernel_mixing},
      {"worker invariance", check_worker_invariance},
  };

  int failures = 0;
  const auto t0 = std::chrono::steady_clock::now();
  for (std::size_t i = 0; i < gates.size(); ++i) {
    std::ostringstream detail;
    bool pass = false;
    const auto s0 = std::chrono::steady_clock::now();
    try {
      pass = gates[i].run(detail);
    } catch (const std::exception& e) {
      detail << " exception: " << e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - s0).count();
    if (!pass) ++failures;
    std::printf("%2zu %s  %-22s %7.1fs %s\n", i + 1, pass ? "PASS" : "FAIL", gates[i].name,
                secs, detail.str().c_str());
    std::fflush(stdout);
  }
  const double total = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::printf("acceptance: %zu/%zu passed in %.1fs\n", gates.size() - failures, gates.size(),
              total);
  return failures;
}
