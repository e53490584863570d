#include "qrg/experiments.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <mutex>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "json.hpp"
#include "qrg/exploration.hpp"
#include "qrg/limit.hpp"
#include "qrg/model.hpp"
#include "qrg/rng.hpp"

namespace qrg {

namespace {

std::string fmt_g(double v, int precision = 12) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", precision, v);
  return buf;
}

double mean_of(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double variance_of(const std::vector<double>& v) {
  const double m = mean_of(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return s / static_cast<double>(v.size() - 1);
}

double se_of_mean(const std::vector<double>& v) {
  return std::sqrt(variance_of(v) / static_cast<double>(v.size()));
}

// De-facto default stream block for the second sampler of a two-sided
// experiment; keeps graph and limit replica indices disjoint.
constexpr std::uint64_t kSecondaryStreamBase = std::uint64_t{1} << 32;

}  // namespace

bool ExperimentReport::all_pass() const {
  for (const auto& m : metrics) {
    if (!m.pass) return false;
  }
  return true;
}

std::string ExperimentReport::to_json() const {
  nlohmann::json j;
  j["experiment"] = experiment;
  j["replicas"] = replicas;
  j["master_seed"] = master_seed;
  j["all_pass"] = all_pass();
  nlohmann::json jc = nlohmann::json::object();
  for (const auto& [k, v] : config) jc[k] = v;
  j["config"] = jc;
  j["metrics"] = nlohmann::json::array();
  for (const auto& m : metrics) {
    j["metrics"].push_back({{"name", m.name},
                            {"estimate", m.estimate},
                            {"error", m.error},
                            {"pass", m.pass},
                            {"note", m.note}});
  }
  return j.dump(2);
}

std::string ExperimentReport::to_text() const {
  std::ostringstream os;
  os << "experiment: " << experiment << '\n';
  os << "replicas:   " << replicas << '\n';
  os << "seed:       " << master_seed << '\n';
  os << "config:\n";
  for (const auto& [k, v] : config) os << "  " << k << " = " << v << '\n';
  os << "metrics:\n";
  std::size_t w = 4;
  for (const auto& m : metrics) w = std::max(w, m.name.size());
  char line[256];
  for (const auto& m : metrics) {
    std::snprintf(line, sizeof line, "  %-*s  %16s  %16s  %s%s%s\n", static_cast<int>(w),
                  m.name.c_str(), fmt_g(m.estimate, 10).c_str(), fmt_g(m.error, 10).c_str(),
                  m.pass ? "PASS" : "FAIL", m.note.empty() ? "" : "  ", m.note.c_str());
    os << line;
  }
  os << (all_pass() ? "all metrics pass\n" : "SOME METRICS FAIL\n");
  return os.str();
}

std::string ExperimentReport::raw_csv() const {
  std::ostringstream os;
  for (const auto& t : raw) {
    os << "# table " << t.name << '\n';
    for (std::size_t i = 0; i < t.columns.size(); ++i) {
      os << (i ? "," : "") << t.columns[i];
    }
    os << '\n';
    for (const auto& row : t.rows) {
      for (std::size_t i = 0; i < row.size(); ++i) {
        os << (i ? "," : "") << fmt_g(row[i], 17);
      }
      os << '\n';
    }
  }
  return os.str();
}

void run_replicas(std::int64_t replicas, std::uint64_t master_seed, int workers,
                  std::uint64_t stream_base,
                  const std::function<void(std::int64_t, RngStream&)>& fn) {
  if (replicas < 0) throw std::invalid_argument("run_replicas: negative replica count");
  if (workers < 1) throw std::invalid_argument("run_replicas: need at least one worker");
  const auto body = [&](std::int64_t r) {
    RngStream rng = RngStream::for_replica(master_seed, stream_base + static_cast<std::uint64_t>(r));
    fn(r, rng);
  };
  if (workers == 1 || replicas <= 1) {
    for (std::int64_t r = 0; r < replicas; ++r) body(r);
    return;
  }
  std::atomic<std::int64_t> next{0};
  std::mutex err_mutex;
  std::exception_ptr first_error;
  const auto nthreads = static_cast<std::size_t>(
      std::min<std::int64_t>(workers, replicas));
  std::vector<std::thread> pool;
  pool.reserve(nthreads);
  for (std::size_t t = 0; t < nthreads; ++t) {
    pool.emplace_back([&] {
      for (;;) {
        const std::int64_t r = next.fetch_add(1);
        if (r >= replicas) return;
        try {
          body(r);
        } catch (...) {
          std::lock_guard<std::mutex> lock(err_mutex);
          if (!first_error) first_error = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

ExperimentReport experiment_theorem1(const Theorem1Config& cfg) {
  const ModelParams mp = window_params(cfg.c, 0.0, cfg.n);
  const double n23 = std::pow(static_cast<double>(cfg.n), 2.0 / 3.0);
  const std::int64_t budget = 2 * cfg.n + 1000;

  std::vector<double> cmax(static_cast<std::size_t>(cfg.replicas));
  std::vector<double> partial(static_cast<std::size_t>(cfg.replicas));
  run_replicas(cfg.replicas, cfg.seed, cfg.workers, 0, [&](std::int64_t r, RngStream& rng) {
    const WalkPath path = explore_lazy(mp, rng, budget);
    std::int64_t best = 0;
    for (const auto& st : component_stats(path)) {
      if (st.complete) best = std::max(best, st.size);
    }
    cmax[static_cast<std::size_t>(r)] = static_cast<double>(best);
    partial[static_cast<std::size_t>(r)] = path.complete ? 0.0 : 1.0;
  });

  ExperimentReport rep;
  rep.experiment = "theorem1";
  rep.replicas = cfg.replicas;
  rep.master_seed = cfg.seed;
  rep.config = {{"c", fmt_g(cfg.c)},
                {"a", "0"},
                {"n", std::to_string(cfg.n)},
                {"lambda", fmt_g(mp.lambda, 17)},
                {"budget", std::to_string(budget)},
                {"big_a", [&] {
                   std::string s;
                   for (double v : cfg.big_a) s += (s.empty() ? "" : ",") + fmt_g(v);
                   return s;
                 }()},
                {"small_delta", [&] {
                   std::string s;
                   for (double v : cfg.small_delta) s += (s.empty() ? "" : ",") + fmt_g(v);
                   return s;
                 }()}};

  std::vector<double> tails;
  for (double A : cfg.big_a) {
    const double p = empirical_tail(cmax, A * n23);
    tails.push_back(p);
    const auto k = static_cast<std::int64_t>(std::llround(p * static_cast<double>(cfg.replicas)));
    const WilsonInterval wi = wilson_interval(k, cfg.replicas);
    rep.metrics.push_back({"tail_p_A" + fmt_g(A), p, (wi.upper - wi.lower) / 2.0, true,
                           "reported, no threshold"});
  }
  bool decreasing = true;
  for (std::size_t i = 1; i < tails.size(); ++i) decreasing = decreasing && tails[i] < tails[i - 1];
  rep.metrics.push_back({"tail_strictly_decreasing", decreasing ? 1.0 : 0.0, 0.0, decreasing, ""});

  bool have_tail = true;
  for (double p : tails) have_tail = have_tail && p > 0.0;
  if (have_tail && tails.size() >= 2) {
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < tails.size(); ++i) {
      lx.push_back(std::log(cfg.big_a[i]));
      ly.push_back(std::log(tails[i]));
    }
    const double slope = least_squares_slope(lx, ly);
    rep.metrics.push_back({"tail_loglog_slope", slope, 0.0,
                           slope >= -2.2 && slope <= -1.0, "window [-2.2,-1.0]"});
  } else {
    rep.metrics.push_back({"tail_loglog_slope", 0.0, 0.0, false, "empty tail bin, no fit"});
  }

  for (double d : cfg.small_delta) {
    double below = 0.0;
    for (double v : cmax) below += v < d * n23 ? 1.0 : 0.0;
    const double p = below / static_cast<double>(cfg.replicas);
    const double bound = 15.0 * std::pow(d, 0.6);
    const WilsonInterval wi =
        wilson_interval(static_cast<std::int64_t>(std::llround(below)), cfg.replicas);
    const bool pass = p <= bound + (wi.upper - p);
    rep.metrics.push_back({"small_p_d" + fmt_g(d), p, bound, pass,
                           bound >= 1.0 ? "vacuous bound" : ""});
  }

  const double pfrac = mean_of(partial);
  rep.metrics.push_back({"partial_fraction", pfrac, 0.0, pfrac == 0.0,
                         pfrac == 0.0 ? "" : "budget cut some replicas"});

  RawTable t{"cmax", {"replica", "cmax", "partial"}, {}};
  for (std::int64_t r = 0; r < cfg.replicas; ++r) {
    t.rows.push_back({static_cast<double>(r), cmax[static_cast<std::size_t>(r)],
                      partial[static_cast<std::size_t>(r)]});
  }
  rep.raw.push_back(std::move(t));
  return rep;
}

ExperimentReport experiment_walk_convergence(const WalkConvergenceConfig& cfg) {
  if (cfg.s_grid.empty()) throw std::invalid_argument("walk experiment: empty s grid");
  const ModelParams mp = window_params(cfg.c, cfg.a, cfg.n);
  const double lambda_c = critical_lambda(cfg.c);
  const double n13 = std::cbrt(static_cast<double>(cfg.n));
  const double n23 = n13 * n13;
  const double s_max = *std::max_element(cfg.s_grid.begin(), cfg.s_grid.end());
  const auto budget = static_cast<std::int64_t>(std::floor(s_max * n23));

  const std::size_t ns = cfg.s_grid.size();
  std::vector<std::vector<double>> zbar(ns,
                                        std::vector<double>(static_cast<std::size_t>(cfg.replicas)));
  std::vector<double> maxjump(static_cast<std::size_t>(cfg.replicas));
  run_replicas(cfg.replicas, cfg.seed, cfg.workers, 0, [&](std::int64_t r, RngStream& rng) {
    const WalkPath path = explore_lazy(mp, rng, budget);
    const RescaledWalk rs = rescale_walk(path, cfg.n);
    for (std::size_t i = 0; i < ns; ++i) {
      zbar[i][static_cast<std::size_t>(r)] = rs(cfg.s_grid[i]);
    }
    std::int64_t mj = 0;
    for (auto e : path.offspring) mj = std::max<std::int64_t>(mj, std::llabs(e - 1));
    maxjump[static_cast<std::size_t>(r)] = static_cast<double>(mj) / n13;
  });

  ExperimentReport rep;
  rep.experiment = "walk_convergence";
  rep.replicas = cfg.replicas;
  rep.master_seed = cfg.seed;
  rep.config = {{"c", fmt_g(cfg.c)},
                {"a", fmt_g(cfg.a)},
                {"n", std::to_string(cfg.n)},
                {"lambda", fmt_g(mp.lambda, 17)},
                {"lambda_limit", fmt_g(lambda_c, 17)},
                {"budget", std::to_string(budget)},
                {"s_grid", [&] {
                   std::string s;
                   for (double v : cfg.s_grid) s += (s.empty() ? "" : ",") + fmt_g(v);
                   return s;
                 }()}};

  for (std::size_t i = 0; i < ns; ++i) {
    const double s = cfg.s_grid[i];
    const double drift = cfg.a * s - lambda_c * s * s / (2.0 * cfg.c);
    const double dev = std::fabs(mean_of(zbar[i]) - drift);
    rep.metrics.push_back({"drift_absdev_s" + fmt_g(s), dev, 3.0 * se_of_mean(zbar[i]),
                           dev <= 0.15, "tolerance 0.15"});
  }
  for (std::size_t i = 0; i < ns; ++i) {
    if (cfg.s_grid[i] == 1.0) {
      const double var = variance_of(zbar[i]);
      const double se = var * std::sqrt(2.0 / static_cast<double>(cfg.replicas - 1));
      rep.metrics.push_back({"var_zbar_s1", var, se, var >= 0.9 && var <= 1.1,
                             "window [0.9,1.1]"});
    }
  }
  const double mj_mean = mean_of(maxjump);
  rep.metrics.push_back({"max_jump_scaled_mean", mj_mean, 3.0 * se_of_mean(maxjump),
                         mj_mean < 0.2, "threshold 0.2"});

  RawTable t{"walk", {"replica"}, {}};
  for (double s : cfg.s_grid) t.columns.push_back("zbar_s" + fmt_g(s));
  t.columns.push_back("max_jump_scaled");
  for (std::int64_t r = 0; r < cfg.replicas; ++r) {
    std::vector<double> row{static_cast<double>(r)};
    for (std::size_t i = 0; i < ns; ++i) row.push_back(zbar[i][static_cast<std::size_t>(r)]);
    row.push_back(maxjump[static_cast<std::size_t>(r)]);
    t.rows.push_back(std::move(row));
  }
  rep.raw.push_back(std::move(t));
  return rep;
}

ExperimentReport experiment_theorem2(const Theorem2Config& cfg) {
  const ModelParams mp = window_params(cfg.c, cfg.a, cfg.n);
  const double lambda_c = critical_lambda(cfg.c);
  const double factor = cfg.mark_rate_factor < 0.0 ? lambda_c / cfg.c : cfg.mark_rate_factor;
  const double min_length = cfg.min_length < 0.0 ? 5.0 * cfg.dt : cfg.min_length;
  const LimitParams lp(cfg.a, lambda_c, cfg.c, cfg.dt, cfg.horizon, factor);
  const double n23 = std::pow(static_cast<double>(cfg.n), 2.0 / 3.0);
  const std::int64_t budget = 2 * cfg.n + 1000;
  const std::size_t R = static_cast<std::size_t>(cfg.replicas);

  std::vector<std::array<double, 3>> gtop(R), ltop(R);
  std::vector<double> gsurp(R), lmarks(R);
  run_replicas(cfg.replicas, cfg.seed, cfg.workers, 0, [&](std::int64_t r, RngStream& rng) {
    const WalkPath path = explore_lazy(mp, rng, budget);
    if (!path.complete) throw std::runtime_error("theorem2: graph replica hit budget");
    std::vector<std::int64_t> sizes;
    std::int64_t best_size = 0, best_surplus = 0;
    for (const auto& st : component_stats(path)) {
      sizes.push_back(st.size);
      if (st.size > best_size) {
        best_size = st.size;
        best_surplus = st.surplus;
      }
    }
    std::sort(sizes.begin(), sizes.end(), std::greater<>());
    auto& top = gtop[static_cast<std::size_t>(r)];
    for (std::size_t i = 0; i < 3; ++i) {
      top[i] = i < sizes.size() ? static_cast<double>(sizes[i]) / n23 : 0.0;
    }
    gsurp[static_cast<std::size_t>(r)] = static_cast<double>(best_surplus);
  });
  run_replicas(cfg.replicas, cfg.seed, cfg.workers, kSecondaryStreamBase,
               [&](std::int64_t r, RngStream& rng) {
                 const LimitPath path = simulate_w(lp, rng);
                 ExcursionSet set = find_excursions(path, min_length);
                 sample_marks(set, path, factor, rng);
                 const auto pairs = ordered_pairs(set);
                 auto& top = ltop[static_cast<std::size_t>(r)];
                 for (std::size_t i = 0; i < 3; ++i) {
                   top[i] = i < pairs.size() ? pairs[i].first : 0.0;
                 }
                 lmarks[static_cast<std::size_t>(r)] =
                     pairs.empty() ? 0.0 : static_cast<double>(pairs[0].second);
               });

  ExperimentReport rep;
  rep.experiment = "theorem2";
  rep.replicas = cfg.replicas;
  rep.master_seed = cfg.seed;
  rep.config = {{"c", fmt_g(cfg.c)},
                {"a", fmt_g(cfg.a)},
                {"n", std::to_string(cfg.n)},
                {"lambda", fmt_g(mp.lambda, 17)},
                {"lambda_limit", fmt_g(lambda_c, 17)},
                {"dt", fmt_g(cfg.dt)},
                {"horizon", fmt_g(cfg.horizon)},
                {"mark_rate_factor", fmt_g(factor, 17)},
                {"min_length", fmt_g(min_length)},
                {"limit_stream_base", std::to_string(kSecondaryStreamBase)},
                {"truncation", "top-3 entries; incomplete excursions excluded"}};

  for (std::size_t rank = 0; rank < 3; ++rank) {
    std::vector<double> gs(R), ls(R);
    for (std::size_t r = 0; r < R; ++r) {
      gs[r] = gtop[r][rank];
      ls[r] = ltop[r][rank];
    }
    const double ks = ks_distance(gs, ls);
    if (rank == 0) {
      rep.metrics.push_back({"ks_rank1", ks, 0.0, ks < 0.1, "threshold 0.1"});
    } else {
      rep.metrics.push_back({"ks_rank" + std::to_string(rank + 1), ks, 0.0, true,
                             "reported, no threshold"});
    }
  }

  std::vector<double> gmean(3), lmean(3);
  for (std::size_t rank = 0; rank < 3; ++rank) {
    double sg = 0.0, sl = 0.0;
    for (std::size_t r = 0; r < R; ++r) {
      sg += gtop[r][rank];
      sl += ltop[r][rank];
    }
    gmean[rank] = sg / static_cast<double>(R);
    lmean[rank] = sl / static_cast<double>(R);
  }
  rep.metrics.push_back({"l2_mean_top3", l2_desc_distance(gmean, lmean), 0.0, true,
                         "reported, no threshold"});

  std::vector<double> gpmf(4, 0.0), lpmf(4, 0.0);
  for (std::size_t r = 0; r < R; ++r) {
    gpmf[static_cast<std::size_t>(std::min<double>(gsurp[r], 3.0))] += 1.0;
    lpmf[static_cast<std::size_t>(std::min<double>(lmarks[r], 3.0))] += 1.0;
  }
  for (auto& v : gpmf) v /= static_cast<double>(R);
  for (auto& v : lpmf) v /= static_cast<double>(R);
  const double tv = tv_distance_pmf(gpmf, lpmf);
  rep.metrics.push_back({"tv_surplus_marks", tv, 0.0, tv < 0.15, "threshold 0.15"});

  RawTable tg{"graph", {"replica", "c1", "c2", "c3", "surplus_top"}, {}};
  RawTable tl{"limit", {"replica", "gamma1", "gamma2", "gamma3", "marks_top"}, {}};
  for (std::size_t r = 0; r < R; ++r) {
    tg.rows.push_back({static_cast<double>(r), gtop[r][0], gtop[r][1], gtop[r][2], gsurp[r]});
    tl.rows.push_back({static_cast<double>(r), ltop[r][0], ltop[r][1], ltop[r][2], lmarks[r]});
  }
  rep.raw.push_back(std::move(tg));
  rep.raw.push_back(std::move(tl));
  return rep;
}

ExperimentReport experiment_late_components(const LateComponentsConfig& cfg) {
  if (cfg.y_grid.empty()) throw std::invalid_argument("late experiment: empty y grid");
  const ModelParams mp = window_params(cfg.c, cfg.a, cfg.n);
  const double n13 = std::cbrt(static_cast<double>(cfg.n));
  const double size_cut = cfg.delta * n13 * n13;
  const std::int64_t budget = 2 * cfg.n + 1000;
  const std::size_t ny = cfg.y_grid.size();

  std::vector<std::vector<double>> flags(ny,
                                         std::vector<double>(static_cast<std::size_t>(cfg.replicas)));
  run_replicas(cfg.replicas, cfg.seed, cfg.workers, 0, [&](std::int64_t r, RngStream& rng) {
    const WalkPath path = explore_lazy(mp, rng, budget);
    if (!path.complete) throw std::runtime_error("late components: replica hit budget");
    double max_label = -1.0;  // largest 1-based min-vertex among qualifying components
    for (const auto& st : component_stats(path)) {
      if (static_cast<double>(st.size) >= size_cut) {
        max_label = std::max(max_label, static_cast<double>(st.min_vertex) + 1.0);
      }
    }
    for (std::size_t i = 0; i < ny; ++i) {
      flags[i][static_cast<std::size_t>(r)] = max_label > cfg.y_grid[i] * n13 ? 1.0 : 0.0;
    }
  });

  ExperimentReport rep;
  rep.experiment = "late_components";
  rep.replicas = cfg.replicas;
  rep.master_seed = cfg.seed;
  rep.config = {{"c", fmt_g(cfg.c)},
                {"a", fmt_g(cfg.a)},
                {"n", std::to_string(cfg.n)},
                {"lambda", fmt_g(mp.lambda, 17)},
                {"delta", fmt_g(cfg.delta)},
                {"y_grid", [&] {
                   std::string s;
                   for (double v : cfg.y_grid) s += (s.empty() ? "" : ",") + fmt_g(v);
                   return s;
                 }()}};

  std::vector<double> phat(ny);
  for (std::size_t i = 0; i < ny; ++i) {
    phat[i] = mean_of(flags[i]);
    const auto k = static_cast<std::int64_t>(
        std::llround(phat[i] * static_cast<double>(cfg.replicas)));
    const WilsonInterval wi = wilson_interval(k, cfg.replicas);
    rep.metrics.push_back({"p_hat_y" + fmt_g(cfg.y_grid[i]), phat[i],
                           (wi.upper - wi.lower) / 2.0, true, "reported, no threshold"});
  }
  bool mono = true;
  for (std::size_t i = 1; i < ny; ++i) mono = mono && phat[i] <= phat[i - 1];
  rep.metrics.push_back({"monotone_in_y", mono ? 1.0 : 0.0, 0.0, mono,
                         "pointwise monotone event"});

  RawTable t{"late_flags", {"replica"}, {}};
  for (double y : cfg.y_grid) t.columns.push_back("flag_y" + fmt_g(y));
  for (std::int64_t r = 0; r < cfg.replicas; ++r) {
    std::vector<double> row{static_cast<double>(r)};
    for (std::size_t i = 0; i < ny; ++i) row.push_back(flags[i][static_cast<std::size_t>(r)]);
    t.rows.push_back(std::move(row));
  }
  rep.raw.push_back(std::move(t));
  return rep;
}

ExperimentReport doeblin_check(const DiscreteKernel& kernel, std::int64_t start_state,
                               std::int64_t n_max) {
  kernel.validate();
  if (start_state < 0 || start_state >= kernel.k_states) {
    throw std::invalid_argument("doeblin_check: start state out of range");
  }
  if (n_max < 0) throw std::invalid_argument("doeblin_check: negative n_max");
  const auto K = static_cast<std::size_t>(kernel.k_states);

  ExperimentReport rep;
  rep.experiment = "doeblin";
  rep.replicas = 1;
  rep.master_seed = 0;
  rep.config = {{"k_states", std::to_string(kernel.k_states)},
                {"epsilon", fmt_g(kernel.epsilon, 17)},
                {"start_state", std::to_string(start_state)},
                {"n_max", std::to_string(n_max)}};

  std::vector<double> dist(K, 0.0);
  dist[static_cast<std::size_t>(start_state)] = 1.0;
  RawTable t{"tv", {"n", "tv", "bound"}, {}};
  double worst_slack = -1.0;
  double worst_rise = -1.0;
  double prev_tv = 2.0;
  for (std::int64_t n = 0; n <= n_max; ++n) {
    const double tv = tv_to_uniform(dist);
    const double bound = std::pow(1.0 - kernel.epsilon, static_cast<double>(n));
    t.rows.push_back({static_cast<double>(n), tv, bound});
    worst_slack = std::max(worst_slack, tv - bound);
    if (n > 0) worst_rise = std::max(worst_rise, tv - prev_tv);
    prev_tv = tv;
    if (n < n_max) dist = kernel.step(dist);
  }
  rep.raw.push_back(std::move(t));

  rep.metrics.push_back({"doeblin_bound_slack", worst_slack, 1e-12, worst_slack <= 1e-12,
                         "max over n of tv - (1-eps)^n"});
  rep.metrics.push_back({"tv_nonincreasing", worst_rise, 1e-15, worst_rise <= 1e-15,
                         "max single-step rise"});

  const std::vector<double> uniform(K, 1.0 / static_cast<double>(K));
  const auto stepped = kernel.step(uniform);
  double resid = 0.0;
  for (std::size_t i = 0; i < K; ++i) resid = std::max(resid, std::fabs(stepped[i] - uniform[i]));
  rep.metrics.push_back({"uniform_stationary_residual", resid, 1e-12, resid <= 1e-12, ""});
  return rep;
}

ExperimentReport experiment_doeblin(const DoeblinConfig& cfg) {
  if (cfg.kernels < 1) throw std::invalid_argument("doeblin experiment: need a kernel");
  ExperimentReport rep;
  rep.experiment = "doeblin";
  rep.replicas = cfg.kernels;
  rep.master_seed = cfg.seed;
  rep.config = {{"k_states", std::to_string(cfg.k_states)},
                {"epsilon", fmt_g(cfg.epsilon, 17)},
                {"start_state", std::to_string(cfg.start_state)},
                {"n_max", std::to_string(cfg.n_max)},
                {"kernels", std::to_string(cfg.kernels)}};

  double worst_slack = -1.0, worst_rise = -1.0, worst_resid = 0.0;
  for (std::int64_t j = 0; j < cfg.kernels; ++j) {
    RngStream rng = RngStream::for_replica(cfg.seed, static_cast<std::uint64_t>(j));
    std::vector<double> weights(static_cast<std::size_t>(cfg.k_states));
    for (auto& w : weights) w = 0.1 + rng.uniform();
    const DiscreteKernel kernel = mixture_circulant_kernel(cfg.k_states, cfg.epsilon, weights);
    ExperimentReport sub = doeblin_check(kernel, cfg.start_state, cfg.n_max);
    worst_slack = std::max(worst_slack, sub.metrics[0].estimate);
    worst_rise = std::max(worst_rise, sub.metrics[1].estimate);
    worst_resid = std::max(worst_resid, sub.metrics[2].estimate);
    sub.raw[0].name = "tv_kernel" + std::to_string(j);
    rep.raw.push_back(std::move(sub.raw[0]));
  }
  rep.metrics.push_back({"doeblin_bound_slack", worst_slack, 1e-12, worst_slack <= 1e-12,
                         "max over kernels and n"});
  rep.metrics.push_back({"tv_nonincreasing", worst_rise, 1e-15, worst_rise <= 1e-15,
                         "max single-step rise over kernels"});
  rep.metrics.push_back({"uniform_stationary_residual", worst_resid, 1e-12,
                         worst_resid <= 1e-12, ""});
  return rep;
}

}  // namespace qrg
