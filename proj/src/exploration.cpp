#include "qrg/exploration.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <iterator>
#include <set>
#include <stdexcept>
#include <tuple>

namespace qrg {

namespace {

enum Status : std::uint8_t { kNeutral = 0, kActive = 1, kExplored = 2 };

void record_step(WalkPath& path, std::int64_t k, std::int32_t eta, std::int32_t surp,
                 std::int64_t vertex, std::int64_t& A, std::int64_t& z) {
  A = (A > 0) ? A + eta - 1 : eta;
  z += eta - 1;
  path.offspring.push_back(eta);
  path.surplus.push_back(surp);
  path.explored_vertex.push_back(static_cast<std::int32_t>(vertex));
  path.active.push_back(A);
  path.walk.push_back(z);
  if (A == 0) path.closures.push_back(k);
}

}  // namespace

std::pair<WalkPath, Decomposition> explore_realization(const GraphRealization& g) {
  g.validate();
  const std::int64_t n = g.params.n;
  const double c = g.params.c;
  const auto intervals = intervals_of(g);
  const auto first = interval_offsets(g);
  const auto total = static_cast<std::int32_t>(intervals.size());

  // Per-vertex links sorted by time; each link appears once on each side.
  std::vector<std::vector<std::pair<double, std::int32_t>>> adj(static_cast<std::size_t>(n));
  for (const auto& pl : g.links) {
    for (double t : pl.ts) {
      adj[static_cast<std::size_t>(pl.i)].emplace_back(t, static_cast<std::int32_t>(pl.j));
      adj[static_cast<std::size_t>(pl.j)].emplace_back(t, static_cast<std::int32_t>(pl.i));
    }
  }
  for (auto& av : adj) std::sort(av.begin(), av.end());

  std::vector<std::uint8_t> status(static_cast<std::size_t>(total), kNeutral);
  std::vector<std::uint8_t> touched(static_cast<std::size_t>(n), 0);
  std::int64_t next_seed = 0;
  std::set<std::tuple<std::int32_t, double, std::int32_t>> active_set;   // (vertex, start, id)
  std::set<std::tuple<double, std::int32_t, std::int32_t>> neutral_set;  // (start, vertex, id)
  for (std::int32_t id = 0; id < total; ++id) {
    neutral_set.insert({intervals[static_cast<std::size_t>(id)].start,
                        static_cast<std::int32_t>(intervals[static_cast<std::size_t>(id)].vertex),
                        id});
  }

  WalkPath path;
  path.n = n;
  path.walk.push_back(0);
  Decomposition d;
  d.component_of_interval.assign(static_cast<std::size_t>(total), -1);
  std::vector<std::int32_t> comp_intervals;
  std::int64_t comp_eta = 0, comp_surplus = 0;

  std::int64_t A = 0, z = 0;
  for (std::int64_t k = 1;; ++k) {
    std::int32_t cur;
    if (A > 0) {
      cur = std::get<2>(*active_set.begin());
      active_set.erase(active_set.begin());
    } else {
      while (next_seed < n && touched[static_cast<std::size_t>(next_seed)]) ++next_seed;
      if (next_seed < n) {
        cur = locate_interval(g, first, next_seed, 0.0);
        const auto& iv = intervals[static_cast<std::size_t>(cur)];
        neutral_set.erase({iv.start, static_cast<std::int32_t>(iv.vertex), cur});
        touched[static_cast<std::size_t>(next_seed)] = 1;
      } else if (!neutral_set.empty()) {
        cur = std::get<2>(*neutral_set.begin());
        neutral_set.erase(neutral_set.begin());
      } else {
        path.complete = true;
        break;
      }
    }

    const Interval& iv = intervals[static_cast<std::size_t>(cur)];
    const auto w = iv.vertex;
    std::int32_t eta = 0, surp = 0;
    const auto& av = adj[static_cast<std::size_t>(w)];
    // Sweep links in order of position along the interval from its start.
    auto split = std::lower_bound(av.begin(), av.end(), std::make_pair(iv.start, INT32_MIN));
    auto handle = [&](double t, std::int32_t i) {
      if (!iv.full_circle) {
        const double dpos = circle_dist(iv.start, t, c);
        if (dpos <= 0.0 || dpos >= iv.length) return;
      }
      const std::int32_t tid = locate_interval(g, first, i, t);
      if (status[static_cast<std::size_t>(tid)] == kExplored) return;
      if (status[static_cast<std::size_t>(tid)] == kActive) {
        ++surp;
        return;
      }
      const auto& tv = intervals[static_cast<std::size_t>(tid)];
      status[static_cast<std::size_t>(tid)] = kActive;
      neutral_set.erase({tv.start, i, tid});
      active_set.insert({i, tv.start, tid});
      touched[static_cast<std::size_t>(i)] = 1;
      ++eta;
    };
    for (auto it = split; it != av.end(); ++it) handle(it->first, it->second);
    for (auto it = av.begin(); it != split; ++it) handle(it->first, it->second);

    status[static_cast<std::size_t>(cur)] = kExplored;
    comp_intervals.push_back(cur);
    comp_eta += eta;
    comp_surplus += surp;
    record_step(path, k, eta, surp, w, A, z);
    if (A == 0) {
      if (comp_eta != static_cast<std::int64_t>(comp_intervals.size()) - 1) {
        throw std::logic_error("explore_realization: tree-link count mismatch");
      }
      const auto comp_idx = static_cast<std::int32_t>(d.components.size());
      for (std::int32_t id : comp_intervals) {
        d.component_of_interval[static_cast<std::size_t>(id)] = comp_idx;
      }
      std::sort(comp_intervals.begin(), comp_intervals.end());
      d.components.push_back(ComponentInfo{std::move(comp_intervals),
                                           comp_eta + comp_surplus, comp_surplus});
      d.ordered_sizes.push_back(comp_eta + 1);
      comp_intervals = {};
      comp_eta = comp_surplus = 0;
    }
  }
  std::sort(d.ordered_sizes.begin(), d.ordered_sizes.end(), std::greater<>());
  return {std::move(path), std::move(d)};
}

ArcInterval clip_interval_to_arc(double s, double arc_start, double arc_len,
                                 double left_draw, double right_draw, double c) {
  const double d1 = circle_dist(arc_start, s, c);
  if (d1 > arc_len) throw std::domain_error("clip_interval_to_arc: point outside arc");
  const double d2 = arc_len - d1;
  double left = left_draw < d1 ? left_draw : d1;
  double right = right_draw < d2 ? right_draw : d2;
  if (d1 - left < kSegSnap) left = d1;
  if (d2 - right < kSegSnap) right = d2;
  double start;
  if (left == d1) {
    start = arc_start;  // reuse the boundary key exactly
  } else {
    start = s - left;
    if (start < 0.0) start += c;
  }
  return ArcInterval{start, left + right};
}

WalkPath explore_lazy(const ModelParams& mp, RngStream& rng, std::int64_t budget) {
  const std::int64_t n = mp.n;
  const double c = mp.c;
  const double lam = mp.lambda;

  struct Seg {
    double len;
    std::uint8_t status;
  };
  std::vector<std::map<double, Seg>> circles(static_cast<std::size_t>(n));
  std::vector<std::uint8_t> touched(static_cast<std::size_t>(n), 0);
  std::int64_t touched_count = 0;
  std::int64_t next_seed = 0;
  std::set<std::pair<std::int64_t, double>> active_set;   // (vertex, start)
  std::set<std::pair<double, std::int64_t>> neutral_arcs;  // (start, vertex)

  auto wrap_up = [c](double x) { return x >= c ? x - c : x; };
  auto wrap_dn = [c](double x) { return x < 0.0 ? x + c : x; };

  // Cut-gamma interval around (v, s) on an untouched vertex; marks it active
  // and registers the complementary neutral arc.
  auto register_fresh = [&](std::int64_t v, double s) -> std::pair<double, double> {
    const double left = rng.exponential();
    const double right = rng.exponential();
    auto& segs = circles[static_cast<std::size_t>(v)];
    touched[static_cast<std::size_t>(v)] = 1;
    ++touched_count;
    double start, len;
    if (left + right >= c - kSegSnap) {
      start = 0.0;
      len = c;
      segs.emplace(start, Seg{len, kActive});
    } else {
      start = wrap_dn(s - left);
      len = left + right;
      segs.emplace(start, Seg{len, kActive});
      const double arc_start = wrap_up(s + right);
      segs.emplace(arc_start, Seg{c - len, kNeutral});
      neutral_arcs.insert({arc_start, v});
    }
    active_set.insert({v, start});
    return {start, len};
  };

  // Segment owning position t; segments tile the circle, with the wrap
  // segment keyed by its (largest) start.
  auto locate = [](std::map<double, Seg>& segs, double t) {
    auto it = segs.upper_bound(t);
    if (it == segs.begin()) return std::prev(segs.end());
    return std::prev(it);
  };

  WalkPath path;
  path.n = n;
  path.walk.push_back(0);
  std::int64_t A = 0, z = 0;
  std::vector<std::pair<double, std::int64_t>> cand;

  for (std::int64_t k = 1; budget == 0 || k <= budget; ++k) {
    std::int64_t v;
    double start, len;
    if (A > 0) {
      const auto [av, ast] = *active_set.begin();
      active_set.erase(active_set.begin());
      v = av;
      start = ast;
      len = circles[static_cast<std::size_t>(v)].find(start)->second.len;
    } else {
      while (next_seed < n && touched[static_cast<std::size_t>(next_seed)]) ++next_seed;
      if (next_seed < n) {
        v = next_seed;
        std::tie(start, len) = register_fresh(v, 0.0);
        active_set.erase({v, start});
      } else if (!neutral_arcs.empty()) {
        // No active interval and no free vertex: open the lowest-start arc.
        const auto [ast, av] = *neutral_arcs.begin();
        neutral_arcs.erase(neutral_arcs.begin());
        v = av;
        auto& segs = circles[static_cast<std::size_t>(v)];
        const auto it = segs.find(ast);
        const double arc_len = it->second.len;
        double d = rng.exponential();
        if (d >= arc_len - kSegSnap) d = arc_len;
        segs.erase(it);
        segs.emplace(ast, Seg{d, kActive});
        if (arc_len > d) {
          const double rs = wrap_up(ast + d);
          segs.emplace(rs, Seg{arc_len - d, kNeutral});
          neutral_arcs.insert({rs, v});
        }
        start = ast;
        len = d;
      } else {
        path.complete = true;
        break;
      }
    }

    std::int32_t eta = 0, surp = 0;
    if (n > 1) {
      // Total candidate links over the interval across all other vertices;
      // candidates falling in explored regions of their target were already
      // realized by an earlier sweep and are discarded.
      const double rate = len * static_cast<double>(n - 1) / (lam * static_cast<double>(n));
      const std::uint64_t m = rng.poisson(rate);
      cand.clear();
      cand.reserve(m);
      for (std::uint64_t q = 0; q < m; ++q) {
        const double off = rng.uniform() * len;
        auto o = static_cast<std::int64_t>(rng.uniform_int(static_cast<std::uint64_t>(n - 1)));
        if (o >= v) ++o;
        cand.emplace_back(off, o);
      }
      std::sort(cand.begin(), cand.end());
      for (const auto& [off, i] : cand) {
        const double t = wrap_up(start + off);
        if (!touched[static_cast<std::size_t>(i)]) {
          register_fresh(i, t);
          ++eta;
          continue;
        }
        auto& segs = circles[static_cast<std::size_t>(i)];
        const auto it = locate(segs, t);
        if (it->second.status == kExplored) continue;
        if (it->second.status == kActive) {
          ++surp;
          continue;
        }
        const double arc_start = it->first;
        const double arc_len = it->second.len;
        const double left_draw = rng.exponential();
        const double right_draw = rng.exponential();
        const ArcInterval iv = clip_interval_to_arc(t, arc_start, arc_len, left_draw,
                                                    right_draw, c);
        neutral_arcs.erase({arc_start, i});
        segs.erase(it);
        const double d1 = (iv.start == arc_start) ? 0.0 : circle_dist(arc_start, iv.start, c);
        if (d1 > 0.0) {
          segs.emplace(arc_start, Seg{d1, kNeutral});
          neutral_arcs.insert({arc_start, i});
        }
        double ilen = iv.length;
        double rem = arc_len - d1 - ilen;
        if (rem <= kSegSnap) {
          ilen = arc_len - d1;  // absorb a rounding sliver at the far boundary
          rem = 0.0;
        }
        segs.emplace(iv.start, Seg{ilen, kActive});
        active_set.insert({i, iv.start});
        if (rem > 0.0) {
          const double rs = wrap_up(iv.start + ilen);
          segs.emplace(rs, Seg{rem, kNeutral});
          neutral_arcs.insert({rs, i});
        }
        ++eta;
      }
    }
    circles[static_cast<std::size_t>(v)].find(start)->second.status = kExplored;
    record_step(path, k, eta, surp, v, A, z);
  }
  if (!path.complete) {
    path.complete = active_set.empty() && neutral_arcs.empty() && touched_count == n;
  }
  return path;
}

std::vector<ComponentStat> component_stats(const WalkPath& path) {
  std::vector<ComponentStat> out;
  const std::int64_t steps = path.steps();
  std::int64_t run_min = 0;  // walk[0]
  std::int64_t last_close = 0;
  std::int64_t surp = 0;
  std::int32_t min_vertex = INT32_MAX;
  for (std::int64_t k = 1; k <= steps; ++k) {
    surp += path.surplus[static_cast<std::size_t>(k - 1)];
    min_vertex = std::min(min_vertex, path.explored_vertex[static_cast<std::size_t>(k - 1)]);
    if (path.walk[static_cast<std::size_t>(k)] < run_min) {
      out.push_back(ComponentStat{k - last_close, surp, min_vertex, true});
      run_min = path.walk[static_cast<std::size_t>(k)];
      last_close = k;
      surp = 0;
      min_vertex = INT32_MAX;
    }
  }
  if (last_close < steps) {
    out.push_back(ComponentStat{steps - last_close, surp, min_vertex, false});
  }
  return out;
}

std::vector<std::int64_t> iota_series(const WalkPath& path) {
  std::vector<std::int64_t> out;
  out.reserve(static_cast<std::size_t>(path.steps()));
  std::int64_t run_min = 0;
  for (std::int64_t k = 1; k <= path.steps(); ++k) {
    run_min = std::min(run_min, path.walk[static_cast<std::size_t>(k - 1)]);
    out.push_back(1 - run_min);
  }
  return out;
}

std::map<std::int64_t, std::vector<std::int64_t>> visit_counts(const WalkPath& path) {
  const auto steps = static_cast<std::size_t>(path.steps());
  std::vector<std::int64_t> per_vertex(static_cast<std::size_t>(path.n), 0);
  std::int64_t max_m = 0;
  for (auto v : path.explored_vertex) {
    max_m = std::max(max_m, ++per_vertex[static_cast<std::size_t>(v)]);
  }
  std::fill(per_vertex.begin(), per_vertex.end(), 0);
  std::vector<std::vector<std::int64_t>> series(static_cast<std::size_t>(max_m + 1),
                                                std::vector<std::int64_t>(steps));
  std::vector<std::int64_t> cnt(static_cast<std::size_t>(max_m + 1), 0);
  cnt[0] = path.n;
  for (std::size_t i = 0; i < steps; ++i) {
    const auto v = static_cast<std::size_t>(path.explored_vertex[i]);
    const auto m_old = per_vertex[v]++;
    --cnt[static_cast<std::size_t>(m_old)];
    ++cnt[static_cast<std::size_t>(m_old + 1)];
    for (std::int64_t m = 0; m <= max_m; ++m) {
      series[static_cast<std::size_t>(m)][i] = cnt[static_cast<std::size_t>(m)];
    }
  }
  std::map<std::int64_t, std::vector<std::int64_t>> out;
  for (std::int64_t m = 0; m <= max_m; ++m) {
    out.emplace(m, std::move(series[static_cast<std::size_t>(m)]));
  }
  return out;
}

double RescaledWalk::operator()(double s) const {
  if (!(s >= 0.0)) throw std::out_of_range("RescaledWalk: s must be nonnegative");
  const auto idx = static_cast<std::size_t>(std::floor(n_23 * s));
  if (idx >= walk.size()) throw std::out_of_range("RescaledWalk: s beyond explored horizon");
  return static_cast<double>(walk[idx]) / n_cbrt;
}

RescaledWalk rescale_walk(const WalkPath& path, std::int64_t n) {
  if (n < 1) throw std::invalid_argument("rescale_walk: n must be positive");
  // n_23 = n_cbrt^2 keeps both scales consistent and exact for cube n.
  const double cb = std::cbrt(static_cast<double>(n));
  return RescaledWalk{path.walk, cb, cb * cb};
}

DominatingWalk build_dominating_walk(const std::vector<std::int64_t>& xis,
                                     double offspring_mean, double level) {
  DominatingWalk w;
  w.level = level;
  w.offspring_mean = offspring_mean;
  w.walk.push_back(1);
  w.martingale.push_back(1.0);
  std::int64_t s = 1;
  for (std::size_t i = 0; i < xis.size(); ++i) {
    s += xis[i] - 1;
    const auto k = static_cast<double>(i + 1);
    const double m = static_cast<double>(s) + k * (1.0 - offspring_mean);
    w.walk.push_back(s);
    w.martingale.push_back(m);
    // Skip-free: the walk hits 0 exactly, keeping the stopped martingale >= 0.
    if (s == 0 || m > level) {
      w.stopped = true;
      w.stopping_step = static_cast<std::int64_t>(i + 1);
      break;
    }
  }
  return w;
}

DominatingWalk overcount_walk(const ModelParams& params, RngStream& rng, double level,
                              std::int64_t budget) {
  if (!(level > 0.0)) throw std::invalid_argument("overcount_walk: level must be positive");
  if (budget < 1) throw std::invalid_argument("overcount_walk: budget must be positive");
  const CutGammaLaw law(params.c);
  const double mean = expected_offspring(params);
  const double denom = params.lambda * static_cast<double>(params.n);
  DominatingWalk w;
  w.level = level;
  w.offspring_mean = mean;
  w.walk.push_back(1);
  w.martingale.push_back(1.0);
  std::int64_t s = 1;
  for (std::int64_t k = 1; k <= budget; ++k) {
    const double p = -std::expm1(-law.sample(rng) / denom);
    const auto xi = static_cast<std::int64_t>(
        rng.binomial(static_cast<std::uint64_t>(params.n), p));
    s += xi - 1;
    const double m = static_cast<double>(s) + static_cast<double>(k) * (1.0 - mean);
    w.walk.push_back(s);
    w.martingale.push_back(m);
    if (s == 0 || m > level) {
      w.stopped = true;
      w.stopping_step = k;
      break;
    }
  }
  return w;
}

FreeWalk free_walk(const ModelParams& params, RngStream& rng, std::int64_t budget) {
  const std::int64_t n = params.n;
  const CutGammaLaw law(params.c);
  const double denom = params.lambda * static_cast<double>(n);
  FreeWalk w;
  std::int64_t free = n;
  std::int64_t A = 0;
  for (std::int64_t k = 1; budget == 0 || k <= budget; ++k) {
    if (A == 0) {
      if (free == 0) break;
      --free;  // fresh seed consumes the lowest free vertex
    }
    const double p = -std::expm1(-law.sample(rng) / denom);
    const auto eta =
        static_cast<std::int64_t>(rng.binomial(static_cast<std::uint64_t>(free), p));
    free -= eta;
    A = (A > 0) ? A + eta - 1 : eta;
    w.offspring.push_back(static_cast<std::int32_t>(eta));
    w.active.push_back(A);
    w.free_after.push_back(n - A - k - (A == 0 ? 1 : 0));
  }
  w.exhausted = (A == 0 && free == 0);
  return w;
}

}  // namespace qrg
