#pragma once

#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include "qrg/model.hpp"
#include "qrg/rng.hpp"
#include "qrg/sampler.hpp"

namespace qrg {

// Record of one breadth-first exploration. Step k (1-based) explores one
// interval; offspring[k-1] intervals were newly activated by its links,
// active[k-1] is the active count A_k afterwards, walk[k] = walk[k-1] +
// offspring - 1 with walk[0] = 0, and surplus[k-1] counts links that landed
// in already-active intervals (cycles within the component).
struct WalkPath {
  std::int64_t n = 0;
  std::vector<std::int32_t> offspring;
  std::vector<std::int64_t> active;
  std::vector<std::int64_t> walk;  // size steps()+1, walk[0] = 0
  std::vector<std::int32_t> surplus;
  std::vector<std::int32_t> explored_vertex;
  std::vector<std::int64_t> closures;  // steps where the active count hit 0
  bool complete = false;               // every interval explored

  std::int64_t steps() const { return static_cast<std::int64_t>(offspring.size()); }
};

// Deterministic replay over a fully sampled realization. Seeds at vertex 0,
// time 0; among active intervals the lowest vertex goes first (ties by start
// point); when nothing is active it restarts at the lowest free vertex, or
// failing that at the neutral interval with the smallest start point. The
// returned decomposition must agree exactly with decompose() on the same
// realization.
std::pair<WalkPath, Decomposition> explore_realization(const GraphRealization& g);

// Same exploration law, but holes and links are sampled only when the walk
// reaches them, so memory and time scale with the number of steps rather
// than with n^2. budget = 0 runs until the graph is exhausted.
WalkPath explore_lazy(const ModelParams& params, RngStream& rng, std::int64_t budget);

// Interval around point s inside a neutral arc (arc_start, arc_start+arc_len):
// fresh hole distances left_draw/right_draw clipped at the arc boundaries,
// which are holes discovered earlier. Clips closer than kSegSnap collapse
// onto the boundary so circle tilings stay exact.
struct ArcInterval {
  double start;
  double length;
};
inline constexpr double kSegSnap = 1e-12;
ArcInterval clip_interval_to_arc(double s, double arc_start, double arc_len,
                                 double left_draw, double right_draw, double c);

struct ComponentStat {
  std::int64_t size;
  std::int64_t surplus;
  std::int32_t min_vertex;
  bool complete;  // false only for a trailing budget-cut component
};

// Components read off the walk: each new running minimum of walk[] closes a
// component; the steps since the previous closure are its intervals.
std::vector<ComponentStat> component_stats(const WalkPath& path);

// Component index of each step: iota[k-1] = 1 - min over j <= k-1 of walk[j].
std::vector<std::int64_t> iota_series(const WalkPath& path);

// nu[m][i] = number of vertices owning exactly m explored intervals once step
// i+1 has completed. Sum over m of m*nu[m][i] = min(i+1, total explored).
std::map<std::int64_t, std::vector<std::int64_t>> visit_counts(const WalkPath& path);

// Z rescaled onto continuous time: value(s) = n^(-1/3) * walk[floor(n^(2/3) s)].
struct RescaledWalk {
  std::vector<std::int64_t> walk;
  double n_cbrt;
  double n_23;

  double horizon() const { return static_cast<double>(walk.size() - 1) / n_23; }
  double operator()(double s) const;
};
RescaledWalk rescale_walk(const WalkPath& path, std::int64_t n);

// Overcounting comparison walk: i.i.d. offspring xi ~ Bin(n, 1-e^(-|I|/(lambda n)))
// with |I| cut-gamma. walk[k] = 1 + sum (xi_i - 1); martingale[k] recenters
// each increment by its exact mean. The walk is skip-free downward, so it
// stops exactly when walk hits 0 or when the martingale exceeds level; the
// stopped martingale is then nonnegative and Markov gives P(S* > H) <= 1/H.
struct DominatingWalk {
  std::vector<std::int64_t> walk;      // includes S_0 = 1
  std::vector<double> martingale;      // includes S*_0 = 1
  double level = 0.0;
  double offspring_mean = 0.0;
  std::int64_t stopping_step = 0;      // 0 when the budget ran out first
  bool stopped = false;
};
DominatingWalk overcount_walk(const ModelParams& params, RngStream& rng, double level,
                              std::int64_t budget);
// Deterministic core used by overcount_walk and by tests that inject xi.
DominatingWalk build_dominating_walk(const std::vector<std::int64_t>& xis,
                                     double offspring_mean, double level);

// Undercounting walk that ignores revisits: offspring are Bin(free targets, p)
// and every activated interval consumes a fresh vertex. free_after[k-1]
// records N^f_k = n - A^f_k - k - [A^f_k == 0].
struct FreeWalk {
  std::vector<std::int64_t> active;
  std::vector<std::int32_t> offspring;
  std::vector<std::int64_t> free_after;
  bool exhausted = false;
};
FreeWalk free_walk(const ModelParams& params, RngStream& rng, std::int64_t budget);

}  // namespace qrg
