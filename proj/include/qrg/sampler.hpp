#pragma once

#include <cstdint>
#include <vector>

#include "json.hpp"

#include "qrg/model.hpp"
#include "qrg/rng.hpp"

namespace qrg {

// Wrap a position onto [0, c).
inline double circle_wrap(double t, double c) {
  t = std::fmod(t, c);
  if (t < 0.0) t += c;
  if (t >= c) t = 0.0;
  return t;
}

// Arc distance from `from` to `to` walking in the positive direction.
inline double circle_dist(double from, double to, double c) {
  double d = to - from;
  if (d < 0.0) d += c;
  return d;
}

// Hole-free stretch of a vertex's circle. Endpoints are holes except for the
// full circle of a hole-free vertex; a one-hole vertex carries a single
// non-full interval of length c starting at its hole.
struct Interval {
  std::int64_t vertex;
  double start;
  double length;
  bool full_circle;
};

// Membership is open at the endpoints (they are holes); t exactly on a hole
// belongs to no interval.
inline bool interval_contains(const Interval& iv, double t, double c) {
  if (iv.full_circle) return true;
  const double d = circle_dist(iv.start, t, c);
  return d > 0.0 && d < iv.length;
}

struct PairLinks {
  std::int64_t i;  // i < j
  std::int64_t j;
  std::vector<double> ts;  // sorted, distinct link times
};

// Sampled (or fixture-loaded) graph: per-vertex hole positions plus per-pair
// link times. Probability-zero coincidences (duplicate positions, a link time
// equal to a hole of either endpoint) are rejected by validate().
struct GraphRealization {
  ModelParams params;
  std::vector<std::vector<double>> holes;  // per vertex, sorted ascending
  std::vector<PairLinks> links;            // sorted by (i, j)

  void validate() const;
};

// Holes: per-vertex Poisson(c) counts with uniform positions. Links: a total
// count Poisson(c(n-1)/(2 lambda)) assigned to uniform pairs and uniform
// times, which matches independent per-pair Poisson(c/(lambda n)) counts
// without touching all n(n-1)/2 pairs.
GraphRealization sample_realization(const ModelParams& params, RngStream& rng);

std::vector<Interval> intervals_of(const GraphRealization& g);

struct ComponentInfo {
  std::vector<std::int32_t> interval_ids;  // ascending
  std::int64_t link_count;
  std::int64_t surplus;  // link_count - (intervals - 1), nonnegative
};

struct Decomposition {
  std::vector<ComponentInfo> components;
  std::vector<std::int32_t> component_of_interval;  // interval id -> component index
  std::vector<std::int64_t> ordered_sizes;          // interval counts, descending
};

// Connected components of intervals under the link relation: a link at time t
// joins the interval containing t on each endpoint vertex.
Decomposition decompose(const GraphRealization& g);

// Index (into d.components) of the component owning the interval that covers
// (vertex, t). Throws std::domain_error when t is exactly a hole.
std::int32_t component_of_point(const GraphRealization& g, const Decomposition& d,
                                std::int64_t vertex, double t);

// first_interval[v] = id of vertex v's first interval in intervals_of() order;
// the back entry is the total interval count.
std::vector<std::int32_t> interval_offsets(const GraphRealization& g);

// Interval id covering (vertex, t); throws std::domain_error on a hole point.
std::int32_t locate_interval(const GraphRealization& g,
                             const std::vector<std::int32_t>& first_interval,
                             std::int64_t vertex, double t);

void to_json(nlohmann::json& j, const GraphRealization& g);
GraphRealization realization_from_json(const nlohmann::json& j);

}  // namespace qrg
