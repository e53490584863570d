#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qrg/model.hpp"
#include "qrg/rng.hpp"

namespace qrg {

// Scaling-limit diffusion: drift a - (lambda/c) s at time s, unit noise.
struct LimitParams {
  double a;
  double lambda;
  double c;
  double dt;
  double horizon;
  double mark_rate_factor;  // surplus intensity multiplier, default lambda/c

  LimitParams(double a_, double lambda_, double c_, double dt_, double horizon_);
  LimitParams(double a_, double lambda_, double c_, double dt_, double horizon_,
              double mark_rate_factor_);
};

// Euler grid path: w[i] at s = i*dt, with running minimum and reflection
// b = w - runmin, all of size cells+1.
struct LimitPath {
  double dt;
  std::vector<double> w;
  std::vector<double> b;
  std::vector<double> runmin;

  std::int64_t cells() const { return static_cast<std::int64_t>(w.size()) - 1; }
};

// noise_scale rescales the Brownian term only; 0 gives the deterministic
// drift curve a*s - (lambda/c) s^2/2.
LimitPath simulate_w(const LimitParams& params, RngStream& rng, double noise_scale = 1.0);

// Recomputes runmin and b from w in one pass.
void reflect(LimitPath& path);

// Excursion of b above zero: cells [start_index, start_index + cell_count).
struct Excursion {
  std::int64_t start_index;
  std::int64_t cell_count;
  std::int64_t marks = 0;
  bool complete = true;

  double length(double dt) const { return static_cast<double>(cell_count) * dt; }
};

struct ExcursionSet {
  double dt;
  double min_length;
  std::vector<Excursion> excursions;  // in time order
  std::int64_t total_marks = 0;
};

// Maximal runs of b > 0; runs shorter than min_length are dropped, a run
// still open at the horizon is kept but flagged incomplete.
ExcursionSet find_excursions(const LimitPath& path, double min_length);

// Poisson marks per cell at rate factor * b[i] * dt (left endpoint rule),
// accumulated into each excursion and into total_marks over the whole path.
void sample_marks(ExcursionSet& set, const LimitPath& path, double factor, RngStream& rng);

// Excursion lengths longest first, ties broken by earlier start. Excursions
// cut off by the horizon are excluded unless include_incomplete is set.
std::vector<double> ordered_lengths(const ExcursionSet& set, bool include_incomplete = false);

// (length, marks) pairs in the same order as ordered_lengths.
std::vector<std::pair<double, std::int64_t>> ordered_pairs(const ExcursionSet& set,
                                                           bool include_incomplete = false);

std::string path_to_csv(const LimitPath& path);

// JSON object with the excursion list, total marks, and the ordered gamma
// vector (subject to the include_incomplete policy).
std::string excursions_to_json(const ExcursionSet& set, bool include_incomplete = false);

}  // namespace qrg
