#include "qrg/limit.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace qrg {

namespace {

void require(bool ok, const char* msg) {
  if (!ok) throw std::invalid_argument(msg);
}

}  // namespace

LimitParams::LimitParams(double a_, double lambda_, double c_, double dt_, double horizon_)
    : LimitParams(a_, lambda_, c_, dt_, horizon_, lambda_ / c_) {}

LimitParams::LimitParams(double a_, double lambda_, double c_, double dt_, double horizon_,
                         double mark_rate_factor_)
    : a(a_), lambda(lambda_), c(c_), dt(dt_), horizon(horizon_),
      mark_rate_factor(mark_rate_factor_) {
  require(std::isfinite(a), "limit: a must be finite");
  require(lambda > 0.0 && std::isfinite(lambda), "limit: lambda must be positive");
  require(c > 0.0 && std::isfinite(c), "limit: c must be positive");
  require(dt > 0.0 && std::isfinite(dt), "limit: dt must be positive");
  require(horizon >= dt && std::isfinite(horizon), "limit: horizon must cover one cell");
  require(mark_rate_factor >= 0.0 && std::isfinite(mark_rate_factor),
          "limit: mark rate factor must be nonnegative");
}

LimitPath simulate_w(const LimitParams& params, RngStream& rng, double noise_scale) {
  const auto cells = static_cast<std::int64_t>(std::llround(params.horizon / params.dt));
  require(cells >= 1, "limit: horizon shorter than dt");
  const double dt = params.dt;
  const double sq = std::sqrt(dt) * noise_scale;
  LimitPath path;
  path.dt = dt;
  path.w.resize(static_cast<std::size_t>(cells) + 1);
  path.b.resize(static_cast<std::size_t>(cells) + 1);
  path.runmin.resize(static_cast<std::size_t>(cells) + 1);
  path.w[0] = 0.0;
  double w = 0.0;
  for (std::int64_t i = 0; i < cells; ++i) {
    const double s = static_cast<double>(i) * dt;
    const double drift = params.a - (params.lambda / params.c) * s;
    w += drift * dt + sq * rng.normal();
    path.w[static_cast<std::size_t>(i) + 1] = w;
  }
  reflect(path);
  return path;
}

void reflect(LimitPath& path) {
  path.runmin.resize(path.w.size());
  path.b.resize(path.w.size());
  double mn = path.w.empty() ? 0.0 : path.w[0];
  for (std::size_t i = 0; i < path.w.size(); ++i) {
    mn = std::min(mn, path.w[i]);
    path.runmin[i] = mn;
    path.b[i] = path.w[i] - mn;
  }
}

ExcursionSet find_excursions(const LimitPath& path, double min_length) {
  ExcursionSet set;
  set.dt = path.dt;
  set.min_length = min_length;
  const auto cells = path.cells();
  std::int64_t start = -1;
  for (std::int64_t i = 0; i <= cells; ++i) {
    const bool up = path.b[static_cast<std::size_t>(i)] > 0.0;
    if (up && start < 0) start = i;
    if (!up && start >= 0) {
      Excursion e{start, i - start};
      if (e.length(path.dt) >= min_length) set.excursions.push_back(e);
      start = -1;
    }
  }
  if (start >= 0) {
    Excursion e{start, cells + 1 - start};
    e.complete = false;
    if (e.length(path.dt) >= min_length) set.excursions.push_back(e);
  }
  return set;
}

void sample_marks(ExcursionSet& set, const LimitPath& path, double factor, RngStream& rng) {
  set.total_marks = 0;
  auto next = set.excursions.begin();
  const auto cells = path.cells();
  for (std::int64_t i = 0; i < cells; ++i) {
    const auto m = static_cast<std::int64_t>(
        rng.poisson(factor * path.b[static_cast<std::size_t>(i)] * path.dt));
    set.total_marks += m;
    if (m == 0) continue;
    while (next != set.excursions.end() && next->start_index + next->cell_count <= i) ++next;
    if (next != set.excursions.end() && next->start_index <= i) next->marks += m;
  }
}

std::vector<std::pair<double, std::int64_t>> ordered_pairs(const ExcursionSet& set,
                                                           bool include_incomplete) {
  std::vector<std::tuple<double, std::int64_t, std::int64_t>> keyed;
  keyed.reserve(set.excursions.size());
  for (const auto& e : set.excursions) {
    if (!e.complete && !include_incomplete) continue;
    keyed.emplace_back(-e.length(set.dt), e.start_index, e.marks);
  }
  std::sort(keyed.begin(), keyed.end());
  std::vector<std::pair<double, std::int64_t>> out;
  out.reserve(keyed.size());
  for (const auto& [neg, st, marks] : keyed) out.emplace_back(-neg, marks);
  return out;
}

std::vector<double> ordered_lengths(const ExcursionSet& set, bool include_incomplete) {
  const auto pairs = ordered_pairs(set, include_incomplete);
  std::vector<double> out;
  out.reserve(pairs.size());
  for (const auto& [len, marks] : pairs) out.push_back(len);
  return out;
}

std::string path_to_csv(const LimitPath& path) {
  std::ostringstream os;
  os.precision(17);
  os << "s,w,b\n";
  for (std::size_t i = 0; i < path.w.size(); ++i) {
    os << static_cast<double>(i) * path.dt << ',' << path.w[i] << ',' << path.b[i] << '\n';
  }
  return os.str();
}

std::string excursions_to_json(const ExcursionSet& set, bool include_incomplete) {
  nlohmann::json j;
  j["dt"] = set.dt;
  j["min_length"] = set.min_length;
  j["total_marks"] = set.total_marks;
  j["gamma"] = ordered_lengths(set, include_incomplete);
  j["excursions"] = nlohmann::json::array();
  for (const auto& e : set.excursions) {
    j["excursions"].push_back({{"start", static_cast<double>(e.start_index) * set.dt},
                               {"length", e.length(set.dt)},
                               {"marks", e.marks},
                               {"complete", e.complete}});
  }
  return j.dump(2);
}

}  // namespace qrg
