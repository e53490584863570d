#include "qrg/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>
#include <unordered_map>

namespace qrg {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument(what);
}

struct UnionFind {
  std::vector<std::int32_t> parent;

  explicit UnionFind(std::size_t n) : parent(n) {
    std::iota(parent.begin(), parent.end(), 0);
  }

  std::int32_t find(std::int32_t x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  }

  void unite(std::int32_t a, std::int32_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[b] = a;
  }
};

}  // namespace

std::vector<std::int32_t> interval_offsets(const GraphRealization& g) {
  std::vector<std::int32_t> first(g.holes.size() + 1, 0);
  for (std::size_t v = 0; v < g.holes.size(); ++v) {
    const std::size_t m = g.holes[v].size();
    first[v + 1] = first[v] + static_cast<std::int32_t>(m == 0 ? 1 : m);
  }
  return first;
}

void GraphRealization::validate() const {
  require(static_cast<std::int64_t>(holes.size()) == params.n,
          "realization: holes must list every vertex");
  const double c = params.c;
  for (std::size_t v = 0; v < holes.size(); ++v) {
    const auto& hv = holes[v];
    for (std::size_t i = 0; i < hv.size(); ++i) {
      require(hv[i] >= 0.0 && hv[i] < c, "realization: hole position outside [0, c)");
      if (i > 0) require(hv[i] > hv[i - 1], "realization: holes must be sorted and distinct");
    }
  }
  for (std::size_t r = 0; r < links.size(); ++r) {
    const auto& pl = links[r];
    require(pl.i >= 0 && pl.i < pl.j && pl.j < params.n,
            "realization: link pair out of range");
    if (r > 0) {
      const auto& prev = links[r - 1];
      require(prev.i < pl.i || (prev.i == pl.i && prev.j < pl.j),
              "realization: link pairs must be sorted and distinct");
    }
    require(!pl.ts.empty(), "realization: link record without times");
    for (std::size_t i = 0; i < pl.ts.size(); ++i) {
      const double t = pl.ts[i];
      require(t >= 0.0 && t < c, "realization: link time outside [0, c)");
      if (i > 0) require(t > pl.ts[i - 1], "realization: link times must be sorted and distinct");
      for (std::int64_t v : {pl.i, pl.j}) {
        const auto& hv = holes[static_cast<std::size_t>(v)];
        if (std::binary_search(hv.begin(), hv.end(), t)) {
          throw std::invalid_argument(
              "realization: link time coincides with a hole (measure-zero event rejected)");
        }
      }
    }
  }
}

GraphRealization sample_realization(const ModelParams& params, RngStream& rng) {
  const std::int64_t n = params.n;
  const double c = params.c;
  GraphRealization g{params, {}, {}};
  g.holes.resize(static_cast<std::size_t>(n));
  for (auto& hv : g.holes) {
    const std::uint64_t k = rng.poisson(c);
    hv.resize(k);
    for (auto& h : hv) h = rng.uniform() * c;
    std::sort(hv.begin(), hv.end());
  }
  if (n >= 2) {
    const double mean_links = c * static_cast<double>(n - 1) / (2.0 * params.lambda);
    const std::uint64_t total = rng.poisson(mean_links);
    std::unordered_map<std::uint64_t, std::vector<double>> by_pair;
    by_pair.reserve(total);
    for (std::uint64_t m = 0; m < total; ++m) {
      std::uint64_t i = rng.uniform_int(static_cast<std::uint64_t>(n));
      std::uint64_t j = rng.uniform_int(static_cast<std::uint64_t>(n));
      while (j == i) j = rng.uniform_int(static_cast<std::uint64_t>(n));
      if (i > j) std::swap(i, j);
      by_pair[(i << 32) | j].push_back(rng.uniform() * c);
    }
    g.links.reserve(by_pair.size());
    for (auto& [key, ts] : by_pair) {
      std::sort(ts.begin(), ts.end());
      g.links.push_back(PairLinks{static_cast<std::int64_t>(key >> 32),
                                  static_cast<std::int64_t>(key & 0xFFFFFFFFull),
                                  std::move(ts)});
    }
    std::sort(g.links.begin(), g.links.end(), [](const PairLinks& a, const PairLinks& b) {
      return a.i < b.i || (a.i == b.i && a.j < b.j);
    });
  }
  g.validate();
  return g;
}

std::vector<Interval> intervals_of(const GraphRealization& g) {
  const double c = g.params.c;
  std::vector<Interval> out;
  out.reserve(g.holes.size());
  for (std::size_t v = 0; v < g.holes.size(); ++v) {
    const auto& hv = g.holes[v];
    const auto vid = static_cast<std::int64_t>(v);
    if (hv.empty()) {
      out.push_back(Interval{vid, 0.0, c, true});
      continue;
    }
    for (std::size_t i = 0; i < hv.size(); ++i) {
      const double start = hv[i];
      const double next = hv[(i + 1) % hv.size()];
      double len = circle_dist(start, next, c);
      if (len <= 0.0) len = c;  // single hole: the interval spans the punctured circle
      out.push_back(Interval{vid, start, len, false});
    }
  }
  return out;
}

std::int32_t locate_interval(const GraphRealization& g,
                             const std::vector<std::int32_t>& first_interval,
                             std::int64_t vertex, double t) {
  const auto& hv = g.holes[static_cast<std::size_t>(vertex)];
  const std::int32_t base = first_interval[static_cast<std::size_t>(vertex)];
  if (hv.empty()) return base;
  auto it = std::upper_bound(hv.begin(), hv.end(), t);
  std::int64_t idx;
  if (it == hv.begin()) {
    idx = static_cast<std::int64_t>(hv.size()) - 1;  // before the first hole: wrap interval
  } else {
    idx = std::distance(hv.begin(), it) - 1;
    if (hv[static_cast<std::size_t>(idx)] == t) {
      throw std::domain_error("locate_interval: point is exactly a hole");
    }
  }
  return base + static_cast<std::int32_t>(idx);
}

Decomposition decompose(const GraphRealization& g) {
  g.validate();
  const auto first = interval_offsets(g);
  const auto total = static_cast<std::size_t>(first.back());
  UnionFind uf(total);
  for (const auto& pl : g.links) {
    for (double t : pl.ts) {
      uf.unite(locate_interval(g, first, pl.i, t), locate_interval(g, first, pl.j, t));
    }
  }

  Decomposition d;
  d.component_of_interval.assign(total, -1);
  std::vector<std::int32_t> root_to_comp(total, -1);
  for (std::size_t id = 0; id < total; ++id) {
    const std::int32_t root = uf.find(static_cast<std::int32_t>(id));
    if (root_to_comp[root] < 0) {
      root_to_comp[root] = static_cast<std::int32_t>(d.components.size());
      d.components.push_back(ComponentInfo{{}, 0, 0});
    }
    const std::int32_t comp = root_to_comp[root];
    d.component_of_interval[id] = comp;
    d.components[static_cast<std::size_t>(comp)].interval_ids.push_back(
        static_cast<std::int32_t>(id));
  }
  for (const auto& pl : g.links) {
    for (double t : pl.ts) {
      const auto id = locate_interval(g, first, pl.i, t);
      ++d.components[static_cast<std::size_t>(d.component_of_interval[id])].link_count;
    }
  }
  for (auto& comp : d.components) {
    comp.surplus = comp.link_count - (static_cast<std::int64_t>(comp.interval_ids.size()) - 1);
    if (comp.surplus < 0) throw std::logic_error("decompose: negative surplus");
    d.ordered_sizes.push_back(static_cast<std::int64_t>(comp.interval_ids.size()));
  }
  std::sort(d.ordered_sizes.begin(), d.ordered_sizes.end(), std::greater<>());
  return d;
}

std::int32_t component_of_point(const GraphRealization& g, const Decomposition& d,
                                std::int64_t vertex, double t) {
  if (vertex < 0 || vertex >= g.params.n) {
    throw std::domain_error("component_of_point: vertex out of range");
  }
  const auto first = interval_offsets(g);
  return d.component_of_interval[static_cast<std::size_t>(
      locate_interval(g, first, vertex, circle_wrap(t, g.params.c)))];
}

void to_json(nlohmann::json& j, const GraphRealization& g) {
  j = nlohmann::json{
      {"params",
       {{"c", g.params.c}, {"lambda", g.params.lambda}, {"a", g.params.a}, {"n", g.params.n}}},
      {"holes", g.holes},
      {"links", nlohmann::json::array()}};
  for (const auto& pl : g.links) {
    j["links"].push_back({{"i", pl.i}, {"j", pl.j}, {"ts", pl.ts}});
  }
}

GraphRealization realization_from_json(const nlohmann::json& j) {
  const auto& p = j.at("params");
  ModelParams params(p.at("c").get<double>(), p.at("lambda").get<double>(),
                     p.at("a").get<double>(), p.at("n").get<std::int64_t>());
  GraphRealization g{params, {}, {}};
  g.holes = j.at("holes").get<std::vector<std::vector<double>>>();
  for (const auto& rec : j.at("links")) {
    g.links.push_back(PairLinks{rec.at("i").get<std::int64_t>(), rec.at("j").get<std::int64_t>(),
                                rec.at("ts").get<std::vector<double>>()});
  }
  g.validate();
  return g;
}

}  // namespace qrg
