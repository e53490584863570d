#include "qrg/cli.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <zlib.h>

#include "CLI11.hpp"
#include "json.hpp"
#include "qrg/experiments.hpp"
#include "qrg/exploration.hpp"
#include "qrg/limit.hpp"
#include "qrg/model.hpp"
#include "qrg/rng.hpp"
#include "qrg/sampler.hpp"

namespace qrg::cli {

namespace {

std::string fmt8(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.8g", v);
  return buf;
}

std::string gzip_compress(const std::string& data) {
  z_stream zs{};
  if (deflateInit2(&zs, Z_DEFAULT_COMPRESSION, Z_DEFLATED, 15 + 16, 8,
                   Z_DEFAULT_STRATEGY) != Z_OK) {
    throw std::runtime_error("gzip: deflateInit2 failed");
  }
  zs.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(data.data()));
  zs.avail_in = static_cast<uInt>(data.size());
  std::string out;
  char buf[1 << 15];
  int ret;
  do {
    zs.next_out = reinterpret_cast<Bytef*>(buf);
    zs.avail_out = sizeof buf;
    ret = deflate(&zs, Z_FINISH);
    if (ret != Z_OK && ret != Z_STREAM_END) {
      deflateEnd(&zs);
      throw std::runtime_error("gzip: deflate failed");
    }
    out.append(buf, sizeof buf - zs.avail_out);
  } while (ret != Z_STREAM_END);
  deflateEnd(&zs);
  return out;
}

// Writes to path, or to fallback stream when path is empty or "-".
void emit(const std::string& content, const std::string& path, std::ostream& fallback,
          bool gzip) {
  if (gzip && (path.empty() || path == "-")) {
    throw std::invalid_argument("--gzip requires --out");
  }
  if (path.empty() || path == "-") {
    fallback << content;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::invalid_argument("cannot open output file: " + path);
  const std::string& payload = gzip ? gzip_compress(content) : content;
  f.write(payload.data(), static_cast<std::streamsize>(payload.size()));
  if (!f) throw std::runtime_error("failed writing output file: " + path);
}

nlohmann::json load_json_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::invalid_argument("cannot open fixture: " + path);
  nlohmann::json j;
  try {
    f >> j;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument("fixture parse error in " + path + ": " + e.what());
  }
  return j;
}

std::string report_output(const ExperimentReport& rep, const std::string& format) {
  if (format == "json") return rep.to_json() + "\n";
  if (format == "text") return rep.to_text();
  if (format == "csv") return rep.raw_csv();
  throw std::invalid_argument("unknown format: " + format);
}

struct CommonFlags {
  std::uint64_t seed = 0;
  CLI::Option* seed_opt = nullptr;
  int workers = 1;
  std::string format = "json";
  std::string out;

  std::uint64_t final_seed() const { return resolve_seed(seed_opt->count() > 0, seed); }
};

void add_common(CLI::App* sub, CommonFlags& f, bool with_format = true) {
  f.seed_opt = sub->add_option("--seed", f.seed, "master seed (fallback: QRG_SEED env)");
  sub->add_option("--workers", f.workers, "replica worker threads")
      ->check(CLI::PositiveNumber);
  if (with_format) {
    sub->add_option("--format", f.format, "json | text | csv")
        ->check(CLI::IsMember({"json", "text", "csv"}));
  }
  sub->add_option("--out", f.out, "output path (default stdout)");
}

}  // namespace

std::uint64_t resolve_seed(bool seed_given, std::uint64_t seed_flag) {
  if (seed_given) return seed_flag;
  if (const char* env = std::getenv("QRG_SEED")) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (end == env || *end != '\0') {
      throw std::invalid_argument("QRG_SEED is not a decimal 64-bit integer");
    }
    return static_cast<std::uint64_t>(v);
  }
  return kDefaultSeed;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"simulation laboratory for critical quantum random graphs"};
  app.require_subcommand(1);

  // params
  double p_c = 1.0, p_a = 0.0;
  std::int64_t p_n = 1000;
  std::string p_format = "text";
  auto* sp = app.add_subcommand("params", "print window parameters for (c, a, n)");
  sp->add_option("--c", p_c, "circle length")->required();
  sp->add_option("--a", p_a, "window location");
  sp->add_option("--n", p_n, "vertex count")->required();
  sp->add_option("--format", p_format, "text | json")->check(CLI::IsMember({"text", "json"}));

  // sample
  double sm_c = 1.0, sm_a = 0.0;
  std::int64_t sm_n = 100;
  CommonFlags sm;
  auto* ss = app.add_subcommand("sample", "sample a full realization, emit JSON");
  ss->add_option("--c", sm_c, "circle length");
  ss->add_option("--a", sm_a, "window location");
  ss->add_option("--n", sm_n, "vertex count")->required();
  add_common(ss, sm, false);

  // explore
  double ex_c = 1.0, ex_a = 0.0, ex_lambda = 0.0;
  std::int64_t ex_n = 100, ex_budget = 0;
  std::string ex_fixture;
  bool ex_gzip = false;
  CommonFlags ex;
  auto* se = app.add_subcommand("explore", "run the exploration walk, emit JSON-lines");
  se->add_option("--c", ex_c, "circle length");
  se->add_option("--a", ex_a, "window location");
  auto* ex_n_opt = se->add_option("--n", ex_n, "vertex count");
  auto* ex_lambda_opt = se->add_option("--lambda", ex_lambda, "override window lambda");
  se->add_option("--budget", ex_budget, "step budget, 0 = run to exhaustion");
  se->add_option("--fixture", ex_fixture, "explore a stored realization instead of sampling");
  se->add_flag("--gzip", ex_gzip, "gzip the output (requires --out)");
  add_common(se, ex, false);

  // limit
  double li_a = 1.0, li_c = 1.0, li_lambda = 0.0, li_dt = 1e-3, li_horizon = 10.0;
  double li_factor = -1.0, li_minlen = -1.0;
  bool li_incomplete = false;
  std::string li_csv;
  CommonFlags li;
  auto* sl = app.add_subcommand("limit", "simulate the reflected limit path and marks");
  sl->add_option("--a", li_a, "drift coefficient");
  sl->add_option("--c", li_c, "circle length");
  auto* li_lambda_opt = sl->add_option("--lambda", li_lambda, "limit lambda (default critical)");
  sl->add_option("--dt", li_dt, "grid step");
  sl->add_option("--horizon", li_horizon, "time horizon");
  sl->add_option("--factor", li_factor, "mark rate factor (default lambda/c)");
  sl->add_option("--min-length", li_minlen, "excursion length filter (default 5*dt)");
  sl->add_flag("--include-incomplete", li_incomplete,
               "keep horizon-cut excursions in the ordered lengths");
  sl->add_option("--csv-out", li_csv, "write the path CSV here (default stdout)");
  add_common(sl, li, false);

  // experiment group
  auto* sx = app.add_subcommand("experiment", "orchestrated acceptance experiments");
  sx->require_subcommand(1);

  Theorem1Config t1;
  CommonFlags t1f;
  auto* xt1 = sx->add_subcommand("theorem1", "largest-component tail at criticality");
  xt1->add_option("--c", t1.c, "circle length");
  xt1->add_option("--n", t1.n, "vertex count");
  xt1->add_option("--replicas", t1.replicas, "replica count");
  xt1->add_option("--big-a", t1.big_a, "upper-tail grid A");
  xt1->add_option("--delta", t1.small_delta, "lower-tail grid delta");
  add_common(xt1, t1f);

  WalkConvergenceConfig wc;
  CommonFlags wcf;
  auto* xwc = sx->add_subcommand("walk", "rescaled walk drift and variance");
  xwc->add_option("--c", wc.c, "circle length");
  xwc->add_option("--a", wc.a, "window location");
  xwc->add_option("--n", wc.n, "vertex count");
  xwc->add_option("--replicas", wc.replicas, "replica count");
  xwc->add_option("--s-grid", wc.s_grid, "rescaled time grid");
  add_common(xwc, wcf);

  Theorem2Config t2;
  CommonFlags t2f;
  auto* xt2 = sx->add_subcommand("theorem2", "sizes and surplus against the limit");
  xt2->add_option("--c", t2.c, "circle length");
  xt2->add_option("--a", t2.a, "window location");
  xt2->add_option("--n", t2.n, "vertex count");
  xt2->add_option("--replicas", t2.replicas, "replicas per side");
  xt2->add_option("--dt", t2.dt, "limit grid step");
  xt2->add_option("--horizon", t2.horizon, "limit horizon");
  xt2->add_option("--factor", t2.mark_rate_factor, "mark rate factor (default lambda/c)");
  xt2->add_option("--min-length", t2.min_length, "excursion filter (default 5*dt)");
  add_common(xt2, t2f);

  LateComponentsConfig lc;
  CommonFlags lcf;
  auto* xlc = sx->add_subcommand("late", "large components avoiding early labels");
  xlc->add_option("--c", lc.c, "circle length");
  xlc->add_option("--a", lc.a, "window location");
  xlc->add_option("--n", lc.n, "vertex count");
  xlc->add_option("--replicas", lc.replicas, "replica count");
  xlc->add_option("--delta", lc.delta, "size threshold in n^{2/3} units");
  xlc->add_option("--y-grid", lc.y_grid, "label cutoff grid in n^{1/3} units");
  add_common(xlc, lcf);

  DoeblinConfig db;
  CommonFlags dbf;
  auto* xdb = sx->add_subcommand("doeblin", "total-variation mixing on mixture kernels");
  xdb->add_option("--k-states", db.k_states, "state count");
  xdb->add_option("--epsilon", db.epsilon, "uniform component mass");
  xdb->add_option("--start", db.start_state, "start state");
  xdb->add_option("--n-max", db.n_max, "iteration horizon");
  xdb->add_option("--kernels", db.kernels, "random kernels to draw");
  add_common(xdb, dbf);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(std::move(reversed));
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return 1;
  }

  try {
    if (sp->parsed()) {
      const ModelParams mp = window_params(p_c, p_a, p_n);
      const double intensity = 1.0 / (mp.lambda * static_cast<double>(mp.n));
      if (p_format == "json") {
        nlohmann::json j{{"c", mp.c},
                         {"a", mp.a},
                         {"n", mp.n},
                         {"lambda", mp.lambda},
                         {"interval_mean", mean_interval_length(mp.c)},
                         {"link_intensity", intensity}};
        out << j.dump(2) << '\n';
      } else {
        out << "c = " << fmt8(mp.c) << '\n';
        out << "a = " << fmt8(mp.a) << '\n';
        out << "n = " << mp.n << '\n';
        out << "lambda = " << fmt8(mp.lambda) << '\n';
        out << "interval_mean = " << fmt8(mean_interval_length(mp.c)) << '\n';
        out << "link_intensity = " << fmt8(intensity) << '\n';
      }
      return 0;
    }

    if (ss->parsed()) {
      const ModelParams mp = window_params(sm_c, sm_a, sm_n);
      RngStream rng = RngStream::for_replica(sm.final_seed(), 0);
      const GraphRealization g = sample_realization(mp, rng);
      const nlohmann::json j = g;
      emit(j.dump(2) + "\n", sm.out, out, false);
      return 0;
    }

    if (se->parsed()) {
      WalkPath path;
      if (!ex_fixture.empty()) {
        const GraphRealization g = realization_from_json(load_json_file(ex_fixture));
        if (ex_n_opt->count() > 0 && g.params.n != ex_n) {
          throw std::invalid_argument("fixture vertex count disagrees with --n");
        }
        auto [p, d] = explore_realization(g);
        path = std::move(p);
      } else {
        if (ex_n_opt->count() == 0) {
          throw std::invalid_argument("explore needs --n or --fixture");
        }
        const ModelParams mp = ex_lambda_opt->count() > 0
                                   ? ModelParams(ex_c, ex_lambda, ex_a, ex_n)
                                   : window_params(ex_c, ex_a, ex_n);
        RngStream rng = RngStream::for_replica(ex.final_seed(), 0);
        path = explore_lazy(mp, rng, ex_budget);
      }
      const auto iota = iota_series(path);
      std::ostringstream os;
      for (std::int64_t k = 1; k <= path.steps(); ++k) {
        const auto i = static_cast<std::size_t>(k - 1);
        os << nlohmann::json{{"k", k},
                             {"eta", path.offspring[i]},
                             {"A", path.active[i]},
                             {"Z", path.walk[static_cast<std::size_t>(k)]},
                             {"iota", iota[i]},
                             {"surplus_delta", path.surplus[i]}}
                  .dump()
           << '\n';
      }
      nlohmann::json comps = nlohmann::json::array();
      for (const auto& st : component_stats(path)) {
        comps.push_back({{"size", st.size},
                         {"surplus", st.surplus},
                         {"min_vertex", st.min_vertex},
                         {"complete", st.complete}});
      }
      os << nlohmann::json{{"summary",
                            {{"n", path.n}, {"complete", path.complete}, {"components", comps}}}}
                .dump()
         << '\n';
      emit(os.str(), ex.out, out, ex_gzip);
      return 0;
    }

    if (sl->parsed()) {
      const double lambda = li_lambda_opt->count() > 0 ? li_lambda : critical_lambda(li_c);
      const double factor = li_factor < 0.0 ? lambda / li_c : li_factor;
      const double minlen = li_minlen < 0.0 ? 5.0 * li_dt : li_minlen;
      const LimitParams lp(li_a, lambda, li_c, li_dt, li_horizon, factor);
      RngStream rng = RngStream::for_replica(li.final_seed(), 0);
      const LimitPath path = simulate_w(lp, rng);
      ExcursionSet set = find_excursions(path, minlen);
      sample_marks(set, path, factor, rng);
      emit(path_to_csv(path), li_csv, out, false);
      emit(excursions_to_json(set, li_incomplete) + "\n", li.out, out, false);
      return 0;
    }

    ExperimentReport rep;
    const CommonFlags* flags = nullptr;
    if (xt1->parsed()) {
      t1.seed = t1f.final_seed();
      t1.workers = t1f.workers;
      rep = experiment_theorem1(t1);
      flags = &t1f;
    } else if (xwc->parsed()) {
      wc.seed = wcf.final_seed();
      wc.workers = wcf.workers;
      rep = experiment_walk_convergence(wc);
      flags = &wcf;
    } else if (xt2->parsed()) {
      t2.seed = t2f.final_seed();
      t2.workers = t2f.workers;
      rep = experiment_theorem2(t2);
      flags = &t2f;
    } else if (xlc->parsed()) {
      lc.seed = lcf.final_seed();
      lc.workers = lcf.workers;
      rep = experiment_late_components(lc);
      flags = &lcf;
    } else if (xdb->parsed()) {
      db.seed = dbf.final_seed();
      rep = experiment_doeblin(db);
      flags = &dbf;
    } else {
      err << "no subcommand dispatched\n";
      return 1;
    }
    emit(report_output(rep, flags->format), flags->out, out, false);
    return 0;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::domain_error& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::out_of_range& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return 2;
  }
}

}  // namespace qrg::cli
