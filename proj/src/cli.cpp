#include "rieszlab/cli.hpp"

#include <cmath>
#include <filesystem>
#include <iostream>
#include <map>
#include <set>

#include <CLI11.hpp>

#include "rieszlab/error.hpp"
#include "rieszlab/trace_io.hpp"

namespace rieszlab {

namespace {

constexpr int kResultSchemaVersion = 1;

void reject_unknown(const Json& j, std::initializer_list<const char*> allowed, const char* what) {
  const std::set<std::string> keys(allowed.begin(), allowed.end());
  for (const auto& [key, _] : j.items()) {
    if (!keys.count(key)) throw ValidationError(std::string("unknown key '") + key + "' in " + what);
  }
}

std::size_t get_count(const Json& j, const char* key) {
  const Json& v = j.at(key);
  if (!v.is_number_unsigned()) throw ValidationError(std::string("'") + key + "' must be a non-negative integer");
  return v.get<std::size_t>();
}

double get_number(const Json& j, const char* key) {
  const Json& v = j.at(key);
  if (!v.is_number()) throw ValidationError(std::string("'") + key + "' must be a number");
  return v.get<double>();
}

std::size_t parse_depth(const std::string& text) {
  if (text == "auto") return 0;
  try {
    std::size_t pos = 0;
    const long v = std::stol(text, &pos);
    if (pos != text.size() || v < 1) throw std::invalid_argument(text);
    return static_cast<std::size_t>(v);
  } catch (const std::exception&) {
    throw ValidationError("--depth must be a positive integer or 'auto'");
  }
}

Json gamma_json(const GammaEstimates& g) {
  return Json{{"g_low_hat", g.g_low_hat}, {"g_up_hat", g.g_up_hat},   {"spread", g.spread()},
              {"n_min_tail", g.n_min_tail}, {"n_max", g.n_max},     {"tail_records", g.tail_records},
              {"label", "estimate"}};
}

Json weak_star_json(const WeakStarStats& w) {
  Json trace = Json::array();
  for (const auto& [n, f] : w.frac1) trace.push_back(Json{{"N", n}, {"frac1", f}});
  return Json{{"frac1", trace},
              {"tail_min", w.tail_min},
              {"tail_max", w.tail_max},
              {"gap", w.gap},
              {"noise", w.noise},
              {"threshold", w.threshold},
              {"oscillation_signature", w.signature},
              {"insufficient_data", w.insufficient_data},
              {"tail_records", w.tail_records}};
}

std::optional<GammaEstimates> gamma_if_enough(const AsymptoticTrace& t) {
  if (t.records.size() < 4) return std::nullopt;
  return estimate_gamma(t);
}

Json result_json(const SetSpec& set, std::size_t n, double s, const SolveResult& r) {
  const double d = dimension(set);
  Json j{{"schema_version", kResultSchemaVersion},
         {"kind", "solve_result"},
         {"set_hash", set_hash(set)},
         {"set", to_json(set)},
         {"s", s},
         {"d", d},
         {"N", n},
         {"energy", r.energy.total},
         {"G", n >= 2 ? normalized_energy(r.energy.total, n, s, d) : 0.0},
         {"N1", r.N1},
         {"N2", r.N2},
         {"min_dist", std::isfinite(r.energy.min_dist) ? r.energy.min_dist : 0.0},
         {"status", to_string(r.status)},
         {"evaluations", r.evaluations},
         {"depth", r.depth},
         {"per_point", r.energy.per_point},
         {"configuration", to_json(r.config)}};
  return j;
}

void print_error(std::ostream& err, ErrorKind kind, const std::string& message) {
  err << Json{{"error", {{"kind", to_string(kind)}, {"message", message}}}}.dump() << "\n";
}

// Per-component traces assembled from cached part solves of a union sweep.
AsymptoticTrace component_trace(const Component& comp, double s, std::size_t n_min, std::size_t n_max,
                                const Cache& cache) {
  AsymptoticTrace t;
  t.set_id = set_hash(comp);
  t.s = s;
  t.d = dimension(comp);
  const SetSpec as_spec = std::holds_alternative<SelfSimilarSet>(comp) ? SetSpec(std::get<SelfSimilarSet>(comp))
                                                                       : SetSpec(std::get<Segment>(comp));
  for (std::size_t m = std::max<std::size_t>(n_min, 2); m <= n_max; ++m) {
    auto e = cache.get(t.set_id, s, m);
    if (!e) continue;
    try {
      check_configuration(e->config, as_spec);
      const EnergyReport rep = riesz_energy(e->config, s);
      TraceRecord r;
      r.N = m;
      r.E_best = rep.total;
      r.G = normalized_energy(rep.total, m, s, t.d);
      r.N1 = m;
      r.N2 = 0;
      r.frac1 = 1.0;
      r.min_dist = rep.min_dist;
      r.status = e->status;
      t.records.push_back(r);
    } catch (const Error&) {
      // skip stale entries
    }
  }
  return t;
}

struct Flags {
  std::string config;
  std::string preset;
  std::optional<double> s;
  std::optional<std::size_t> n, n_min, n_max;
  std::string depth;
  std::optional<std::size_t> restarts, levels, steps_per_point, segment_grid;
  std::optional<std::uint64_t> seed;
  bool deterministic = false;
  std::string cache;
  std::string out;
  bool force = false;
  bool no_cache = false;
};

ExperimentConfig load_config(const Flags& f) {
  ExperimentConfig cfg;
  if (!f.config.empty()) cfg = parse_experiment(read_json_file(f.config));
  if (!f.preset.empty()) cfg.set = preset_set(f.preset);
  if (f.s) cfg.s = *f.s;
  if (f.n) cfg.n = *f.n;
  if (f.n_min) cfg.n_min = *f.n_min;
  if (f.n_max) cfg.n_max = *f.n_max;
  if (!f.depth.empty()) cfg.search.depth = parse_depth(f.depth);
  if (f.restarts) cfg.search.restarts = *f.restarts;
  if (f.levels) cfg.search.levels = *f.levels;
  if (f.steps_per_point) cfg.search.steps_per_point = *f.steps_per_point;
  if (f.segment_grid) cfg.search.segment_grid = *f.segment_grid;
  if (f.seed) cfg.search.seed = *f.seed;
  if (f.deterministic) cfg.deterministic = true;
  if (!f.cache.empty()) cfg.cache_path = f.cache;
  if (!f.out.empty()) cfg.out_path = f.out;
  cfg.search.eval.deterministic = cfg.deterministic;
  cfg.validate();
  return cfg;
}

int cmd_solve(const Flags& f, std::ostream& out) {
  ExperimentConfig cfg = load_config(f);
  const std::size_t n = cfg.n ? cfg.n : cfg.n_min;
  Cache cache = f.no_cache ? Cache() : Cache(resolve_cache_path(cfg.cache_path));
  const SolveResult r = solve(*cfg.set, n, cfg.s, cfg.search, f.no_cache ? nullptr : &cache, nullptr, cfg.alpha_hint);
  if (!f.no_cache) cache.save();
  const Json j = result_json(*cfg.set, n, cfg.s, r);
  const std::string path = cfg.out_path.empty() ? "solve_result.json" : cfg.out_path;
  write_file_atomic(path, j.dump(2) + "\n");
  out << "N=" << n << " energy=" << format_double(r.energy.total) << " G=" << format_double(j.at("G").get<double>())
      << " N1=" << r.N1 << " N2=" << r.N2 << " status=" << to_string(r.status) << "\n";
  out << "wrote " << path << "\n";
  return kExitOk;
}

int cmd_sweep(const Flags& f, std::ostream& out) {
  ExperimentConfig cfg = load_config(f);
  if (cfg.n_max < cfg.n_min || cfg.n_max == 0) throw ValidationError("sweep needs n_min <= n_max");
  const std::string dir = cfg.out_path.empty() ? "sweep_out" : cfg.out_path;
  std::filesystem::create_directories(dir);
  const std::string trace_path = (std::filesystem::path(dir) / "trace.csv").string();

  Cache cache = f.no_cache ? Cache() : Cache(resolve_cache_path(cfg.cache_path));
  std::vector<std::size_t> ns;
  for (std::size_t n = cfg.n_min; n <= cfg.n_max; ++n) ns.push_back(n);

  SweepOptions opts;
  opts.cache = f.no_cache ? nullptr : &cache;
  opts.force = f.force;
  opts.alpha_hint = cfg.alpha_hint;
  // Partial traces and the cache are persisted after every N.
  opts.on_record = [&](const AsymptoticTrace& t) {
    write_trace_csv(trace_path, t);
    if (!f.no_cache) cache.save();
  };
  SweepStats stats;
  const AsymptoticTrace trace = sweep(*cfg.set, cfg.s, ns, cfg.search, opts, &stats);

  std::vector<std::pair<std::string, AsymptoticTrace>> traces{{trace_path, trace}};
  if (const auto* u = std::get_if<UnionSet>(&*cfg.set); u && !f.no_cache) {
    const std::string p1 = (std::filesystem::path(dir) / "trace_A1.csv").string();
    const std::string p2 = (std::filesystem::path(dir) / "trace_A2.csv").string();
    AsymptoticTrace t1 = component_trace(u->A1, cfg.s, cfg.n_min, cfg.n_max, cache);
    AsymptoticTrace t2 = component_trace(u->A2, cfg.s, cfg.n_min, cfg.n_max, cache);
    write_trace_csv(p1, t1);
    write_trace_csv(p2, t2);
    traces.emplace_back(p1, std::move(t1));
    traces.emplace_back(p2, std::move(t2));
  }
  Json summary = report_traces(traces);
  summary["sweep"] = Json{{"solves", stats.solves}, {"cache_hits", stats.cache_hits}, {"seed", cfg.search.seed},
                          {"restarts", cfg.search.restarts}, {"deterministic", cfg.deterministic}};
  if (const auto* u = std::get_if<UnionSet>(&*cfg.set)) {
    summary["union"] = Json{{"sep_lower", u->sep_lower}, {"diam_upper_A1", u->diam_upper_1}, {"diam_upper_A2", u->diam_upper_2}};
  }
  write_file_atomic((std::filesystem::path(dir) / "summary.json").string(), summary.dump(2) + "\n");
  out << "sweep N=" << cfg.n_min << ".." << cfg.n_max << " solves=" << stats.solves << " cache_hits=" << stats.cache_hits
      << "\n";
  out << "wrote " << trace_path << "\n";
  return kExitOk;
}

int cmd_report(const std::vector<std::string>& paths, const std::string& out_path, std::ostream& out) {
  if (paths.empty()) throw ValidationError("report needs at least one trace file");
  std::vector<std::pair<std::string, AsymptoticTrace>> traces;
  for (const auto& p : paths) traces.emplace_back(p, read_trace_csv(p));
  const Json summary = report_traces(traces);
  if (!out_path.empty()) write_file_atomic(out_path, summary.dump(2) + "\n");
  out << summary.dump(2) << "\n";
  return kExitOk;
}

}  // namespace

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Validation: return kExitValidation;
    case ErrorKind::Infeasible:
    case ErrorKind::InfiniteEnergy: return kExitSolver;
    case ErrorKind::Io: return kExitIo;
  }
  return 1;
}

void ExperimentConfig::validate() const {
  if (!set) throw ValidationError("no set given: use --config or --preset");
  const double d = dimension(*set);
  if (!(s > d)) {
    throw ValidationError("Riesz exponent s=" + format_double(s) + " must exceed the set dimension d=" + format_double(d));
  }
  search.validate();
}

ExperimentConfig parse_experiment(const Json& j) {
  if (!j.is_object()) throw ValidationError("experiment config must be a JSON object");
  ExperimentConfig cfg;
  if (j.contains("type") || j.contains("preset")) {
    cfg.set = parse_set(j);
    return cfg;
  }
  reject_unknown(j, {"schema_version", "set", "s", "n", "n_min", "n_max", "search", "alpha_hint", "cache", "out",
                     "deterministic"},
                 "experiment config");
  if (j.contains("schema_version") && j.at("schema_version") != 1) throw ValidationError("unsupported experiment schema_version");
  if (j.contains("set")) cfg.set = parse_set(j.at("set"));
  if (j.contains("s")) cfg.s = get_number(j, "s");
  if (j.contains("n")) cfg.n = get_count(j, "n");
  if (j.contains("n_min")) cfg.n_min = get_count(j, "n_min");
  if (j.contains("n_max")) cfg.n_max = get_count(j, "n_max");
  if (j.contains("alpha_hint")) cfg.alpha_hint = get_number(j, "alpha_hint");
  if (j.contains("cache")) cfg.cache_path = j.at("cache").get<std::string>();
  if (j.contains("out")) cfg.out_path = j.at("out").get<std::string>();
  if (j.contains("deterministic")) cfg.deterministic = j.at("deterministic").get<bool>();
  if (j.contains("search")) {
    const Json& sj = j.at("search");
    if (!sj.is_object()) throw ValidationError("search must be an object");
    reject_unknown(sj, {"depth", "restarts", "seed", "levels", "cooling", "steps_per_point", "tie_tol", "segment_grid",
                        "refine_top", "initial_temperature"},
                   "search");
    auto& p = cfg.search;
    if (sj.contains("depth")) {
      const Json& dj = sj.at("depth");
      p.depth = dj.is_string() ? parse_depth(dj.get<std::string>()) : parse_depth(std::to_string(get_count(sj, "depth")));
    }
    if (sj.contains("restarts")) p.restarts = get_count(sj, "restarts");
    if (sj.contains("seed")) p.seed = get_count(sj, "seed");
    if (sj.contains("levels")) p.levels = get_count(sj, "levels");
    if (sj.contains("cooling")) p.cooling = get_number(sj, "cooling");
    if (sj.contains("steps_per_point")) p.steps_per_point = get_count(sj, "steps_per_point");
    if (sj.contains("tie_tol")) p.tie_tol = get_number(sj, "tie_tol");
    if (sj.contains("segment_grid")) p.segment_grid = get_count(sj, "segment_grid");
    if (sj.contains("refine_top")) p.refine_top = get_count(sj, "refine_top");
    if (sj.contains("initial_temperature")) p.initial_temperature = get_number(sj, "initial_temperature");
  }
  return cfg;
}

Json report_traces(const std::vector<std::pair<std::string, AsymptoticTrace>>& traces) {
  if (traces.empty()) throw ValidationError("report needs at least one trace");
  const double s = traces.front().second.s;
  const AsymptoticTrace* uni = nullptr;
  std::vector<const std::pair<std::string, AsymptoticTrace>*> singles;
  for (const auto& entry : traces) {
    const auto& t = entry.second;
    if (std::abs(t.s - s) > 1e-12 * std::abs(s)) {
      throw ValidationError("incompatible traces: different s (" + format_double(s) + " vs " + format_double(t.s) + ")");
    }
    if (t.is_union) {
      if (uni && uni->set_id != t.set_id) throw ValidationError("incompatible traces: union traces of different sets");
      uni = &t;
    } else {
      singles.push_back(&entry);
    }
  }
  if (uni) {
    for (const auto* e : singles) {
      if (e->second.set_id != uni->a1_id && e->second.set_id != uni->a2_id) {
        throw ValidationError("incompatible traces: '" + e->first + "' is not a component of the union trace");
      }
    }
  }

  Json out{{"schema_version", kSummarySchemaVersion}, {"kind", "report"}, {"s", s}};
  Json items = Json::array();
  for (const auto& [path, t] : traces) {
    Json item{{"path", path},
              {"kind", t.is_union ? "union" : "single"},
              {"set_hash", t.set_id},
              {"d", t.d},
              {"records", t.records.size()}};
    if (auto g = gamma_if_enough(t)) {
      item["gamma"] = gamma_json(*g);
    } else {
      item["gamma"] = nullptr;
      item["gamma_note"] = "fewer than 4 records";
    }
    Json flags = Json::array();
    for (const auto& fl : lemma3_check(t, t.s, t.d)) {
      flags.push_back(Json{{"N", fl.n}, {"N_next", fl.n_next}, {"G", fl.g}, {"G_next", fl.g_next}, {"bound", fl.bound}});
    }
    item["lemma3_flags"] = flags;
    if (t.is_union) {
      item["a1_hash"] = t.a1_id;
      item["a2_hash"] = t.a2_id;
      item["weak_star"] = weak_star_json(weak_star_trace(t));
    }
    items.push_back(std::move(item));
  }
  out["traces"] = std::move(items);

  if (singles.size() == 2) {
    const AsymptoticTrace* a1 = &singles[0]->second;
    const AsymptoticTrace* a2 = &singles[1]->second;
    if (uni && a1->set_id == uni->a2_id) std::swap(a1, a2);
    auto g1 = gamma_if_enough(*a1);
    auto g2 = gamma_if_enough(*a2);
    if (g1 && g2 && g1->g_low_hat > 0.0 && g2->g_low_hat > 0.0) {
      const double g_a2 = 0.5 * (g2->g_low_hat + g2->g_up_hat);
      const SplitPrediction p = predict_split(g1->g_low_hat, g1->g_up_hat, g_a2, s, a1->d, "estimated");
      out["prediction"] = Json{{"alpha_star", p.alpha_star}, {"beta_star", p.beta_star}, {"g_low_A1", p.g_low_a1},
                               {"g_up_A1", p.g_up_a1},       {"g_A2", p.g_a2},          {"provenance", p.provenance},
                               {"A1_hash", a1->set_id},      {"A2_hash", a2->set_id}};
    } else {
      out["prediction"] = nullptr;
      out["prediction_note"] = "component traces need >= 4 records with positive G";
    }
  }
  return out;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Minimal Riesz energy experiments on fractals, segments and their separated unions", "rieszlab"};
  app.require_subcommand(1);

  Flags f;
  auto add_common = [&f](CLI::App* sub) {
    sub->add_option("--config", f.config, "Experiment or set definition JSON");
    sub->add_option("--preset", f.preset, "Built-in set: example-union, example-a1, example-a2");
    sub->add_option("--s", f.s, "Riesz exponent (must exceed the set dimension)");
    sub->add_option("--depth", f.depth, "Fractal address depth, integer or 'auto'");
    sub->add_option("--restarts", f.restarts, "Independent annealing restarts");
    sub->add_option("--seed", f.seed, "RNG seed");
    sub->add_option("--levels", f.levels, "Annealing temperature levels");
    sub->add_option("--steps-per-point", f.steps_per_point, "Annealing steps per level per point");
    sub->add_option("--segment-grid", f.segment_grid, "Discretize segments to this many nodes (0 = continuous)");
    sub->add_flag("--deterministic", f.deterministic, "Index-ordered reductions for bit-reproducible output");
    sub->add_option("--cache", f.cache, "Cache file (default $RIESZLAB_CACHE or .rieszlab_cache.json)");
    sub->add_flag("--no-cache", f.no_cache, "Neither read nor write the cache");
    sub->add_option("--out", f.out, "Output path");
  };

  CLI::App* solve_cmd = app.add_subcommand("solve", "Minimize the energy of N points");
  add_common(solve_cmd);
  solve_cmd->add_option("--n", f.n, "Number of points");
  solve_cmd->add_option("--n-min", f.n_min, "Alias for --n when --n is absent");

  CLI::App* sweep_cmd = app.add_subcommand("sweep", "Solve a range of N and write the asymptotic trace");
  add_common(sweep_cmd);
  sweep_cmd->add_option("--n-min", f.n_min, "Smallest N");
  sweep_cmd->add_option("--n-max", f.n_max, "Largest N");
  sweep_cmd->add_flag("--force", f.force, "Re-solve N values already in the cache");

  std::vector<std::string> report_paths;
  std::string report_out;
  CLI::App* report_cmd = app.add_subcommand("report", "Summarize trace CSV files");
  report_cmd->add_option("traces", report_paths, "Trace CSV files")->required();
  report_cmd->add_option("--out", report_out, "Write the summary JSON here");

  std::vector<std::string> argv_store{"rieszlab"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : argv_store) argv.push_back(a.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    if (solve_cmd->parsed()) return cmd_solve(f, out);
    if (sweep_cmd->parsed()) return cmd_sweep(f, out);
    if (report_cmd->parsed()) return cmd_report(report_paths, report_out, out);
  } catch (const Error& e) {
    print_error(err, e.kind(), e.what());
    return exit_code_for(e.kind());
  } catch (const std::filesystem::filesystem_error& e) {
    print_error(err, ErrorKind::Io, e.what());
    return kExitIo;
  } catch (const Json::exception& e) {
    print_error(err, ErrorKind::Validation, e.what());
    return kExitValidation;
  }
  return kExitValidation;
}

}  // namespace rieszlab
