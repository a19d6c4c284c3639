#include <doctest.h>

#include <cmath>
#include <set>

#include "rieszlab/asymptotics.hpp"
#include "rieszlab/error.hpp"
#include "rieszlab/io.hpp"
#include "rieszlab/optimizer.hpp"
#include "rieszlab/trace_io.hpp"

using namespace rieszlab;

namespace {

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

SelfSimilarSet shifted_fractal(double dx) {
  const SelfSimilarSet base = example_fractal();
  std::vector<Similitude> maps;
  for (const auto& m : base.maps()) {
    Vec t = m.translation();
    t[0] += dx;
    maps.emplace_back(m.scale(), t);
  }
  return SelfSimilarSet::create(maps);
}

SearchParams quick(std::uint64_t seed = 1) {
  SearchParams p;
  p.seed = seed;
  p.restarts = 4;
  p.levels = 10;
  p.steps_per_point = 60;
  return p;
}

double part_energy(const Configuration& c, Host h, double s) {
  Configuration part(c.dim());
  for (std::size_t i = 0; i < c.size(); ++i)
    if (c.host(i) == h) part.push_back(c.point(i), h, c.intrinsic(i));
  return riesz_energy(part, s).total;
}

}  // namespace

TEST_SUITE("optimizer") {

TEST_CASE("auto depth rule") {
  const auto f = example_fractal();
  CHECK(auto_depth(f, 2) == 2);
  CHECK(auto_depth(f, 10) == 3);   // log_4(40) = 2.66
  CHECK(auto_depth(f, 16) == 3);   // log_4(64) = 3 exactly
  CHECK(auto_depth(f, 40) == 4);
}

TEST_CASE("exhaustive: single subset of the depth-1 pool") {
  const SetSpec set = example_fractal();
  ExhaustiveOptions opts;
  opts.depth = 1;
  const auto r = minimize_exhaustive(set, 4, 3.0, opts);
  const double a = 0.75, diag = 0.75 * std::sqrt(2.0);
  const double expected = 2.0 * (4.0 * std::pow(a, -3.0) + 2.0 * std::pow(diag, -3.0));
  CHECK(r.energy.total == doctest::Approx(expected).epsilon(1e-14));
  CHECK(r.status == SolveStatus::OracleExact);
  CHECK(r.N1 == 4);
  CHECK(r.N2 == 0);
}

TEST_CASE("exhaustive: segment grid and refusal") {
  const SetSpec seg = Segment({0.0}, {1.0});
  ExhaustiveOptions opts;
  opts.segment_grid = 3;
  CHECK(minimize_exhaustive(seg, 3, 1.0, opts).energy.total == doctest::Approx(10.0));
  CHECK_THROWS_AS(minimize_exhaustive(seg, 4, 1.0, opts), InfeasibleError);
  ExhaustiveOptions tiny;
  tiny.depth = 3;
  tiny.max_subsets = 100;
  CHECK_THROWS_WITH_AS(minimize_exhaustive(SetSpec(example_fractal()), 4, 3.0, tiny), doctest::Contains("635376"),
                       InfeasibleError);
}

TEST_CASE("exhaustive parallel enumeration matches the serial reference") {
  const SetSpec fractal = example_fractal();
  const SetSpec seg = Segment({0.0, 0.0}, {2.0, 1.0});
  const SetSpec uni = example_union();
  struct Inst {
    const SetSpec* set;
    std::size_t n, depth, grid;
    double s;
  };
  const std::vector<Inst> insts{{&fractal, 3, 2, 3, 3.0}, {&fractal, 5, 2, 3, 2.0}, {&seg, 4, 1, 9, 1.5},
                                {&seg, 6, 1, 12, 3.0},    {&uni, 3, 1, 5, 3.0},     {&uni, 5, 1, 6, 4.0},
                                {&fractal, 1, 2, 3, 3.0}, {&uni, 2, 2, 4, 3.0}};
  for (const auto& in : insts) {
    ExhaustiveOptions o;
    o.depth = in.depth;
    o.segment_grid = in.grid;
    const auto fast = minimize_exhaustive(*in.set, in.n, in.s, o);
    const auto ref = minimize_exhaustive_reference(*in.set, in.n, in.s, o);
    CHECK(rel(fast.energy.total + 1.0, ref.energy.total + 1.0) < 1e-12);
    CHECK(fast.N1 == ref.N1);
  }
}

TEST_CASE("local search on segments") {
  const SetSpec seg = Segment({0.0}, {1.0});
  for (std::uint64_t seed : {1u, 2u, 99u}) {
    const auto r = minimize_local_search(seg, 3, 1.0, quick(seed));
    CHECK(r.energy.total == doctest::Approx(10.0).epsilon(1e-9));
    std::set<double> ts;
    for (std::size_t i = 0; i < 3; ++i) ts.insert(std::get<double>(r.config.intrinsic(i)));
    auto it = ts.begin();
    CHECK(*it++ == doctest::Approx(0.0).epsilon(1e-4));
    CHECK(std::abs(*it++ - 0.5) < 1e-4);
    CHECK(*it == doctest::Approx(1.0));
  }
  for (double s : {1.5, 2.0, 7.0}) {
    const auto r = minimize_local_search(seg, 2, s, quick());
    CHECK(r.energy.total == doctest::Approx(2.0).epsilon(1e-12));
  }
}

TEST_CASE("local search matches the exhaustive oracle on the depth-2 pool") {
  const SetSpec f = example_fractal();
  SearchParams p = quick(5);
  p.depth = 2;
  p.restarts = 8;
  ExhaustiveOptions o;
  o.depth = 2;
  for (std::size_t n : {2u, 3u, 4u, 5u}) {
    const auto ex = minimize_exhaustive(f, n, 3.0, o);
    const auto ls = minimize_local_search(f, n, 3.0, p);
    CHECK(ls.energy.total >= ex.energy.total * (1.0 - 1e-12));
    CHECK(rel(ls.energy.total, ex.energy.total) < 1e-12);
  }
}

TEST_CASE("local search infeasibility names the depth") {
  SearchParams p = quick();
  p.depth = 1;
  CHECK_THROWS_WITH_AS(minimize_local_search(SetSpec(example_fractal()), 5, 3.0, p), doctest::Contains("depth"),
                       InfeasibleError);
}

TEST_CASE("local search is seed-deterministic and never worse than its warm start") {
  const SetSpec f = example_fractal();
  const auto a = minimize_local_search(f, 7, 3.0, quick(17));
  const auto b = minimize_local_search(f, 7, 3.0, quick(17));
  CHECK(a.energy.total == b.energy.total);
  CHECK(to_json(a.config) == to_json(b.config));

  SearchParams p = quick(3);
  p.levels = 1;
  p.steps_per_point = 1;
  p.restarts = 1;
  const auto c = minimize_local_search(f, 7, 3.0, p, &a.config);
  CHECK(c.energy.total <= a.energy.total);
}

TEST_CASE("parameter validation") {
  SearchParams p;
  p.restarts = 0;
  CHECK_THROWS_AS(p.validate(), ValidationError);
  p = SearchParams{};
  p.cooling = 1.0;
  CHECK_THROWS_AS(p.validate(), ValidationError);
}

TEST_CASE("union with two points splits across components") {
  const UnionSet u = example_union();
  const auto r = minimize_union(u, 2, 3.0, quick());
  // Farthest cross pair: the depth-limited approximation (0, 1 - 4^-depth) of
  // the corner (0,1) on A1, and the far endpoint (4,0) on A2.
  const double y = 1.0 - std::pow(4.0, -static_cast<double>(r.depth));
  CHECK(r.energy.total == doctest::Approx(2.0 * std::pow(16.0 + y * y, -1.5)).epsilon(1e-9));
  CHECK(r.N1 == 1);
  CHECK(r.N2 == 1);
}

TEST_CASE("union trivial sizes") {
  const UnionSet u = example_union();
  CHECK(minimize_union(u, 0, 3.0, quick()).energy.total == 0.0);
  const auto one = minimize_union(u, 1, 3.0, quick());
  CHECK(one.energy.total == 0.0);
  CHECK(one.N1 + one.N2 == 1);
  CHECK(one.config.size() == 1);
}

TEST_CASE("symmetric union agrees with the exhaustive split oracle") {
  const UnionSet u = validate_union(example_fractal(), shifted_fractal(3.0));
  SearchParams p = quick(4);
  p.depth = 2;
  p.restarts = 8;
  ExhaustiveOptions o;
  o.depth = 2;
  for (std::size_t n : {2u, 4u}) {
    const auto ex = minimize_exhaustive(SetSpec(u), n, 3.0, o);
    const auto ls = minimize_union(u, n, 3.0, p);
    CHECK(rel(ls.energy.total, ex.energy.total) < 1e-9);
    CHECK(ls.N1 == ex.N1);
    CHECK(ls.N1 + ls.N2 == n);
  }
}

TEST_CASE("part decomposition on union results") {
  const UnionSet u = example_union();
  for (std::size_t n : {3u, 6u, 9u}) {
    const auto r = minimize_union(u, n, 3.0, quick(n));
    const double parts = part_energy(r.config, Host::A1, 3.0) + part_energy(r.config, Host::A2, 3.0);
    CHECK(r.energy.total >= parts);
    CHECK(r.N1 <= r.config.count(Host::A1));
  }
}

TEST_CASE("split window") {
  CHECK(split_window(10, std::nullopt, false).size() == 11);
  const auto w = split_window(40, 0.5, true);
  CHECK(w.front() == 14);
  CHECK(w.back() == 26);
  const auto edge = split_window(30, 0.0, true);
  CHECK(edge.front() == 0);
  CHECK(edge.back() == 5);
}

TEST_CASE("greedy insertion adds one distinct point") {
  const SetSpec f = example_fractal();
  const auto r = minimize_local_search(f, 5, 3.0, quick());
  const auto c = greedy_insert(f, r.config, 3.0, r.depth, 9);
  REQUIRE(c.size() == 6);
  CHECK_NOTHROW(check_configuration(c, f));
  CHECK(std::isfinite(riesz_energy(c, 3.0).total));
}

TEST_CASE("sweep on the unit segment") {
  const SetSpec seg = Segment({0.0}, {1.0});
  SearchParams p = quick(8);
  p.eval.deterministic = true;
  const std::vector<std::size_t> ns{2, 3, 4, 5, 6, 7, 8};
  std::size_t callbacks = 0;
  SweepOptions opts;
  opts.on_record = [&](const AsymptoticTrace& t) { CHECK(t.records.size() == ++callbacks); };
  const auto t1 = sweep(seg, 2.0, ns, p, opts);
  CHECK(callbacks == ns.size());
  REQUIRE(t1.records.size() == ns.size());
  CHECK(t1.records[0].G == doctest::Approx(0.25));
  CHECK(t1.records[1].E_best == doctest::Approx(18.0));
  for (const auto& r : t1.records) {
    CHECK(r.status == "heuristic");
    CHECK(r.N1 == r.N);
  }
  CHECK_NOTHROW(check_trace(t1));
  const auto t2 = sweep(seg, 2.0, ns, p);
  CHECK(format_trace_csv(t1) == format_trace_csv(t2));
  CHECK_THROWS_AS(sweep(seg, 2.0, {3, 2}, p), ValidationError);
}

TEST_CASE("sweep uses and respects the cache") {
  const SetSpec seg = Segment({0.0}, {1.0});
  Cache cache;
  SweepOptions opts;
  opts.cache = &cache;
  SweepStats st;
  const auto a = sweep(seg, 2.0, {2, 3, 4}, quick(), opts, &st);
  CHECK(st.solves == 3);
  CHECK(st.cache_hits == 0);
  const auto b = sweep(seg, 2.0, {2, 3, 4}, quick(), opts, &st);
  CHECK(st.solves == 0);
  CHECK(st.cache_hits == 3);
  CHECK(format_trace_csv(a) == format_trace_csv(b));
  opts.force = true;
  sweep(seg, 2.0, {2, 3, 4}, quick(), opts, &st);
  CHECK(st.solves == 3);
}

}  // TEST_SUITE
