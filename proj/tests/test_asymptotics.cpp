#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "rieszlab/asymptotics.hpp"
#include "rieszlab/error.hpp"

using namespace rieszlab;

namespace {

// Synthetic trace with the given G values at N = n0, n0+1, ...
AsymptoticTrace synthetic(const std::vector<double>& gs, std::size_t n0 = 2, double s = 3.0, double d = 1.0,
                          bool is_union = false, const std::vector<double>& frac = {}) {
  AsymptoticTrace t;
  t.s = s;
  t.d = d;
  t.is_union = is_union;
  t.set_id = "synthetic";
  for (std::size_t i = 0; i < gs.size(); ++i) {
    TraceRecord r;
    r.N = n0 + i;
    r.G = gs[i];
    r.E_best = gs[i] * std::pow(static_cast<double>(r.N), 1.0 + s / d);
    const double f = frac.empty() ? 1.0 : frac[i];
    r.N1 = static_cast<std::size_t>(std::llround(f * static_cast<double>(r.N)));
    r.N2 = r.N - r.N1;
    r.frac1 = frac.empty() ? 1.0 : f;
    r.status = "heuristic";
    t.records.push_back(r);
  }
  return t;
}

}  // namespace

TEST_SUITE("asymptotics") {

TEST_CASE("gamma estimates") {
  const auto c = estimate_gamma(synthetic({0.7, 0.7, 0.7, 0.7, 0.7, 0.7}));
  CHECK(c.g_low_hat == 0.7);
  CHECK(c.g_up_hat == 0.7);
  CHECK(c.spread() == 0.0);

  // N = 2..9; tail N >= 4.5 is {5..9}.
  const auto alt = estimate_gamma(synthetic({5.0, 5.0, 5.0, 1.0, 1.2, 1.0, 1.2, 1.0}));
  CHECK(alt.g_low_hat == 1.0);
  CHECK(alt.g_up_hat == 1.2);
  CHECK(alt.spread() == doctest::Approx(0.2));
  CHECK(alt.n_min_tail == 5);
  CHECK(alt.n_max == 9);

  const auto single = estimate_gamma(synthetic({3.0, 2.0, 1.0, 0.5}, 10), 0.01);
  CHECK(single.tail_records == 1);
  CHECK(single.g_low_hat == 0.5);
  CHECK(single.g_up_hat == 0.5);

  CHECK_THROWS_AS(estimate_gamma(synthetic({1.0, 1.0, 1.0})), ValidationError);
  CHECK_THROWS_AS(estimate_gamma(synthetic({1.0, 1.0, 1.0, 1.0}), 0.0), ValidationError);
}

TEST_CASE("gamma estimates ignore record order within the tail") {
  std::mt19937 rng(4);
  std::uniform_real_distribution<double> u(0.5, 2.0);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> g(12);
    for (auto& v : g) v = u(rng);
    auto t = synthetic(g);
    const auto a = estimate_gamma(t);
    std::shuffle(t.records.begin(), t.records.end(), rng);
    const auto b = estimate_gamma(t);
    CHECK(a.g_low_hat == b.g_low_hat);
    CHECK(a.g_up_hat == b.g_up_hat);
  }
}

TEST_CASE("alpha and beta predictions") {
  CHECK(predict_alpha_star(2.0, 2.0, 3.0, 1.0) == 0.5);
  CHECK(predict_alpha_star(1.0, 8.0, 3.0, 1.0) == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
  CHECK(predict_alpha_star(1.0, 1e-30, 3.0, 1.0) < 1e-9);
  CHECK(predict_beta_star(8.0, 8.0, 5.0, 1.3) == 0.5);
  CHECK(predict_beta_star(1.5, 2.0, 3.0, 1.0) == predict_alpha_star(1.5, 2.0, 3.0, 1.0));
  CHECK(predict_beta_star(2.5, 2.0, 3.0, 1.0) < predict_alpha_star(1.5, 2.0, 3.0, 1.0));
  CHECK_THROWS_AS(predict_alpha_star(0.0, 1.0, 3.0, 1.0), ValidationError);
  CHECK_THROWS_AS(predict_alpha_star(1.0, 1.0, 1.0, 1.0), ValidationError);

  const auto p = predict_split(1.0, 2.0, 1.5, 3.0, 1.0, "user");
  CHECK(p.alpha_star > p.beta_star);
  CHECK(p.provenance == "user");
}

TEST_CASE("split objective") {
  CHECK(split_objective(0.0, 3.0, 5.0, 2.0, 1.0) == 5.0);
  CHECK(split_objective(1.0, 3.0, 5.0, 2.0, 1.0) == 3.0);
  CHECK(split_objective(0.5, 4.0, 4.0, 1.0, 1.0) == doctest::Approx(2.0));
  CHECK(split_objective_grid_argmin(1.0, 1.0, 3.0, 1.0) == doctest::Approx(0.5));
}

TEST_CASE("lemma3 flags") {
  auto t = synthetic({1.0, 0.9}, 10);
  CHECK(lemma3_check(t, 3.0, 1.0).empty());
  t = synthetic({1.0, 0.5}, 10);
  const auto flags = lemma3_check(t, 3.0, 1.0);
  REQUIRE(flags.size() == 1);
  CHECK(flags[0].n == 10);
  CHECK(flags[0].bound == doctest::Approx(0.6));
  CHECK(lemma3_check(synthetic({0.8, 0.8, 0.8, 0.8}), 3.0, 1.0).empty());
}

TEST_CASE("weak-star statistics") {
  const auto flat = weak_star_trace(synthetic({1, 1, 1, 1, 1, 1}, 2, 3.0, 1.0, true, {0.5, 0.5, 0.5, 0.5, 0.5, 0.5}));
  CHECK(flat.gap == 0.0);
  CHECK_FALSE(flat.signature);

  const auto osc = weak_star_trace(
      synthetic({1.0, 1.01, 1.0, 1.01}, 10, 3.0, 1.0, true, {0.4, 0.6, 0.4, 0.6}), 1.0);
  CHECK(osc.gap == doctest::Approx(0.2));
  CHECK(osc.tail_min == doctest::Approx(0.4));
  CHECK(osc.noise == doctest::Approx(0.01 / 1.005));
  CHECK(osc.threshold == doctest::Approx(3.0 * osc.noise));
  CHECK(osc.signature);

  const auto one = weak_star_trace(synthetic({1.0}, 2, 3.0, 1.0, true, {1.0}));
  CHECK(one.insufficient_data);
  CHECK(one.gap == 0.0);

  CHECK_THROWS_AS(weak_star_trace(synthetic({1.0, 1.0})), ValidationError);
}

TEST_CASE("weak-star gap vanishes for a constant split ratio") {
  // N1 = round(c N) with c = 1/2 on even N only, so frac1 is exactly c.
  AsymptoticTrace t = synthetic(std::vector<double>(10, 1.0), 2, 3.0, 1.0, true, std::vector<double>(10, 0.5));
  for (auto& r : t.records) {
    r.N *= 2;
    r.E_best = r.G * std::pow(static_cast<double>(r.N), 4.0);
    r.N1 = r.N / 2;
    r.N2 = r.N - r.N1;
  }
  CHECK_NOTHROW(check_trace(t));
  CHECK(weak_star_trace(t).gap == 0.0);
}

TEST_CASE("split upper bounds") {
  CHECK(split_upper_bound(1.0, 2.5, 0, 7, 2.0, 3.0) == 2.5 + 1.0);
  CHECK(split_upper_bound(0.0, 0.0, 1, 1, 2.0, 1.0) == doctest::Approx(1.0));
  std::mt19937 rng(8);
  std::uniform_int_distribution<int> m(0, 30);
  for (int i = 0; i < 100; ++i) {
    const auto m1 = static_cast<std::size_t>(m(rng)), m2 = static_cast<std::size_t>(m(rng));
    CHECK(split_upper_bound_loose(1.0, 1.0, m1, m2, 1.7, 2.5) >= split_upper_bound(1.0, 1.0, m1, m2, 1.7, 2.5));
  }
  CHECK_THROWS_AS(split_upper_bound(0, 0, 1, 1, 0.0, 1.0), ValidationError);
}

TEST_CASE("trace invariants") {
  auto t = synthetic({1.0, 1.0, 1.0});
  CHECK_NOTHROW(check_trace(t));
  t.records[1].N2 += 1;
  CHECK_THROWS_AS(check_trace(t), ValidationError);
  t = synthetic({1.0, 1.0});
  t.records[1].N = 2;
  CHECK_THROWS_AS(check_trace(t), ValidationError);
  t = synthetic({1.0, 1.0});
  t.records[0].G *= 1.001;
  CHECK_THROWS_AS(check_trace(t), ValidationError);
}

}  // TEST_SUITE
