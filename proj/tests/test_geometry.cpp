#include <doctest.h>

#include <cmath>
#include <random>

#include "rieszlab/error.hpp"
#include "rieszlab/geometry.hpp"

using namespace rieszlab;

namespace {

Vec pt(double x, double y) { return Vec{x, y}; }

}  // namespace

TEST_SUITE("geometry") {

TEST_CASE("example fractal has dimension one") {
  const auto f = example_fractal();
  CHECK(f.num_maps() == 4);
  CHECK(f.ratio() == doctest::Approx(0.25));
  CHECK(std::abs(f.dimension() - 1.0) < 1e-12);
  CHECK(dimension(SetSpec(f)) == doctest::Approx(1.0));
}

TEST_CASE("Moran dimension for other ratios") {
  // Three maps at scale 1/3 on a line: Cantor-like, d = 1.
  std::vector<Similitude> maps{Similitude(1.0 / 3, {0.0}), Similitude(1.0 / 3, {2.0 / 3})};
  const auto cantor = SelfSimilarSet::create(maps);
  CHECK(cantor.dimension() == doctest::Approx(std::log(2.0) / std::log(3.0)).epsilon(1e-14));
}

TEST_CASE("anchor is the fixed point of the first map") {
  const auto f = example_fractal();
  CHECK(std::abs(f.anchor()[0]) < 1e-14);
  CHECK(std::abs(f.anchor()[1]) < 1e-14);

  std::vector<Similitude> maps{Similitude(0.25, {0.5, 0.0}), Similitude(0.25, {0.0, 0.5})};
  const auto g = SelfSimilarSet::create(maps);
  const Vec fp = g.maps()[0](g.anchor());
  CHECK(distance(fp, g.anchor()) < 1e-14);
  CHECK(g.anchor()[0] == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("address realization composes maps left to right") {
  const auto f = example_fractal();
  // word (1,3): phi_1(phi_3(0,0)) = phi_1(0.75,0.75) = (0.1875+0.75, 0.1875)
  const Vec x = f.realize(FractalAddress{{1, 3}});
  CHECK(x[0] == doctest::Approx(0.9375));
  CHECK(x[1] == doctest::Approx(0.1875));
  // Empty word is the anchor; padding with the first symbol keeps the point.
  CHECK(distance(f.realize(FractalAddress{{}}), f.anchor()) == 0.0);
  CHECK(distance(f.realize(FractalAddress{{2}}), f.realize(FractalAddress{{2, 0, 0}})) < 1e-15);
}

TEST_CASE("distinct addresses of one depth realize to distinct points") {
  const auto f = example_fractal();
  std::vector<Vec> pts;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      for (int c = 0; c < 4; ++c)
        pts.push_back(f.realize(FractalAddress{{static_cast<std::uint8_t>(a), static_cast<std::uint8_t>(b),
                                                 static_cast<std::uint8_t>(c)}}));
  double min_d = 1e9;
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j) min_d = std::min(min_d, distance(pts[i], pts[j]));
  CHECK(min_d > 0.01);
}

TEST_CASE("out-of-range symbol is rejected") {
  const auto f = example_fractal();
  CHECK_THROWS_AS(f.realize(FractalAddress{{4}}), ValidationError);
}

TEST_CASE("cover balls contain realized points of matching prefix") {
  const auto f = example_fractal();
  const auto balls = f.cover(2);
  REQUIRE(balls.size() == 16);
  for (std::uint8_t a = 0; a < 4; ++a) {
    for (std::uint8_t b = 0; b < 4; ++b) {
      const Vec x = f.realize(FractalAddress{{a, b, 3, 1}});
      const Ball& ball = balls[a * 4 + b];
      CHECK(distance(x, ball.center) <= ball.radius + 1e-12);
    }
  }
  CHECK(f.address_count(2) == 16);
  CHECK(f.address_count(200) == std::numeric_limits<std::size_t>::max());
}

TEST_CASE("similitude validation") {
  CHECK_THROWS_AS(Similitude(1.0, {0.0}), ValidationError);
  CHECK_THROWS_AS(Similitude(0.0, {0.0}), ValidationError);
  CHECK_THROWS_AS(Similitude(0.5, {0.0, 0.0}, {1.0, 0.1, 0.0, 1.0}), ValidationError);
  const double c = std::cos(0.3), s = std::sin(0.3);
  Similitude rot(0.5, {1.0, 0.0}, {c, -s, s, c});
  const Vec y = rot(pt(2.0, 0.0));
  CHECK(y[0] == doctest::Approx(1.0 + c));
  CHECK(y[1] == doctest::Approx(s));
}

TEST_CASE("IFS validation errors") {
  // Mixed scales.
  CHECK_THROWS_AS(SelfSimilarSet::create({Similitude(0.25, {0.0, 0.0}), Similitude(0.3, {0.7, 0.0})}),
                  ValidationError);
  // Overlapping first-level images.
  CHECK_THROWS_AS(SelfSimilarSet::create({Similitude(0.5, {0.0}), Similitude(0.5, {0.1})}), ValidationError);
  // A single map.
  CHECK_THROWS_AS(SelfSimilarSet::create({Similitude(0.5, {0.0})}), ValidationError);
  // Outer ball that is not invariant.
  CHECK_THROWS_AS(SelfSimilarSet::create({Similitude(0.25, {0.0, 0.0}), Similitude(0.25, {0.75, 0.0})},
                                         Ball{{0.5, 0.0}, 0.1}),
                  ValidationError);
}

TEST_CASE("segment basics") {
  const Segment seg({3.0, 0.0}, {4.0, 0.0});
  CHECK(seg.length() == doctest::Approx(1.0));
  CHECK(seg.at(0.5)[0] == doctest::Approx(3.5));
  CHECK_THROWS_AS(Segment({1.0, 1.0}, {1.0, 1.0}), ValidationError);
  CHECK(point_segment_distance(pt(3.5, 2.0), seg) == doctest::Approx(2.0));
  CHECK(point_segment_distance(pt(1.0, 0.0), seg) == doctest::Approx(2.0));
  CHECK(segment_segment_distance(seg, Segment({0.0, 1.0}, {1.0, 1.0})) == doctest::Approx(std::sqrt(5.0)));
  CHECK(segment_segment_distance(Segment({0.0, -1.0}, {0.0, 1.0}), Segment({-1.0, 0.0}, {1.0, 0.0})) ==
        doctest::Approx(0.0));
}

TEST_CASE("example union bounds") {
  const auto u = example_union();
  CHECK(u.d == doctest::Approx(1.0));
  CHECK(u.diam_upper_1 >= std::sqrt(2.0) - 1e-12);
  CHECK(u.diam_upper_1 <= std::sqrt(2.0) + 1e-9);
  CHECK(u.diam_upper_2 == doctest::Approx(1.0));
  // The attractor touches (1,0) and the segment starts at (3,0).
  CHECK(u.sep_lower <= 2.0);
  CHECK(u.sep_lower > 1.99);
}

TEST_CASE("bounds are rigorous on random samples") {
  const auto f = example_fractal();
  const Component fc = f;
  const double diam = diameter_upper(fc);
  std::mt19937 rng(3);
  std::uniform_int_distribution<int> sym(0, 3);
  std::vector<Vec> pts;
  for (int i = 0; i < 200; ++i) {
    FractalAddress a;
    for (int k = 0; k < 8; ++k) a.word.push_back(static_cast<std::uint8_t>(sym(rng)));
    pts.push_back(f.realize(a));
  }
  const Segment seg = example_segment();
  const double sep = separation_lower(fc, Component(seg));
  for (std::size_t i = 0; i < pts.size(); ++i) {
    CHECK(point_segment_distance(pts[i], seg) >= sep);
    for (std::size_t j = i + 1; j < pts.size(); ++j) CHECK(distance(pts[i], pts[j]) <= diam);
  }
}

TEST_CASE("union validation rejects touching or mismatched components") {
  // Segment too close to the fractal: diam sqrt(2) > gap.
  CHECK_THROWS_WITH_AS(validate_union(example_fractal(), Segment({1.5, 0.0}, {2.5, 0.0})),
                       doctest::Contains("diameter/separation"), ValidationError);
  // Dimension mismatch: a 1/3-scale four-map IFS has d != 1.
  const auto thin = SelfSimilarSet::create({Similitude(1.0 / 3, {0.0, 0.0}), Similitude(1.0 / 3, {2.0 / 3, 0.0})});
  CHECK_THROWS_AS(validate_union(thin, Segment({30.0, 0.0}, {31.0, 0.0})), ValidationError);
  // Ambient dimension mismatch.
  CHECK_THROWS_AS(validate_union(example_fractal(), Segment({30.0, 0.0, 0.0}, {31.0, 0.0, 0.0})), ValidationError);
}

}  // TEST_SUITE
