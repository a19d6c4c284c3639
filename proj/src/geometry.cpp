#include "rieszlab/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "rieszlab/error.hpp"

namespace rieszlab {

namespace {

constexpr double kScaleRelTol = 1e-14;
constexpr double kOrthoTol = 1e-12;
constexpr double kMoranTol = 1e-12;
constexpr double kDimTol = 1e-12;

double dot(std::span<const double> x, std::span<const double> y) {
  double acc = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) acc += x[i] * y[i];
  return acc;
}

// Largest level with K^level <= budget (at least 1).
std::size_t cover_level(std::size_t K, std::size_t budget) {
  std::size_t level = 1;
  std::size_t count = K;
  while (count * K <= budget) {
    count *= K;
    ++level;
  }
  return level;
}

// Primitive pieces used for set-to-set distance bounds.
struct Pieces {
  std::vector<Ball> balls;
  std::vector<Segment> segments;
};

Pieces pieces_of(const Component& set, std::size_t budget) {
  Pieces out;
  if (const auto* f = std::get_if<SelfSimilarSet>(&set)) {
    out.balls = f->cover(cover_level(f->num_maps(), budget));
  } else {
    out.segments.push_back(std::get<Segment>(set));
  }
  return out;
}

double piece_distance(const Pieces& p, const Pieces& q) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& b : p.balls) {
    for (const auto& c : q.balls) best = std::min(best, distance(b.center, c.center) - b.radius - c.radius);
    for (const auto& s : q.segments) best = std::min(best, point_segment_distance(b.center, s) - b.radius);
  }
  for (const auto& s : p.segments) {
    for (const auto& c : q.balls) best = std::min(best, point_segment_distance(c.center, s) - c.radius);
    for (const auto& t : q.segments) best = std::min(best, segment_segment_distance(s, t));
  }
  return best;
}

}  // namespace

double distance_sq(std::span<const double> x, std::span<const double> y) {
  double acc = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = x[i] - y[i];
    acc += d * d;
  }
  return acc;
}

double distance(std::span<const double> x, std::span<const double> y) { return std::sqrt(distance_sq(x, y)); }

// ---------------------------------------------------------------------------
// Similitude

Similitude::Similitude(double scale, Vec translation, Vec rotation)
    : scale_(scale), translation_(std::move(translation)), rotation_(std::move(rotation)) {
  if (!(scale_ > 0.0 && scale_ < 1.0)) {
    std::ostringstream msg;
    msg << "similitude scale must lie in (0,1), got " << scale_;
    throw ValidationError(msg.str());
  }
  const std::size_t p = translation_.size();
  if (p == 0) throw ValidationError("similitude translation must be non-empty");
  if (rotation_.empty()) return;
  if (rotation_.size() != p * p) throw ValidationError("rotation must be a p x p matrix matching the translation");
  // Q^T Q = I
  for (std::size_t i = 0; i < p; ++i) {
    for (std::size_t j = 0; j < p; ++j) {
      double acc = 0.0;
      for (std::size_t k = 0; k < p; ++k) acc += rotation_[k * p + i] * rotation_[k * p + j];
      if (std::abs(acc - (i == j ? 1.0 : 0.0)) >= kOrthoTol) {
        throw ValidationError("rotation matrix is not orthogonal");
      }
    }
  }
}

void Similitude::apply(std::span<const double> x, std::span<double> out) const {
  const std::size_t p = translation_.size();
  if (rotation_.empty()) {
    for (std::size_t i = 0; i < p; ++i) out[i] = scale_ * x[i] + translation_[i];
    return;
  }
  for (std::size_t i = 0; i < p; ++i) {
    double acc = 0.0;
    for (std::size_t k = 0; k < p; ++k) acc += rotation_[i * p + k] * x[k];
    out[i] = scale_ * acc + translation_[i];
  }
}

Vec Similitude::operator()(std::span<const double> x) const {
  Vec out(translation_.size());
  apply(x, out);
  return out;
}

// ---------------------------------------------------------------------------
// SelfSimilarSet

SelfSimilarSet SelfSimilarSet::create(std::vector<Similitude> maps, std::optional<Ball> outer_ball) {
  if (maps.size() < 2) throw ValidationError("an IFS needs at least 2 maps");
  if (maps.size() > 255) throw ValidationError("an IFS may have at most 255 maps");
  const double L = maps.front().scale();
  const std::size_t p = maps.front().ambient_dim();
  for (const auto& m : maps) {
    if (std::abs(m.scale() - L) > kScaleRelTol * L) throw ValidationError("all IFS maps must share one scale ratio");
    if (m.ambient_dim() != p) throw ValidationError("all IFS maps must act on the same ambient dimension");
  }

  SelfSimilarSet set;
  set.maps_ = std::move(maps);
  const double K = static_cast<double>(set.maps_.size());
  set.dimension_ = std::log(K) / std::log(1.0 / L);
  if (std::abs(K * std::pow(L, set.dimension_) - 1.0) > kMoranTol) {
    throw ValidationError("dimension does not satisfy K L^d = 1");
  }

  // Fixed points by iteration; each map is a contraction.
  auto fixed_point = [](const Similitude& m, Vec x) {
    Vec next(x.size());
    for (int it = 0; it < 10000; ++it) {
      m.apply(x, next);
      const double step = distance(x, next);
      x.swap(next);
      if (step == 0.0) break;
    }
    return x;
  };

  if (outer_ball) {
    if (outer_ball->center.size() != p || !(outer_ball->radius > 0.0)) {
      throw ValidationError("outer_ball must have a center in R^p and a positive radius");
    }
    set.outer_ball_ = *outer_ball;
    set.outer_ball_explicit_ = true;
  } else {
    Vec c(p, 0.0);
    for (const auto& m : set.maps_) {
      const Vec fp = fixed_point(m, Vec(p, 0.0));
      for (std::size_t i = 0; i < p; ++i) c[i] += fp[i] / K;
    }
    double r = 0.0;
    for (const auto& m : set.maps_) r = std::max(r, distance(m(c), c) / (1.0 - L));
    set.outer_ball_ = Ball{c, r};
  }

  const Ball& B = set.outer_ball_;
  for (const auto& m : set.maps_) {
    if (distance(m(B.center), B.center) + L * B.radius > B.radius * (1.0 + 1e-12)) {
      throw ValidationError("outer_ball is not mapped into itself by every IFS map");
    }
  }

  std::vector<Vec> centers;
  for (const auto& m : set.maps_) centers.push_back(m(B.center));
  double gap = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < centers.size(); ++i) {
    for (std::size_t j = i + 1; j < centers.size(); ++j) {
      gap = std::min(gap, distance(centers[i], centers[j]) - 2.0 * L * B.radius);
    }
  }
  if (!(gap > 0.0)) {
    throw ValidationError("IFS is not strongly separated: first-level images of the outer ball intersect");
  }
  set.level1_gap_ = gap;
  set.anchor_ = fixed_point(set.maps_.front(), B.center);
  return set;
}

Vec SelfSimilarSet::realize(const FractalAddress& addr) const { return realize(addr, anchor_); }

Vec SelfSimilarSet::realize(const FractalAddress& addr, std::span<const double> anchor) const {
  Vec x(anchor.begin(), anchor.end());
  Vec tmp(x.size());
  for (auto it = addr.word.rbegin(); it != addr.word.rend(); ++it) {
    if (*it >= maps_.size()) throw ValidationError("address symbol out of range");
    maps_[*it].apply(x, tmp);
    x.swap(tmp);
  }
  return x;
}

std::vector<Ball> SelfSimilarSet::cover(std::size_t level) const {
  std::vector<Ball> current{outer_ball_};
  for (std::size_t l = 0; l < level; ++l) {
    std::vector<Ball> next;
    next.reserve(current.size() * maps_.size());
    // Prepend the new symbol: index of word (i, w') is i * K^l + index(w').
    for (const auto& m : maps_) {
      for (const auto& b : current) next.push_back(Ball{m(b.center), m.scale() * b.radius});
    }
    current.swap(next);
  }
  return current;
}

std::size_t SelfSimilarSet::address_count(std::size_t depth) const noexcept {
  std::size_t count = 1;
  for (std::size_t i = 0; i < depth; ++i) {
    if (count > std::numeric_limits<std::size_t>::max() / maps_.size()) return std::numeric_limits<std::size_t>::max();
    count *= maps_.size();
  }
  return count;
}

// ---------------------------------------------------------------------------
// Segment

Segment::Segment(Vec a, Vec b) : a_(std::move(a)), b_(std::move(b)) {
  if (a_.empty() || a_.size() != b_.size()) throw ValidationError("segment endpoints must have equal, non-zero dimension");
  length_ = distance(a_, b_);
  if (!(length_ > 0.0)) throw ValidationError("segment must have positive length");
}

Vec Segment::at(double t) const {
  Vec x(a_.size());
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = a_[i] + t * (b_[i] - a_[i]);
  return x;
}

Vec Segment::direction() const {
  Vec d(a_.size());
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = b_[i] - a_[i];
  return d;
}

// ---------------------------------------------------------------------------
// free functions

double dimension(const Component& set) {
  return std::visit([](const auto& s) { return s.dimension(); }, set);
}

double dimension(const SetSpec& set) {
  if (const auto* u = std::get_if<UnionSet>(&set)) return u->d;
  if (const auto* f = std::get_if<SelfSimilarSet>(&set)) return f->dimension();
  return std::get<Segment>(set).dimension();
}

std::size_t ambient_dim(const Component& set) {
  return std::visit([](const auto& s) { return s.ambient_dim(); }, set);
}

std::size_t ambient_dim(const SetSpec& set) {
  if (const auto* u = std::get_if<UnionSet>(&set)) return ambient_dim(u->A1);
  if (const auto* f = std::get_if<SelfSimilarSet>(&set)) return f->ambient_dim();
  return std::get<Segment>(set).ambient_dim();
}

Vec realize_address(const SelfSimilarSet& fractal, const FractalAddress& addr, std::span<const double> anchor) {
  return fractal.realize(addr, anchor);
}

double point_segment_distance(std::span<const double> x, const Segment& seg) {
  const Vec d = seg.direction();
  Vec ax(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) ax[i] = x[i] - seg.a()[i];
  const double t = std::clamp(dot(ax, d) / dot(d, d), 0.0, 1.0);
  return distance(x, seg.at(t));
}

double segment_segment_distance(const Segment& u, const Segment& v) {
  // Closest points of two segments in R^p (clamped parametric solve).
  const Vec d1 = u.direction();
  const Vec d2 = v.direction();
  Vec r(d1.size());
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = u.a()[i] - v.a()[i];
  const double a = dot(d1, d1);
  const double e = dot(d2, d2);
  const double f = dot(d2, r);
  const double c = dot(d1, r);
  const double b = dot(d1, d2);
  const double denom = a * e - b * b;
  double s = denom > 1e-300 * a * e ? std::clamp((b * f - c * e) / denom, 0.0, 1.0) : 0.0;
  double t = (b * s + f) / e;
  if (t < 0.0) {
    t = 0.0;
    s = std::clamp(-c / a, 0.0, 1.0);
  } else if (t > 1.0) {
    t = 1.0;
    s = std::clamp((b - c) / a, 0.0, 1.0);
  }
  double best = distance(u.at(s), v.at(t));
  // Endpoint checks guard the parallel case.
  best = std::min({best, point_segment_distance(u.a(), v), point_segment_distance(u.b(), v),
                   point_segment_distance(v.a(), u), point_segment_distance(v.b(), u)});
  return best;
}

double diameter_upper(const Component& set) {
  if (const auto* seg = std::get_if<Segment>(&set)) return seg->length();
  const auto& f = std::get<SelfSimilarSet>(set);
  const auto balls = f.cover(cover_level(f.num_maps(), 256));
  double cover_bound = 0.0;
  for (std::size_t i = 0; i < balls.size(); ++i) {
    for (std::size_t j = i; j < balls.size(); ++j) {
      cover_bound = std::max(cover_bound, distance(balls[i].center, balls[j].center) + balls[i].radius + balls[j].radius);
    }
  }
  return std::min(2.0 * f.outer_ball().radius, cover_bound);
}

double separation_lower(const Component& a, const Component& b) {
  const bool both_fractal = std::holds_alternative<SelfSimilarSet>(a) && std::holds_alternative<SelfSimilarSet>(b);
  const std::size_t budget = both_fractal ? 1024 : 4096;
  return std::max(0.0, piece_distance(pieces_of(a, budget), pieces_of(b, budget)));
}

UnionSet validate_union(Component A1, Component A2) {
  if (ambient_dim(A1) != ambient_dim(A2)) throw ValidationError("union components live in different ambient dimensions");
  const double d1 = dimension(A1);
  const double d2 = dimension(A2);
  if (std::abs(d1 - d2) > kDimTol) {
    std::ostringstream msg;
    msg << "union components must share one dimension: dim(A1)=" << d1 << ", dim(A2)=" << d2;
    throw ValidationError(msg.str());
  }
  UnionSet u{std::move(A1), std::move(A2), d1, 0.0, 0.0, 0.0};
  u.diam_upper_1 = diameter_upper(u.A1);
  u.diam_upper_2 = diameter_upper(u.A2);
  u.sep_lower = separation_lower(u.A1, u.A2);
  const bool ok1 = u.diam_upper_1 < u.sep_lower;
  const bool ok2 = u.diam_upper_2 < u.sep_lower;
  if (!ok1 || !ok2) {
    std::ostringstream msg;
    msg << "diameter/separation condition violated (diam(A1), diam(A2) < d(A1,A2) required): ";
    if (!ok1) msg << "diam_upper(A1)=" << u.diam_upper_1 << " >= sep_lower=" << u.sep_lower;
    if (!ok1 && !ok2) msg << "; ";
    if (!ok2) msg << "diam_upper(A2)=" << u.diam_upper_2 << " >= sep_lower=" << u.sep_lower;
    throw ValidationError(msg.str());
  }
  return u;
}

SelfSimilarSet example_fractal() {
  std::vector<Similitude> maps;
  maps.emplace_back(0.25, Vec{0.0, 0.0});
  maps.emplace_back(0.25, Vec{0.75, 0.0});
  maps.emplace_back(0.25, Vec{0.0, 0.75});
  maps.emplace_back(0.25, Vec{0.75, 0.75});
  return SelfSimilarSet::create(std::move(maps));
}

Segment example_segment() { return Segment(Vec{3.0, 0.0}, Vec{4.0, 0.0}); }

UnionSet example_union() { return validate_union(example_fractal(), example_segment()); }

}  // namespace rieszlab
