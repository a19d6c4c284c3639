#pragma once

// Compact sets the solver works on: self-similar attractors of strongly
// separated IFS, line segments, and separated unions of two of those.
// All values are immutable after construction.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <variant>
#include <vector>

namespace rieszlab {

using Vec = std::vector<double>;

double distance(std::span<const double> x, std::span<const double> y);
double distance_sq(std::span<const double> x, std::span<const double> y);

/// x -> scale * Q x + translation, with Q orthogonal (identity when empty).
class Similitude {
 public:
  /// `rotation` is row-major p*p; pass an empty vector for the identity.
  Similitude(double scale, Vec translation, Vec rotation = {});

  double scale() const noexcept { return scale_; }
  const Vec& translation() const noexcept { return translation_; }
  const Vec& rotation() const noexcept { return rotation_; }
  std::size_t ambient_dim() const noexcept { return translation_.size(); }

  void apply(std::span<const double> x, std::span<double> out) const;
  Vec operator()(std::span<const double> x) const;

 private:
  double scale_;
  Vec translation_;
  Vec rotation_;
};

struct Ball {
  Vec center;
  double radius = 0.0;
};

/// Finite-depth word over the map indices. Symbols are 0-based: symbol i
/// selects maps()[i]. The word w1..wm stands for phi_{w1} o ... o phi_{wm}.
struct FractalAddress {
  std::vector<std::uint8_t> word;

  std::size_t depth() const noexcept { return word.size(); }
  friend bool operator==(const FractalAddress&, const FractalAddress&) = default;
};

class SelfSimilarSet {
 public:
  /// Validates the maps (K >= 2, common scale, equal ambient dimension) and
  /// the strong separation of the first-level images of the outer ball.
  /// When `outer_ball` is empty, the smallest invariant ball centered at the
  /// centroid of the maps' fixed points is used.
  static SelfSimilarSet create(std::vector<Similitude> maps, std::optional<Ball> outer_ball = {});

  const std::vector<Similitude>& maps() const noexcept { return maps_; }
  std::size_t num_maps() const noexcept { return maps_.size(); }
  double ratio() const noexcept { return maps_.front().scale(); }
  double dimension() const noexcept { return dimension_; }
  std::size_t ambient_dim() const noexcept { return maps_.front().ambient_dim(); }
  const Ball& outer_ball() const noexcept { return outer_ball_; }
  bool outer_ball_explicit() const noexcept { return outer_ball_explicit_; }
  /// Fixed point of the first map; the representative used for addresses.
  const Vec& anchor() const noexcept { return anchor_; }
  /// min_{i != j} (|phi_i(c) - phi_j(c)| - 2 L r): gap between level-1 images.
  double level1_gap() const noexcept { return level1_gap_; }

  /// phi_w(anchor) for the address w.
  Vec realize(const FractalAddress& addr) const;
  Vec realize(const FractalAddress& addr, std::span<const double> anchor) const;

  /// Images phi_w(outer_ball) for every word of length `level`, in
  /// lexicographic word order. K^level balls.
  std::vector<Ball> cover(std::size_t level) const;

  /// Number of distinct addresses of the given depth, saturating at SIZE_MAX.
  std::size_t address_count(std::size_t depth) const noexcept;

 private:
  SelfSimilarSet() = default;

  std::vector<Similitude> maps_;
  double dimension_ = 0.0;
  Ball outer_ball_;
  bool outer_ball_explicit_ = false;
  Vec anchor_;
  double level1_gap_ = 0.0;
};

class Segment {
 public:
  Segment(Vec a, Vec b);

  const Vec& a() const noexcept { return a_; }
  const Vec& b() const noexcept { return b_; }
  double length() const noexcept { return length_; }
  std::size_t ambient_dim() const noexcept { return a_.size(); }
  double dimension() const noexcept { return 1.0; }

  Vec at(double t) const;
  /// b - a
  Vec direction() const;

 private:
  Vec a_, b_;
  double length_;
};

using Component = std::variant<SelfSimilarSet, Segment>;

struct UnionSet {
  Component A1;
  Component A2;
  double d = 0.0;
  double sep_lower = 0.0;
  double diam_upper_1 = 0.0;
  double diam_upper_2 = 0.0;
};

using SetSpec = std::variant<SelfSimilarSet, Segment, UnionSet>;

/// Hausdorff dimension: ln K / ln(1/L) for an IFS attractor, 1 for a segment,
/// the common value for a union.
double dimension(const Component& set);
double dimension(const SetSpec& set);

std::size_t ambient_dim(const Component& set);
std::size_t ambient_dim(const SetSpec& set);

Vec realize_address(const SelfSimilarSet& fractal, const FractalAddress& addr,
                    std::span<const double> anchor);

/// Rigorous upper bound on the diameter.
double diameter_upper(const Component& set);

/// Rigorous lower bound on inf |x - y| over x in `a`, y in `b` (clamped at 0).
double separation_lower(const Component& a, const Component& b);

/// Builds the union after certifying equal dimensions and
/// max(diam A1, diam A2) < d(A1, A2) with the bounds above.
UnionSet validate_union(Component A1, Component A2);

/// Distance from `x` to the segment [a, b].
double point_segment_distance(std::span<const double> x, const Segment& seg);
double segment_segment_distance(const Segment& u, const Segment& v);

/// The four-map quarter-scale IFS on [0,1]^2 with corner translations.
SelfSimilarSet example_fractal();
/// [3,4] x {0}
Segment example_segment();
UnionSet example_union();

}  // namespace rieszlab
