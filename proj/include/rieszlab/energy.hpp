#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <variant>
#include <vector>

#include "rieszlab/geometry.hpp"

namespace rieszlab {

/// Which part of the set a point lives on. Single-set solves use Whole.
enum class Host : std::uint8_t { Whole, A1, A2 };

const char* to_string(Host host);

/// Fractal address, or segment parameter t in [0,1].
using Intrinsic = std::variant<FractalAddress, double>;

/// N points with their host component and intrinsic coordinate.
class Configuration {
 public:
  Configuration() = default;
  explicit Configuration(std::size_t dim) : dim_(dim) {}

  std::size_t dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return hosts_.size(); }
  bool empty() const noexcept { return hosts_.empty(); }

  std::span<const double> coords() const noexcept { return coords_; }
  std::span<const double> point(std::size_t i) const noexcept { return {coords_.data() + i * dim_, dim_}; }
  Host host(std::size_t i) const noexcept { return hosts_[i]; }
  const Intrinsic& intrinsic(std::size_t i) const noexcept { return intrinsic_[i]; }
  std::span<const Host> hosts() const noexcept { return hosts_; }

  void push_back(std::span<const double> x, Host host, Intrinsic intrinsic);
  void set(std::size_t i, std::span<const double> x, Host host, Intrinsic intrinsic);
  void erase(std::size_t i);

  /// Number of points hosted on A1.
  std::size_t count(Host host) const noexcept;

 private:
  std::size_t dim_ = 0;
  std::vector<double> coords_;
  std::vector<Host> hosts_;
  std::vector<Intrinsic> intrinsic_;
};

/// Component a host refers to within `set` (Whole maps to a non-union set).
Component component_for(const SetSpec& set, Host host);

/// Realizes an intrinsic coordinate on a component.
Vec realize(const Component& comp, const Intrinsic& intrinsic);

/// Throws ValidationError unless every point's intrinsic coordinate
/// re-realizes to its stored coordinates within 1e-12 and hosts match `set`.
void check_configuration(const Configuration& config, const SetSpec& set);

struct EnergyReport {
  double total = 0.0;              // sum over ordered pairs
  std::vector<double> per_point;   // U_j, with sum_j U_j == total
  double min_dist = 0.0;
};

/// Execution knobs for the pairwise kernels.
struct EvalOptions {
  bool parallel = true;
  bool deterministic = true;
  /// Below this N the serial kernels are used even when parallel is set.
  std::size_t parallel_threshold = 512;
};

/// E_s = sum_{i != j} |x_i - x_j|^{-s}. Throws InfiniteEnergyError when two
/// points are closer than 1e-15 times the configuration diameter.
/// N < 2 yields total 0 and min_dist +inf.
EnergyReport riesz_energy(const Configuration& config, double s, const EvalOptions& opts = {});

/// U_j = sum_{i != j} |x_j - x_i|^{-s}.
double point_energy(const Configuration& config, std::size_t j, double s);

/// E / N^{1 + s/d}.
double normalized_energy(double energy, std::size_t n, double s, double d);

/// Max over reference points of the distance to the nearest candidate point.
/// Both arrays are point-major with `dim` coordinates per point.
double covering_radius(std::span<const double> candidate, std::span<const double> reference, std::size_t dim,
                       const EvalOptions& opts = {});

struct SegmentGradient {
  std::size_t index;  // point index in the configuration
  Vec gradient;       // full d E / d x_j in R^p
  double d_dt;        // derivative with respect to the segment parameter
};

/// Gradient of the ordered-pair energy for every segment-hosted point.
std::vector<SegmentGradient> energy_gradient(const Configuration& config, double s, const SetSpec& set,
                                             const EvalOptions& opts = {});

}  // namespace rieszlab
