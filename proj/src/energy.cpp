#include "rieszlab/energy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "rieszlab/error.hpp"
#include "rieszlab/kernels.hpp"

namespace rieszlab {

namespace {

constexpr double kCoincidentRel = 1e-15;
constexpr double kRealizeTol = 1e-12;

bool use_parallel(const EvalOptions& opts, std::size_t n) { return opts.parallel && n >= opts.parallel_threshold; }

}  // namespace

const char* to_string(Host host) {
  switch (host) {
    case Host::Whole: return "whole";
    case Host::A1: return "A1";
    case Host::A2: return "A2";
  }
  return "?";
}

void Configuration::push_back(std::span<const double> x, Host host, Intrinsic intrinsic) {
  if (x.size() != dim_) throw ValidationError("point dimension does not match configuration");
  coords_.insert(coords_.end(), x.begin(), x.end());
  hosts_.push_back(host);
  intrinsic_.push_back(std::move(intrinsic));
}

void Configuration::set(std::size_t i, std::span<const double> x, Host host, Intrinsic intrinsic) {
  std::copy(x.begin(), x.end(), coords_.begin() + static_cast<std::ptrdiff_t>(i * dim_));
  hosts_[i] = host;
  intrinsic_[i] = std::move(intrinsic);
}

void Configuration::erase(std::size_t i) {
  const auto off = static_cast<std::ptrdiff_t>(i * dim_);
  coords_.erase(coords_.begin() + off, coords_.begin() + off + static_cast<std::ptrdiff_t>(dim_));
  hosts_.erase(hosts_.begin() + static_cast<std::ptrdiff_t>(i));
  intrinsic_.erase(intrinsic_.begin() + static_cast<std::ptrdiff_t>(i));
}

std::size_t Configuration::count(Host host) const noexcept {
  return static_cast<std::size_t>(std::count(hosts_.begin(), hosts_.end(), host));
}

Component component_for(const SetSpec& set, Host host) {
  if (const auto* u = std::get_if<UnionSet>(&set)) {
    if (host == Host::A1) return u->A1;
    if (host == Host::A2) return u->A2;
    throw ValidationError("union configurations need A1/A2 hosts");
  }
  if (host != Host::Whole) throw ValidationError("single-set configurations use the 'whole' host");
  if (const auto* f = std::get_if<SelfSimilarSet>(&set)) return *f;
  return std::get<Segment>(set);
}

Vec realize(const Component& comp, const Intrinsic& intrinsic) {
  if (const auto* f = std::get_if<SelfSimilarSet>(&comp)) {
    const auto* addr = std::get_if<FractalAddress>(&intrinsic);
    if (!addr) throw ValidationError("fractal-hosted point needs an address");
    return f->realize(*addr);
  }
  const auto* t = std::get_if<double>(&intrinsic);
  if (!t) throw ValidationError("segment-hosted point needs a parameter t");
  if (!(*t >= 0.0 && *t <= 1.0)) throw ValidationError("segment parameter outside [0,1]");
  return std::get<Segment>(comp).at(*t);
}

void check_configuration(const Configuration& config, const SetSpec& set) {
  if (config.dim() != ambient_dim(set) && !config.empty()) throw ValidationError("configuration dimension mismatch");
  for (std::size_t i = 0; i < config.size(); ++i) {
    const Vec x = realize(component_for(set, config.host(i)), config.intrinsic(i));
    if (distance(x, config.point(i)) > kRealizeTol) {
      std::ostringstream msg;
      msg << "point " << i << " does not match its intrinsic coordinate";
      throw ValidationError(msg.str());
    }
  }
}

EnergyReport riesz_energy(const Configuration& config, double s, const EvalOptions& opts) {
  EnergyReport report;
  const std::size_t n = config.size();
  report.per_point.assign(n, 0.0);
  report.min_dist = std::numeric_limits<double>::infinity();
  if (n < 2) return report;

  kernels::PairExtent ext{};
  if (use_parallel(opts, n)) {
    ext = kernels::omp::potential_rows(config.coords(), config.dim(), s, report.per_point);
    report.total = kernels::omp::total(report.per_point, opts.deterministic);
  } else {
    ext = kernels::serial::potential_rows(config.coords(), config.dim(), s, report.per_point);
    report.total = kernels::serial::total(report.per_point);
  }
  report.min_dist = std::sqrt(ext.min_dist_sq);
  const double diam = std::sqrt(ext.max_dist_sq);
  if (!(report.min_dist >= kCoincidentRel * diam) || diam == 0.0) {
    throw InfiniteEnergyError("configuration has coincident points; energy is infinite");
  }
  return report;
}

double point_energy(const Configuration& config, std::size_t j, double s) {
  if (config.size() < 2) throw ValidationError("point energy needs at least 2 points");
  if (j >= config.size()) throw ValidationError("point index out of range");
  double nearest = std::numeric_limits<double>::infinity();
  double farthest = 0.0;
  for (std::size_t i = 0; i < config.size(); ++i) {
    if (i == j) continue;
    const double r = distance(config.point(i), config.point(j));
    nearest = std::min(nearest, r);
    farthest = std::max(farthest, r);
  }
  if (!(nearest >= kCoincidentRel * farthest) || farthest == 0.0) {
    throw InfiniteEnergyError("point coincides with another point; energy is infinite");
  }
  return kernels::serial::potential_at(config.coords(), config.dim(), config.point(j), j, s);
}

double normalized_energy(double energy, std::size_t n, double s, double d) {
  if (n < 2 || !(d > 0.0) || !(s > d)) throw ValidationError("normalized energy needs N >= 2 and s > d > 0");
  return energy / std::pow(static_cast<double>(n), 1.0 + s / d);
}

double covering_radius(std::span<const double> candidate, std::span<const double> reference, std::size_t dim,
                       const EvalOptions& opts) {
  if (dim == 0 || candidate.empty() || reference.empty()) throw ValidationError("covering radius needs non-empty point sets");
  if (candidate.size() % dim != 0 || reference.size() % dim != 0) throw ValidationError("point arrays must be multiples of dim");
  if (use_parallel(opts, reference.size() / dim)) return kernels::omp::covering_radius(candidate, reference, dim);
  return kernels::serial::covering_radius(candidate, reference, dim);
}

std::vector<SegmentGradient> energy_gradient(const Configuration& config, double s, const SetSpec& set,
                                             const EvalOptions& opts) {
  const std::size_t n = config.size();
  if (n < 2) throw ValidationError("gradient needs at least 2 points");
  riesz_energy(config, s, opts);  // coincidence check

  const std::size_t dim = config.dim();
  std::vector<double> grad(n * dim);
  if (use_parallel(opts, n)) {
    kernels::omp::energy_gradient(config.coords(), dim, s, grad);
  } else {
    kernels::serial::energy_gradient(config.coords(), dim, s, grad);
  }

  std::vector<SegmentGradient> out;
  for (std::size_t j = 0; j < n; ++j) {
    if (!std::holds_alternative<double>(config.intrinsic(j))) continue;
    const Component comp = component_for(set, config.host(j));
    const auto* seg = std::get_if<Segment>(&comp);
    if (!seg) throw ValidationError("segment parameter on a non-segment host");
    const Vec dir = seg->direction();
    SegmentGradient g{j, Vec(grad.begin() + static_cast<std::ptrdiff_t>(j * dim),
                             grad.begin() + static_cast<std::ptrdiff_t>((j + 1) * dim)),
                      0.0};
    for (std::size_t k = 0; k < dim; ++k) g.d_dt += g.gradient[k] * dir[k];
    out.push_back(std::move(g));
  }
  return out;
}

}  // namespace rieszlab
