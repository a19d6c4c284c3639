#include "rieszlab/kernels.hpp"

#include <algorithm>
#include <limits>
#include <vector>

#include <omp.h>

namespace rieszlab::kernels {

namespace {

inline double sq_dist(const double* x, const double* y, std::size_t dim) noexcept {
  double acc = 0.0;
  for (std::size_t k = 0; k < dim; ++k) {
    const double d = x[k] - y[k];
    acc += d * d;
  }
  return acc;
}

// One row of the potential matrix; shared by both paths so rows match exactly.
inline double row(const double* coords, std::size_t n, std::size_t dim, std::size_t i, double s, double& mn,
                  double& mx) noexcept {
  const double* xi = coords + i * dim;
  double acc = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    if (j == i) continue;
    const double r2 = sq_dist(xi, coords + j * dim, dim);
    mn = std::min(mn, r2);
    mx = std::max(mx, r2);
    acc += riesz_from_sq(r2, s);
  }
  return acc;
}

inline void grad_row(const double* coords, std::size_t n, std::size_t dim, std::size_t j, double s,
                     double* out) noexcept {
  const double* xj = coords + j * dim;
  for (std::size_t k = 0; k < dim; ++k) out[k] = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (i == j) continue;
    const double* xi = coords + i * dim;
    const double r2 = sq_dist(xj, xi, dim);
    const double w = -2.0 * s * riesz_from_sq(r2, s) / r2;
    for (std::size_t k = 0; k < dim; ++k) out[k] += w * (xj[k] - xi[k]);
  }
}

inline double nearest_sq(const double* y, const double* cand, std::size_t m, std::size_t dim) noexcept {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < m; ++c) best = std::min(best, sq_dist(y, cand + c * dim, dim));
  return best;
}

}  // namespace

namespace serial {

PairExtent potential_rows(std::span<const double> coords, std::size_t dim, double s, std::span<double> rows) {
  const std::size_t n = coords.size() / dim;
  PairExtent ext{std::numeric_limits<double>::infinity(), 0.0};
  for (std::size_t i = 0; i < n; ++i) rows[i] = row(coords.data(), n, dim, i, s, ext.min_dist_sq, ext.max_dist_sq);
  return ext;
}

double total(std::span<const double> rows) {
  double acc = 0.0;
  for (double r : rows) acc += r;
  return acc;
}

double potential_at(std::span<const double> coords, std::size_t dim, std::span<const double> x, std::size_t skip,
                    double s) {
  const std::size_t n = coords.size() / dim;
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (i == skip) continue;
    acc += riesz_from_sq(sq_dist(x.data(), coords.data() + i * dim, dim), s);
  }
  return acc;
}

void energy_gradient(std::span<const double> coords, std::size_t dim, double s, std::span<double> grad) {
  const std::size_t n = coords.size() / dim;
  for (std::size_t j = 0; j < n; ++j) grad_row(coords.data(), n, dim, j, s, grad.data() + j * dim);
}

double covering_radius(std::span<const double> candidate, std::span<const double> reference, std::size_t dim) {
  const std::size_t m = candidate.size() / dim;
  const std::size_t r = reference.size() / dim;
  double worst = 0.0;
  for (std::size_t k = 0; k < r; ++k) worst = std::max(worst, nearest_sq(reference.data() + k * dim, candidate.data(), m, dim));
  return std::sqrt(worst);
}

}  // namespace serial

namespace omp {

PairExtent potential_rows(std::span<const double> coords, std::size_t dim, double s, std::span<double> rows) {
  const auto n = static_cast<std::ptrdiff_t>(coords.size() / dim);
  double mn = std::numeric_limits<double>::infinity();
  double mx = 0.0;
#pragma omp parallel for schedule(static) reduction(min : mn) reduction(max : mx)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    rows[i] = row(coords.data(), static_cast<std::size_t>(n), dim, static_cast<std::size_t>(i), s, mn, mx);
  }
  return PairExtent{mn, mx};
}

double total(std::span<const double> rows, bool deterministic) {
  if (deterministic) return serial::total(rows);
  const auto n = static_cast<std::ptrdiff_t>(rows.size());
  double acc = 0.0;
#pragma omp parallel for schedule(static) reduction(+ : acc)
  for (std::ptrdiff_t i = 0; i < n; ++i) acc += rows[i];
  return acc;
}

double potential_at(std::span<const double> coords, std::size_t dim, std::span<const double> x, std::size_t skip,
                    double s, bool deterministic) {
  if (deterministic) return serial::potential_at(coords, dim, x, skip, s);
  const auto n = static_cast<std::ptrdiff_t>(coords.size() / dim);
  const auto skip_i = static_cast<std::ptrdiff_t>(std::min<std::size_t>(skip, static_cast<std::size_t>(n)));
  double acc = 0.0;
#pragma omp parallel for schedule(static) reduction(+ : acc)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    if (i == skip_i) continue;
    acc += riesz_from_sq(sq_dist(x.data(), coords.data() + i * dim, dim), s);
  }
  return acc;
}

void energy_gradient(std::span<const double> coords, std::size_t dim, double s, std::span<double> grad) {
  const auto n = static_cast<std::ptrdiff_t>(coords.size() / dim);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t j = 0; j < n; ++j) {
    grad_row(coords.data(), static_cast<std::size_t>(n), dim, static_cast<std::size_t>(j), s, grad.data() + j * dim);
  }
}

double covering_radius(std::span<const double> candidate, std::span<const double> reference, std::size_t dim) {
  const std::size_t m = candidate.size() / dim;
  const auto r = static_cast<std::ptrdiff_t>(reference.size() / dim);
  double worst = 0.0;
#pragma omp parallel for schedule(static) reduction(max : worst)
  for (std::ptrdiff_t k = 0; k < r; ++k) {
    worst = std::max(worst, nearest_sq(reference.data() + k * dim, candidate.data(), m, dim));
  }
  return std::sqrt(worst);
}

}  // namespace omp

}  // namespace rieszlab::kernels
