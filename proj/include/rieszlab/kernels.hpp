#pragma once

// Pairwise Riesz kernels over a flat coordinate array (N points, `dim`
// doubles each, point-major). Two implementations with identical signatures:
//
//   serial::  plain loops, the reference used by tests and the benchmark
//   omp::     OpenMP-parallel over rows / reference points
//
// Rows are always accumulated in index order, so per-point values agree bit
// for bit between the two. Only the final reduction of a total may differ,
// and omp:: takes a `deterministic` flag that forces an index-ordered sum.

#include <cmath>
#include <cstddef>
#include <span>

namespace rieszlab::kernels {

/// |x - y|^{-s} given r2 = |x - y|^2. Integer exponents 1..4 avoid pow.
inline double riesz_from_sq(double r2, double s) noexcept {
  if (s == 1.0) return 1.0 / std::sqrt(r2);
  if (s == 2.0) return 1.0 / r2;
  if (s == 3.0) return 1.0 / (r2 * std::sqrt(r2));
  if (s == 4.0) return 1.0 / (r2 * r2);
  return std::pow(r2, -0.5 * s);
}

struct PairExtent {
  double min_dist_sq;
  double max_dist_sq;
};

namespace serial {

/// rows[i] = sum_{j != i} |x_i - x_j|^{-s}; returns min/max pairwise squared
/// distances (infinity/0 when N < 2).
PairExtent potential_rows(std::span<const double> coords, std::size_t dim, double s, std::span<double> rows);

/// Index-ordered sum of rows.
double total(std::span<const double> rows);

/// sum_{i != skip} |x - x_i|^{-s}; pass skip >= N to include every point.
double potential_at(std::span<const double> coords, std::size_t dim, std::span<const double> x, std::size_t skip,
                    double s);

/// grad[j] = d/dx_j of the ordered-pair energy
///         = -2 s sum_{i != j} (x_j - x_i) |x_j - x_i|^{-s-2}
void energy_gradient(std::span<const double> coords, std::size_t dim, double s, std::span<double> grad);

/// max over reference points of the distance to the nearest candidate.
double covering_radius(std::span<const double> candidate, std::span<const double> reference, std::size_t dim);

}  // namespace serial

namespace omp {

PairExtent potential_rows(std::span<const double> coords, std::size_t dim, double s, std::span<double> rows);
double total(std::span<const double> rows, bool deterministic);
double potential_at(std::span<const double> coords, std::size_t dim, std::span<const double> x, std::size_t skip,
                    double s, bool deterministic);
void energy_gradient(std::span<const double> coords, std::size_t dim, double s, std::span<double> grad);
double covering_radius(std::span<const double> candidate, std::span<const double> reference, std::size_t dim);

}  // namespace omp

}  // namespace rieszlab::kernels
