#pragma once

// Finite-N diagnostics computed from sweep traces. Every quantity here is an
// estimate built from best-found (upper-bound) energies.

#include <cstddef>
#include <string>
#include <vector>

#include "rieszlab/optimizer.hpp"

namespace rieszlab {

/// Throws ValidationError unless N is strictly increasing, N1 + N2 = N,
/// frac1 in [0,1] and G = E_best / N^{1+s/d} to 1e-12 relative.
void check_trace(const AsymptoticTrace& trace);

struct GammaEstimates {
  double g_low_hat = 0.0;  // min of G over the tail
  double g_up_hat = 0.0;   // max of G over the tail
  std::size_t n_min_tail = 0;
  std::size_t n_max = 0;
  std::size_t tail_records = 0;
  double spread() const noexcept { return g_up_hat - g_low_hat; }
};

/// Tail = records with N >= (1 - tail_fraction) * N_max.
GammaEstimates estimate_gamma(const AsymptoticTrace& trace, double tail_fraction = 0.5);

/// g2^{d/s} / (g1^{d/s} + g2^{d/s}) with g1 the lower A1 constant.
double predict_alpha_star(double g1, double g2, double s, double d);
/// Same formula with the upper A1 constant.
double predict_beta_star(double g_up_a1, double g2, double s, double d);

struct SplitPrediction {
  double alpha_star = 0.0;
  double beta_star = 0.0;
  double g_low_a1 = 0.0;
  double g_up_a1 = 0.0;
  double g_a2 = 0.0;
  double s = 0.0;
  double d = 0.0;
  std::string provenance;  // "estimated" or "user"
};

SplitPrediction predict_split(double g_low_a1, double g_up_a1, double g_a2, double s, double d,
                              std::string provenance);

/// beta^{1+s/d} g1 + (1-beta)^{1+s/d} g2
double split_objective(double beta, double g1, double g2, double s, double d);

/// Argmin of split_objective over the grid k * step, k = 0..1/step.
double split_objective_grid_argmin(double g1, double g2, double s, double d, double step = 1e-4);

struct Lemma3Flag {
  std::size_t n = 0;
  std::size_t n_next = 0;
  double g = 0.0;
  double g_next = 0.0;
  double bound = 0.0;  // (1 - (1+s/d) kappa) G(N)
};

/// Flags consecutive records with G(N') < (1 - (1+s/d) kappa) G(N) - tol G(N),
/// kappa = (N' - N)/N. A flag means the solve at N is suboptimal.
std::vector<Lemma3Flag> lemma3_check(const AsymptoticTrace& trace, double s, double d, double tol = 1e-9);

struct WeakStarStats {
  std::vector<std::pair<std::size_t, double>> frac1;  // (N, N1/N)
  double tail_min = 0.0;
  double tail_max = 0.0;
  double gap = 0.0;
  double noise = 0.0;      // median |dG| / mean G over the tail
  double threshold = 0.0;  // 3 * noise
  bool signature = false;  // gap > threshold
  bool insufficient_data = false;
  std::size_t tail_records = 0;
};

/// frac1 trace and its tail oscillation. Throws for non-union traces.
WeakStarStats weak_star_trace(const AsymptoticTrace& trace, double tail_fraction = 0.5);

/// E1 + E2 + 2 M1 M2 sep^{-s}: energy of the assembled split with the cross
/// term bounded by the separation.
double split_upper_bound(double e1, double e2, std::size_t m1, std::size_t m2, double sep_lower, double s);

/// E1 + E2 + sep^{-s} N^2 with N = M1 + M2 (looser form).
double split_upper_bound_loose(double e1, double e2, std::size_t m1, std::size_t m2, double sep_lower, double s);

}  // namespace rieszlab
