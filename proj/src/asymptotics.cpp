#include "rieszlab/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "rieszlab/error.hpp"

namespace rieszlab {

namespace {

void check_exponents(double s, double d) {
  if (!(d > 0.0) || !(s > d) || !std::isfinite(s)) throw ValidationError("need s > d > 0");
}

// Indices of the tail records.
std::vector<std::size_t> tail_indices(const AsymptoticTrace& trace, double tail_fraction) {
  if (!(tail_fraction > 0.0 && tail_fraction <= 1.0)) throw ValidationError("tail_fraction must lie in (0,1]");
  std::vector<std::size_t> out;
  if (trace.records.empty()) return out;
  std::size_t n_max = 0;
  for (const auto& r : trace.records) n_max = std::max(n_max, r.N);
  const double cut = (1.0 - tail_fraction) * static_cast<double>(n_max);
  for (std::size_t i = 0; i < trace.records.size(); ++i)
    if (static_cast<double>(trace.records[i].N) >= cut) out.push_back(i);
  return out;
}

}  // namespace

void check_trace(const AsymptoticTrace& trace) {
  for (std::size_t i = 0; i < trace.records.size(); ++i) {
    const auto& r = trace.records[i];
    std::ostringstream where;
    where << "trace record N=" << r.N << ": ";
    if (i > 0 && r.N <= trace.records[i - 1].N) throw ValidationError(where.str() + "N must be strictly increasing");
    if (r.N1 + r.N2 != r.N) throw ValidationError(where.str() + "N1 + N2 != N");
    if (!(r.frac1 >= 0.0 && r.frac1 <= 1.0)) throw ValidationError(where.str() + "frac1 outside [0,1]");
    if (r.N >= 2 && trace.d > 0.0) {
      const double g = r.E_best / std::pow(static_cast<double>(r.N), 1.0 + trace.s / trace.d);
      if (std::abs(g - r.G) > 1e-12 * std::max(std::abs(g), 1e-300)) throw ValidationError(where.str() + "G != E/N^{1+s/d}");
    }
  }
}

GammaEstimates estimate_gamma(const AsymptoticTrace& trace, double tail_fraction) {
  if (trace.records.size() < 4) {
    throw ValidationError("estimate_gamma needs at least 4 records, got " + std::to_string(trace.records.size()));
  }
  const auto tail = tail_indices(trace, tail_fraction);
  if (tail.empty()) throw ValidationError("estimate_gamma: empty tail");
  GammaEstimates est;
  est.g_low_hat = trace.records[tail.front()].G;
  est.g_up_hat = est.g_low_hat;
  est.n_min_tail = trace.records[tail.front()].N;
  for (auto i : tail) {
    const auto& r = trace.records[i];
    est.g_low_hat = std::min(est.g_low_hat, r.G);
    est.g_up_hat = std::max(est.g_up_hat, r.G);
    est.n_min_tail = std::min(est.n_min_tail, r.N);
    est.n_max = std::max(est.n_max, r.N);
  }
  est.tail_records = tail.size();
  return est;
}

double predict_alpha_star(double g1, double g2, double s, double d) {
  check_exponents(s, d);
  if (!(g1 > 0.0) || !(g2 > 0.0) || !std::isfinite(g1) || !std::isfinite(g2)) {
    throw ValidationError("split prediction needs positive finite constants");
  }
  const double e = d / s;
  // Divide through by the larger constant to keep both powers <= 1.
  const double scale = std::max(g1, g2);
  const double a = std::pow(g1 / scale, e);
  const double b = std::pow(g2 / scale, e);
  return b / (a + b);
}

double predict_beta_star(double g_up_a1, double g2, double s, double d) { return predict_alpha_star(g_up_a1, g2, s, d); }

SplitPrediction predict_split(double g_low_a1, double g_up_a1, double g_a2, double s, double d,
                              std::string provenance) {
  SplitPrediction p;
  p.alpha_star = predict_alpha_star(g_low_a1, g_a2, s, d);
  p.beta_star = predict_beta_star(g_up_a1, g_a2, s, d);
  p.g_low_a1 = g_low_a1;
  p.g_up_a1 = g_up_a1;
  p.g_a2 = g_a2;
  p.s = s;
  p.d = d;
  p.provenance = std::move(provenance);
  return p;
}

double split_objective(double beta, double g1, double g2, double s, double d) {
  const double p = 1.0 + s / d;
  return std::pow(beta, p) * g1 + std::pow(1.0 - beta, p) * g2;
}

double split_objective_grid_argmin(double g1, double g2, double s, double d, double step) {
  const auto steps = static_cast<std::size_t>(std::llround(1.0 / step));
  double best_beta = 0.0;
  double best = split_objective(0.0, g1, g2, s, d);
  for (std::size_t k = 1; k <= steps; ++k) {
    const double beta = static_cast<double>(k) / static_cast<double>(steps);
    const double v = split_objective(beta, g1, g2, s, d);
    if (v < best) {
      best = v;
      best_beta = beta;
    }
  }
  return best_beta;
}

std::vector<Lemma3Flag> lemma3_check(const AsymptoticTrace& trace, double s, double d, double tol) {
  std::vector<Lemma3Flag> flags;
  const double rate = 1.0 + s / d;
  for (std::size_t i = 0; i + 1 < trace.records.size(); ++i) {
    const auto& a = trace.records[i];
    const auto& b = trace.records[i + 1];
    if (a.N < 2 || b.N <= a.N) continue;
    const double kappa = static_cast<double>(b.N - a.N) / static_cast<double>(a.N);
    const double bound = (1.0 - rate * kappa) * a.G;
    if (b.G < bound - tol * std::abs(a.G)) flags.push_back({a.N, b.N, a.G, b.G, bound});
  }
  return flags;
}

WeakStarStats weak_star_trace(const AsymptoticTrace& trace, double tail_fraction) {
  if (!trace.is_union) throw ValidationError("weak-star trace needs a union trace");
  WeakStarStats st;
  for (const auto& r : trace.records) st.frac1.emplace_back(r.N, r.frac1);
  if (trace.records.size() < 2) {
    st.insufficient_data = true;
    if (!trace.records.empty()) st.tail_min = st.tail_max = trace.records.front().frac1;
    st.tail_records = trace.records.size();
    return st;
  }
  const auto tail = tail_indices(trace, tail_fraction);
  st.tail_records = tail.size();
  st.tail_min = trace.records[tail.front()].frac1;
  st.tail_max = st.tail_min;
  double g_sum = 0.0;
  for (auto i : tail) {
    st.tail_min = std::min(st.tail_min, trace.records[i].frac1);
    st.tail_max = std::max(st.tail_max, trace.records[i].frac1);
    g_sum += trace.records[i].G;
  }
  st.gap = st.tail_max - st.tail_min;

  std::vector<double> dg;
  for (std::size_t k = 1; k < tail.size(); ++k) dg.push_back(std::abs(trace.records[tail[k]].G - trace.records[tail[k - 1]].G));
  const double g_mean = g_sum / static_cast<double>(tail.size());
  if (!dg.empty() && g_mean > 0.0) {
    std::sort(dg.begin(), dg.end());
    const std::size_t m = dg.size();
    const double median = m % 2 ? dg[m / 2] : 0.5 * (dg[m / 2 - 1] + dg[m / 2]);
    st.noise = median / g_mean;
  } else {
    st.insufficient_data = true;
  }
  st.threshold = 3.0 * st.noise;
  st.signature = !st.insufficient_data && st.gap > st.threshold;
  return st;
}

double split_upper_bound(double e1, double e2, std::size_t m1, std::size_t m2, double sep_lower, double s) {
  if (!(sep_lower > 0.0)) throw ValidationError("split bound needs a positive separation");
  return e1 + e2 + 2.0 * static_cast<double>(m1) * static_cast<double>(m2) * std::pow(sep_lower, -s);
}

double split_upper_bound_loose(double e1, double e2, std::size_t m1, std::size_t m2, double sep_lower, double s) {
  if (!(sep_lower > 0.0)) throw ValidationError("split bound needs a positive separation");
  const double n = static_cast<double>(m1 + m2);
  return e1 + e2 + n * n * std::pow(sep_lower, -s);
}

}  // namespace rieszlab
