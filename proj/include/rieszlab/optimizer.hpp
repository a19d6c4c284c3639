#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "rieszlab/cache.hpp"
#include "rieszlab/energy.hpp"
#include "rieszlab/geometry.hpp"

namespace rieszlab {

struct SearchParams {
  /// Fractal address depth; 0 selects the automatic rule
  /// m = max(2, ceil(log_{1/L}(4 N^{1/d}))), raised until K^m >= N.
  std::size_t depth = 0;
  std::size_t restarts = 8;
  /// Initial temperature; <= 0 selects 0.1 * (mean per-point energy).
  double initial_temperature = 0.0;
  double cooling = 0.95;
  std::size_t steps_per_point = 200;  // steps per level = steps_per_point * N
  std::size_t levels = 20;
  std::uint64_t seed = 1;
  double tie_tol = 1e-9;
  /// 0: segments are continuous. n >= 2: segments are the grid t_k = k/(n-1).
  std::size_t segment_grid = 0;
  /// Number of assembled splits that get a joint annealing refinement.
  std::size_t refine_top = 3;
  /// Probability of the whole-address redraw move on fractal points.
  double escape_probability = 0.1;
  /// Probability of a cross-component relocation on unions.
  double cross_probability = 0.05;
  EvalOptions eval{};

  void validate() const;
};

enum class SolveStatus { OracleExact, Heuristic };
const char* to_string(SolveStatus status);
SolveStatus parse_status(const std::string& text);

struct SolveResult {
  Configuration config;
  EnergyReport energy;
  /// Min A1-count over retained configurations within tie_tol of the best
  /// energy (N for single sets).
  std::size_t N1 = 0;
  std::size_t N2 = 0;
  SolveStatus status = SolveStatus::Heuristic;
  std::size_t evaluations = 0;
  std::size_t depth = 0;
};

/// Automatic fractal depth for N points (see SearchParams::depth).
std::size_t auto_depth(const SelfSimilarSet& fractal, std::size_t n);

struct ExhaustiveOptions {
  std::size_t depth = 1;           // fractal pool = all K^depth addresses
  std::size_t segment_grid = 3;    // segment pool = k/(n-1), k = 0..n-1
  double tie_tol = 1e-9;
  std::uint64_t max_subsets = 10'000'000;
  bool parallel = true;
};

/// Exact minimum over all N-subsets of the finite candidate pool.
/// Throws InfeasibleError when C(pool, N) exceeds max_subsets or N > pool.
SolveResult minimize_exhaustive(const SetSpec& set, std::size_t n, double s, const ExhaustiveOptions& opts = {});

/// Serial full-recomputation enumeration kept as the test reference for the
/// incremental parallel enumeration above.
SolveResult minimize_exhaustive_reference(const SetSpec& set, std::size_t n, double s,
                                          const ExhaustiveOptions& opts = {});

/// Best-of-restarts annealed search. `warm_start`, when given and valid,
/// seeds restart 0.
SolveResult minimize_local_search(const SetSpec& set, std::size_t n, double s, const SearchParams& params,
                                  const Configuration* warm_start = nullptr);

struct UnionSolveContext {
  Cache* cache = nullptr;
  /// Predicted A1 fraction; centers the split window.
  std::optional<double> alpha_hint;
  /// Extra starting configuration (e.g. previous N plus an inserted point).
  const Configuration* warm_start = nullptr;
};

/// Joint optimization on a union over a window of splits M1 + M2 = N.
SolveResult minimize_union(const UnionSet& set, std::size_t n, double s, const SearchParams& params,
                           const UnionSolveContext& ctx = {});

/// Split candidates considered by minimize_union.
std::vector<std::size_t> split_window(std::size_t n, std::optional<double> center_fraction, bool have_prediction);

/// Places one new point at the best of `draws` random candidates (lowest
/// point energy against `config`).
Configuration greedy_insert(const SetSpec& set, const Configuration& config, double s, std::size_t depth,
                            std::uint64_t seed, std::size_t draws = 64);

struct TraceRecord {
  std::size_t N = 0;
  double E_best = 0.0;
  double G = 0.0;
  std::size_t N1 = 0;
  std::size_t N2 = 0;
  double frac1 = 0.0;
  double min_dist = 0.0;
  std::string status;
};

struct AsymptoticTrace {
  std::vector<TraceRecord> records;
  std::string set_id;
  /// Component hashes (union traces only).
  std::string a1_id, a2_id;
  bool is_union = false;
  double s = 0.0;
  double d = 0.0;
};

struct SweepOptions {
  Cache* cache = nullptr;
  bool force = false;
  std::optional<double> alpha_hint;
  /// Called after every N with the record just appended.
  std::function<void(const AsymptoticTrace&)> on_record;
};

struct SweepStats {
  std::size_t solves = 0;
  std::size_t cache_hits = 0;
};

/// Solves every N in `ns` (ascending), warm-starting from the previous best.
AsymptoticTrace sweep(const SetSpec& set, double s, const std::vector<std::size_t>& ns, const SearchParams& params,
                      const SweepOptions& opts = {}, SweepStats* stats = nullptr);

/// Solve dispatch by set type, consulting/updating the cache.
SolveResult solve(const SetSpec& set, std::size_t n, double s, const SearchParams& params, Cache* cache = nullptr,
                  const Configuration* warm_start = nullptr, std::optional<double> alpha_hint = {});

}  // namespace rieszlab
