#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "rieszlab/asymptotics.hpp"
#include "rieszlab/error.hpp"
#include "rieszlab/io.hpp"
#include "rieszlab/optimizer.hpp"

namespace rieszlab {

enum ExitCode : int {
  kExitOk = 0,
  kExitValidation = 2,
  kExitSolver = 3,
  kExitIo = 4,
};

int exit_code_for(ErrorKind kind);

/// Experiment description, from a JSON file and/or command-line flags.
///
///   {"set": <set definition or {"preset": ...}>, "s": 3,
///    "n": 10, "n_min": 2, "n_max": 40,
///    "search": {"depth": "auto" | 4, "restarts": 16, "seed": 1,
///               "levels": 20, "cooling": 0.95, "steps_per_point": 200,
///               "tie_tol": 1e-9, "segment_grid": 0, "refine_top": 3,
///               "initial_temperature": 0},
///    "alpha_hint": 0.5, "cache": "path", "out": "path",
///    "deterministic": true}
///
/// A file holding a bare set definition is also accepted.
struct ExperimentConfig {
  std::optional<SetSpec> set;
  double s = 0.0;
  std::size_t n = 0;
  std::size_t n_min = 2;
  std::size_t n_max = 0;
  SearchParams search;
  std::optional<double> alpha_hint;
  std::string cache_path;
  std::string out_path;
  bool deterministic = false;

  /// Set present, s > dimension(set), search parameters valid.
  void validate() const;
};

ExperimentConfig parse_experiment(const Json& j);

/// Summary document for a set of traces (see README for the layout).
Json report_traces(const std::vector<std::pair<std::string, AsymptoticTrace>>& traces);

/// Entry point shared by the executable and the tests; args exclude argv[0].
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace rieszlab
