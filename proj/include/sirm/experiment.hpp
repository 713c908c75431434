// SPDX-License-Identifier: Apache-2.0

#ifndef SIRM_EXPERIMENT_HPP
#define SIRM_EXPERIMENT_HPP

#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "sirm/config.hpp"
#include "sirm/local.hpp"
#include "sirm/metrics.hpp"

namespace sirm
{

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfigError = 1;
inline constexpr int kExitAllRunsFailed = 2;

struct ExperimentOptions
{
  std::string out_dir;       // nonempty overrides [experiment] out_dir
  bool paper_scale = false;  // merge the [paper-scale] override section
  bool single_thread = true; // runs are sequential either way; recorded for provenance
  std::optional<int> seed;   // overrides [experiment] seed

  // Test hook: when set, scaling runs skip the solvers and report this value
  // as the run time for a grid with n_points unknowns.
  std::function<double(long n_points, bool local)> timing_override;
};

// Executes the experiment described by the config: enumerates the sweep axes,
// runs each point, and writes results.csv plus per-run convergence files (and
// centerline/field dumps for cavity runs) under the output directory.
// Returns kExitOk or kExitAllRunsFailed; malformed configs throw ConfigError.
int run_experiment(ConfigFile cfg, const ExperimentOptions &opt);

struct ScalingPoint
{
  int side = 0;
  long n_points = 0;
  double full_time = std::numeric_limits<double>::quiet_NaN();
  double local_time = std::numeric_limits<double>::quiet_NaN();
  bool full_ok = false;
  bool local_ok = false;
};

struct ScalingReport
{
  std::vector<ScalingPoint> points;
  std::optional<PowerFit> full_fit;   // absent when < 3 points survive
  std::optional<PowerFit> local_fit;
};

// Times the full model against the partitioned reduced solver over a list of
// cavity grids. The step size follows the mesh, dt(side) = dt_anchor *
// (anchor_side - 1) / (side - 1), so the advective CFL number stays fixed.
// Failed runs are excluded from the log-log fits; fewer than three surviving
// points leaves the corresponding fit unset. Exponents are fitted against
// n_points = side^2.
ScalingReport scaling_study(const CavitySpec &base, const std::vector<int> &sides,
                            int anchor_side, double dt_anchor, double t_end,
                            const LocalConfig &local_cfg,
                            const std::function<double(long, bool)> &timing_override = {});

// Plain-text matrix dump with a two-line header: "rows cols" then the grid
// spacing. Values follow row by row, bottom row first.
void write_field_dump(const std::string &path, const Vector &field, int side, double spacing);

}  // namespace sirm

#endif  // SIRM_EXPERIMENT_HPP
