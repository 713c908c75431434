// SPDX-License-Identifier: Apache-2.0

#ifndef SIRM_SIRM_HPP
#define SIRM_SIRM_HPP

#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "sirm/basis.hpp"
#include "sirm/integrate.hpp"
#include "sirm/models.hpp"
#include "sirm/trajectory.hpp"

namespace sirm
{

enum class TrialKind
{
  ConstantState,       // every sample equals the initial state
  CoarseModel,         // coarse-grid run, optionally Fourier-smoothed, lifted
  SuppliedTrajectory,  // resample a caller-provided trajectory
};

// Ensemble layout: Extended pairs every snapshot with its tangent; TangentOnly
// keeps just the initial state next to the tangents.
enum class EnsembleForm
{
  Extended,
  TangentOnly,
};

enum class RunStatus
{
  Converged,
  MaxIterations,
  Diverged,
};

struct TrialSpec
{
  TrialKind kind = TrialKind::ConstantState;

  // Family parameters of the full model; required for CoarseModel. The coarse
  // grid is either the fine one divided by coarse_factor or, when
  // coarse_points > 0, that explicit size (1D points or cavity side).
  std::optional<ModelSpec> model_spec;
  int coarse_factor = 1;
  int coarse_points = 0;
  double coarse_dt = 0.0;  // 0 scales the fine dt by the grid ratio
  int fourier_modes = 0;   // 0 disables smoothing (always disabled for cavity)

  Trajectory supplied;
};

struct SirmConfig
{
  int snapshot_count = 51;  // m, including both endpoints
  double gamma = 1.0;
  EnergyCriterion criterion;
  double epsilon = 1e-4;    // sup-norm tolerance on successive iterates
  int max_iterations = 10;
  double reduced_dt = 0.0;  // 0 uses the full-model dt
  double error_scale = 1.0;  // norm weight applied to the true_error column only
  EnsembleForm ensemble_form = EnsembleForm::Extended;
  bool keep_iterates = false;  // store the trial and every refined sample matrix
  TrialSpec trial;
};

struct IterationRecord
{
  int iteration = 0;  // 1-based
  int k = 0;
  double truncation_estimate = 0.0;
  double successive_diff = 0.0;
  double true_error = std::numeric_limits<double>::quiet_NaN();
  double wall_time_s = 0.0;
};

struct ConvergenceReport
{
  std::vector<IterationRecord> iterations;
  RunStatus status = RunStatus::MaxIterations;
  std::string message;

  bool converged() const { return status == RunStatus::Converged; }
  void write_csv(const std::string &path) const;
};

struct SirmResult
{
  Trajectory trajectory;  // lifted solution of the last iteration
  ConvergenceReport report;
  BasisInfo basis;        // basis of the last iteration
  Matrix samples;         // n x m sampled states of the last iteration
  std::vector<double> sample_times;
  std::vector<Matrix> iterate_samples;  // trial first; filled when keep_iterates
};

// Global subspace iteration: sample the current iterate, enrich with scaled
// tangents, extract a basis, integrate the Galerkin-reduced system, lift and
// repeat until successive iterates agree to epsilon in the sampled sup norm.
// The sample at t_start always holds the exact initial state. An optional
// reference trajectory fills the true_error column of the report.
SirmResult sirm_solve(const FullModel &model, const SirmConfig &cfg,
                      const IntegratorConfig &integ, const Trajectory *reference = nullptr);

// Trial samples at the given times (first column forced to the initial
// state). Exposed for the local solver and tests.
Matrix build_trial_samples(const FullModel &model, const TrialSpec &trial,
                           const IntegratorConfig &integ, const std::vector<double> &times);

// Shared building blocks of the global and partitioned solvers.
std::vector<double> equispaced_times(double t0, double t1, int m);
Matrix tangents_at(const FullModel &model, const std::vector<double> &times, const Matrix &x);
Matrix build_ensemble_columns(const Matrix &states, const Matrix &tangents,
                              const std::vector<FieldBlock> &blocks, double gamma,
                              EnsembleForm form);

// Sup over shared sample times of the distance between two iterates; the
// estimate behind the successive_diff column.
struct PosteriorError
{
  std::vector<double> times;
  std::vector<double> values;
  double sup = 0.0;
};
PosteriorError posterior_error(const Trajectory &coarse_iter, const Trajectory &refined_iter);

// Partitioned baseline: the state is split into contiguous blocks; each sweep
// member keeps one block at full resolution and projects the others onto
// per-block POD bases of the previous iterate. The report's k column carries
// the effective dimension (sum of reduced block sizes plus one full block).
struct DirmConfig
{
  int block_count = 0;
  int modes_per_block = 0;
};

SirmResult dirm_solve(const FullModel &model, const DirmConfig &dirm, const SirmConfig &cfg,
                      const IntegratorConfig &integ, const Trajectory *reference = nullptr);

}  // namespace sirm

#endif  // SIRM_SIRM_HPP
