// SPDX-License-Identifier: Apache-2.0

#ifndef SIRM_LOCAL_HPP
#define SIRM_LOCAL_HPP

#include "sirm/sirm.hpp"

namespace sirm
{

enum class BasisMethod
{
  GramSchmidt,  // cheap and well conditioned for small ensembles
  Pod,
};

enum class LocalTrialStrategy
{
  Constant,
  CoarseModel,
  TimeHistory,  // reduced prediction from the previous subinterval's samples
};

struct LocalConfig
{
  int subintervals = 1;  // M equal pieces of the time range
  int m_prime = 3;       // samples per subinterval, both endpoints included
  LocalTrialStrategy trial_strategy = LocalTrialStrategy::TimeHistory;
  BasisMethod basis_method = BasisMethod::GramSchmidt;
  double gamma = 1.0;
  // Plain-norm successive-difference tolerance. Large composite states (the
  // cavity's psi/omega stack has plain norm O(1e2)) sit above the basis
  // churn floor at 1e-4; much tighter values make every subinterval run to
  // the iteration cap without improving the trajectory.
  double epsilon = 1e-4;
  int max_iterations = 10;
  EnergyCriterion criterion;     // only read by the Pod basis method
  double gs_drop_tol = 1e-10;
  EnsembleForm ensemble_form = EnsembleForm::Extended;

  // Coarse-trial parameters (CoarseModel strategy and the first-subinterval
  // fallback of TimeHistory when model_spec is present).
  std::optional<ModelSpec> model_spec;
  int coarse_factor = 1;
  double coarse_dt = 0.0;
  int fourier_modes = 0;
};

struct SubintervalRecord
{
  int index = 0;  // 1-based
  double t_begin = 0.0;
  double t_end = 0.0;
  int iterations = 0;
  int k = 0;
  double successive_diff = 0.0;
  double wall_time_s = 0.0;
  bool converged = false;
};

struct LocalResult
{
  Trajectory trajectory;
  std::vector<SubintervalRecord> records;
  double total_wall_time_s = 0.0;

  double mean_iterations() const;
  void write_csv(const std::string &path) const;
};

// Time-partitioned subspace iteration: the range is cut into M equal
// subintervals, each solved by the same sample/extract/reduce loop seeded
// from a per-subinterval trial and started from the previous subinterval's
// accepted endpoint. With M = 1, matching trial and basis settings, this
// reproduces the global solver exactly.
LocalResult local_sirm_solve(const FullModel &model, const LocalConfig &cfg,
                             const IntegratorConfig &integ);

// Trial samples for one subinterval from the previous subinterval's accepted
// samples and tangents: their ensemble spans a reduced model that is
// integrated across the new subinterval. Falls back to a constant trial when
// the ensemble degenerates.
Matrix time_history_trial(const FullModel &model, const LocalConfig &cfg,
                          const std::vector<double> &prev_times, const Matrix &prev_states,
                          const Matrix &prev_tangents, const Vector &x_start,
                          const IntegratorConfig &integ,
                          const std::vector<double> &times);

}  // namespace sirm

#endif  // SIRM_LOCAL_HPP
