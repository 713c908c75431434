// SPDX-License-Identifier: Apache-2.0

#include "sirm/local.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>

#include "sirm/csv.hpp"

namespace sirm
{

namespace
{

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0)
{
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

BasisInfo make_local_basis(const Matrix &ensemble, const LocalConfig &cfg)
{
  if (cfg.basis_method == BasisMethod::GramSchmidt)
    return gram_schmidt_basis(ensemble, cfg.gs_drop_tol);
  return pod_basis(ensemble, cfg.criterion);
}

struct InnerOutcome
{
  Matrix samples;
  BasisInfo basis;
  Trajectory ztraj;
  int iterations = 0;
  double diff = 0.0;
  bool converged = false;
};

// One subinterval of the sample/extract/reduce loop. The first sample column
// is pinned to the subinterval's start state throughout.
InnerOutcome inner_loop(const FullModel &model, const LocalConfig &cfg, const Vector &x_start,
                        const std::vector<double> &times, Matrix trial,
                        const IntegratorConfig &rcfg)
{
  const int m = static_cast<int>(times.size());
  const std::vector<FieldBlock> blocks = model.field_blocks();

  InnerOutcome out;
  Matrix x_cur = std::move(trial);
  x_cur.col(0) = x_start;
  Vector f_start(model.dim);
  model.eval(times.front(), x_start, f_start);

  std::vector<double> history;
  for (int j = 1; j <= cfg.max_iterations; ++j) {
    Matrix f_cur = tangents_at(model, times, x_cur);
    f_cur.col(0) = f_start;
    const Matrix ensemble =
        build_ensemble_columns(x_cur, f_cur, blocks, cfg.gamma, cfg.ensemble_form);
    BasisInfo basis = make_local_basis(ensemble, cfg);

    const ReducedModel rm = build_reduced_model(basis.phi, model);
    const Vector z0 = rm.project(x_start);
    Trajectory ztraj = integrate_reduced(rm, z0, rcfg);

    Matrix x_new(model.dim, m);
    x_new.col(0) = x_start;
    for (int i = 1; i < m; ++i)
      x_new.col(i) = basis.phi * ztraj.state_at(times[i]);

    double diff = 0.0;
    for (int i = 0; i < m; ++i)
      diff = std::max(diff, (x_new.col(i) - x_cur.col(i)).norm());
    history.push_back(diff);

    x_cur.swap(x_new);
    out.basis = std::move(basis);
    out.ztraj = std::move(ztraj);
    out.iterations = j;
    out.diff = diff;

    if (diff < cfg.epsilon) {
      out.converged = true;
      break;
    }
    const int nj = static_cast<int>(history.size());
    if (nj >= 4 && history[nj - 4] > 0.0 && diff > 100.0 * history[nj - 4])
      break;
  }
  out.samples = std::move(x_cur);
  return out;
}

Matrix constant_samples(const Vector &x_start, int m)
{
  Matrix x(x_start.size(), m);
  for (int i = 0; i < m; ++i)
    x.col(i) = x_start;
  return x;
}

// Coarse-model trial restarted from an arbitrary state: reuse the global
// trial builder on a copy of the model whose initial state is x_start. The
// factor-based coarse grid always nests, so restart states restrict cleanly.
Matrix coarse_trial(const FullModel &model, const LocalConfig &cfg, const Vector &x_start,
                    const IntegratorConfig &sub_integ, const std::vector<double> &times)
{
  if (!cfg.model_spec)
    throw std::invalid_argument("local coarse trial needs model_spec");
  FullModel shifted = model;
  shifted.initial_state = x_start;
  TrialSpec trial;
  trial.kind = TrialKind::CoarseModel;
  trial.model_spec = cfg.model_spec;
  trial.coarse_factor = cfg.coarse_factor;
  trial.coarse_dt = cfg.coarse_dt;
  trial.fourier_modes = cfg.fourier_modes;
  return build_trial_samples(shifted, trial, sub_integ, times);
}

}  // namespace

Matrix time_history_trial(const FullModel &model, const LocalConfig &cfg,
                          const std::vector<double> &prev_times, const Matrix &prev_states,
                          const Matrix &prev_tangents, const Vector &x_start,
                          const IntegratorConfig &integ, const std::vector<double> &times)
{
  const int m = static_cast<int>(times.size());
  if (prev_times.empty() ||
      std::abs(prev_times.back() - times.front()) > 1e-9 * std::max(1.0, std::abs(times.front())))
    throw std::invalid_argument("time_history_trial: subintervals are not adjacent");
  try {
    const Matrix ensemble = build_ensemble_columns(prev_states, prev_tangents,
                                                   model.field_blocks(), cfg.gamma,
                                                   EnsembleForm::Extended);
    const BasisInfo basis = make_local_basis(ensemble, cfg);
    const ReducedModel rm = build_reduced_model(basis.phi, model);
    const Vector z0 = rm.project(x_start);
    IntegratorConfig rcfg = integ;
    rcfg.t_start = times.front();
    rcfg.t_end = times.back();
    rcfg.record_every = 1;
    const Trajectory ztraj = integrate_reduced(rm, z0, rcfg);
    Matrix x(model.dim, m);
    x.col(0) = x_start;
    for (int i = 1; i < m; ++i)
      x.col(i) = basis.phi * ztraj.state_at(times[i]);
    return x;
  } catch (const DegenerateEnsemble &) {
    return constant_samples(x_start, m);
  } catch (const IntegratorError &) {
    return constant_samples(x_start, m);
  }
}

LocalResult local_sirm_solve(const FullModel &model, const LocalConfig &cfg,
                             const IntegratorConfig &integ)
{
  integ.validate();
  if (cfg.subintervals < 1)
    throw std::invalid_argument("local_sirm_solve: need at least one subinterval");
  if (cfg.m_prime < 2)
    throw std::invalid_argument("local_sirm_solve: need at least 2 samples per subinterval");
  const int steps = integ.step_count();
  if (steps % cfg.subintervals != 0)
    throw std::invalid_argument("local_sirm_solve: subintervals must divide the step count");
  const int sub_steps = steps / cfg.subintervals;
  if (sub_steps < 1)
    throw std::invalid_argument("local_sirm_solve: empty subinterval");

  const auto run_tick = Clock::now();
  LocalResult result;
  Vector x_start = model.initial_state;

  std::vector<double> prev_times;
  Matrix prev_states, prev_tangents;

  for (int i = 0; i < cfg.subintervals; ++i) {
    const auto tick = Clock::now();
    const double a = integ.t_start + static_cast<double>(i) * sub_steps * integ.dt;
    const double b = (i + 1 == cfg.subintervals)
                         ? integ.t_end
                         : integ.t_start + static_cast<double>(i + 1) * sub_steps * integ.dt;
    const std::vector<double> times = equispaced_times(a, b, cfg.m_prime);

    IntegratorConfig sub = integ;
    sub.t_start = a;
    sub.t_end = b;

    Matrix trial;
    switch (cfg.trial_strategy) {
      case LocalTrialStrategy::Constant:
        trial = constant_samples(x_start, cfg.m_prime);
        break;
      case LocalTrialStrategy::CoarseModel:
        trial = coarse_trial(model, cfg, x_start, sub, times);
        break;
      case LocalTrialStrategy::TimeHistory:
        if (i == 0)
          trial = cfg.model_spec ? coarse_trial(model, cfg, x_start, sub, times)
                                 : constant_samples(x_start, cfg.m_prime);
        else
          trial = time_history_trial(model, cfg, prev_times, prev_states, prev_tangents,
                                     x_start, sub, times);
        break;
    }

    IntegratorConfig rcfg = sub;
    rcfg.record_every = 1;
    InnerOutcome outcome = inner_loop(model, cfg, x_start, times, std::move(trial), rcfg);

    result.trajectory.append(
        lift_trajectory(outcome.ztraj, outcome.basis.phi, matching_stride(integ, integ.dt)));

    SubintervalRecord rec;
    rec.index = i + 1;
    rec.t_begin = a;
    rec.t_end = b;
    rec.iterations = outcome.iterations;
    rec.k = outcome.basis.k();
    rec.successive_diff = outcome.diff;
    rec.converged = outcome.converged;
    rec.wall_time_s = seconds_since(tick);
    result.records.push_back(rec);

    x_start = outcome.samples.col(cfg.m_prime - 1);
    if (cfg.trial_strategy == LocalTrialStrategy::TimeHistory) {
      prev_times = times;
      prev_tangents = tangents_at(model, times, outcome.samples);
      prev_states = std::move(outcome.samples);
    }
  }

  result.total_wall_time_s = seconds_since(run_tick);
  return result;
}

double LocalResult::mean_iterations() const
{
  if (records.empty())
    return 0.0;
  double sum = 0.0;
  for (const auto &r : records)
    sum += r.iterations;
  return sum / records.size();
}

void LocalResult::write_csv(const std::string &path) const
{
  std::ofstream out(path);
  if (!out)
    throw std::runtime_error("LocalResult: cannot write " + path);
  out << "subinterval,t_begin,t_end,iterations,k_prime,successive_diff,converged,wall_time_s\n";
  for (const auto &r : records) {
    out << r.index << ',' << csv_number(r.t_begin) << ',' << csv_number(r.t_end) << ','
        << r.iterations << ',' << r.k << ',' << csv_number(r.successive_diff) << ','
        << (r.converged ? 1 : 0) << ',' << csv_number(r.wall_time_s) << '\n';
  }
}

}  // namespace sirm
