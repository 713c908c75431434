// SPDX-License-Identifier: Apache-2.0

#include "sirm/sirm.hpp"

#include <chrono>
#include <cmath>
#include <fstream>

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

}  // namespace

std::vector<double> equispaced_times(double t0, double t1, int m)
{
  std::vector<double> times(m);
  const double span = t1 - t0;
  for (int i = 0; i < m; ++i)
    times[i] = t0 + span * i / (m - 1);
  times.back() = t1;
  return times;
}

Matrix tangents_at(const FullModel &model, const std::vector<double> &times, const Matrix &x)
{
  Matrix f(x.rows(), x.cols());
  Vector out(model.dim);
  for (int i = 0; i < x.cols(); ++i) {
    model.eval(times[i], x.col(i), out);
    f.col(i) = out;
  }
  return f;
}

// TangentOnly keeps a single state snapshot (the initial one) ahead of the
// scaled tangents.
Matrix build_ensemble_columns(const Matrix &states, const Matrix &tangents,
                              const std::vector<FieldBlock> &blocks, double gamma,
                              EnsembleForm form)
{
  if (form == EnsembleForm::Extended)
    return assemble_information_matrix(states, tangents, blocks, gamma).columns;
  const int n = static_cast<int>(states.rows());
  const int m = static_cast<int>(states.cols());
  const int nb = static_cast<int>(blocks.size());
  Matrix cols = Matrix::Zero(n, nb + m * nb);
  for (int b = 0; b < nb; ++b)
    cols.col(b).segment(blocks[b].offset, blocks[b].length) =
        states.col(0).segment(blocks[b].offset, blocks[b].length);
  for (int i = 0; i < m; ++i)
    for (int b = 0; b < nb; ++b)
      cols.col(nb + i * nb + b).segment(blocks[b].offset, blocks[b].length) =
          gamma * tangents.col(i).segment(blocks[b].offset, blocks[b].length);
  return cols;
}

Matrix build_trial_samples(const FullModel &model, const TrialSpec &trial,
                           const IntegratorConfig &integ, const std::vector<double> &times)
{
  const int m = static_cast<int>(times.size());
  Matrix x(model.dim, m);
  switch (trial.kind) {
    case TrialKind::ConstantState: {
      for (int i = 0; i < m; ++i)
        x.col(i) = model.initial_state;
      break;
    }
    case TrialKind::SuppliedTrajectory: {
      if (trial.supplied.empty())
        throw std::invalid_argument("build_trial_samples: no supplied trajectory");
      if (trial.supplied.dim() != model.dim)
        throw std::invalid_argument("build_trial_samples: supplied dimension mismatch");
      for (int i = 0; i < m; ++i)
        x.col(i) = trial.supplied.state_at(times[i]);
      break;
    }
    case TrialKind::CoarseModel: {
      if (!trial.model_spec)
        throw std::invalid_argument("build_trial_samples: coarse trial needs model_spec");
      const ModelSpec &fine_spec = *trial.model_spec;
      const ModelSpec coarse_spec = trial.coarse_points > 0
                                        ? spec_with_size(fine_spec, trial.coarse_points)
                                        : coarsen_spec(fine_spec, trial.coarse_factor);
      FullModel coarse = make_model(coarse_spec);

      IntegratorConfig ccfg = integ;
      ccfg.t_start = times.front();
      ccfg.t_end = times.back();
      // Mesh refinement ratio, the default stretch factor for the trial dt.
      double scale = 1.0;
      if (const auto *fs = std::get_if<CavitySpec>(&fine_spec))
        scale = static_cast<double>(fs->n_side - 1) /
                (std::get<CavitySpec>(coarse_spec).n_side - 1);
      else
        scale = static_cast<double>(model.dim) / coarse.dim;
      ccfg.dt = trial.coarse_dt > 0.0 ? trial.coarse_dt : scale * integ.dt;
      // Snap to an integer step count; trial accuracy is not sensitive to it.
      const int n_steps =
          std::max(1, static_cast<int>(std::llround((ccfg.t_end - ccfg.t_start) / ccfg.dt)));
      ccfg.dt = (ccfg.t_end - ccfg.t_start) / n_steps;
      ccfg.record_every = 1;

      // Start from the restriction of the fine initial state when the coarse
      // nodes embed in the fine ones; otherwise the coarse instance's own
      // initial profile stands in. Refresh constraints once after restriction.
      Vector xc;
      if (can_restrict(fine_spec, coarse_spec)) {
        xc = restrict_state(fine_spec, coarse_spec, model.initial_state);
        if (coarse.post_step)
          coarse.post_step(ccfg.t_start, xc);
      } else {
        xc = coarse.initial_state;
      }
      Trajectory ctraj = integrate_full_from(coarse, xc, ccfg);

      const bool is_1d = !std::holds_alternative<CavitySpec>(fine_spec);
      for (int i = 0; i < m; ++i) {
        Vector sample = ctraj.state_at(times[i]);
        if (is_1d && trial.fourier_modes > 0)
          sample = fourier_filter(sample, trial.fourier_modes);
        x.col(i) = interpolate_state(coarse_spec, fine_spec, sample);
      }
      break;
    }
  }
  x.col(0) = model.initial_state;
  return x;
}

SirmResult sirm_solve(const FullModel &model, const SirmConfig &cfg,
                      const IntegratorConfig &integ, const Trajectory *reference)
{
  integ.validate();
  if (cfg.snapshot_count < 2)
    throw std::invalid_argument("sirm_solve: need at least 2 snapshots");
  if (cfg.epsilon <= 0.0)
    throw std::invalid_argument("sirm_solve: epsilon must be positive");
  if (cfg.max_iterations < 1)
    throw std::invalid_argument("sirm_solve: need at least one iteration");
  if (cfg.error_scale <= 0.0)
    throw std::invalid_argument("sirm_solve: error scale must be positive");

  const int m = cfg.snapshot_count;
  const std::vector<double> times = equispaced_times(integ.t_start, integ.t_end, m);
  const std::vector<FieldBlock> blocks = model.field_blocks();
  const Vector &x0 = model.initial_state;

  const double rdt = cfg.reduced_dt > 0.0 ? cfg.reduced_dt : integ.dt;
  IntegratorConfig rcfg = integ;
  rcfg.dt = rdt;
  rcfg.record_every = 1;

  Matrix x_cur = build_trial_samples(model, cfg.trial, integ, times);

  SirmResult result;
  result.sample_times = times;
  if (cfg.keep_iterates)
    result.iterate_samples.push_back(x_cur);
  Trajectory ztraj_last;

  for (int j = 1; j <= cfg.max_iterations; ++j) {
    const auto tick = Clock::now();
    const Matrix f_cur = tangents_at(model, times, x_cur);
    const Matrix ensemble =
        build_ensemble_columns(x_cur, f_cur, blocks, cfg.gamma, cfg.ensemble_form);

    BasisInfo basis;
    try {
      basis = pod_basis(ensemble, cfg.criterion);
    } catch (const DegenerateEnsemble &e) {
      throw DegenerateEnsemble(std::string(e.what()) + " (iteration " + std::to_string(j) +
                               ")");
    }

    const ReducedModel rm = build_reduced_model(basis.phi, model);
    const Vector z0 = rm.project(x0);
    Trajectory ztraj = integrate_reduced(rm, z0, rcfg);

    Matrix x_new(model.dim, m);
    x_new.col(0) = x0;
    for (int i = 1; i < m; ++i)
      x_new.col(i) = basis.phi * ztraj.state_at(times[i]);

    double diff = 0.0;
    for (int i = 0; i < m; ++i)
      diff = std::max(diff, (x_new.col(i) - x_cur.col(i)).norm());

    IterationRecord rec;
    rec.iteration = j;
    rec.k = basis.k();
    rec.truncation_estimate = truncation_error_estimate(basis.singular_values, basis.k());
    rec.successive_diff = diff;
    if (reference) {
      double err = 0.0;
      for (int i = 0; i < m; ++i)
        err = std::max(err, (x_new.col(i) - reference->state_at(times[i])).norm());
      rec.true_error = cfg.error_scale * err;
    }
    rec.wall_time_s = seconds_since(tick);
    result.report.iterations.push_back(rec);

    x_cur.swap(x_new);
    if (cfg.keep_iterates)
      result.iterate_samples.push_back(x_cur);
    result.basis = std::move(basis);
    ztraj_last = std::move(ztraj);

    if (diff < cfg.epsilon) {
      result.report.status = RunStatus::Converged;
      break;
    }
    const int nj = static_cast<int>(result.report.iterations.size());
    if (nj >= 4) {
      const double then = result.report.iterations[nj - 4].successive_diff;
      if (then > 0.0 && diff > 100.0 * then) {
        result.report.status = RunStatus::Diverged;
        result.report.message = "successive difference grew by more than 100x over three "
                                "iterations";
        break;
      }
    }
  }
  if (result.report.status == RunStatus::MaxIterations)
    result.report.message = "iteration cap reached";

  result.samples = std::move(x_cur);
  result.trajectory = lift_trajectory(ztraj_last, result.basis.phi, matching_stride(integ, rdt));
  return result;
}

PosteriorError posterior_error(const Trajectory &coarse_iter, const Trajectory &refined_iter)
{
  if (coarse_iter.empty() || refined_iter.empty())
    throw std::invalid_argument("posterior_error: empty trajectory");
  if (coarse_iter.dim() != refined_iter.dim())
    throw std::invalid_argument("posterior_error: dimension mismatch");
  const double lo = std::max(coarse_iter.t_start(), refined_iter.t_start());
  const double hi = std::min(coarse_iter.t_end(), refined_iter.t_end());
  if (hi <= lo)
    throw std::invalid_argument("posterior_error: time ranges do not overlap");

  PosteriorError pe;
  for (double t : refined_iter.times) {
    if (t < lo - 1e-12 || t > hi + 1e-12)
      continue;
    const double v = (coarse_iter.state_at(t) - refined_iter.state_at(t)).norm();
    pe.times.push_back(t);
    pe.values.push_back(v);
    pe.sup = std::max(pe.sup, v);
  }
  return pe;
}

void ConvergenceReport::write_csv(const std::string &path) const
{
  std::ofstream out(path);
  if (!out)
    throw std::runtime_error("ConvergenceReport: cannot write " + path);
  out << "iteration,k,truncation_estimate,successive_diff,true_error,wall_time_s\n";
  for (const auto &r : iterations) {
    out << r.iteration << ',' << r.k << ',' << csv_number(r.truncation_estimate) << ','
        << csv_number(r.successive_diff) << ',' << csv_number(r.true_error) << ','
        << csv_number(r.wall_time_s) << '\n';
  }
}

SirmResult dirm_solve(const FullModel &model, const DirmConfig &dirm, const SirmConfig &cfg,
                      const IntegratorConfig &integ, const Trajectory *reference)
{
  integ.validate();
  if (dirm.block_count < 2)
    throw std::invalid_argument("dirm_solve: need at least 2 blocks");
  if (model.dim % dirm.block_count != 0)
    throw std::invalid_argument("dirm_solve: block count must divide the state size");
  if (dirm.modes_per_block < 1)
    throw std::invalid_argument("dirm_solve: need at least one mode per block");

  const int n = model.dim;
  const int nb = dirm.block_count;
  const int bs = n / nb;
  const int m = cfg.snapshot_count;
  const std::vector<double> times = equispaced_times(integ.t_start, integ.t_end, m);
  const Vector &x0 = model.initial_state;

  IntegratorConfig rcfg = integ;
  rcfg.record_every = 1;

  Matrix x_cur = build_trial_samples(model, cfg.trial, integ, times);

  SirmResult result;
  result.sample_times = times;

  for (int j = 1; j <= cfg.max_iterations; ++j) {
    const auto tick = Clock::now();

    // Per-block bases from the previous iterate's state snapshots.
    std::vector<Matrix> block_basis(nb);
    double tail_sum = 0.0;
    for (int l = 0; l < nb; ++l) {
      Eigen::JacobiSVD<Matrix> svd(x_cur.middleRows(l * bs, bs), Eigen::ComputeThinU);
      const Vector &sv = svd.singularValues();
      int rank = 0;
      while (rank < sv.size() && sv(rank) > sv(0) * 1e-14)
        ++rank;
      const int k = std::min(dirm.modes_per_block, std::max(rank, 1));
      block_basis[l] = svd.matrixU().leftCols(k);
      tail_sum += truncation_error_estimate(sv, k);
    }

    Matrix x_new(n, m);
    int d_eff = 0;
    for (int i = 0; i < nb; ++i) {
      int cols = bs;
      for (int l = 0; l < nb; ++l)
        if (l != i)
          cols += static_cast<int>(block_basis[l].cols());
      d_eff = cols;

      Matrix comp = Matrix::Zero(n, cols);
      int at = 0;
      for (int l = 0; l < nb; ++l) {
        if (l == i) {
          comp.block(l * bs, at, bs, bs).setIdentity();
          at += bs;
        } else {
          const int k = static_cast<int>(block_basis[l].cols());
          comp.block(l * bs, at, bs, k) = block_basis[l];
          at += k;
        }
      }

      const ReducedModel rm = build_reduced_model(comp, model);
      const Vector z0 = rm.project(x0);
      const Trajectory ztraj = integrate_reduced(rm, z0, rcfg);
      const Matrix band = comp.middleRows(i * bs, bs);
      for (int c = 0; c < m; ++c)
        x_new.middleRows(i * bs, bs).col(c) = band * ztraj.state_at(times[c]);
    }
    x_new.col(0) = x0;

    double diff = 0.0;
    for (int i = 0; i < m; ++i)
      diff = std::max(diff, (x_new.col(i) - x_cur.col(i)).norm());

    IterationRecord rec;
    rec.iteration = j;
    rec.k = d_eff;
    rec.truncation_estimate = tail_sum;
    rec.successive_diff = diff;
    if (reference) {
      double err = 0.0;
      for (int i = 0; i < m; ++i)
        err = std::max(err, (x_new.col(i) - reference->state_at(times[i])).norm());
      rec.true_error = cfg.error_scale * err;
    }
    rec.wall_time_s = seconds_since(tick);
    result.report.iterations.push_back(rec);

    x_cur.swap(x_new);
    if (diff < cfg.epsilon) {
      result.report.status = RunStatus::Converged;
      break;
    }
    const int nj = static_cast<int>(result.report.iterations.size());
    if (nj >= 4) {
      const double then = result.report.iterations[nj - 4].successive_diff;
      if (then > 0.0 && diff > 100.0 * then) {
        result.report.status = RunStatus::Diverged;
        result.report.message = "successive difference grew by more than 100x over three "
                                "iterations";
        break;
      }
    }
  }
  if (result.report.status == RunStatus::MaxIterations)
    result.report.message = "iteration cap reached";

  // The sweep has no single lifted trajectory; report the sampled iterate.
  result.samples = x_cur;
  result.trajectory.times = times;
  result.trajectory.states = std::move(x_cur);
  return result;
}

}  // namespace sirm
