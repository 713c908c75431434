// SPDX-License-Identifier: Apache-2.0

#include "sirm/integrate.hpp"

#include <cmath>
#include <cstdio>

namespace sirm
{

int IntegratorConfig::step_count() const
{
  return static_cast<int>(std::llround((t_end - t_start) / dt));
}

void IntegratorConfig::validate() const
{
  if (dt <= 0.0)
    throw std::invalid_argument("IntegratorConfig: dt must be positive");
  if (t_end <= t_start)
    throw std::invalid_argument("IntegratorConfig: t_end must exceed t_start");
  if (record_every < 1)
    throw std::invalid_argument("IntegratorConfig: record_every must be >= 1");
  const double span = t_end - t_start;
  const int n = step_count();
  if (n < 1 || std::abs(n * dt - span) > 1e-8 * span)
    throw std::invalid_argument("IntegratorConfig: dt does not divide the time span");
}

namespace
{

class Recorder
{
public:
  Recorder(int dim, int n_steps, int every) : every_(every)
  {
    traj_.states.resize(dim, n_steps / every + 2);
    traj_.times.reserve(n_steps / every + 2);
  }

  void push(double t, const Vector &x)
  {
    const int i = static_cast<int>(traj_.times.size());
    traj_.states.col(i) = x;
    traj_.times.push_back(t);
  }

  bool wants(int step, int n_steps) const
  {
    return step % every_ == 0 || step == n_steps;
  }

  Trajectory take()
  {
    traj_.states.conservativeResize(Eigen::NoChange, traj_.times.size());
    return std::move(traj_);
  }

private:
  Trajectory traj_;
  int every_;
};

}  // namespace

Trajectory integrate_full_from(const FullModel &model, const Vector &x0,
                               const IntegratorConfig &cfg, IntegrationDiag *diag)
{
  cfg.validate();
  if (x0.size() != model.dim)
    throw std::invalid_argument("integrate_full: initial state size mismatch");
  if (model.stiff && !model.explicit_part)
    throw std::invalid_argument("integrate_full: stiff model without explicit part");

  const int n_steps = cfg.step_count();
  const double dt = cfg.dt;
  const auto &g_fn = model.explicit_part ? model.explicit_part : model.eval_field;

  std::unique_ptr<CnFactor> cn;
  if (model.stiff)
    cn = model.stiff->factor(0.5 * dt);

  IntegrationDiag local;
  IntegrationDiag &d = diag ? *diag : local;
  d.steps = n_steps;
  if (model.cfl_number) {
    d.max_cfl = model.cfl_number(dt, x0);
    if (d.max_cfl > 1.0 && !d.cfl_warning) {
      d.cfl_warning = true;
      std::fprintf(stderr, "warning: advective CFL %.3f exceeds 1 at t=%g\n", d.max_cfl,
                   cfg.t_start);
    }
  }

  Recorder rec(model.dim, n_steps, cfg.record_every);
  Vector x = x0;
  Vector g(model.dim), g_prev(model.dim), pred(model.dim), lx(model.dim), x_new(model.dim);
  rec.push(cfg.t_start, x);
  bool have_prev = false;

  for (int k = 0; k < n_steps; ++k) {
    const double t = cfg.t_start + k * dt;
    g_fn(t, x, g);
    if (have_prev)
      pred = x + dt * (1.5 * g - 0.5 * g_prev);
    else
      pred = x + dt * g;
    if (cn) {
      model.stiff->apply(x, lx);
      pred.noalias() += (0.5 * dt) * lx;
      cn->solve(pred, x_new);
    } else {
      x_new = pred;
    }
    const double t_next = cfg.t_start + (k + 1) * dt;
    if (model.post_step)
      model.post_step(t_next, x_new);
    if (!x_new.allFinite())
      throw IntegratorError("integrate_full: non-finite state", k + 1, t_next);
    g_prev.swap(g);
    have_prev = true;
    x.swap(x_new);
    if (rec.wants(k + 1, n_steps)) {
      rec.push(t_next, x);
      if (model.cfl_number) {
        const double c = model.cfl_number(dt, x);
        d.max_cfl = std::max(d.max_cfl, c);
        if (c > 1.0 && !d.cfl_warning) {
          d.cfl_warning = true;
          std::fprintf(stderr, "warning: advective CFL %.3f exceeds 1 at t=%g\n", c, t_next);
        }
      }
    }
  }
  return rec.take();
}

Trajectory integrate_full(const FullModel &model, const IntegratorConfig &cfg,
                          IntegrationDiag *diag)
{
  return integrate_full_from(model, model.initial_state, cfg, diag);
}

ReducedModel build_reduced_model(const Matrix &basis, const FullModel &model)
{
  if (basis.rows() != model.dim)
    throw std::invalid_argument("build_reduced_model: basis row count mismatch");
  const int k = static_cast<int>(basis.cols());
  if (k < 1)
    throw std::invalid_argument("build_reduced_model: empty basis");

  ReducedModel rm;
  rm.basis = basis;
  rm.stiff_reduced = Matrix::Zero(k, k);
  rm.has_stiff = static_cast<bool>(model.stiff);
  if (rm.has_stiff) {
    Vector lx(model.dim);
    for (int q = 0; q < k; ++q) {
      model.stiff->apply(basis.col(q), lx);
      rm.stiff_reduced.col(q) = basis.transpose() * lx;
    }
  }

  if (model.make_reduced_rhs) {
    ReducedRhs rr = model.make_reduced_rhs(basis);
    if (rr.explicit_part) {
      rm.explicit_reduced = std::move(rr.explicit_part);
      return rm;
    }
  }

  // Generic route: lift, evaluate, project.
  const auto g_fn = model.explicit_part ? model.explicit_part : model.eval_field;
  if (rm.has_stiff && !model.explicit_part)
    throw std::invalid_argument("build_reduced_model: stiff model without explicit part");
  Matrix phi = basis;
  rm.explicit_reduced = [phi, g_fn](double t, const Vector &z, Vector &out) {
    Vector x = phi * z;
    Vector g(x.size());
    g_fn(t, x, g);
    out.noalias() = phi.transpose() * g;
  };
  return rm;
}

Trajectory lift_trajectory(const Trajectory &ztraj, const Matrix &phi, int stride)
{
  if (ztraj.empty())
    throw std::invalid_argument("lift_trajectory: empty trajectory");
  if (phi.cols() != ztraj.dim())
    throw std::invalid_argument("lift_trajectory: basis width mismatch");
  if (stride < 1)
    stride = 1;
  Trajectory out;
  const int m = ztraj.size();
  const int count = (m - 1) / stride + ((m - 1) % stride ? 2 : 1);
  out.states.resize(phi.rows(), count);
  out.times.reserve(count);
  int col = 0;
  for (int i = 0; i < m; i += stride) {
    out.states.col(col++) = phi * ztraj.states.col(i);
    out.times.push_back(ztraj.times[i]);
  }
  if ((m - 1) % stride) {
    out.states.col(col++) = phi * ztraj.states.col(m - 1);
    out.times.push_back(ztraj.times[m - 1]);
  }
  return out;
}

int matching_stride(const IntegratorConfig &cfg, double reduced_dt)
{
  const double ratio = cfg.record_every * cfg.dt / reduced_dt;
  return std::max(1, static_cast<int>(std::llround(ratio)));
}

Trajectory integrate_reduced(const ReducedModel &reduced, const Vector &z0,
                             const IntegratorConfig &cfg, IntegrationDiag *diag)
{
  cfg.validate();
  const int k = reduced.k();
  if (z0.size() != k)
    throw std::invalid_argument("integrate_reduced: coordinate size mismatch");
  if (!reduced.explicit_reduced)
    throw std::invalid_argument("integrate_reduced: missing reduced right-hand side");

  const int n_steps = cfg.step_count();
  const double dt = cfg.dt;

  Eigen::PartialPivLU<Matrix> cn;
  if (reduced.has_stiff)
    cn.compute(Matrix::Identity(k, k) - (0.5 * dt) * reduced.stiff_reduced);

  IntegrationDiag local;
  IntegrationDiag &d = diag ? *diag : local;
  d.steps = n_steps;

  Recorder rec(k, n_steps, cfg.record_every);
  Vector z = z0;
  Vector g(k), g_prev(k), pred(k);
  rec.push(cfg.t_start, z);
  bool have_prev = false;

  for (int step = 0; step < n_steps; ++step) {
    const double t = cfg.t_start + step * dt;
    reduced.explicit_reduced(t, z, g);
    if (have_prev)
      pred = z + dt * (1.5 * g - 0.5 * g_prev);
    else
      pred = z + dt * g;
    if (reduced.has_stiff) {
      pred.noalias() += (0.5 * dt) * (reduced.stiff_reduced * z);
      z = cn.solve(pred);
    } else {
      z = pred;
    }
    const double t_next = cfg.t_start + (step + 1) * dt;
    if (!z.allFinite())
      throw IntegratorError("integrate_reduced: non-finite state", step + 1, t_next);
    g_prev.swap(g);
    have_prev = true;
    if (rec.wants(step + 1, n_steps))
      rec.push(t_next, z);
  }
  return rec.take();
}

}  // namespace sirm
