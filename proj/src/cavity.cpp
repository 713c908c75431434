// SPDX-License-Identifier: Apache-2.0

#include "sirm/cavity.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace sirm
{

namespace
{

// Shared geometry and scratch-free helpers for the cavity right-hand side.
// All methods are const and allocate their outputs locally, so the closures
// built on top remain safe to call concurrently.
struct CavityOps
{
  CavitySpec spec;
  PoissonSolver5pt poisson;

  explicit CavityOps(const CavitySpec &s) : spec(s), poisson(s.n_side) {}

  int side() const { return spec.n_side; }
  int nf() const { return spec.field_size(); }

  // psi from the interior vorticity; zero walls.
  void solve_psi(const Vector &omega_field, Vector &psi_field) const
  {
    poisson.solve(omega_field, psi_field, nullptr);
  }

  // Thom closure written onto the wall entries of omega_field.
  void write_thom_walls(const Vector &psi_field, Vector &omega_field) const
  {
    const int s = side();
    const double h = spec.h();
    const double inv_h2 = 1.0 / (h * h);
    for (int j = 0; j < s; ++j) {
      omega_field(spec.idx(0, j)) = -2.0 * psi_field(spec.idx(1, j)) * inv_h2;
      omega_field(spec.idx(s - 1, j)) = -2.0 * psi_field(spec.idx(s - 2, j)) * inv_h2;
    }
    for (int i = 0; i < s; ++i)
      omega_field(spec.idx(i, 0)) = -2.0 * psi_field(spec.idx(i, 1)) * inv_h2;
    for (int i = 0; i < s; ++i)
      omega_field(spec.idx(i, s - 1)) =
          -2.0 * psi_field(spec.idx(i, s - 2)) * inv_h2 - spec.lid_speed / h;
  }

  // Advection plus the wall-adjacent diffusion contributions: everything in
  // d(omega)/dt on interior nodes except the zero-wall Laplacian handled by
  // the stiff operator. omega_field must carry Thom-consistent walls.
  void omega_explicit_interior(const Vector &psi, const Vector &omega, Vector &g) const
  {
    const int s = side();
    const double h = spec.h();
    const double inv_2h = 1.0 / (2.0 * h);
    const double inv_h2 = 1.0 / (h * h);
    const double inv_re = 1.0 / spec.reynolds;
    g.setZero(nf());
    for (int j = 1; j < s - 1; ++j) {
      for (int i = 1; i < s - 1; ++i) {
        const int c = spec.idx(i, j);
        const double psi_x = (psi(c + 1) - psi(c - 1)) * inv_2h;
        const double psi_y = (psi(c + s) - psi(c - s)) * inv_2h;
        const double om_x = (omega(c + 1) - omega(c - 1)) * inv_2h;
        const double om_y = (omega(c + s) - omega(c - s)) * inv_2h;
        double val = -psi_y * om_x + psi_x * om_y;
        if (i == 1)
          val += inv_re * omega(c - 1) * inv_h2;
        if (i == s - 2)
          val += inv_re * omega(c + 1) * inv_h2;
        if (j == 1)
          val += inv_re * omega(c - s) * inv_h2;
        if (j == s - 2)
          val += inv_re * omega(c + s) * inv_h2;
        g(c) = val;
      }
    }
  }

  // (1/Re) times the interior 5-point Laplacian with zero walls.
  void lap0_omega(const Vector &omega, Vector &out) const
  {
    const int s = side();
    const double inv_h2 = 1.0 / (spec.h() * spec.h());
    const double inv_re = 1.0 / spec.reynolds;
    out.setZero(nf());
    for (int j = 1; j < s - 1; ++j) {
      for (int i = 1; i < s - 1; ++i) {
        const int c = spec.idx(i, j);
        double acc = -4.0 * omega(c);
        if (i > 1)
          acc += omega(c - 1);
        if (i < s - 2)
          acc += omega(c + 1);
        if (j > 1)
          acc += omega(c - s);
        if (j < s - 2)
          acc += omega(c + s);
        out(c) = inv_re * acc * inv_h2;
      }
    }
  }

  // Wall rates from the stream-function rate (the lid speed is constant in
  // time, so only the psi term of the closure differentiates). Corner rings
  // sit on walls where psi_dot vanishes, so corners get a zero rate.
  void omega_wall_rate(const Vector &psi_dot, Vector &omega_dot) const
  {
    const int s = side();
    const double inv_h2 = 1.0 / (spec.h() * spec.h());
    for (int j = 0; j < s; ++j) {
      omega_dot(spec.idx(0, j)) = -2.0 * psi_dot(spec.idx(1, j)) * inv_h2;
      omega_dot(spec.idx(s - 1, j)) = -2.0 * psi_dot(spec.idx(s - 2, j)) * inv_h2;
    }
    for (int i = 0; i < s; ++i) {
      omega_dot(spec.idx(i, 0)) = -2.0 * psi_dot(spec.idx(i, 1)) * inv_h2;
      omega_dot(spec.idx(i, s - 1)) = -2.0 * psi_dot(spec.idx(i, s - 2)) * inv_h2;
    }
  }

  // Full or explicit-only rate of the stacked state. include_stiff selects
  // whether the zero-wall vorticity Laplacian is added to the interior rate;
  // the psi and wall rows always use the full vorticity rate.
  void rates(const Vector &x, bool include_stiff, Vector &out) const
  {
    const int n = nf();
    Vector psi = x.head(n);
    solve_psi(x.tail(n), psi);
    Vector omega = x.tail(n);
    write_thom_walls(psi, omega);

    Vector g_int;
    omega_explicit_interior(psi, omega, g_int);
    Vector full_int;
    lap0_omega(omega, full_int);
    full_int += g_int;

    Vector psi_dot = Vector::Zero(n);
    solve_psi(full_int, psi_dot);

    Vector om_rate = include_stiff ? full_int : g_int;
    omega_wall_rate(psi_dot, om_rate);
    out.resize(2 * n);
    out.head(n) = psi_dot;
    out.tail(n) = om_rate;
  }

  double cfl(double dt, const Vector &x) const
  {
    const int s = side();
    const double inv_2h = 1.0 / (2.0 * spec.h());
    double vmax = spec.lid_speed;
    for (int j = 1; j < s - 1; ++j) {
      for (int i = 1; i < s - 1; ++i) {
        const int c = spec.idx(i, j);
        const double u = (x(c + s) - x(c - s)) * inv_2h;
        const double v = -(x(c + 1) - x(c - 1)) * inv_2h;
        vmax = std::max(vmax, std::abs(u) + std::abs(v));
      }
    }
    return vmax * dt / spec.h();
  }
};

// Implicit part: (1/Re) times the zero-wall interior Laplacian acting on the
// vorticity block. The Crank-Nicolson factor is so well conditioned (the
// shift is 1 + O(dt/Re/h^2) relative to identity) that plain CG converges in
// a handful of iterations.
class CavityStiff : public StiffOperator
{
public:
  CavityStiff(std::shared_ptr<const CavityOps> ops) : ops_(std::move(ops)) {}

  int dim() const override { return 2 * ops_->nf(); }

  void apply(const Vector &x, Vector &out) const override
  {
    const int n = ops_->nf();
    Vector lom;
    ops_->lap0_omega(x.tail(n), lom);
    out.setZero(2 * n);
    out.tail(n) = lom;
  }

  std::unique_ptr<CnFactor> factor(double alpha) const override;

private:
  std::shared_ptr<const CavityOps> ops_;
};

class CavityCnFactor : public CnFactor
{
public:
  CavityCnFactor(std::shared_ptr<const CavityOps> ops, double alpha)
    : ops_(std::move(ops)), alpha_(alpha)
  {
  }

  void solve(const Vector &rhs, Vector &x) const override
  {
    const int n = ops_->nf();
    x = rhs;
    // Solve (I - alpha * (1/Re) lap0) w = rhs on the vorticity interior.
    Vector b = rhs.tail(n);
    zero_walls(b);
    Vector w = b;
    Vector r(n), p(n), ap(n);
    shifted_apply(w, ap);
    r = b - ap;
    p = r;
    double rr = r.squaredNorm();
    const double tol2 = 1e-24 * b.squaredNorm();
    int it = 0;
    const int cap = 200 + 2 * ops_->side();
    while (rr > tol2 && it < cap) {
      shifted_apply(p, ap);
      const double alpha_cg = rr / p.dot(ap);
      w += alpha_cg * p;
      r -= alpha_cg * ap;
      const double rr_new = r.squaredNorm();
      p = r + (rr_new / rr) * p;
      rr = rr_new;
      ++it;
    }
    if (rr > tol2)
      throw SolverError("cavity CN factor: CG stalled");
    x.tail(n) = w;
    // Wall entries pass through unchanged.
    const int s = ops_->side();
    const auto &spec = ops_->spec;
    for (int j = 0; j < s; ++j) {
      x(n + spec.idx(0, j)) = rhs(n + spec.idx(0, j));
      x(n + spec.idx(s - 1, j)) = rhs(n + spec.idx(s - 1, j));
    }
    for (int i = 0; i < s; ++i) {
      x(n + spec.idx(i, 0)) = rhs(n + spec.idx(i, 0));
      x(n + spec.idx(i, s - 1)) = rhs(n + spec.idx(i, s - 1));
    }
  }

private:
  void zero_walls(Vector &field) const
  {
    const int s = ops_->side();
    const auto &spec = ops_->spec;
    for (int j = 0; j < s; ++j) {
      field(spec.idx(0, j)) = 0.0;
      field(spec.idx(s - 1, j)) = 0.0;
    }
    for (int i = 0; i < s; ++i) {
      field(spec.idx(i, 0)) = 0.0;
      field(spec.idx(i, s - 1)) = 0.0;
    }
  }

  void shifted_apply(const Vector &w, Vector &out) const
  {
    ops_->lap0_omega(w, out);
    out = w - alpha_ * out;
    zero_walls(out);
  }

  std::shared_ptr<const CavityOps> ops_;
  double alpha_;
};

std::unique_ptr<CnFactor> CavityStiff::factor(double alpha) const
{
  return std::make_unique<CavityCnFactor>(ops_, alpha);
}

// Structured reduced right-hand side: with a basis whose columns each live in
// a single field block, the Poisson solves become a fixed set of per-basis
// precomputations and every reduced step runs on n-sized field arithmetic
// with no inner iterative solves.
ReducedRhs make_cavity_reduced_rhs(std::shared_ptr<const CavityOps> ops, const Matrix &phi)
{
  const int n = ops->nf();
  const int k = static_cast<int>(phi.cols());
  std::vector<int> psi_cols, omega_cols;
  for (int q = 0; q < k; ++q) {
    const double head = phi.col(q).head(n).norm();
    const double tail = phi.col(q).tail(n).norm();
    const double total = std::max(head, tail);
    if (total == 0.0)
      return ReducedRhs{};  // degenerate column, let the generic route handle it
    if (head <= 1e-12 * total)
      omega_cols.push_back(q);
    else if (tail <= 1e-12 * total)
      psi_cols.push_back(q);
    else
      return ReducedRhs{};  // mixed column, generic route
  }

  const int kp = static_cast<int>(psi_cols.size());
  const int ko = static_cast<int>(omega_cols.size());
  Matrix phi_psi(n, kp), phi_om(n, ko);
  for (int q = 0; q < kp; ++q)
    phi_psi.col(q) = phi.col(psi_cols[q]).head(n);
  for (int q = 0; q < ko; ++q)
    phi_om.col(q) = phi.col(omega_cols[q]).tail(n);

  const int s = ops->side();
  const auto &spec = ops->spec;
  const double inv_h2 = 1.0 / (spec.h() * spec.h());

  // psi responses of the omega columns and of the psi columns.
  Matrix s_psi(n, ko), w_resp(n, kp);
  for (int q = 0; q < ko; ++q) {
    Vector p = Vector::Zero(n);
    ops->solve_psi(phi_om.col(q), p);
    s_psi.col(q) = p;
  }
  for (int q = 0; q < kp; ++q) {
    Vector p = Vector::Zero(n);
    ops->solve_psi(phi_psi.col(q), p);
    w_resp.col(q) = p;
  }

  // Wall-rate response of each omega column: spreading its wall weights onto
  // the interior ring with the Thom factor, then applying the inverse
  // Laplacian once. Corner rings fall on walls and are skipped.
  Matrix v_resp(n, ko);
  for (int q = 0; q < ko; ++q) {
    Vector src = Vector::Zero(n);
    for (int j = 1; j < s - 1; ++j) {
      src(spec.idx(1, j)) += -2.0 * inv_h2 * phi_om(spec.idx(0, j), q);
      src(spec.idx(s - 2, j)) += -2.0 * inv_h2 * phi_om(spec.idx(s - 1, j), q);
    }
    for (int i = 1; i < s - 1; ++i) {
      src(spec.idx(i, 1)) += -2.0 * inv_h2 * phi_om(spec.idx(i, 0), q);
      src(spec.idx(i, s - 2)) += -2.0 * inv_h2 * phi_om(spec.idx(i, s - 1), q);
    }
    Vector p = Vector::Zero(n);
    if (src.norm() == 0.0)
      v_resp.col(q) = p;
    else {
      ops->solve_psi(src, p);
      v_resp.col(q) = p;
    }
  }

  // Interior-Laplacian images of the omega columns and the coupling blocks.
  Matrix lap_phi_om(n, ko);
  for (int q = 0; q < ko; ++q) {
    Vector l;
    ops->lap0_omega(phi_om.col(q), l);
    lap_phi_om.col(q) = l;
  }
  const Matrix p1 = w_resp.transpose() * lap_phi_om;                     // kp x ko
  const Matrix p2 = v_resp.transpose() * lap_phi_om;                     // ko x ko
  const Matrix m_om = phi_om + v_resp;                                   // n x ko

  auto ops_c = std::move(ops);
  ReducedRhs rhs;
  rhs.explicit_part = [ops_c, phi_om, s_psi, w_resp, m_om, p1, p2, psi_cols, omega_cols,
                       kp, ko, k](double, const Vector &z, Vector &out) {
    Vector z_om(ko);
    for (int q = 0; q < ko; ++q)
      z_om(q) = z(omega_cols[q]);

    Vector omega = phi_om * z_om;
    Vector psi = s_psi * z_om;
    ops_c->write_thom_walls(psi, omega);
    Vector g_int;
    ops_c->omega_explicit_interior(psi, omega, g_int);

    Vector out_psi(kp), out_om(ko);
    out_psi.noalias() = w_resp.transpose() * g_int;
    out_psi.noalias() += p1 * z_om;
    out_om.noalias() = m_om.transpose() * g_int;
    out_om.noalias() += p2 * z_om;

    out.setZero(k);
    for (int q = 0; q < kp; ++q)
      out(psi_cols[q]) = out_psi(q);
    for (int q = 0; q < ko; ++q)
      out(omega_cols[q]) = out_om(q);
  };
  return rhs;
}

}  // namespace

Vector thom_boundary(const Vector &psi, const CavitySpec &spec)
{
  spec.validate();
  if (static_cast<int>(psi.size()) != spec.field_size())
    throw std::invalid_argument("thom_boundary: field size mismatch");
  CavityOps ops(spec);
  Vector omega = Vector::Zero(spec.field_size());
  ops.write_thom_walls(psi, omega);
  return omega;
}

Vector solve_cavity_poisson(const Vector &omega, const CavitySpec &spec,
                            const Vector *warm, LinearSolveStats *stats)
{
  spec.validate();
  PoissonSolver5pt poisson(spec.n_side);
  Vector psi = warm ? *warm : Vector::Zero(spec.field_size());
  poisson.solve(omega, psi, stats);
  return psi;
}

Vector centerline_u(const Vector &state, const CavitySpec &spec)
{
  const int s = spec.n_side;
  const int i = (s - 1) / 2;
  const double inv_2h = 1.0 / (2.0 * spec.h());
  Vector u(s);
  u(0) = 0.0;
  u(s - 1) = spec.lid_speed;
  for (int j = 1; j < s - 1; ++j)
    u(j) = (state(spec.idx(i, j + 1)) - state(spec.idx(i, j - 1))) * inv_2h;
  return u;
}

Vector centerline_v(const Vector &state, const CavitySpec &spec)
{
  const int s = spec.n_side;
  const int j = (s - 1) / 2;
  const double inv_2h = 1.0 / (2.0 * spec.h());
  Vector v(s);
  v(0) = 0.0;
  v(s - 1) = 0.0;
  for (int i = 1; i < s - 1; ++i)
    v(i) = -(state(spec.idx(i + 1, j)) - state(spec.idx(i - 1, j))) * inv_2h;
  return v;
}

FullModel make_cavity(const CavitySpec &spec)
{
  spec.validate();
  auto ops = std::make_shared<const CavityOps>(spec);
  const int n = spec.field_size();

  FullModel model;
  model.dim = 2 * n;
  // Impulsive start: quiescent interior with the lid already moving, so the
  // initial wall vorticity is Thom-consistent with psi = 0.
  model.initial_state = Vector::Zero(2 * n);
  {
    Vector psi0 = Vector::Zero(n);
    Vector om0 = Vector::Zero(n);
    ops->write_thom_walls(psi0, om0);
    model.initial_state.tail(n) = om0;
  }
  model.blocks = {FieldBlock{0, n}, FieldBlock{n, n}};
  model.stiff = std::make_shared<CavityStiff>(ops);
  model.eval_field = [ops](double, const Vector &x, Vector &out) { ops->rates(x, true, out); };
  model.explicit_part = [ops](double, const Vector &x, Vector &out) {
    ops->rates(x, false, out);
  };
  model.post_step = [ops, n](double, Vector &x) {
    Vector psi = x.head(n);
    ops->solve_psi(x.tail(n), psi);
    x.head(n) = psi;
    Vector omega = x.tail(n);
    ops->write_thom_walls(psi, omega);
    x.tail(n) = omega;
  };
  model.cfl_number = [ops](double dt, const Vector &x) {
    return ops->cfl(dt, x.head(ops->nf()));
  };
  model.make_reduced_rhs = [ops](const Matrix &phi) {
    return make_cavity_reduced_rhs(ops, phi);
  };
  return model;
}

}  // namespace sirm
