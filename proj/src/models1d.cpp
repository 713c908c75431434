// SPDX-License-Identifier: Apache-2.0

#include <cmath>

#include "sirm/cavity.hpp"
#include "sirm/linsolve.hpp"
#include "sirm/models.hpp"

namespace sirm
{

namespace
{

constexpr double kTwoPi = 6.283185307179586476925286766559;

// Periodic second-difference operator nu * d^2/dx^2 on a uniform grid. The
// Crank-Nicolson factor is a cyclic tridiagonal solve.
class Circulant1DStiff : public StiffOperator
{
public:
  Circulant1DStiff(int n, double nu, double dx) : n_(n), coef_(nu / (dx * dx)) {}

  int dim() const override { return n_; }

  void apply(const Vector &x, Vector &out) const override
  {
    out.resize(n_);
    for (int i = 0; i < n_; ++i) {
      const double left = x((i + n_ - 1) % n_);
      const double right = x((i + 1) % n_);
      out(i) = coef_ * (left - 2.0 * x(i) + right);
    }
  }

  std::unique_ptr<CnFactor> factor(double alpha) const override
  {
    struct Factor : CnFactor
    {
      explicit Factor(CyclicTridiagFactor f) : factor(std::move(f)) {}
      void solve(const Vector &rhs, Vector &x) const override { factor.solve(rhs, x); }
      CyclicTridiagFactor factor;
    };
    const double off = -alpha * coef_;
    Vector diag = Vector::Constant(n_, 1.0 + 2.0 * alpha * coef_);
    Vector band = Vector::Constant(n_ - 1, off);
    return std::make_unique<Factor>(CyclicTridiagFactor(band, diag, band, off, off));
  }

private:
  int n_;
  double coef_;
};

void upwind_advection(const Vector &u, double c, double dx, Vector &out)
{
  const int n = static_cast<int>(u.size());
  out.resize(n);
  if (c >= 0.0) {
    for (int i = 0; i < n; ++i)
      out(i) = -c * (u(i) - u((i + n - 1) % n)) / dx;
  } else {
    for (int i = 0; i < n; ++i)
      out(i) = -c * (u((i + 1) % n) - u(i)) / dx;
  }
}

// Backward differences throughout: the bump initial profile keeps u >= 0, so
// transport is rightward. A sign-switching stencil would flip on the small
// negative excursions of Fourier-filtered trial states and feed broadband
// noise into the tangent ensemble.
void burgers_advection(const Vector &u, double dx, Vector &out)
{
  const int n = static_cast<int>(u.size());
  out.resize(n);
  for (int i = 0; i < n; ++i)
    out(i) = -u(i) * (u(i) - u((i + n - 1) % n)) / dx;
}

FullModel make_advection_diffusion(const AdvDiffSpec &spec)
{
  spec.grid.validate();
  const int n = spec.grid.n_points;
  const double dx = spec.grid.spacing();
  const double c = spec.speed;

  FullModel model;
  model.dim = n;
  model.initial_state = cubic_spline_ic(spec.grid);
  std::shared_ptr<const StiffOperator> stiff;
  if (spec.viscosity != 0.0)
    stiff = std::make_shared<Circulant1DStiff>(n, spec.viscosity, dx);
  model.stiff = stiff;
  model.explicit_part = [c, dx](double, const Vector &x, Vector &out) {
    upwind_advection(x, c, dx, out);
  };
  model.eval_field = [c, dx, stiff](double, const Vector &x, Vector &out) {
    upwind_advection(x, c, dx, out);
    if (stiff) {
      Vector lx;
      stiff->apply(x, lx);
      out += lx;
    }
  };
  model.cfl_number = [c, dx](double dt, const Vector &) { return std::abs(c) * dt / dx; };
  return model;
}

// 1D grid of a non-cavity spec; calling this on a cavity spec is a logic error.
GridSpec1D grid_of(const ModelSpec &spec)
{
  return std::visit(
      [](const auto &s) -> GridSpec1D {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, CavitySpec>)
          throw std::invalid_argument("grid_of: cavity spec has no 1D grid");
        else
          return s.grid;
      },
      spec);
}

FullModel make_burgers(const BurgersSpec &spec)
{
  spec.grid.validate();
  const int n = spec.grid.n_points;
  const double dx = spec.grid.spacing();

  FullModel model;
  model.dim = n;
  model.initial_state = cubic_spline_ic(spec.grid);
  std::shared_ptr<const StiffOperator> stiff;
  if (spec.viscosity != 0.0)
    stiff = std::make_shared<Circulant1DStiff>(n, spec.viscosity, dx);
  model.stiff = stiff;
  model.explicit_part = [dx](double, const Vector &x, Vector &out) {
    burgers_advection(x, dx, out);
  };
  model.eval_field = [dx, stiff](double, const Vector &x, Vector &out) {
    burgers_advection(x, dx, out);
    if (stiff) {
      Vector lx;
      stiff->apply(x, lx);
      out += lx;
    }
  };
  model.cfl_number = [dx](double dt, const Vector &x) {
    return x.cwiseAbs().maxCoeff() * dt / dx;
  };
  return model;
}

}  // namespace

double cubic_spline_value(double x)
{
  const double s = 10.0 * std::abs(x - 1.0 / 3.0);
  if (s <= 1.0)
    return 1.0 - 1.5 * s * s + 0.75 * s * s * s;
  if (s <= 2.0) {
    const double t = 2.0 - s;
    return 0.25 * t * t * t;
  }
  return 0.0;
}

Vector cubic_spline_ic(const GridSpec1D &grid)
{
  grid.validate();
  Vector u(grid.n_points);
  for (int i = 0; i < grid.n_points; ++i)
    u(i) = cubic_spline_value(grid.node(i));
  return u;
}

Vector fourier_filter(const Vector &u, int n_modes)
{
  const int n = static_cast<int>(u.size());
  if (n_modes < 1 || 2 * n_modes > n)
    throw std::invalid_argument("fourier_filter: need 1 <= n_modes <= n/2");
  Vector out = Vector::Constant(n, u.mean());
  for (int k = 1; k < n_modes; ++k) {
    double a = 0.0, b = 0.0;
    for (int j = 0; j < n; ++j) {
      const double phase = kTwoPi * k * j / n;
      a += u(j) * std::cos(phase);
      b += u(j) * std::sin(phase);
    }
    for (int j = 0; j < n; ++j) {
      const double phase = kTwoPi * k * j / n;
      out(j) += (2.0 / n) * (a * std::cos(phase) + b * std::sin(phase));
    }
  }
  return out;
}

Vector trig_interpolate(const Vector &u_coarse, const GridSpec1D &coarse,
                        const GridSpec1D &fine)
{
  const int nc = coarse.n_points;
  const int nf = fine.n_points;
  if (static_cast<int>(u_coarse.size()) != nc)
    throw std::invalid_argument("trig_interpolate: sample count mismatch");
  if (coarse.domain_length != fine.domain_length)
    throw std::invalid_argument("trig_interpolate: domain length mismatch");
  if (nf < nc)
    throw std::invalid_argument("trig_interpolate: target grid is coarser than the source");

  Vector out = Vector::Constant(nf, u_coarse.mean());
  const int half = nc / 2;
  for (int k = 1; k <= half; ++k) {
    double a = 0.0, b = 0.0;
    for (int j = 0; j < nc; ++j) {
      const double phase = kTwoPi * k * j / nc;
      a += u_coarse(j) * std::cos(phase);
      b += u_coarse(j) * std::sin(phase);
    }
    // The shared Nyquist mode of an even-length grid carries half weight.
    const double w = (2 * k == nc) ? 1.0 : 2.0;
    for (int j = 0; j < nf; ++j) {
      const double phase = kTwoPi * k * j / nf;
      out(j) += (w / nc) * (a * std::cos(phase) + b * std::sin(phase));
    }
  }
  return out;
}

Vector bilinear_interpolate_field(const Vector &f_coarse, int side_c, int side_f)
{
  if (static_cast<int>(f_coarse.size()) != side_c * side_c)
    throw std::invalid_argument("bilinear_interpolate_field: size mismatch");
  if (side_f < side_c || (side_f - 1) % (side_c - 1) != 0)
    throw std::invalid_argument("bilinear_interpolate_field: grids are not nested");
  const int ratio = (side_f - 1) / (side_c - 1);
  Vector out(side_f * side_f);
  for (int jf = 0; jf < side_f; ++jf) {
    const int jc = jf / ratio;
    const int j0 = jc < side_c - 1 ? jc : side_c - 2;
    const double wy = static_cast<double>(jf - j0 * ratio) / ratio;
    for (int if_ = 0; if_ < side_f; ++if_) {
      const int ic = if_ / ratio;
      const int i0 = ic < side_c - 1 ? ic : side_c - 2;
      const double wx = static_cast<double>(if_ - i0 * ratio) / ratio;
      const double f00 = f_coarse(j0 * side_c + i0);
      const double f10 = f_coarse(j0 * side_c + i0 + 1);
      const double f01 = f_coarse((j0 + 1) * side_c + i0);
      const double f11 = f_coarse((j0 + 1) * side_c + i0 + 1);
      out(jf * side_f + if_) = (1.0 - wx) * (1.0 - wy) * f00 + wx * (1.0 - wy) * f10 +
                               (1.0 - wx) * wy * f01 + wx * wy * f11;
    }
  }
  return out;
}

Vector restrict_injection_1d(const Vector &u_fine, int factor)
{
  const int nf = static_cast<int>(u_fine.size());
  if (factor < 1 || nf % factor != 0)
    throw std::invalid_argument("restrict_injection_1d: incompatible factor");
  const int nc = nf / factor;
  Vector out(nc);
  for (int i = 0; i < nc; ++i)
    out(i) = u_fine(i * factor);
  return out;
}

Vector restrict_injection_field(const Vector &f_fine, int side_f, int side_c)
{
  if (static_cast<int>(f_fine.size()) != side_f * side_f)
    throw std::invalid_argument("restrict_injection_field: size mismatch");
  if (side_c < 2 || (side_f - 1) % (side_c - 1) != 0)
    throw std::invalid_argument("restrict_injection_field: grids are not nested");
  const int ratio = (side_f - 1) / (side_c - 1);
  Vector out(side_c * side_c);
  for (int j = 0; j < side_c; ++j)
    for (int i = 0; i < side_c; ++i)
      out(j * side_c + i) = f_fine(j * ratio * side_f + i * ratio);
  return out;
}

FullModel make_model(const ModelSpec &spec)
{
  return std::visit(
      [](const auto &s) -> FullModel {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, AdvDiffSpec>)
          return make_advection_diffusion(s);
        else if constexpr (std::is_same_v<T, BurgersSpec>)
          return make_burgers(s);
        else
          return make_cavity(s);
      },
      spec);
}

int model_dim(const ModelSpec &spec)
{
  return std::visit(
      [](const auto &s) -> int {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, CavitySpec>)
          return s.state_size();
        else
          return s.grid.n_points;
      },
      spec);
}

ModelSpec coarsen_spec(const ModelSpec &spec, int factor)
{
  if (factor < 1)
    throw std::invalid_argument("coarsen_spec: factor must be >= 1");
  return std::visit(
      [factor](const auto &s) -> ModelSpec {
        using T = std::decay_t<decltype(s)>;
        auto out = s;
        if constexpr (std::is_same_v<T, CavitySpec>) {
          if ((s.n_side - 1) % factor != 0)
            throw std::invalid_argument("coarsen_spec: (n_side-1) not divisible by factor");
          out.n_side = (s.n_side - 1) / factor + 1;
          out.validate();
        } else {
          if (s.grid.n_points % factor != 0)
            throw std::invalid_argument("coarsen_spec: n_points not divisible by factor");
          out.grid.n_points = s.grid.n_points / factor;
          out.grid.validate();
        }
        return out;
      },
      spec);
}

FullModel make_coarse_model(const ModelSpec &fine, int factor)
{
  return make_model(coarsen_spec(fine, factor));
}

ModelSpec spec_with_size(const ModelSpec &spec, int size)
{
  return std::visit(
      [size](const auto &s) -> ModelSpec {
        using T = std::decay_t<decltype(s)>;
        auto out = s;
        if constexpr (std::is_same_v<T, CavitySpec>) {
          out.n_side = size;
          out.validate();
        } else {
          out.grid.n_points = size;
          out.grid.validate();
        }
        return out;
      },
      spec);
}

double norm_weight(const ModelSpec &spec)
{
  if (const auto *cs = std::get_if<CavitySpec>(&spec))
    return cs->h();
  const GridSpec1D &g = grid_of(spec);
  return std::sqrt(g.domain_length / g.n_points);
}

bool can_restrict(const ModelSpec &fine, const ModelSpec &coarse)
{
  if (fine.index() != coarse.index())
    return false;
  if (const auto *cs = std::get_if<CavitySpec>(&coarse)) {
    const auto &fs = std::get<CavitySpec>(fine);
    return fs.n_side >= cs->n_side && (fs.n_side - 1) % (cs->n_side - 1) == 0;
  }
  const int nf = model_dim(fine);
  const int nc = model_dim(coarse);
  return nf >= nc && nf % nc == 0;
}

Vector interpolate_state(const ModelSpec &coarse, const ModelSpec &fine, const Vector &x)
{
  if (coarse.index() != fine.index())
    throw std::invalid_argument("interpolate_state: family mismatch");
  if (const auto *cs = std::get_if<CavitySpec>(&coarse)) {
    const auto &fs = std::get<CavitySpec>(fine);
    const int nc = cs->field_size();
    Vector out(fs.state_size());
    out.head(fs.field_size()) =
        bilinear_interpolate_field(x.head(nc), cs->n_side, fs.n_side);
    out.tail(fs.field_size()) =
        bilinear_interpolate_field(x.tail(nc), cs->n_side, fs.n_side);
    return out;
  }
  return trig_interpolate(x, grid_of(coarse), grid_of(fine));
}

Vector restrict_state(const ModelSpec &fine, const ModelSpec &coarse, const Vector &x)
{
  if (coarse.index() != fine.index())
    throw std::invalid_argument("restrict_state: family mismatch");
  if (const auto *fs = std::get_if<CavitySpec>(&fine)) {
    const auto &cs = std::get<CavitySpec>(coarse);
    const int nf = fs->field_size();
    Vector out(cs.state_size());
    out.head(cs.field_size()) =
        restrict_injection_field(x.head(nf), fs->n_side, cs.n_side);
    out.tail(cs.field_size()) =
        restrict_injection_field(x.tail(nf), fs->n_side, cs.n_side);
    return out;
  }
  const int nf = model_dim(fine);
  const int nc = model_dim(coarse);
  if (nf % nc != 0)
    throw std::invalid_argument("restrict_state: grids are not commensurate");
  return restrict_injection_1d(x, nf / nc);
}

}  // namespace sirm
