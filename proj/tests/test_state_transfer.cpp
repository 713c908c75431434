// SPDX-License-Identifier: Apache-2.0

// Grid transfer utilities: the spline initial profile, Fourier truncation,
// trigonometric and bilinear interpolation, injection restriction, and the
// family-aware state movers built on top of them.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "sirm/models.hpp"
#include "sirm/types.hpp"

TEST_CASE("spline profile matches hand-evaluated values and support")
{
  // s = 10 |x - 1/3|; inner piece at s=0 and s=1/2, outer piece at s=3/2.
  CHECK(sirm::cubic_spline_value(1.0 / 3.0) == doctest::Approx(1.0));
  const double s_half = 1.0 / 3.0 + 0.05;  // s = 1/2
  CHECK(sirm::cubic_spline_value(s_half) ==
        doctest::Approx(1.0 - 1.5 * 0.25 + 0.75 * 0.125));
  const double s_three_half = 1.0 / 3.0 + 0.15;  // s = 3/2
  CHECK(sirm::cubic_spline_value(s_three_half) == doctest::Approx(0.25 * 0.125));
  // Support ends at s = 2, i.e. 0.2 away from the center.
  CHECK(sirm::cubic_spline_value(1.0 / 3.0 + 0.2) == doctest::Approx(0.0));
  CHECK(sirm::cubic_spline_value(1.0 / 3.0 - 0.25) == 0.0);
  CHECK(sirm::cubic_spline_value(0.9) == 0.0);
  // Symmetric about the center.
  CHECK(sirm::cubic_spline_value(1.0 / 3.0 + 0.07) ==
        doctest::Approx(sirm::cubic_spline_value(1.0 / 3.0 - 0.07)));

  sirm::GridSpec1D grid{200, 1.0};
  sirm::Vector u = sirm::cubic_spline_ic(grid);
  REQUIRE(u.size() == 200);
  for (int i = 0; i < 200; ++i)
    CHECK(u(i) == doctest::Approx(sirm::cubic_spline_value(grid.node(i))));
}

TEST_CASE("Fourier truncation keeps low modes, preserves the mean, and is idempotent")
{
  const int n = 64;
  sirm::GridSpec1D grid{n, 1.0};
  sirm::Vector u(n);
  // Mean 0.7 plus modes 1, 3, and 9.
  for (int i = 0; i < n; ++i) {
    const double x = grid.node(i);
    u(i) = 0.7 + std::sin(2.0 * M_PI * x) + 0.5 * std::cos(6.0 * M_PI * x) +
           0.25 * std::sin(18.0 * M_PI * x);
  }

  SUBCASE("a wide band passes everything through")
  {
    sirm::Vector v = sirm::fourier_filter(u, 16);
    CHECK((v - u).cwiseAbs().maxCoeff() <= 1e-12);
  }

  SUBCASE("a narrow band removes exactly the high mode")
  {
    // n_modes = 4 keeps wavenumbers 0..3, so mode 9 disappears.
    sirm::Vector v = sirm::fourier_filter(u, 4);
    sirm::Vector expect(n);
    for (int i = 0; i < n; ++i) {
      const double x = grid.node(i);
      expect(i) = 0.7 + std::sin(2.0 * M_PI * x) + 0.5 * std::cos(6.0 * M_PI * x);
    }
    CHECK((v - expect).cwiseAbs().maxCoeff() <= 1e-12);
  }

  SUBCASE("mean preservation and idempotence on rough data")
  {
    std::mt19937 rng(42);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    sirm::Vector w(n);
    for (int i = 0; i < n; ++i) w(i) = unit(rng);
    sirm::Vector once = sirm::fourier_filter(w, 5);
    CHECK(once.mean() == doctest::Approx(w.mean()).epsilon(1e-12));
    sirm::Vector twice = sirm::fourier_filter(once, 5);
    CHECK((twice - once).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("trigonometric interpolation is exact on band-limited data")
{
  sirm::GridSpec1D coarse{16, 2.0};
  sirm::GridSpec1D fine{48, 2.0};
  sirm::Vector u(16), expect(48);
  for (int i = 0; i < 16; ++i) {
    const double x = coarse.node(i);
    u(i) = 1.0 + std::cos(M_PI * x) + 0.3 * std::sin(3.0 * M_PI * x);
  }
  for (int i = 0; i < 48; ++i) {
    const double x = fine.node(i);
    expect(i) = 1.0 + std::cos(M_PI * x) + 0.3 * std::sin(3.0 * M_PI * x);
  }

  SUBCASE("equal grids reproduce the input")
  {
    sirm::Vector v = sirm::trig_interpolate(u, coarse, coarse);
    CHECK((v - u).cwiseAbs().maxCoeff() <= 1e-12);
  }

  SUBCASE("refinement recovers the underlying trigonometric polynomial")
  {
    sirm::Vector v = sirm::trig_interpolate(u, coarse, fine);
    CHECK((v - expect).cwiseAbs().maxCoeff() <= 1e-11);
  }

  SUBCASE("coinciding nodes of a nested refinement carry the samples unchanged")
  {
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    sirm::Vector w(16);
    for (int i = 0; i < 16; ++i) w(i) = unit(rng);
    sirm::Vector v = sirm::trig_interpolate(w, coarse, fine);
    for (int i = 0; i < 16; ++i) CHECK(v(3 * i) == doctest::Approx(w(i)).epsilon(1e-11));
  }
}

TEST_CASE("bilinear field interpolation is exact on bilinear data and nested nodes")
{
  const int side_c = 5, side_f = 13;
  auto plane = [](double x, double y) { return 2.0 + 3.0 * x - y + 0.5 * x * y; };
  sirm::Vector f_c(side_c * side_c), f_f_exact(side_f * side_f);
  const double hc = 1.0 / (side_c - 1), hf = 1.0 / (side_f - 1);
  for (int j = 0; j < side_c; ++j)
    for (int i = 0; i < side_c; ++i) f_c(j * side_c + i) = plane(i * hc, j * hc);
  for (int j = 0; j < side_f; ++j)
    for (int i = 0; i < side_f; ++i) f_f_exact(j * side_f + i) = plane(i * hf, j * hf);

  sirm::Vector f_f = sirm::bilinear_interpolate_field(f_c, side_c, side_f);
  CHECK((f_f - f_f_exact).cwiseAbs().maxCoeff() <= 1e-12);

  // Random data still lands exactly on coinciding nodes (refinement ratio 3).
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  sirm::Vector g_c(side_c * side_c);
  for (int i = 0; i < g_c.size(); ++i) g_c(i) = unit(rng);
  sirm::Vector g_f = sirm::bilinear_interpolate_field(g_c, side_c, side_f);
  for (int j = 0; j < side_c; ++j)
    for (int i = 0; i < side_c; ++i)
      CHECK(g_f(3 * j * side_f + 3 * i) == doctest::Approx(g_c(j * side_c + i)));
}

TEST_CASE("injection restriction inverts the node embedding")
{
  SUBCASE("periodic line")
  {
    const int n_f = 24, factor = 3;
    std::mt19937 rng(8);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    sirm::Vector u_f(n_f);
    for (int i = 0; i < n_f; ++i) u_f(i) = unit(rng);
    sirm::Vector u_c = sirm::restrict_injection_1d(u_f, factor);
    REQUIRE(u_c.size() == n_f / factor);
    for (int i = 0; i < u_c.size(); ++i) CHECK(u_c(i) == u_f(factor * i));

    // Round trip through trigonometric interpolation of the coarse samples
    // reproduces them (nested-node exactness applied backwards).
    sirm::GridSpec1D coarse{n_f / factor, 1.0}, fine{n_f, 1.0};
    sirm::Vector lifted = sirm::trig_interpolate(u_c, coarse, fine);
    sirm::Vector back = sirm::restrict_injection_1d(lifted, factor);
    CHECK((back - u_c).cwiseAbs().maxCoeff() <= 1e-11);
  }

  SUBCASE("square field")
  {
    const int side_f = 9, side_c = 5;
    std::mt19937 rng(21);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    sirm::Vector f_f(side_f * side_f);
    for (int i = 0; i < f_f.size(); ++i) f_f(i) = unit(rng);
    sirm::Vector f_c = sirm::restrict_injection_field(f_f, side_f, side_c);
    REQUIRE(f_c.size() == side_c * side_c);
    for (int j = 0; j < side_c; ++j)
      for (int i = 0; i < side_c; ++i)
        CHECK(f_c(j * side_c + i) == f_f(2 * j * side_f + 2 * i));

    sirm::Vector lifted = sirm::bilinear_interpolate_field(f_c, side_c, side_f);
    sirm::Vector back = sirm::restrict_injection_field(lifted, side_f, side_c);
    CHECK((back - f_c).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("family-aware state transfer moves all fields and round-trips")
{
  SUBCASE("1D family")
  {
    sirm::AdvDiffSpec fine_spec{{32, 1.0}, 0.5, 1e-3};
    sirm::ModelSpec fine = fine_spec;
    sirm::ModelSpec coarse = sirm::coarsen_spec(fine, 2);
    CHECK(sirm::model_dim(coarse) == 16);
    CHECK(sirm::can_restrict(fine, coarse));

    std::mt19937 rng(4);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    sirm::Vector x_f(32);
    for (int i = 0; i < 32; ++i) x_f(i) = unit(rng);
    sirm::Vector x_c = sirm::restrict_state(fine, coarse, x_f);
    REQUIRE(x_c.size() == 16);
    for (int i = 0; i < 16; ++i) CHECK(x_c(i) == x_f(2 * i));
    sirm::Vector x_back = sirm::restrict_state(fine, coarse,
                                               sirm::interpolate_state(coarse, fine, x_c));
    CHECK((x_back - x_c).cwiseAbs().maxCoeff() <= 1e-11);
  }

  SUBCASE("two-field square family")
  {
    sirm::CavitySpec fine_spec{9, 100.0, 1.0};
    sirm::ModelSpec fine = fine_spec;
    sirm::ModelSpec coarse = sirm::coarsen_spec(fine, 2);
    CHECK(sirm::model_dim(coarse) == 2 * 5 * 5);
    CHECK(sirm::can_restrict(fine, coarse));

    std::mt19937 rng(6);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    sirm::Vector x_f(2 * 9 * 9);
    for (int i = 0; i < x_f.size(); ++i) x_f(i) = unit(rng);
    sirm::Vector x_c = sirm::restrict_state(fine, coarse, x_f);
    REQUIRE(x_c.size() == 2 * 5 * 5);
    // Both field blocks are restricted independently: check one sample each.
    CHECK(x_c(2 * 5 + 1) == x_f(4 * 9 + 2));                    // first field, (1,2)
    CHECK(x_c(25 + 2 * 5 + 1) == x_f(81 + 4 * 9 + 2));          // second field
    sirm::Vector x_up = sirm::interpolate_state(coarse, fine, x_c);
    REQUIRE(x_up.size() == x_f.size());
    sirm::Vector x_back = sirm::restrict_state(fine, coarse, x_up);
    CHECK((x_back - x_c).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("size overrides and restriction predicates behave predictably")
{
  sirm::BurgersSpec spec{{100, 1.0}, 5e-3};
  sirm::ModelSpec base = spec;
  sirm::ModelSpec resized = sirm::spec_with_size(base, 60);
  CHECK(sirm::model_dim(resized) == 60);
  CHECK_FALSE(sirm::can_restrict(base, resized));  // 60 does not divide into 100 nodes
  sirm::ModelSpec half = sirm::spec_with_size(base, 50);
  CHECK(sirm::can_restrict(base, half));

  sirm::CavitySpec cav{65, 1000.0, 1.0};
  sirm::ModelSpec cav_spec = cav;
  sirm::ModelSpec cav_small = sirm::spec_with_size(cav_spec, 33);
  CHECK(sirm::model_dim(cav_small) == 2 * 33 * 33);
  CHECK(sirm::can_restrict(cav_spec, cav_small));
  sirm::ModelSpec cav_odd = sirm::spec_with_size(cav_spec, 49);
  CHECK_FALSE(sirm::can_restrict(cav_spec, cav_odd));
}

TEST_CASE("norm weight turns vector norms into mesh-weighted function norms")
{
  sirm::AdvDiffSpec line{{50, 2.0}, 0.5, 1e-3};
  CHECK(sirm::norm_weight(line) == doctest::Approx(std::sqrt(2.0 / 50.0)));

  sirm::CavitySpec cav{65, 1000.0, 1.0};
  CHECK(sirm::norm_weight(cav) == doctest::Approx(1.0 / 64.0));

  // A constant function of value c has L2 norm c * sqrt(L) on [0, L); the
  // weighted vector norm reproduces that.
  sirm::Vector ones = sirm::Vector::Constant(50, 3.0);
  CHECK(sirm::norm_weight(line) * ones.norm() == doctest::Approx(3.0 * std::sqrt(2.0)));
}
