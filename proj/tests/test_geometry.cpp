#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "iukit/errors.hpp"
#include "iukit/geometry.hpp"
#include "iukit/numerics.hpp"

using namespace iukit;

namespace {

const PowerLawProfile kFlat{0.0, 0.0, 0.5, 0.0};
const PowerLawProfile kUnit{1.0, 0.0, 0.5, 0.0};

RadialGrid grid_of(double r_max, int n) { return RadialGrid{r_max, n}; }

}  // namespace

TEST_CASE("flat curvature integrates to f = r exactly") {
  const ModelManifold m = solve_warping(kFlat, grid_of(10.0, 257), 2);
  CHECK(m.log_f_fine[0] == kNegInf);
  CHECK(m.log_fp_fine[0] == 0.0);
  for (int j = 1; j < m.fine_count(); ++j) {
    const double r = m.grid.fine(j);
    CHECK(m.log_f_fine[j] == doctest::Approx(std::log(r)).epsilon(1e-14));
    CHECK(std::abs(m.log_fp_fine[j]) <= 1e-13);
  }
}

TEST_CASE("unit curvature integrates to sinh against the closed form") {
  // Oracle: f'' = f with f(0) = 0, f'(0) = 1 is f = sinh, f' = cosh.
  const ModelManifold m = solve_warping(kUnit, grid_of(10.0, 1024), 3);
  for (int i = 1; i < m.grid.n; i += 37) {
    const double r = m.grid.node(i);
    CHECK(m.log_f(i) == doctest::Approx(std::log(std::sinh(r))).epsilon(1e-9));
    CHECK(m.log_fp(i) == doctest::Approx(std::log(std::cosh(r))).epsilon(1e-9));
  }
  CHECK(m.g_at(2.0) == doctest::Approx(1.0 / std::tanh(2.0)).epsilon(1e-5));
}

TEST_CASE("constant curvature c rescales to sinh(sqrt(c) r)/sqrt(c)") {
  const PowerLawProfile k4{4.0, 0.0, 0.5, 0.0};
  const ModelManifold m = solve_warping(k4, grid_of(5.0, 1024), 2);
  CHECK(m.log_f_at(3.0) ==
        doctest::Approx(std::log(0.5 * std::sinh(6.0))).epsilon(1e-7));
}

TEST_CASE("warping integrator converges at fourth order") {
  // Oracle: richardson ratio of errors at h and h/2 against an h/64
  // reference should sit near 2^4 = 16.
  const PowerLawProfile k{1.0, 1.0, 0.5, 0.0};
  const double r_max = 4.0;
  const ModelManifold coarse = solve_warping(k, grid_of(r_max, 129), 2);
  const ModelManifold fine = solve_warping(k, grid_of(r_max, 257), 2);
  const ModelManifold ref = solve_warping(k, grid_of(r_max, 8193), 2);
  const double err_coarse =
      std::abs(coarse.log_f(128) - ref.log_f(8192));
  const double err_fine = std::abs(fine.log_f(256) - ref.log_f(8192));
  CHECK(err_coarse > 0.0);
  CHECK(err_coarse / err_fine > 10.0);
  CHECK(err_coarse / err_fine < 22.0);
}

TEST_CASE("integrated warping satisfies f'' = k f under central differences") {
  const PowerLawProfile k{1.0, 1.0, 0.5, 0.0};
  const ModelManifold m = solve_warping(k, grid_of(5.0, 1024), 2);
  const double step = m.grid.fine(1);
  for (int j = 1; j + 1 < m.fine_count(); ++j) {
    const double fm = std::exp(m.log_f_fine[j - 1]);
    const double fc = std::exp(m.log_f_fine[j]);
    const double fp = std::exp(m.log_f_fine[j + 1]);
    const double lhs = (fm - 2.0 * fc + fp) / (step * step);
    const double rhs = k.value(m.grid.fine(j)) * fc;
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-3));
  }
}

TEST_CASE("hyperbolic space has both sectional curvatures equal to -1") {
  // Interpolation on the fine grid limits the resolution near the pole,
  // where 1/f^2 and (f'/f)^2 are large and cancel.
  const ModelManifold m = solve_warping(kUnit, grid_of(10.0, 1024), 3);
  for (double r : {0.5, 1.0, 3.0, 7.0, 9.5}) {
    const SectionalRange s = sectional_range(m, r);
    CHECK(s.k_rad == -1.0);
    CHECK(s.k_tan == doctest::Approx(-1.0).epsilon(2e-4));
  }
  CHECK(sectional_range(m, 7.0).k_tan == doctest::Approx(-1.0).epsilon(1e-6));
  CHECK(ricci_radial(m, 2.0) == doctest::Approx(-2.0).epsilon(1e-12));
  CHECK(ricci_tangential(m, 2.0) == doctest::Approx(-2.0).epsilon(1e-5));
}

TEST_CASE("sectional access near the pole and past the boundary is rejected") {
  const ModelManifold m = solve_warping(kUnit, grid_of(10.0, 1024), 3);
  CHECK_THROWS_AS(sectional_range(m, 0.25 * m.grid.spacing()), PoleError);
  CHECK_THROWS_AS(sectional_range(m, 10.5), DomainError);
  CHECK_THROWS_AS(ricci_radial(m, -1.0), DomainError);
}

TEST_CASE("warping solver rejects decreasing profiles and flat grids") {
  CHECK_THROWS_AS(solve_warping(PowerLawProfile{1.0, -1.0, 0.5, 0.0},
                                grid_of(10.0, 1024), 2),
                  DomainError);
  CHECK_THROWS_AS(solve_warping(kUnit, grid_of(10.0, 4), 2), DomainError);
  CHECK_THROWS_AS(solve_warping(kUnit, grid_of(-1.0, 1024), 2), DomainError);
  CHECK_THROWS_AS(solve_warping(kUnit, grid_of(10.0, 1024), 1), DomainError);
}

TEST_CASE("power potential blends to an even C2 core") {
  const Potential v = Potential::power(2.0, 3.0, 1.0);
  // Frozen core values at r = 1/2 for theta = 2, delta = 3, r0 = 1.
  CHECK(v.value(0.5) == doctest::Approx(0.171875).epsilon(1e-12));
  CHECK(v.derivative(0.5) == doctest::Approx(1.875).epsilon(1e-12));
  CHECK(v.second_derivative(0.5) == doctest::Approx(5.25).epsilon(1e-12));
  // Outside the core the potential is exactly theta r^delta.
  CHECK(v.value(2.0) == doctest::Approx(16.0).epsilon(1e-12));
  CHECK(v.derivative(2.0) == doctest::Approx(24.0).epsilon(1e-12));
  CHECK(v.second_derivative(2.0) == doctest::Approx(24.0).epsilon(1e-12));
  // Value and first two derivatives agree across the matching radius.
  for (double delta : {1.5, 2.0, 3.0, 4.0}) {
    const Potential p = Potential::power(1.0, delta, 1.0);
    CHECK(p.value(1.0 - 1e-9) == doctest::Approx(p.value(1.0 + 1e-9)).epsilon(1e-6));
    CHECK(p.derivative(1.0 - 1e-9) ==
          doctest::Approx(p.derivative(1.0 + 1e-9)).epsilon(1e-5));
    CHECK(p.second_derivative(1.0 - 1e-9) ==
          doctest::Approx(p.second_derivative(1.0 + 1e-9)).epsilon(1e-4));
    CHECK(p.derivative(0.0) == 0.0);
  }
  // delta = 2 degenerates to theta r^2 globally.
  const Potential q = Potential::power(3.0, 2.0, 1.0);
  CHECK(q.value(0.25) == doctest::Approx(3.0 * 0.0625).epsilon(1e-12));
  CHECK(q.second_derivative(0.1) == doctest::Approx(6.0).epsilon(1e-12));
  CHECK(Potential::zero().value(5.0) == 0.0);
  CHECK(Potential::power(0.0, 3.0, 1.0).is_zero());
  CHECK_THROWS_AS(Potential::power(1.0, -1.0, 1.0), DomainError);
  CHECK_THROWS_AS(Potential::power(-1.0, 2.0, 1.0), DomainError);
}

TEST_CASE("radial drift matches coth on hyperbolic space and 1/r at the pole") {
  const ModelManifold m = solve_warping(kUnit, grid_of(10.0, 1024), 2);
  const Potential v = Potential::zero();
  for (double r : {0.5, 1.0, 2.0, 5.0}) {
    CHECK(radial_drift(m, v, r) ==
          doctest::Approx(1.0 / std::tanh(r)).epsilon(1e-5));
  }
  // Both branches around the pole cut stay close to the exact coth.
  const double cut = 0.5 * m.grid.spacing();
  CHECK(radial_drift(m, v, 0.9 * cut) ==
        doctest::Approx(1.0 / std::tanh(0.9 * cut)).epsilon(1e-3));
  CHECK(radial_drift(m, v, 1.1 * cut) ==
        doctest::Approx(1.0 / std::tanh(1.1 * cut)).epsilon(1e-3));
  CHECK_THROWS_AS(radial_drift(m, v, 0.0), PoleError);
  // With a quadratic potential the drift gains exactly 2 theta r.
  const Potential w = Potential::power(1.5, 2.0, 1.0);
  CHECK(radial_drift(m, w, 2.0) ==
        doctest::Approx(1.0 / std::tanh(2.0) + 6.0).epsilon(1e-5));
}

TEST_CASE("measure mass matches closed forms") {
  // Oracle: d = 2, f = r gives mass r_max^2 / 2; d = 2 hyperbolic gives
  // cosh(r_max) - 1; d = 3 hyperbolic gives (sinh cosh - r)/2.
  const RadialGrid g = grid_of(10.0, 1024);
  const Potential none = Potential::zero();
  const RadialMeasure flat = measure_density(solve_warping(kFlat, g, 2), none);
  CHECK(flat.total_mass() == doctest::Approx(50.0).epsilon(1e-10));
  const RadialMeasure hyp2 = measure_density(solve_warping(kUnit, g, 2), none);
  CHECK(hyp2.total_mass() ==
        doctest::Approx(std::cosh(10.0) - 1.0).epsilon(1e-8));
  const RadialMeasure hyp3 = measure_density(solve_warping(kUnit, g, 3), none);
  CHECK(hyp3.total_mass() ==
        doctest::Approx(0.5 * (std::sinh(10.0) * std::cosh(10.0) - 10.0))
            .epsilon(1e-8));
  CHECK_THROWS_AS(Potential::power(-1.0, 2.0, 1.0), DomainError);
}

TEST_CASE("volume growth condition holds for the drift example") {
  const BuiltModel b = build_drift_example(2.0, 1.0, 3.0, 3, grid_of(10.0, 1024));
  const std::vector<double> radii{4.0, 6.0, 8.0, 10.0};
  const VolumeReport rep = check_volume_condition(b.m, b.v, b.big_k, radii);
  REQUIRE(rep.samples.size() == 4);
  CHECK(rep.condition_holds);
  for (std::size_t i = 0; i + 1 < rep.samples.size(); ++i) {
    CHECK(rep.samples[i + 1].ratio <= rep.samples[i].ratio * (1.0 + 1e-4));
  }
  CHECK(rep.samples.back().ratio <= 0.5 * rep.samples.front().ratio);
}

TEST_CASE("volume growth condition fails on the flat model") {
  // log mu(B) grows only logarithmically in the plane, so any genuinely
  // growing curvature envelope defeats it.
  const ModelManifold m = solve_warping(kFlat, grid_of(12.0, 1024), 2);
  const PowerLawProfile big_k{1.0, 2.0, 0.5, 0.0};
  const std::vector<double> radii{4.0, 6.0, 8.0, 10.0};
  const VolumeReport rep = check_volume_condition(m, Potential::zero(), big_k, radii);
  CHECK_FALSE(rep.condition_holds);
  CHECK_THROWS_AS(
      check_volume_condition(m, Potential::zero(), big_k,
                             std::vector<double>{0.5}),
      DomainError);
}

TEST_CASE("sectional example envelopes pinch the realized curvatures") {
  const BuiltModel b = build_sectional_example(2.0, 3, grid_of(10.0, 1024));
  CHECK(b.route == RateRoute::curvature);
  CHECK(b.c2 > 0.0);
  CHECK(b.c2 <= 1.0);
  CHECK(b.c1 >= 1.0);
  CHECK(b.c1 < 3.0);
  for (double r : {0.5, 1.0, 3.0, 6.0, 9.0}) {
    const SectionalRange s = sectional_range(b.m, r);
    // Both sectional curvatures lie in [-big_k/(d-1), -k_hyp].
    CHECK(s.k_rad <= -b.k_hyp.value(r) * (1.0 - 1e-4));
    CHECK(s.k_tan <= -b.k_hyp.value(r) * (1.0 - 1e-4));
    CHECK(-s.k_rad <= b.big_k.value(r) / 2.0 * (1.0 + 1e-4));
    CHECK(-s.k_tan <= b.big_k.value(r) / 2.0 * (1.0 + 1e-4));
    // The Ricci envelope covers the tangential Ricci curvature as well.
    CHECK(-ricci_tangential(b.m, r) <= b.big_k.value(r) * (1.0 + 1e-4));
    CHECK(-ricci_radial(b.m, r) <= b.big_k.value(r) * (1.0 + 1e-4));
  }
}

TEST_CASE("drift example envelopes cover the Bakry-Emery tensor") {
  const double m_param = 3.0;
  const BuiltModel b = build_drift_example(2.0, 1.0, m_param, 3, grid_of(10.0, 1024));
  CHECK(b.route == RateRoute::drift);
  CHECK(b.c1 >= 1.0);
  CHECK(b.c1 < 5.0);
  // The quadratic potential realizes the nominal drift growth exactly.
  CHECK(b.gamma.coefficient == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(b.gamma.exponent == doctest::Approx(2.0).epsilon(1e-12));
  for (double r : {0.5, 1.0, 3.0, 6.0, 9.0}) {
    const double vp = b.v.derivative(r);
    const double be_rad = ricci_radial(b.m, r) - b.v.second_derivative(r) -
                          vp * vp / m_param;
    const double be_tan = ricci_tangential(b.m, r) - b.m.g_at(r) * vp;
    CHECK(be_rad >= -b.big_k.value(r) * (1.0 + 1e-4));
    CHECK(be_tan >= -b.big_k.value(r) * (1.0 + 1e-4));
    // Achieved drift dominates the square root of the growth envelope.
    CHECK(radial_drift(b.m, b.v, r) >=
          std::sqrt(b.gamma.value(r)) * (1.0 - 1e-4));
  }
  CHECK_THROWS_AS(build_drift_example(1.0, 1.0, 3.0, 3, grid_of(10.0, 1024)),
                  DomainError);
  CHECK_THROWS_AS(build_drift_example(2.0, 0.0, 3.0, 3, grid_of(10.0, 1024)),
                  DomainError);
}

TEST_CASE("steep sectional generators stay representable in log space") {
  // delta = 3 on [0, 30] drives f past exp(2000); the log-space carrier and
  // the tangential curvature difference must both stay finite.
  const BuiltModel b = build_sectional_example(3.0, 4, grid_of(30.0, 2048));
  CHECK(std::isfinite(b.m.log_f(b.m.grid.n - 1)));
  CHECK(b.m.log_f(b.m.grid.n - 1) > 1000.0);
  const SectionalRange s = sectional_range(b.m, 25.0);
  CHECK(std::isfinite(s.k_tan));
  CHECK(s.k_tan < 0.0);
  CHECK(-s.k_tan / b.m.k.value(25.0) == doctest::Approx(1.0).epsilon(0.05));
  const RadialMeasure mu = measure_density(b.m, Potential::zero());
  CHECK(std::isfinite(mu.log_total_mass));
  CHECK(mu.total_mass() == kPosInf);
}

TEST_CASE("custom model builder measures envelopes like the sectional builder") {
  const PowerLawProfile k{0.5, 1.0, 0.5, 0.25};
  const BuiltModel b =
      build_custom_model(k, Potential::power(1.0, 2.0, 1.0), 3, grid_of(10.0, 1024));
  CHECK(b.route == RateRoute::curvature);
  CHECK(b.c2 > 0.0);
  CHECK(b.c1 >= b.c2);
  CHECK(b.k_hyp.coefficient == doctest::Approx(0.5 * b.c2).epsilon(1e-12));
  CHECK(b.big_k.coefficient == doctest::Approx(2.0 * 0.5 * b.c1).epsilon(1e-12));
  CHECK_FALSE(b.v.is_zero());
}
