#include "spontheat/fp_grid.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "doctest.h"
#include "spontheat/langevin_sim.hpp"

using namespace spontheat;

namespace {

const ConstantsTable& red() { return ConstantsTable::reduced(); }

PhysQuantity qmass(double v) { return PhysQuantity(v, dim::mass); }
PhysQuantity qrate(double v) { return PhysQuantity(v, dim::rate); }
PhysQuantity qtemp(double v) { return PhysQuantity(v, dim::temperature); }
PhysQuantity qtime(double v) { return PhysQuantity(v, dim::time); }
PhysQuantity qdiffusion(double v) {
  return PhysQuantity(v, dim::momentum_diffusion);
}

OscillatorSpec unit_spec(double eta) {
  return OscillatorSpec::from_damping(qmass(1.0), qrate(1.0), qrate(eta));
}

}  // namespace

TEST_CASE("gibbs density moments and normalization") {
  auto spec = unit_spec(0.25);
  auto geom = geometry_for(spec, qtemp(2.0), red(), 128, 128);
  auto grid = gibbs_density(geom, spec, qtemp(2.0), red());

  CHECK(std::abs(grid.mass() - 1.0) < 1e-6);
  auto m = grid.moments();
  // m Omega^2 <x^2> = <p^2>/m = k_B T' within 1e-4 relative.
  CHECK(m.var_x == doctest::Approx(2.0).epsilon(1e-4));
  CHECK(m.var_p == doctest::Approx(2.0).epsilon(1e-4));
  CHECK(std::abs(m.mean_x) < 1e-12);
  CHECK(std::abs(m.cov_xp) < 1e-12);

  // Doubling T' doubles the position variance (same geometry, still >= 6 sigma).
  auto geom_wide = geometry_for(spec, qtemp(4.0), red(), 128, 128);
  auto cold = gibbs_density(geom_wide, spec, qtemp(2.0), red());
  auto hot = gibbs_density(geom_wide, spec, qtemp(4.0), red());
  CHECK(hot.moments().var_x ==
        doctest::Approx(2.0 * cold.moments().var_x).epsilon(1e-4));
}

TEST_CASE("gibbs density refuses an undersized grid") {
  auto spec = unit_spec(0.25);
  auto geom = geometry_for(spec, qtemp(1.0), red(), 64, 64);
  // Asking for a hotter state than the grid was sized for.
  CHECK_THROWS_AS(gibbs_density(geom, spec, qtemp(2.0), red()), ValidationError);
}

TEST_CASE("pure rotation conserves energy moments") {
  auto params = FpParams::frictionless(qmass(1.0), qrate(1.0));
  auto spec = unit_spec(0.25);
  auto geom = geometry_for(spec, qtemp(2.0), red(), 128, 128);
  // An anisotropic start makes the rotation visible in the moments.
  auto grid = gibbs_density(geom, spec, qtemp(1.5), red());
  const double energy0 = grid.moments().var_x + grid.moments().var_p;

  auto quarter = evolve(grid, params, qtime(0.5 * std::numbers::pi));
  auto full = evolve(quarter, params, qtime(1.5 * std::numbers::pi));
  const double energy_q = quarter.moments().var_x + quarter.moments().var_p;
  const double energy_f = full.moments().var_x + full.moments().var_p;
  CHECK(energy_q == doctest::Approx(energy0).epsilon(1e-4));
  CHECK(energy_f == doctest::Approx(energy0).epsilon(1e-4));
  CHECK(std::abs(quarter.mass() - 1.0) < 1e-6);
}

TEST_CASE("gibbs state is stationary under evolution") {
  auto spec = unit_spec(0.25);
  const double t_prime = 2.0;
  // Matching diffusion: D = eta m k_B T'.
  auto params = FpParams::make(spec, qdiffusion(0.25 * t_prime));
  auto geom = geometry_for(spec, qtemp(t_prime), red(), 256, 256);
  auto gibbs = gibbs_density(geom, spec, qtemp(t_prime), red());

  auto evolved = evolve(gibbs, params, qtime(4.0));
  CHECK(evolved.max_abs_difference(gibbs) < 1e-3 * gibbs.peak());
  CHECK(std::abs(evolved.mass() - 1.0) < 1e-6);
  CHECK(evolved.boundary_mass() < 1e-6);
  CHECK(evolved.clipped_mass() < 1e-9);
}

TEST_CASE("heating relaxes onto the shifted Gibbs state") {
  // D_sp = D_th doubles the stationary temperature; oracle from
  // stationary_temperature.
  auto spec = unit_spec(0.25);
  PhysQuantity t_bath = qtemp(1.0);
  auto thermal = d_th(spec, t_bath, red());
  DiffusionConstant spontaneous(thermal.value, DiffusionSource::kDp);
  PhysQuantity t_prime = stationary_temperature(t_bath, spontaneous, thermal);
  CHECK(t_prime.value() == doctest::Approx(2.0).epsilon(1e-12));

  const DiffusionConstant both[] = {thermal, spontaneous};
  auto params = FpParams::make(spec, both);
  auto geom = geometry_for(spec, t_prime, red(), 128, 128);
  auto grid = gibbs_density(geom, spec, t_bath, red());

  auto heated = evolve(grid, params, qtime(8.0 / 0.25));  // 8 tau
  auto m = heated.moments();
  CHECK(m.var_x == doctest::Approx(t_prime.value()).epsilon(4e-3));
  CHECK(m.var_p == doctest::Approx(t_prime.value()).epsilon(4e-3));
  CHECK(std::abs(heated.mass() - 1.0) < 1e-6);
}

TEST_CASE("stationarity residual refines at second order") {
  auto spec = unit_spec(0.25);
  const double t_prime = 2.0;
  auto params = FpParams::make(spec, qdiffusion(0.25 * t_prime));

  auto residual_at = [&](int n) {
    auto geom = geometry_for(spec, qtemp(t_prime), red(), n, n);
    auto grid = gibbs_density(geom, spec, qtemp(t_prime), red());
    return stationarity_residual(grid, params);
  };
  const double coarse = residual_at(64);
  const double fine = residual_at(128);
  CHECK(coarse / fine >= 3.0);

  // Wrong temperature: residual stays bounded away from zero.
  auto wrong_at = [&](int n) {
    auto geom = geometry_for(spec, qtemp(2.0 * t_prime), red(), n, n);
    auto grid = gibbs_density(geom, spec, qtemp(2.0 * t_prime), red());
    return stationarity_residual(grid, params);
  };
  const double wrong_coarse = wrong_at(64);
  const double wrong_fine = wrong_at(128);
  CHECK(wrong_fine > 0.05);
  CHECK(wrong_coarse / wrong_fine < 1.5);

  // Uniform density: the damping drift term alone leaves a residual.
  auto geom = geometry_for(spec, qtemp(t_prime), red(), 64, 64);
  PhaseSpaceGrid uniform(geom);
  const double fill = 1.0 / (4.0 * geom.x_half * geom.p_half);
  for (double& v : uniform.values()) v = fill;
  CHECK(stationarity_residual(uniform, params) > 0.0);
}

TEST_CASE("evolution is independent of the thread count") {
  auto spec = unit_spec(0.25);
  auto params = FpParams::make(spec, qdiffusion(0.5));
  auto geom = geometry_for(spec, qtemp(2.0), red(), 64, 64);
  auto grid = gibbs_density(geom, spec, qtemp(1.0), red());
  auto serial = evolve(grid, params, qtime(2.0), 1);
  auto threaded = evolve(grid, params, qtime(2.0), 4);
  CHECK(serial.max_abs_difference(threaded) <= 1e-12);
}

TEST_CASE("grid moments agree with the trajectory ensemble") {
  // The two representations of the same dynamics must coincide: second
  // moments within max(4 standard errors, 1e-2 relative) while heating
  // from Gibbs(T) toward Gibbs(2T).
  auto spec = unit_spec(0.25);
  PhysQuantity t_bath = qtemp(1.0);
  auto thermal = d_th(spec, t_bath, red());
  DiffusionConstant spontaneous(thermal.value, DiffusionSource::kDp);
  const DiffusionConstant both[] = {thermal, spontaneous};
  auto params = FpParams::make(spec, both);

  auto geom = geometry_for(spec, qtemp(2.0), red(), 128, 128);
  auto grid = gibbs_density(geom, spec, t_bath, red());

  SimConfig config{spec,
                   t_bath,
                   spontaneous,
                   DiffusionConstant(qdiffusion(0.0), DiffusionSource::kMeasurement),
                   qtime(0.025),
                   480,  // covers t = 12
                   4000,
                   303,
                   InitialState::gibbs(t_bath),
                   Integrator::kExactOu,
                   1};
  const double checkpoints[] = {1.0, 4.0, 12.0};
  auto ensembles = simulate_checkpoints(config, checkpoints, red());

  double t_now = 0.0;
  for (const auto& ensemble : ensembles) {
    grid = evolve(grid, params, qtime(ensemble.time - t_now));
    t_now = ensemble.time;
    auto gm = grid.moments();
    auto stats = compute_stats(ensemble.samples);
    const double band_x =
        std::max(4.0 * stats.var_x.std_err, 1e-2 * std::abs(gm.var_x));
    const double band_p =
        std::max(4.0 * stats.var_p.std_err, 1e-2 * std::abs(gm.var_p));
    CHECK(std::abs(stats.var_x.value - gm.var_x) < band_x);
    CHECK(std::abs(stats.var_p.value - gm.var_p) < band_p);
  }
}

TEST_CASE("pure damping contracts the distribution") {
  // D = 0 with eta > 0 exercises the upwind drift path; the ensemble
  // energy decays and the density stays a unit-mass probability density.
  auto spec = unit_spec(0.5);
  auto params = FpParams::make(spec, qdiffusion(0.0));
  auto geom = geometry_for(spec, qtemp(1.0), red(), 128, 128);
  auto grid = gibbs_density(geom, spec, qtemp(1.0), red());
  const double energy0 = grid.moments().var_x + grid.moments().var_p;

  auto damped = evolve(grid, params, qtime(2.0));  // one tau
  const double energy1 = damped.moments().var_x + damped.moments().var_p;
  CHECK(energy1 < 0.5 * energy0);
  CHECK(std::abs(damped.mass() - 1.0) < 1e-6);
  CHECK(damped.clipped_mass() < 1e-9);
}

TEST_CASE("evolve refuses runaway step budgets") {
  auto spec = unit_spec(0.25);
  auto params = FpParams::make(spec, qdiffusion(0.5));
  auto geom = geometry_for(spec, qtemp(2.0), red(), 64, 64);
  auto grid = gibbs_density(geom, spec, qtemp(2.0), red());
  CHECK_THROWS_AS(evolve(grid, params, qtime(1e12)), ValidationError);
}

TEST_CASE("snapshot export format") {
  auto spec = unit_spec(0.25);
  auto geom = geometry_for(spec, qtemp(1.0), red(), 16, 16);
  auto grid = gibbs_density(geom, spec, qtemp(1.0), red());
  std::ostringstream out;
  write_snapshot(out, grid);

  std::istringstream in(out.str());
  std::string header;
  REQUIRE(std::getline(in, header));
  double x_min, x_max, p_min, p_max;
  int nx, np;
  REQUIRE(std::sscanf(header.c_str(), "%lf,%lf,%lf,%lf,%d,%d", &x_min, &x_max, &p_min,
                      &p_max, &nx, &np) == 6);
  CHECK(nx == 16);
  CHECK(np == 16);
  CHECK(x_min == doctest::Approx(-geom.x_half));
  int rows = 0;
  std::string line;
  while (std::getline(in, line)) {
    CHECK(std::count(line.begin(), line.end(), ',') == 15);
    ++rows;
  }
  CHECK(rows == 16);

  // First value round-trips exactly at 17 significant digits.
  std::istringstream again(out.str());
  std::getline(again, header);
  std::getline(again, line);
  CHECK(std::stod(line.substr(0, line.find(','))) == grid.at(0, 0));
}
