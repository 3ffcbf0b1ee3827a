#include "spontheat/langevin_sim.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "doctest.h"

using namespace spontheat;

namespace {

// Reduced units throughout: m = k_B = 1.
const ConstantsTable& red() { return ConstantsTable::reduced(); }

PhysQuantity qmass(double v) { return PhysQuantity(v, dim::mass); }
PhysQuantity qrate(double v) { return PhysQuantity(v, dim::rate); }
PhysQuantity qtemp(double v) { return PhysQuantity(v, dim::temperature); }
PhysQuantity qtime(double v) { return PhysQuantity(v, dim::time); }

DiffusionConstant qdiff(double v, DiffusionSource s = DiffusionSource::kDp) {
  return DiffusionConstant(PhysQuantity(v, dim::momentum_diffusion), s);
}

SimConfig base_config(double omega, double eta, double t_bath, double d_sp,
                      double d_m, double dt, std::int64_t n_steps,
                      std::int64_t n_traj, std::uint64_t seed) {
  SimConfig config{
      OscillatorSpec::from_damping(qmass(1.0), qrate(omega), qrate(eta)),
      qtemp(t_bath),
      qdiff(d_sp, DiffusionSource::kDp),
      qdiff(d_m, DiffusionSource::kMeasurement),
      qtime(dt),
      n_steps,
      n_traj,
      seed,
      InitialState::gibbs(qtemp(t_bath)),
      Integrator::kEulerMaruyama,
      1};
  return config;
}

}  // namespace

TEST_CASE("equilibrium is preserved without extra diffusion") {
  // D_sp = D_m = 0 from Gibbs(T_bath): var_p/(m k_B) stays at T_bath.
  auto config = base_config(1.0, 0.5, 1.0, 0.0, 0.0, 0.005, 4000, 2000, 11);
  auto result = simulate_ensemble(config, red());
  auto t_p = estimate_temperature(result.final_samples, config.spec,
                                  TemperatureEstimator::kFromP, red());
  CHECK(std::abs(t_p.t_hat - 1.0) < 4.0 * t_p.std_err);
}

TEST_CASE("stationary heating doubles the temperature when D_sp = D_th") {
  // Analytic oracle: stationary <p^2> = (D_th + D_sp)/eta, so T' = 2 T.
  SUBCASE("default Euler-Maruyama scheme") {
    // eta = 0.5 keeps the O(dt) variance bias well below the band.
    auto config = base_config(1.0, 0.5, 1.0, 0.5, 0.0, 0.005, 8000, 2000, 21);
    auto result = simulate_ensemble(config, red());
    auto pooled = estimate_temperature(result.final_samples, config.spec,
                                       TemperatureEstimator::kPooled, red());
    CHECK(std::abs(pooled.t_hat - 2.0) < 4.0 * pooled.std_err);
  }
  SUBCASE("exact propagator at the reference parameters") {
    auto config = base_config(1.0, 0.1, 1.0, 0.1, 0.0, 0.125, 1600, 4000, 22);
    config.integrator = Integrator::kExactOu;
    auto result = simulate_ensemble(config, red());
    auto pooled = estimate_temperature(result.final_samples, config.spec,
                                       TemperatureEstimator::kPooled, red());
    CHECK(std::abs(pooled.t_hat - 2.0) < 4.0 * pooled.std_err);

    // Equipartition: position and momentum estimators agree.
    auto tx = estimate_temperature(result.final_samples, config.spec,
                                   TemperatureEstimator::kFromX, red());
    auto tp = estimate_temperature(result.final_samples, config.spec,
                                   TemperatureEstimator::kFromP, red());
    const double band = 4.0 * std::hypot(tx.std_err, tp.std_err);
    CHECK(std::abs(tx.t_hat - tp.t_hat) < band);
  }
}

TEST_CASE("stationarity holds at random parameter points") {
  std::mt19937 gen(99);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int point = 0; point < 3; ++point) {
    const double omega = 0.5 + 1.5 * u(gen);
    const double eta = omega * (0.05 + 0.2 * u(gen));
    const double t_bath = 0.5 + u(gen);
    const double ratio = 0.2 + 2.0 * u(gen);  // D_sp / D_th
    const double d_thermal = eta * t_bath;
    const double t_prime = t_bath * (1.0 + ratio);

    const double tau = 1.0 / eta;
    const double dt = 0.9 * std::min(2.0 * std::numbers::pi / omega, tau) / 50.0;
    const auto n_steps = static_cast<std::int64_t>(std::ceil(20.0 * tau / dt));

    auto config = base_config(omega, eta, t_bath, ratio * d_thermal, 0.0, dt,
                              n_steps, 1500, 1000 + static_cast<unsigned>(point));
    config.integrator = Integrator::kExactOu;
    config.initial = InitialState::gibbs(qtemp(t_prime));
    auto result = simulate_ensemble(config, red());
    auto pooled = estimate_temperature(result.final_samples, config.spec,
                                       TemperatureEstimator::kPooled, red());
    CHECK(std::abs(pooled.t_hat - t_prime) < 4.0 * pooled.std_err);
  }
}

TEST_CASE("halving dt moves the stationary estimate by less than one sigma") {
  // Shared Brownian path: (dt, substeps=2) and (dt/2, substeps=1) consume
  // identical noise, isolating the integrator bias.
  auto coarse = base_config(1.0, 0.5, 1.0, 0.5, 0.0, 0.01, 4000, 2000, 31);
  coarse.noise_substeps = 2;
  auto fine = base_config(1.0, 0.5, 1.0, 0.5, 0.0, 0.005, 8000, 2000, 31);

  auto coarse_result = simulate_ensemble(coarse, red());
  auto fine_result = simulate_ensemble(fine, red());
  auto t_coarse = estimate_temperature(coarse_result.final_samples, coarse.spec,
                                       TemperatureEstimator::kPooled, red());
  auto t_fine = estimate_temperature(fine_result.final_samples, fine.spec,
                                     TemperatureEstimator::kPooled, red());
  CHECK(std::abs(t_coarse.t_hat - t_fine.t_hat) < t_fine.std_err);
}

TEST_CASE("temperature estimation from an exact Gibbs generator") {
  // Oracle: samples drawn from the known stationary distribution with an
  // independent generator.
  std::mt19937 gen(123);
  std::normal_distribution<double> normal(0.0, 1.0);
  const int n = 10000;
  SampleSet samples;
  samples.time = 0.0;
  auto spec = OscillatorSpec::from_damping(qmass(1.0), qrate(1.0), qrate(0.1));
  for (int i = 0; i < n; ++i) {
    samples.x.push_back(normal(gen));  // sigma_x = sqrt(T/(m Omega^2)) = 1 at T=1
    samples.p.push_back(normal(gen));  // sigma_p = sqrt(m T) = 1
  }
  const double band = 4.0 * std::sqrt(2.0 / n);
  for (auto estimator : {TemperatureEstimator::kFromX, TemperatureEstimator::kFromP,
                         TemperatureEstimator::kPooled}) {
    auto estimate = estimate_temperature(samples, spec, estimator, red());
    CHECK(std::abs(estimate.t_hat - 1.0) < band);
    CHECK(estimate.std_err > 0.0);
  }

  // Degenerate ensembles.
  SampleSet zeros;
  zeros.x.assign(100, 0.0);
  zeros.p.assign(100, 0.0);
  CHECK(estimate_temperature(zeros, spec, TemperatureEstimator::kFromX, red()).t_hat ==
        0.0);
  SampleSet one;
  one.x.assign(1, 1.0);
  one.p.assign(1, 1.0);
  CHECK_THROWS_AS(estimate_temperature(one, spec, TemperatureEstimator::kFromX, red()),
                  ValidationError);
}

TEST_CASE("transient heating curve follows the analytic relaxation") {
  // Q = 100, dT_sp = 1, dT_m = 2: start from Gibbs(T + dT_sp) with the
  // monitoring noise switched on at t = 0.
  const double eta = 0.01, tau = 100.0;
  auto config = base_config(1.0, eta, 1.0, eta * 1.0, eta * 2.0, 0.1, 10000, 1000, 41);
  config.integrator = Integrator::kExactOu;
  config.initial = InitialState::gibbs(qtemp(2.0));

  const double checkpoints[] = {0.0, tau, 3.0 * tau, 10.0 * tau};
  auto curve = transient_curve(config, checkpoints, red());
  REQUIRE(curve.size() == 4);
  for (const auto& point : curve) {
    const double expected =
        2.0 + 2.0 * (1.0 - std::exp(-point.time / tau));
    CHECK(std::abs(point.estimate.t_hat - expected) < 4.0 * point.estimate.std_err);
  }
  // Saturation value reached at the last checkpoint.
  CHECK(std::abs(curve.back().estimate.t_hat - 4.0) <
        4.0 * curve.back().estimate.std_err);
}

TEST_CASE("transient curve validates its initial state") {
  auto config = base_config(1.0, 0.1, 1.0, 0.1, 0.2, 0.1, 100, 10, 1);
  config.initial = InitialState::gibbs(qtemp(1.5));  // should be 2.0
  const double checkpoints[] = {0.0};
  CHECK_THROWS_AS(transient_curve(config, checkpoints, red()), ValidationError);

  config.initial = InitialState::gibbs(qtemp(2.0));
  config.d_m = qdiff(0.0, DiffusionSource::kMeasurement);
  CHECK_THROWS_AS(transient_curve(config, checkpoints, red()), ValidationError);
}

TEST_CASE("back-action is negligible at times much shorter than tau") {
  // D_m / D_sp = 100; at t = 0.001 tau the analytic back-action term is
  // just below dT_sp / 10 and the simulated estimate agrees with it.
  const double eta = 0.1, tau = 10.0;
  const double dt_sp = 1.0, dt_m = 100.0;
  auto config = base_config(1.0, eta, 1.0, eta * dt_sp, eta * dt_m, 0.0025, 4, 10000, 51);
  config.integrator = Integrator::kExactOu;
  config.initial = InitialState::gibbs(qtemp(2.0));

  const double t_check = 0.001 * tau;
  const double checkpoints[] = {t_check};
  auto curve = transient_curve(config, checkpoints, red());
  const double analytic_backaction = (1.0 - std::exp(-t_check / tau)) * dt_m;
  CHECK(analytic_backaction < dt_sp / 10.0);
  CHECK(std::abs(curve[0].estimate.t_hat - (2.0 + analytic_backaction)) <
        4.0 * curve[0].estimate.std_err);
}

TEST_CASE("Euler-Maruyama agrees with the exact propagator") {
  // Same physics through both integrators; moments must agree within
  // combined statistical bands plus the small O(dt) bias.
  auto em = base_config(1.0, 0.5, 1.0, 0.25, 0.0, 0.004, 5000, 2000, 61);
  auto exact = em;
  exact.integrator = Integrator::kExactOu;
  exact.dt = qtime(0.04);
  exact.n_steps = 500;

  auto em_result = simulate_ensemble(em, red());
  auto exact_result = simulate_ensemble(exact, red());
  auto t_em = estimate_temperature(em_result.final_samples, em.spec,
                                   TemperatureEstimator::kPooled, red());
  auto t_exact = estimate_temperature(exact_result.final_samples, exact.spec,
                                      TemperatureEstimator::kPooled, red());
  CHECK(std::abs(t_em.t_hat - t_exact.t_hat) <
        4.0 * std::hypot(t_em.std_err, t_exact.std_err) + 0.02);
}

TEST_CASE("determinism and schedule independence") {
  auto config = base_config(1.0, 0.2, 1.0, 0.2, 0.1, 0.02, 500, 64, 77);
  auto a = simulate_ensemble(config, red(), 1);
  auto b = simulate_ensemble(config, red(), 1);
  auto c = simulate_ensemble(config, red(), 4);
  REQUIRE(a.final_samples.x.size() == b.final_samples.x.size());
  for (std::size_t i = 0; i < a.final_samples.x.size(); ++i) {
    CHECK(a.final_samples.x[i] == b.final_samples.x[i]);
    CHECK(a.final_samples.p[i] == b.final_samples.p[i]);
    CHECK(a.final_samples.x[i] == c.final_samples.x[i]);
    CHECK(a.final_samples.p[i] == c.final_samples.p[i]);
  }

  auto reseeded = config;
  reseeded.seed = 78;
  auto d = simulate_ensemble(reseeded, red(), 1);
  int differing = 0;
  for (std::size_t i = 0; i < a.final_samples.x.size(); ++i) {
    if (a.final_samples.x[i] != d.final_samples.x[i]) ++differing;
  }
  CHECK(differing == 64);
}

TEST_CASE("configuration validation") {
  // dt above the min(2 pi / Omega, tau)/50 cap is refused.
  auto config = base_config(1.0, 0.1, 1.0, 0.0, 0.0, 0.2, 100, 10, 1);
  CHECK_THROWS_AS(simulate_ensemble(config, red()), ValidationError);

  // Within the cap but outside the discrete-moment stability region.
  auto unstable = base_config(1.0, 0.04, 1.0, 0.0, 0.0, 0.1, 100, 10, 1);
  CHECK_THROWS_AS(simulate_ensemble(unstable, red()), ValidationError);
  // The exact propagator has no such restriction.
  unstable.integrator = Integrator::kExactOu;
  CHECK_NOTHROW(simulate_ensemble(unstable, red()));

  auto bad_substeps = base_config(1.0, 0.5, 1.0, 0.0, 0.0, 0.01, 10, 10, 1);
  bad_substeps.integrator = Integrator::kExactOu;
  bad_substeps.noise_substeps = 2;
  CHECK_THROWS_AS(simulate_ensemble(bad_substeps, red()), ValidationError);

  auto config_ok = base_config(1.0, 0.5, 1.0, 0.0, 0.0, 0.01, 10, 10, 1);
  const double beyond[] = {1.0};
  CHECK_THROWS_AS(simulate_checkpoints(config_ok, beyond, red()), ValidationError);
  const double negative[] = {-0.5};
  CHECK_THROWS_AS(simulate_checkpoints(config_ok, negative, red()), ValidationError);
}

TEST_CASE("trajectory dump format") {
  auto config = base_config(1.0, 0.5, 1.0, 0.1, 0.0, 0.01, 100, 3, 5);
  const double checkpoints[] = {0.0, 0.5, 1.0};
  auto sets = simulate_checkpoints(config, checkpoints, red());
  std::ostringstream out;
  write_trajectory_dump(out, sets);

  std::istringstream in(out.str());
  std::string line;
  REQUIRE(std::getline(in, line));
  CHECK(line == "traj_id,t,x,p");
  int rows = 0;
  while (std::getline(in, line)) {
    CHECK(std::count(line.begin(), line.end(), ',') == 3);
    ++rows;
  }
  CHECK(rows == 9);  // 3 checkpoints x 3 trajectories
}

TEST_CASE("ensemble stats standard errors scale as 1/sqrt(n)") {
  auto small = base_config(1.0, 0.5, 1.0, 0.0, 0.0, 0.01, 200, 400, 9);
  auto large = base_config(1.0, 0.5, 1.0, 0.0, 0.0, 0.01, 200, 1600, 9);
  auto stats_small = simulate_ensemble(small, red()).stats;
  auto stats_large = simulate_ensemble(large, red()).stats;
  // Quadrupling n halves the standard errors (statistically: compare the
  // deterministic sqrt(2/n) factors).
  const double ratio = (stats_small.var_p.std_err / stats_small.var_p.value) /
                       (stats_large.var_p.std_err / stats_large.var_p.value);
  CHECK(ratio == doctest::Approx(2.0).epsilon(1e-9));
}
