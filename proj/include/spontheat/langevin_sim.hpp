#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

#include "spontheat/collapse_models.hpp"
#include "spontheat/quantities.hpp"
#include "spontheat/thermal_core.hpp"

namespace spontheat {

struct InitialState {
  enum class Kind { kGibbs, kDelta };

  Kind kind = Kind::kGibbs;
  PhysQuantity t0;  // Gibbs temperature
  PhysQuantity x0;  // Delta position
  PhysQuantity p0;  // Delta momentum

  static InitialState gibbs(PhysQuantity t0);
  static InitialState delta(PhysQuantity x0, PhysQuantity p0);
};

// Euler-Maruyama is the default scheme. The exact Gaussian propagator of
// the linear oscillator SDE is available as a fast path: one step of any
// length is distributionally exact, which matters for long transients at
// high Q where the explicit scheme would need a prohibitively small step.
enum class Integrator { kEulerMaruyama, kExactOu };

std::string_view to_string(Integrator integrator);

// Trajectory SDE (the stochastic representation of the phase-space
// dynamics):
//   dx = (p/m) dt
//   dp = -m Omega^2 x dt - eta p dt + sqrt(2 (D_th + D_sp + D_m)) dW
// D_th is computed internally from (spec, t_bath).
struct SimConfig {
  OscillatorSpec spec;
  PhysQuantity t_bath;
  DiffusionConstant d_sp;
  DiffusionConstant d_m;
  PhysQuantity dt;
  std::int64_t n_steps = 0;
  std::int64_t n_traj = 1;
  std::uint64_t seed = 0;
  InitialState initial;
  Integrator integrator = Integrator::kEulerMaruyama;
  // Number of sub-draws forming each step's Brownian increment. Running
  // (dt, substeps=2) and (dt/2, substeps=1) consumes identical noise, so
  // step-refinement comparisons see the discretization error alone.
  int noise_substeps = 1;

  PhysQuantity horizon() const;  // n_steps * dt
};

struct MomentEstimate {
  double value = 0.0;
  double std_err = 0.0;
};

// One-shot (x, p) samples of the whole ensemble at a fixed time, the raw
// material of the tomography protocol.
struct SampleSet {
  std::vector<double> x;
  std::vector<double> p;
  double time = 0.0;
};

struct EnsembleStats {
  MomentEstimate mean_x, mean_p, var_x, var_p;
  std::int64_t n_samples = 0;
  double horizon = 0.0;
};

EnsembleStats compute_stats(const SampleSet& samples);

struct EnsembleResult {
  EnsembleStats stats;
  SampleSet final_samples;
};

struct CheckpointSet {
  double time = 0.0;  // snapped to the step grid
  SampleSet samples;
};

// Integrates n_traj independent trajectories and captures the ensemble at
// each checkpoint time (snapped to the nearest step). Deterministic for a
// fixed (seed, config) and independent of n_threads.
std::vector<CheckpointSet> simulate_checkpoints(
    const SimConfig& config, std::span<const double> checkpoint_times,
    const ConstantsTable& constants, int n_threads = 0);

// Full-horizon run returning end-of-horizon samples and their moments.
EnsembleResult simulate_ensemble(const SimConfig& config,
                                 const ConstantsTable& constants, int n_threads = 0);

enum class TemperatureEstimator { kFromX, kFromP, kPooled };

std::string_view to_string(TemperatureEstimator estimator);

struct TemperatureEstimate {
  double t_hat = 0.0;
  double std_err = 0.0;
  TemperatureEstimator estimator = TemperatureEstimator::kPooled;
};

// T from one-shot sample variances: m Omega^2 var(x) / k_B, var(p)/(m k_B),
// or their inverse-variance-weighted combination. std_err follows the
// chi-squared spread of a variance estimator, T * sqrt(2/n).
TemperatureEstimate estimate_temperature(const SampleSet& samples,
                                         const OscillatorSpec& spec,
                                         TemperatureEstimator estimator,
                                         const ConstantsTable& constants);

struct TransientPoint {
  double time = 0.0;
  TemperatureEstimate estimate;
};

// Heating curve after monitoring noise d_m switches on at t = 0. The
// configured initial state must be Gibbs at t_bath + delta_T(d_sp).
std::vector<TransientPoint> transient_curve(
    const SimConfig& config, std::span<const double> checkpoint_times,
    const ConstantsTable& constants,
    TemperatureEstimator estimator = TemperatureEstimator::kPooled,
    int n_threads = 0);

// CSV dump, one record per checkpoint per trajectory:
// header "traj_id,t,x,p".
void write_trajectory_dump(std::ostream& out,
                           std::span<const CheckpointSet> checkpoints);

}  // namespace spontheat
