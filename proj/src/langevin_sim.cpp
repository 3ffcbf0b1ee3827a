#include "spontheat/langevin_sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>
#include <sstream>

#include "spontheat/parallel.hpp"
#include "spontheat/rng.hpp"

namespace spontheat {

namespace {

void require_dimension(const PhysQuantity& q, Dimension d, const char* what) {
  if (q.dimension() != d) {
    throw DimensionError(std::string(what) + " has dimension " +
                         to_string(q.dimension()) + ", expected " + to_string(d));
  }
}

// Scalar working set extracted once from the dimension-checked config.
struct Engine {
  double m, omega, eta, k_b;
  double d_total;
  double dt;
  int substeps;
  std::int64_t n_traj;
  std::uint64_t seed;
  InitialState::Kind init_kind;
  double init_a = 0.0, init_b = 0.0;  // (sigma_x, sigma_p) or (x0, p0)
  Integrator integrator;

  // Exact propagator pieces (ExactOu only).
  double m00 = 0, m01 = 0, m10 = 0, m11 = 0;
  double l00 = 0, l10 = 0, l11 = 0;
};

// Largest one-step amplification of second moments for the explicit map
// x' = x + (p/m) h, p' = p - m w^2 x h - eta p h. Moments stay bounded
// only when the spectral radius is below one.
double em_spectral_radius(double omega, double eta, double h) {
  const double tr = 2.0 - eta * h;
  const double det = 1.0 - eta * h + omega * omega * h * h;
  const double disc = tr * tr - 4.0 * det;
  if (disc >= 0) {
    const double root = std::sqrt(disc);
    return std::max(std::abs(tr + root), std::abs(tr - root)) / 2.0;
  }
  return std::sqrt(det);
}

void fill_exact_propagator(Engine& e) {
  const double h = e.dt;
  const double disc = e.omega * e.omega - 0.25 * e.eta * e.eta;
  double c, s;
  if (std::abs(disc) * h * h < 1e-20) {
    c = 1.0 - 0.5 * disc * h * h;
    s = h * (1.0 - disc * h * h / 6.0);
  } else if (disc > 0) {
    const double w1 = std::sqrt(disc);
    c = std::cos(w1 * h);
    s = std::sin(w1 * h) / w1;
  } else {
    const double w1 = std::sqrt(-disc);
    c = std::cosh(w1 * h);
    s = std::sinh(w1 * h) / w1;
  }
  const double decay = std::exp(-0.5 * e.eta * h);
  e.m00 = decay * (c + 0.5 * e.eta * s);
  e.m01 = decay * s / e.m;
  e.m10 = -decay * e.m * e.omega * e.omega * s;
  e.m11 = decay * (c - 0.5 * e.eta * s);

  if (e.d_total <= 0) {
    e.l00 = e.l10 = e.l11 = 0.0;
    return;
  }
  // Step covariance from the stationary covariance: S = Sinf - M Sinf M^T.
  const double s_xx = e.d_total / (e.eta * e.m * e.m * e.omega * e.omega);
  const double s_pp = e.d_total / e.eta;
  const double cov00 = s_xx - (e.m00 * e.m00 * s_xx + e.m01 * e.m01 * s_pp);
  const double cov01 = -(e.m00 * e.m10 * s_xx + e.m01 * e.m11 * s_pp);
  const double cov11 = s_pp - (e.m10 * e.m10 * s_xx + e.m11 * e.m11 * s_pp);
  e.l00 = std::sqrt(std::max(0.0, cov00));
  e.l10 = e.l00 > 0 ? cov01 / e.l00 : 0.0;
  e.l11 = std::sqrt(std::max(0.0, cov11 - e.l10 * e.l10));
}

Engine build_engine(const SimConfig& config, const ConstantsTable& constants) {
  require_dimension(config.t_bath, dim::temperature, "t_bath");
  require_dimension(config.dt, dim::time, "dt");
  if (config.t_bath.value() < 0) throw ValidationError("t_bath must be non-negative");
  if (!(config.dt.value() > 0)) throw ValidationError("dt must be positive");
  if (config.n_traj < 1) throw ValidationError("n_traj must be at least 1");
  if (config.n_steps < 0) throw ValidationError("n_steps must be non-negative");
  if (config.noise_substeps < 1) {
    throw ValidationError("noise_substeps must be at least 1");
  }
  if (config.integrator == Integrator::kExactOu && config.noise_substeps != 1) {
    throw ValidationError("noise_substeps applies to the Euler-Maruyama scheme only");
  }

  Engine e;
  e.m = config.spec.mass.value();
  e.omega = config.spec.omega.value();
  e.eta = config.spec.eta.value();
  e.k_b = constants.k_b.value();
  e.dt = config.dt.value();
  e.substeps = config.noise_substeps;
  e.n_traj = config.n_traj;
  e.seed = config.seed;
  e.integrator = config.integrator;

  const double dt_cap =
      std::min(2.0 * std::numbers::pi / e.omega, 1.0 / e.eta) / 50.0;
  if (e.dt > dt_cap * (1.0 + 1e-12)) {
    std::ostringstream msg;
    msg << "dt = " << e.dt << " exceeds min(2 pi/Omega, tau)/50 = " << dt_cap;
    throw ValidationError(msg.str());
  }
  if (e.integrator == Integrator::kEulerMaruyama) {
    const double radius = em_spectral_radius(e.omega, e.eta, e.dt);
    if (radius >= 1.0) {
      std::ostringstream msg;
      msg << "unstable Euler-Maruyama step: spectral radius " << radius
          << " >= 1 at dt = " << e.dt << " (need dt < eta/Omega^2 = "
          << e.eta / (e.omega * e.omega) << ")";
      throw ValidationError(msg.str());
    }
  }

  const double d_thermal =
      e.eta * e.m * e.k_b * config.t_bath.value();
  e.d_total = d_thermal + config.d_sp.value.value() + config.d_m.value.value();

  if (config.initial.kind == InitialState::Kind::kGibbs) {
    require_dimension(config.initial.t0, dim::temperature, "initial t0");
    if (config.initial.t0.value() < 0) {
      throw ValidationError("initial Gibbs temperature must be non-negative");
    }
    const double t0 = config.initial.t0.value();
    e.init_kind = InitialState::Kind::kGibbs;
    e.init_a = std::sqrt(e.k_b * t0 / (e.m * e.omega * e.omega));  // sigma_x
    e.init_b = std::sqrt(e.m * e.k_b * t0);                        // sigma_p
  } else {
    require_dimension(config.initial.x0, dim::length, "initial x0");
    require_dimension(config.initial.p0, dim::momentum, "initial p0");
    e.init_kind = InitialState::Kind::kDelta;
    e.init_a = config.initial.x0.value();
    e.init_b = config.initial.p0.value();
  }

  if (e.integrator == Integrator::kExactOu) fill_exact_propagator(e);
  return e;
}

// Noise indices 0 and 1 are reserved for the initial state so that the
// per-step layout is identical for both initial-state kinds.
constexpr std::uint64_t kFirstStepNoiseIndex = 2;

void run_trajectory(const Engine& e, std::int64_t traj,
                    std::span<const std::int64_t> checkpoint_steps,
                    std::span<SampleSet* const> out) {
  GaussianStream stream(e.seed, static_cast<std::uint64_t>(traj));
  double x, p;
  if (e.init_kind == InitialState::Kind::kGibbs) {
    x = e.init_a * stream.normal(0);
    p = e.init_b * stream.normal(1);
  } else {
    x = e.init_a;
    p = e.init_b;
  }

  const std::int64_t last_step = checkpoint_steps.back();
  std::size_t next_cp = 0;
  const double amp =
      std::sqrt(2.0 * e.d_total * e.dt / static_cast<double>(e.substeps));
  const double om2m = e.m * e.omega * e.omega;
  const bool euler = e.integrator == Integrator::kEulerMaruyama;
  const bool plain = euler && e.substeps == 1;

  for (std::int64_t k = 0; k <= last_step; ++k) {
    while (next_cp < checkpoint_steps.size() && checkpoint_steps[next_cp] == k) {
      out[next_cp]->x[static_cast<std::size_t>(traj)] = x;
      out[next_cp]->p[static_cast<std::size_t>(traj)] = p;
      ++next_cp;
    }
    if (k == last_step) break;

    if (plain) {
      const double noise =
          stream.normal(kFirstStepNoiseIndex + static_cast<std::uint64_t>(k));
      const double xn = x + p / e.m * e.dt;
      const double pn = p - om2m * x * e.dt - e.eta * p * e.dt + amp * noise;
      x = xn;
      p = pn;
    } else if (euler) {
      double noise = 0.0;
      const std::uint64_t base =
          kFirstStepNoiseIndex + static_cast<std::uint64_t>(k) *
                                     static_cast<std::uint64_t>(e.substeps);
      for (int j = 0; j < e.substeps; ++j) {
        noise += stream.normal(base + static_cast<std::uint64_t>(j));
      }
      const double xn = x + p / e.m * e.dt;
      const double pn = p - om2m * x * e.dt - e.eta * p * e.dt + amp * noise;
      x = xn;
      p = pn;
    } else {
      const std::uint64_t base =
          kFirstStepNoiseIndex + 2 * static_cast<std::uint64_t>(k);
      const double g0 = stream.normal(base);
      const double g1 = stream.normal(base + 1);
      const double xn = e.m00 * x + e.m01 * p + e.l00 * g0;
      const double pn = e.m10 * x + e.m11 * p + e.l10 * g0 + e.l11 * g1;
      x = xn;
      p = pn;
    }
  }
}

double sample_variance(std::span<const double> v, double mean) {
  if (v.size() < 2) return 0.0;
  double acc = 0.0;
  for (double s : v) acc += (s - mean) * (s - mean);
  return acc / static_cast<double>(v.size() - 1);
}

}  // namespace

InitialState InitialState::gibbs(PhysQuantity t0) {
  InitialState s;
  s.kind = Kind::kGibbs;
  s.t0 = t0;
  return s;
}

InitialState InitialState::delta(PhysQuantity x0, PhysQuantity p0) {
  InitialState s;
  s.kind = Kind::kDelta;
  s.x0 = x0;
  s.p0 = p0;
  return s;
}

std::string_view to_string(Integrator integrator) {
  switch (integrator) {
    case Integrator::kEulerMaruyama: return "euler-maruyama";
    case Integrator::kExactOu: return "exact-ou";
  }
  return "?";
}

std::string_view to_string(TemperatureEstimator estimator) {
  switch (estimator) {
    case TemperatureEstimator::kFromX: return "FROM_X";
    case TemperatureEstimator::kFromP: return "FROM_P";
    case TemperatureEstimator::kPooled: return "POOLED";
  }
  return "?";
}

PhysQuantity SimConfig::horizon() const {
  return dt * static_cast<double>(n_steps);
}

std::vector<CheckpointSet> simulate_checkpoints(
    const SimConfig& config, std::span<const double> checkpoint_times,
    const ConstantsTable& constants, int n_threads) {
  if (checkpoint_times.empty()) {
    throw ValidationError("at least one checkpoint time is required");
  }
  const Engine engine = build_engine(config, constants);

  std::vector<std::int64_t> steps;
  steps.reserve(checkpoint_times.size());
  for (double t : checkpoint_times) {
    if (t < 0) throw ValidationError("checkpoint times must be non-negative");
    const auto idx = static_cast<std::int64_t>(std::llround(t / engine.dt));
    if (idx > config.n_steps) {
      std::ostringstream msg;
      msg << "checkpoint t = " << t << " lies beyond the horizon "
          << engine.dt * static_cast<double>(config.n_steps);
      throw ValidationError(msg.str());
    }
    steps.push_back(idx);
  }
  std::sort(steps.begin(), steps.end());
  steps.erase(std::unique(steps.begin(), steps.end()), steps.end());

  std::vector<CheckpointSet> out(steps.size());
  for (std::size_t i = 0; i < steps.size(); ++i) {
    out[i].time = static_cast<double>(steps[i]) * engine.dt;
    out[i].samples.time = out[i].time;
    out[i].samples.x.resize(static_cast<std::size_t>(engine.n_traj));
    out[i].samples.p.resize(static_cast<std::size_t>(engine.n_traj));
  }

  std::vector<SampleSet*> slots;
  slots.reserve(out.size());
  for (auto& cp : out) slots.push_back(&cp.samples);

  parallel_for_chunks(
      0, engine.n_traj,
      [&](std::int64_t lo, std::int64_t hi) {
        for (std::int64_t traj = lo; traj < hi; ++traj) {
          run_trajectory(engine, traj, steps, slots);
        }
      },
      n_threads);

  return out;
}

EnsembleStats compute_stats(const SampleSet& samples) {
  EnsembleStats stats;
  stats.n_samples = static_cast<std::int64_t>(samples.x.size());
  stats.horizon = samples.time;
  const double n = static_cast<double>(stats.n_samples);
  double mx = 0, mp = 0;
  for (double v : samples.x) mx += v;
  for (double v : samples.p) mp += v;
  mx /= n;
  mp /= n;
  const double vx = sample_variance(samples.x, mx);
  const double vp = sample_variance(samples.p, mp);
  stats.mean_x = {mx, stats.n_samples > 1 ? std::sqrt(vx / n) : 0.0};
  stats.mean_p = {mp, stats.n_samples > 1 ? std::sqrt(vp / n) : 0.0};
  stats.var_x = {vx, vx * std::sqrt(2.0 / n)};
  stats.var_p = {vp, vp * std::sqrt(2.0 / n)};
  return stats;
}

EnsembleResult simulate_ensemble(const SimConfig& config,
                                 const ConstantsTable& constants, int n_threads) {
  const double horizon =
      config.dt.value() * static_cast<double>(config.n_steps);
  const double times[1] = {horizon};
  auto checkpoints = simulate_checkpoints(config, times, constants, n_threads);
  EnsembleResult result;
  result.final_samples = std::move(checkpoints.back().samples);
  result.stats = compute_stats(result.final_samples);
  return result;
}

TemperatureEstimate estimate_temperature(const SampleSet& samples,
                                         const OscillatorSpec& spec,
                                         TemperatureEstimator estimator,
                                         const ConstantsTable& constants) {
  const std::size_t n = samples.x.size();
  if (n < 2 || samples.p.size() != n) {
    throw ValidationError("temperature estimation needs at least 2 samples");
  }
  const double nd = static_cast<double>(n);
  const double k_b = constants.k_b.value();
  const double m = spec.mass.value();
  const double om = spec.omega.value();

  auto from_moment = [&](std::span<const double> v, double scale) {
    double mean = 0;
    for (double s : v) mean += s;
    mean /= nd;
    const double var = sample_variance(v, mean);
    const double t_hat = scale * var;
    return TemperatureEstimate{t_hat, t_hat * std::sqrt(2.0 / nd), estimator};
  };

  switch (estimator) {
    case TemperatureEstimator::kFromX:
      return from_moment(samples.x, m * om * om / k_b);
    case TemperatureEstimator::kFromP:
      return from_moment(samples.p, 1.0 / (m * k_b));
    case TemperatureEstimator::kPooled: {
      TemperatureEstimate tx = from_moment(samples.x, m * om * om / k_b);
      TemperatureEstimate tp = from_moment(samples.p, 1.0 / (m * k_b));
      if (tx.std_err == 0.0 || tp.std_err == 0.0) {
        return {0.5 * (tx.t_hat + tp.t_hat), 0.0, estimator};
      }
      const double wx = 1.0 / (tx.std_err * tx.std_err);
      const double wp = 1.0 / (tp.std_err * tp.std_err);
      return {(wx * tx.t_hat + wp * tp.t_hat) / (wx + wp),
              1.0 / std::sqrt(wx + wp), estimator};
    }
  }
  throw ValidationError("unknown estimator");
}

std::vector<TransientPoint> transient_curve(
    const SimConfig& config, std::span<const double> checkpoint_times,
    const ConstantsTable& constants, TemperatureEstimator estimator,
    int n_threads) {
  if (config.initial.kind != InitialState::Kind::kGibbs) {
    throw ValidationError("transient_curve starts from a Gibbs initial state");
  }
  if (!(config.d_m.value.value() > 0)) {
    throw ValidationError("transient_curve needs monitoring diffusion d_m > 0");
  }
  const PhysQuantity dt_sp = delta_T(config.d_sp, config.spec, constants);
  const PhysQuantity expected_t0 = config.t_bath + dt_sp;
  const double rel = std::abs(config.initial.t0.value() - expected_t0.value()) /
                     std::max(1e-300, expected_t0.value());
  if (rel > 1e-9) {
    std::ostringstream msg;
    msg << "transient initial state must be Gibbs at t_bath + dT_sp = "
        << expected_t0.value() << ", got " << config.initial.t0.value();
    throw ValidationError(msg.str());
  }

  auto checkpoints =
      simulate_checkpoints(config, checkpoint_times, constants, n_threads);
  std::vector<TransientPoint> curve;
  curve.reserve(checkpoints.size());
  for (const auto& cp : checkpoints) {
    curve.push_back(
        {cp.time,
         estimate_temperature(cp.samples, config.spec, estimator, constants)});
  }
  return curve;
}

void write_trajectory_dump(std::ostream& out,
                           std::span<const CheckpointSet> checkpoints) {
  out << "traj_id,t,x,p\n";
  char buf[96];
  for (const auto& cp : checkpoints) {
    for (std::size_t i = 0; i < cp.samples.x.size(); ++i) {
      std::snprintf(buf, sizeof(buf), "%zu,%.17g,%.17g,%.17g\n", i, cp.time,
                    cp.samples.x[i], cp.samples.p[i]);
      out << buf;
    }
  }
}

}  // namespace spontheat
