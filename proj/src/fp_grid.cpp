#include "spontheat/fp_grid.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>
#include <vector>

#include "spontheat/parallel.hpp"

namespace spontheat {

namespace {

double van_leer(double r) { return (r + std::abs(r)) / (1.0 + std::abs(r)); }

// Second-order Fromm flux update for d rho/dt + u d rho/dx = 0 with
// constant u along one line, zero-flux boundaries. The slope is the
// unlimited central difference of the upwind cell; TVD limiters clip
// smooth extrema and the resulting peak diffusion breaks the moment
// conservation targets, so tiny undershoots are clipped and accounted
// instead. Below `floor` the correction is dropped (first-order upwind):
// the deep tail carries no moment weight and unlimited slopes would ring
// there. `flux` is scratch of size n+1; in and out may alias.
void fromm_line_const_u(std::span<const double> in, std::span<double> out,
                        std::span<double> flux, double u, double dt, double h,
                        double floor) {
  const int n = static_cast<int>(in.size());
  const double nu = u * dt / h;
  // Faces hugging the zero-flux walls advect first-order: the truncated
  // profile ends there and unlimited slopes ring against the wall.
  const int band_lo = 3, band_hi = n - 3;
  flux[0] = 0.0;
  flux[static_cast<std::size_t>(n)] = 0.0;
  if (u >= 0) {
    const double corr = 0.25 * u * (1.0 - nu);
    for (int f = 1; f < n; ++f) {
      double value = u * in[f - 1];
      if (f >= band_lo && f <= band_hi && (in[f - 1] > floor || in[f] > floor)) {
        const double d = in[f] - in[f - 1];
        const double dprev = in[f - 1] - in[f - 2];
        value += corr * (d + dprev);
      }
      flux[f] = value;
    }
  } else {
    const double corr = 0.25 * u * (1.0 + nu);
    for (int f = 1; f < n; ++f) {
      double value = u * in[f];
      if (f >= band_lo && f <= band_hi && (in[f - 1] > floor || in[f] > floor)) {
        const double d = in[f] - in[f - 1];
        const double dnext = in[f + 1] - in[f];
        value -= corr * (d + dnext);
      }
      flux[f] = value;
    }
  }
  const double scale = dt / h;
  for (int i = 0; i < n; ++i) {
    out[i] = in[i] - scale * (flux[i + 1] - flux[i]);
  }
}

// TVD flux update with per-face velocity w[f] (upwind-biased), used for
// the damping drift when diffusion is too weak to stabilize a centered
// stencil.
void tvd_line_variable_w(std::span<const double> in, std::span<double> out,
                         std::span<double> flux, std::span<const double> w,
                         double dt, double h) {
  const int n = static_cast<int>(in.size());
  flux[0] = 0.0;
  flux[static_cast<std::size_t>(n)] = 0.0;
  for (int f = 1; f < n; ++f) {
    const double wf = w[f];
    const double nu = wf * dt / h;
    const double d = in[f] - in[f - 1];
    double value;
    if (wf >= 0) {
      double corr = 0.0;
      if (d != 0.0) {
        const double dprev = f >= 2 ? in[f - 1] - in[f - 2] : 0.0;
        corr = 0.5 * wf * (1.0 - nu) * van_leer(dprev / d) * d;
      }
      value = wf * in[f - 1] + corr;
    } else {
      double corr = 0.0;
      if (d != 0.0) {
        const double dnext = f <= n - 2 ? in[f + 1] - in[f] : 0.0;
        corr = -0.5 * wf * (1.0 + nu) * van_leer(dnext / d) * d;
      }
      value = wf * in[f] + corr;
    }
    flux[f] = value;
  }
  const double scale = dt / h;
  for (int i = 0; i < n; ++i) {
    out[i] = in[i] - scale * (flux[i + 1] - flux[i]);
  }
}

// Conservative centered drift + diffusion along p:
// d rho/dt = d/dp(eta p rho) + D d2 rho/dp2.
// The drift flux averages the cell products p*rho rather than p and rho
// separately; with the summation-by-parts identity of the centered second
// difference this makes the discrete second-moment balance
// d<p^2>/dt = -2 eta <p^2> + 2 D exact up to boundary-tail terms, so the
// discrete stationary variance matches D/(eta) with no O(dp^2) offset.
void centered_drift_diffusion(std::span<const double> in, std::span<double> out,
                              std::span<double> flux,
                              std::span<const double> p_cell, double eta,
                              double diffusion, double dt, double h) {
  const int n = static_cast<int>(in.size());
  flux[0] = 0.0;
  flux[static_cast<std::size_t>(n)] = 0.0;
  const double dinv = diffusion / h;
  for (int f = 1; f < n; ++f) {
    flux[f] = -0.5 * eta * (p_cell[f - 1] * in[f - 1] + p_cell[f] * in[f]) -
              dinv * (in[f] - in[f - 1]);
  }
  const double scale = dt / h;
  for (int i = 0; i < n; ++i) {
    out[i] = in[i] - scale * (flux[i + 1] - flux[i]);
  }
}

struct Stepper {
  double m, omega, eta, diffusion;
  double dx, dp, x_half, p_half;
  int nx, np;
  bool centered_drift = true;
  std::vector<double> w_face;  // -eta * p at p faces, size np+1
  std::vector<double> p_cell;  // p at cell centers, size np

  double clip_line(std::span<double> v) {
    double clipped = 0.0;
    for (double& r : v) {
      if (r < 0.0) {
        clipped -= r;
        r = 0.0;
      }
    }
    return clipped;
  }
};

}  // namespace

PhaseSpaceGrid::PhaseSpaceGrid(const GridGeometry& geometry) : geom_(geometry) {
  if (geom_.nx < 8 || geom_.np < 8) {
    throw ValidationError("grid needs at least 8 cells per direction");
  }
  if (!(geom_.x_half > 0) || !(geom_.p_half > 0)) {
    throw ValidationError("grid half-widths must be positive");
  }
  rho_.assign(static_cast<std::size_t>(geom_.nx) * geom_.np, 0.0);
}

double PhaseSpaceGrid::mass() const {
  double sum = 0.0;
  for (double v : rho_) sum += v;
  return sum * dx() * dp();
}

GridMoments PhaseSpaceGrid::moments() const {
  GridMoments m;
  const double cell = dx() * dp();
  double sx = 0, sp = 0, sxx = 0, spp = 0, sxp = 0, mass = 0;
  for (int i = 0; i < geom_.nx; ++i) {
    const double x = x_center(i);
    double row = 0, row_p = 0, row_pp = 0;
    for (int j = 0; j < geom_.np; ++j) {
      const double r = at(i, j);
      const double p = p_center(j);
      row += r;
      row_p += r * p;
      row_pp += r * p * p;
    }
    mass += row;
    sx += row * x;
    sxx += row * x * x;
    sp += row_p;
    spp += row_pp;
    sxp += row_p * x;
  }
  mass *= cell;
  m.mass = mass;
  if (mass <= 0) return m;
  m.mean_x = sx * cell / mass;
  m.mean_p = sp * cell / mass;
  m.var_x = sxx * cell / mass - m.mean_x * m.mean_x;
  m.var_p = spp * cell / mass - m.mean_p * m.mean_p;
  m.cov_xp = sxp * cell / mass - m.mean_x * m.mean_p;
  return m;
}

double PhaseSpaceGrid::peak() const {
  double best = 0.0;
  for (double v : rho_) best = std::max(best, v);
  return best;
}

double PhaseSpaceGrid::boundary_mass() const {
  double sum = 0.0;
  for (int i = 0; i < geom_.nx; ++i) {
    for (int j = 0; j < geom_.np; ++j) {
      if (i == 0 || j == 0 || i == geom_.nx - 1 || j == geom_.np - 1) {
        sum += at(i, j);
      }
    }
  }
  return sum * dx() * dp();
}

double PhaseSpaceGrid::max_abs_difference(const PhaseSpaceGrid& other) const {
  if (geom_.nx != other.geom_.nx || geom_.np != other.geom_.np) {
    throw ValidationError("grids have different shapes");
  }
  double best = 0.0;
  for (std::size_t k = 0; k < rho_.size(); ++k) {
    best = std::max(best, std::abs(rho_[k] - other.rho_[k]));
  }
  return best;
}

FpParams FpParams::make(const OscillatorSpec& spec,
                        std::span<const DiffusionConstant> constants) {
  PhysQuantity total(0.0, dim::momentum_diffusion);
  for (const auto& d : constants) total += d.value;
  return make(spec, total);
}

FpParams FpParams::make(const OscillatorSpec& spec, PhysQuantity d_total) {
  if (d_total.dimension() != dim::momentum_diffusion) {
    throw DimensionError("d_total must be a momentum diffusion constant, got " +
                         to_string(d_total.dimension()));
  }
  if (d_total.value() < 0) {
    throw ValidationError("d_total must be non-negative");
  }
  return {spec.mass, spec.omega, spec.eta, d_total};
}

FpParams FpParams::frictionless(PhysQuantity mass, PhysQuantity omega) {
  if (mass.dimension() != dim::mass || !(mass.value() > 0)) {
    throw ValidationError("mass must be positive");
  }
  if (omega.dimension() != dim::rate || !(omega.value() > 0)) {
    throw ValidationError("omega must be positive");
  }
  return {mass, omega, PhysQuantity(0.0, dim::rate),
          PhysQuantity(0.0, dim::momentum_diffusion)};
}

GridGeometry geometry_for(const OscillatorSpec& spec, PhysQuantity t_max,
                          const ConstantsTable& constants, int nx, int np,
                          double span_sigmas) {
  if (t_max.dimension() != dim::temperature || !(t_max.value() > 0)) {
    throw ValidationError("t_max must be a positive temperature");
  }
  const double m = spec.mass.value();
  const double om = spec.omega.value();
  const double kbt = constants.k_b.value() * t_max.value();
  GridGeometry g;
  g.x_half = span_sigmas * std::sqrt(kbt / (m * om * om));
  g.p_half = span_sigmas * std::sqrt(m * kbt);
  g.nx = nx;
  g.np = np;
  return g;
}

PhaseSpaceGrid gibbs_density(const GridGeometry& geometry, const OscillatorSpec& spec,
                             PhysQuantity t_prime, const ConstantsTable& constants) {
  if (t_prime.dimension() != dim::temperature || !(t_prime.value() > 0)) {
    throw ValidationError("Gibbs temperature must be positive");
  }
  const double m = spec.mass.value();
  const double om = spec.omega.value();
  const double kbt = constants.k_b.value() * t_prime.value();
  const double sigma_x = std::sqrt(kbt / (m * om * om));
  const double sigma_p = std::sqrt(m * kbt);
  if (geometry.x_half < 6.0 * sigma_x * (1.0 - 1e-12) ||
      geometry.p_half < 6.0 * sigma_p * (1.0 - 1e-12)) {
    std::ostringstream msg;
    msg << "grid covers only " << geometry.x_half / sigma_x << " sigma in x and "
        << geometry.p_half / sigma_p << " sigma in p; at least 6 required";
    throw ValidationError(msg.str());
  }

  PhaseSpaceGrid grid(geometry);
  double sum = 0.0;
  for (int i = 0; i < geometry.nx; ++i) {
    const double x = grid.x_center(i);
    for (int j = 0; j < geometry.np; ++j) {
      const double p = grid.p_center(j);
      const double h = p * p / (2.0 * m) + 0.5 * m * om * om * x * x;
      const double v = std::exp(-h / kbt);
      grid.at(i, j) = v;
      sum += v;
    }
  }
  const double norm = sum * grid.dx() * grid.dp();
  for (double& v : grid.values()) v /= norm;
  return grid;
}

PhaseSpaceGrid evolve(const PhaseSpaceGrid& grid, const FpParams& params,
                      PhysQuantity duration, int n_threads) {
  if (duration.dimension() != dim::time || duration.value() < 0) {
    throw ValidationError("duration must be a non-negative time");
  }
  PhaseSpaceGrid work = grid;
  if (duration.value() == 0) return work;

  Stepper st;
  st.m = params.mass.value();
  st.omega = params.omega.value();
  st.eta = params.eta.value();
  st.diffusion = params.d_total.value();
  st.nx = grid.geometry().nx;
  st.np = grid.geometry().np;
  st.dx = grid.dx();
  st.dp = grid.dp();
  st.x_half = grid.geometry().x_half;
  st.p_half = grid.geometry().p_half;

  // Stability bounds with a 0.5 safety factor; the centered drift stencil
  // additionally requires a cell Peclet number eta*p*dp/D <= 2 everywhere.
  const double u_max = st.p_half / st.m;
  const double v_max = st.m * st.omega * st.omega * st.x_half;
  double dt = std::min(st.dx / u_max, st.dp / v_max);
  if (st.diffusion > 0) dt = std::min(dt, st.dp * st.dp / (2.0 * st.diffusion));
  if (st.eta > 0) dt = std::min(dt, st.dp / (st.eta * st.p_half));
  dt *= 0.5;
  if (!(dt > 0) || !std::isfinite(dt)) {
    throw ValidationError("no stable step size for these parameters");
  }
  const double n_steps_real = std::ceil(duration.value() / dt);
  if (n_steps_real > 5e7) {
    throw ValidationError("evolution would need more than 5e7 steps; refusing");
  }
  const auto n_steps = static_cast<std::int64_t>(n_steps_real);
  dt = duration.value() / static_cast<double>(n_steps);

  st.centered_drift =
      st.diffusion > 0 &&
      st.eta * st.p_half * st.dp / st.diffusion <= 2.0;
  st.w_face.resize(static_cast<std::size_t>(st.np) + 1);
  for (int f = 0; f <= st.np; ++f) {
    st.w_face[static_cast<std::size_t>(f)] = -st.eta * (-st.p_half + f * st.dp);
  }
  st.p_cell.resize(static_cast<std::size_t>(st.np));
  for (int j = 0; j < st.np; ++j) {
    st.p_cell[static_cast<std::size_t>(j)] = work.p_center(j);
  }

  const bool has_dd = st.eta > 0 || st.diffusion > 0;
  const int nx = st.nx;
  const int np = st.np;
  double* rho = work.values().data();
  // Densities this far below the initial peak carry no moment weight;
  // first-order fluxes there suppress dispersive ringing at the tail edge.
  const double tail_floor = 1e-12 * work.peak();
  // The per-sweep row work is too small to amortize thread dispatch on the
  // default grids, so 0 means serial here; explicit counts are honored
  // (the result is partition-independent either way).
  const int workers = n_threads == 0 ? 1 : n_threads;
  std::vector<double> row_clip(static_cast<std::size_t>(nx), 0.0);
  // Face fluxes of the x sweep, flux_x[i*np + j] for the face between
  // rows i-1 and i.
  std::vector<double> flux_x(static_cast<std::size_t>(nx + 1) * np, 0.0);

  // Per-column x velocities and Fromm correction coefficients for the two
  // substep lengths that occur (dt/2 at the sequence ends, dt inside once
  // adjacent half steps are fused).
  struct XCoeffs {
    double sub_dt;
    std::vector<double> u, corr;  // corr: 0.25 u (1 -|nu|)
  };
  auto make_x_coeffs = [&](double sub_dt) {
    XCoeffs c;
    c.sub_dt = sub_dt;
    c.u.resize(static_cast<std::size_t>(np));
    c.corr.resize(static_cast<std::size_t>(np));
    for (int j = 0; j < np; ++j) {
      const double u = st.p_cell[static_cast<std::size_t>(j)] / st.m;
      const double nu = u * sub_dt / st.dx;
      c.u[static_cast<std::size_t>(j)] = u;
      c.corr[static_cast<std::size_t>(j)] = 0.25 * u * (1.0 - std::abs(nu));
    }
    return c;
  };
  const XCoeffs x_half = make_x_coeffs(0.5 * dt);
  const XCoeffs x_full = make_x_coeffs(dt);
  // First column index with non-negative velocity (the grid is symmetric,
  // so the sign splits the row into two contiguous ranges).
  int split = 0;
  while (split < np && st.p_cell[static_cast<std::size_t>(split)] < 0.0) ++split;

  auto sweep_x = [&](const XCoeffs& c) {
    // Pass 1: face fluxes from the frozen density.
    parallel_for_chunks(
        1, nx,
        [&](std::int64_t lo, std::int64_t hi) {
          for (std::int64_t i = lo; i < hi; ++i) {
            double* f = &flux_x[static_cast<std::size_t>(i) * np];
            const double* rm1 = rho + (i - 1) * np;
            const double* r0 = rho + i * np;
            if (i < 3 || i > nx - 3) {  // first-order band at the walls
              for (int j = 0; j < split; ++j) {
                f[j] = c.u[static_cast<std::size_t>(j)] * r0[j];
              }
              for (int j = split; j < np; ++j) {
                f[j] = c.u[static_cast<std::size_t>(j)] * rm1[j];
              }
              continue;
            }
            const double* rm2 = rho + (i - 2) * np;
            const double* rp1 = rho + (i + 1) * np;
            for (int j = 0; j < split; ++j) {  // u < 0: upwind cell is row i
              double value = c.u[static_cast<std::size_t>(j)] * r0[j];
              if (rm1[j] > tail_floor || r0[j] > tail_floor) {
                const double d = r0[j] - rm1[j];
                const double dnext = rp1[j] - r0[j];
                value -= c.corr[static_cast<std::size_t>(j)] * (d + dnext);
              }
              f[j] = value;
            }
            for (int j = split; j < np; ++j) {  // u >= 0: upwind cell is row i-1
              double value = c.u[static_cast<std::size_t>(j)] * rm1[j];
              if (rm1[j] > tail_floor || r0[j] > tail_floor) {
                const double d = r0[j] - rm1[j];
                const double dprev = rm1[j] - rm2[j];
                value += c.corr[static_cast<std::size_t>(j)] * (d + dprev);
              }
              f[j] = value;
            }
          }
        },
        workers);
    // Pass 2: conservative update and positivity clip.
    const double scale = c.sub_dt / st.dx;
    parallel_for_chunks(
        0, nx,
        [&](std::int64_t lo, std::int64_t hi) {
          for (std::int64_t i = lo; i < hi; ++i) {
            double* r0 = rho + i * np;
            const double* f_lo = &flux_x[static_cast<std::size_t>(i) * np];
            const double* f_hi = &flux_x[static_cast<std::size_t>(i + 1) * np];
            const bool top = i == 0, bottom = i + 1 == nx;
            double clipped = 0.0;
            for (int j = 0; j < np; ++j) {
              const double in = top ? 0.0 : f_lo[j];
              const double out = bottom ? 0.0 : f_hi[j];
              double v = r0[j] - scale * (out - in);
              if (v < 0.0) {
                clipped -= v;
                v = 0.0;
              }
              r0[j] = v;
            }
            row_clip[static_cast<std::size_t>(i)] += clipped;
          }
        },
        workers);
  };

  // The p-advection half step, damping-diffusion step and second
  // p-advection half step are row-local, so one pass applies all three to
  // a row buffer that stays in cache.
  auto sweep_p_dd_p = [&](double half_dt, double full_dt, bool with_dd) {
    parallel_for_chunks(
        0, nx,
        [&](std::int64_t lo, std::int64_t hi) {
          std::vector<double> buf(static_cast<std::size_t>(np));
          std::vector<double> flux(static_cast<std::size_t>(np) + 1);
          for (std::int64_t i = lo; i < hi; ++i) {
            double* r0 = rho + i * np;
            std::copy(r0, r0 + np, buf.begin());
            const double v =
                -st.m * st.omega * st.omega * work.x_center(static_cast<int>(i));
            fromm_line_const_u(buf, buf, flux, v, half_dt, st.dp, tail_floor);
            if (with_dd) {
              if (st.centered_drift) {
                centered_drift_diffusion(buf, buf, flux, st.p_cell, st.eta,
                                         st.diffusion, full_dt, st.dp);
              } else {
                tvd_line_variable_w(buf, buf, flux, st.w_face, full_dt, st.dp);
                if (st.diffusion > 0) {
                  for (int f = 1; f < np; ++f) {
                    flux[static_cast<std::size_t>(f)] =
                        -st.diffusion *
                        (buf[static_cast<std::size_t>(f)] -
                         buf[static_cast<std::size_t>(f) - 1]) /
                        st.dp;
                  }
                  flux[0] = flux[static_cast<std::size_t>(np)] = 0.0;
                  for (int jj = 0; jj < np; ++jj) {
                    buf[static_cast<std::size_t>(jj)] -=
                        full_dt / st.dp *
                        (flux[static_cast<std::size_t>(jj) + 1] -
                         flux[static_cast<std::size_t>(jj)]);
                  }
                }
              }
              fromm_line_const_u(buf, buf, flux, v, half_dt, st.dp, tail_floor);
            }
            double clipped = 0.0;
            for (int j = 0; j < np; ++j) {
              double value = buf[static_cast<std::size_t>(j)];
              if (value < 0.0) {
                clipped -= value;
                value = 0.0;
              }
              r0[j] = value;
            }
            row_clip[static_cast<std::size_t>(i)] += clipped;
          }
        },
        workers);
  };

  // Strang sequence X(h/2) P(h/2) DD(h) P(h/2) X(h/2) per step, with the
  // adjacent X half steps of consecutive steps fused into X(h). Without
  // damping or diffusion the P half steps fuse the same way.
  if (has_dd) {
    sweep_x(x_half);
    for (std::int64_t k = 0; k < n_steps; ++k) {
      sweep_p_dd_p(0.5 * dt, dt, true);
      sweep_x(k + 1 < n_steps ? x_full : x_half);
    }
  } else {
    sweep_x(x_half);
    for (std::int64_t k = 0; k < n_steps; ++k) {
      sweep_p_dd_p(dt, dt, false);
      sweep_x(k + 1 < n_steps ? x_full : x_half);
    }
  }

  double clip = 0.0;
  for (int i = 0; i < nx; ++i) clip += row_clip[static_cast<std::size_t>(i)];
  work.add_clipped_mass(clip * st.dx * st.dp);
  return work;
}

double stationarity_residual(const PhaseSpaceGrid& grid, const FpParams& params) {
  const double m = params.mass.value();
  const double om2m = params.mass.value() * params.omega.value() *
                      params.omega.value();
  const double eta = params.eta.value();
  const double diffusion = params.d_total.value();
  const double dx = grid.dx();
  const double dp = grid.dp();
  const int nx = grid.geometry().nx;
  const int np = grid.geometry().np;

  double res_sq = 0.0;
  double rho_sq = 0.0;
  for (int i = 1; i < nx - 1; ++i) {
    const double x = grid.x_center(i);
    for (int j = 1; j < np - 1; ++j) {
      const double p = grid.p_center(j);
      const double r = grid.at(i, j);
      const double rx = (grid.at(i + 1, j) - grid.at(i - 1, j)) / (2.0 * dx);
      const double rp = (grid.at(i, j + 1) - grid.at(i, j - 1)) / (2.0 * dp);
      const double rpp =
          (grid.at(i, j + 1) - 2.0 * r + grid.at(i, j - 1)) / (dp * dp);
      const double rhs =
          -(p / m) * rx + om2m * x * rp + eta * (r + p * rp) + diffusion * rpp;
      res_sq += rhs * rhs;
      rho_sq += r * r;
    }
  }
  if (rho_sq == 0) return 0.0;
  return std::sqrt(res_sq / rho_sq);
}

void write_snapshot(std::ostream& out, const PhaseSpaceGrid& grid) {
  const auto& g = grid.geometry();
  char buf[128];
  std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.17g,%d,%d\n", -g.x_half,
                g.x_half, -g.p_half, g.p_half, g.nx, g.np);
  out << buf;
  for (int i = 0; i < g.nx; ++i) {
    for (int j = 0; j < g.np; ++j) {
      std::snprintf(buf, sizeof(buf), j + 1 < g.np ? "%.17g," : "%.17g\n",
                    grid.at(i, j));
      out << buf;
    }
  }
}

}  // namespace spontheat
