#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include "spontheat/collapse_models.hpp"
#include "spontheat/quantities.hpp"
#include "spontheat/thermal_core.hpp"

namespace spontheat {

// Symmetric cell-centered phase-space box: x in [-x_half, x_half],
// p in [-p_half, p_half].
struct GridGeometry {
  double x_half = 0.0;
  double p_half = 0.0;
  int nx = 256;
  int np = 256;
};

struct GridMoments {
  double mass = 0.0;
  double mean_x = 0.0, mean_p = 0.0;
  double var_x = 0.0, var_p = 0.0, cov_xp = 0.0;
};

// Discrete Liouville density rho(x_i, p_j) >= 0 with unit mass
// sum(rho) dx dp = 1. Mass is preserved by the conservative evolution
// scheme; any negativity produced by the update is clipped and the
// removed mass recorded.
class PhaseSpaceGrid {
 public:
  explicit PhaseSpaceGrid(const GridGeometry& geometry);

  const GridGeometry& geometry() const { return geom_; }
  double dx() const { return 2.0 * geom_.x_half / geom_.nx; }
  double dp() const { return 2.0 * geom_.p_half / geom_.np; }
  double x_center(int i) const { return -geom_.x_half + (i + 0.5) * dx(); }
  double p_center(int j) const { return -geom_.p_half + (j + 0.5) * dp(); }

  double at(int i, int j) const { return rho_[static_cast<std::size_t>(i) * geom_.np + j]; }
  double& at(int i, int j) { return rho_[static_cast<std::size_t>(i) * geom_.np + j]; }
  std::span<const double> values() const { return rho_; }
  std::span<double> values() { return rho_; }

  double mass() const;
  GridMoments moments() const;
  double peak() const;
  // Mass sitting in the outermost cell ring; grows when the dynamics is
  // pressing density against the zero-flux walls.
  double boundary_mass() const;
  double clipped_mass() const { return clipped_mass_; }
  void add_clipped_mass(double m) { clipped_mass_ += m; }

  double max_abs_difference(const PhaseSpaceGrid& other) const;

 private:
  GridGeometry geom_;
  std::vector<double> rho_;  // row-major, x index major
  double clipped_mass_ = 0.0;
};

// Drift and diffusion coefficients of the phase-space equation: the
// Hamiltonian flow of (mass, omega), the damping drift eta d/dp(p rho),
// and the total momentum diffusion. eta = 0 is admitted here (pure
// Hamiltonian flow diagnostics) even though damped oscillators always
// carry eta > 0.
struct FpParams {
  PhysQuantity mass;
  PhysQuantity omega;
  PhysQuantity eta;
  PhysQuantity d_total;  // kg^2 m^2 s^-3, sum of all diffusion constants

  static FpParams make(const OscillatorSpec& spec,
                       std::span<const DiffusionConstant> constants);
  static FpParams make(const OscillatorSpec& spec, PhysQuantity d_total);
  static FpParams frictionless(PhysQuantity mass, PhysQuantity omega);
};

// Geometry spanning span_sigmas thermal standard deviations at t_max.
GridGeometry geometry_for(const OscillatorSpec& spec, PhysQuantity t_max,
                          const ConstantsTable& constants, int nx = 256,
                          int np = 256, double span_sigmas = 6.0);

// Normalized Gibbs density exp(-H/k_B T') on the grid. Requires the grid
// to span at least 6 thermal standard deviations in both directions.
PhaseSpaceGrid gibbs_density(const GridGeometry& geometry, const OscillatorSpec& spec,
                             PhysQuantity t_prime, const ConstantsTable& constants);

// Advances the density by `duration` with Strang-split sweeps:
// TVD advection for the Hamiltonian flow, a conservative centered
// drift-diffusion update in p for damping and diffusion. The step size is
// chosen internally from the advective and diffusive stability bounds
// with a 0.5 safety factor.
PhaseSpaceGrid evolve(const PhaseSpaceGrid& grid, const FpParams& params,
                      PhysQuantity duration, int n_threads = 0);

// Discrete L2 norm of the phase-space generator applied to the grid,
// normalized by the density's L2 norm. Vanishes at second order in the
// grid spacing on the true stationary state.
double stationarity_residual(const PhaseSpaceGrid& grid, const FpParams& params);

// Header "x_min,x_max,p_min,p_max,nx,np", then row-major density values,
// one x-row per line, comma-separated.
void write_snapshot(std::ostream& out, const PhaseSpaceGrid& grid);

}  // namespace spontheat
