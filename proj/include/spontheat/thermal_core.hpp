#pragma once

#include <optional>
#include <string_view>

#include "spontheat/collapse_models.hpp"
#include "spontheat/quantities.hpp"

namespace spontheat {

// Damped harmonic oscillator: H = p^2/2m + m Omega^2 x^2 / 2, with
// energy damping rate eta. Relaxation time tau = 1/eta, quality Q = Omega/eta.
struct OscillatorSpec {
  PhysQuantity mass;   // kg
  PhysQuantity omega;  // rad/s
  PhysQuantity eta;    // 1/s

  static OscillatorSpec from_damping(PhysQuantity mass, PhysQuantity omega,
                                     PhysQuantity eta);
  static OscillatorSpec from_quality(PhysQuantity mass, PhysQuantity omega,
                                     double quality);

  PhysQuantity tau() const;  // 1/eta
  double quality() const;    // omega/eta
};

// Thermal momentum diffusion D_th = eta m k_B T (Einstein-Smoluchowski).
DiffusionConstant d_th(const OscillatorSpec& spec, PhysQuantity temperature,
                       const ConstantsTable& constants = ConstantsTable::si());

struct ThermalState {
  PhysQuantity temperature;
  DiffusionConstant d_th;
};

ThermalState make_thermal_state(const OscillatorSpec& spec, PhysQuantity temperature,
                                const ConstantsTable& constants = ConstantsTable::si());

// Temperature increment D tau / (m k_B) contributed by a diffusion constant.
PhysQuantity delta_T(const DiffusionConstant& d, const OscillatorSpec& spec,
                     const ConstantsTable& constants = ConstantsTable::si());

// Stationary temperature T' = (1 + D_sp/D_th) T.
// Throws when d_th is zero while d_sp > 0 (no stationary state).
PhysQuantity stationary_temperature(PhysQuantity temperature,
                                    const DiffusionConstant& d_sp,
                                    const DiffusionConstant& d_thermal);

struct TransientTemperature {
  PhysQuantity value;
  bool low_quality_warning = false;  // set when quality < 10 was passed in
};

// T'(t) = T + dT_sp + (1 - exp(-t/tau)) dT_m, valid for eta << Omega.
// Pass the oscillator quality to get a warning flag when Q < 10.
TransientTemperature heating_transient(PhysQuantity temperature, PhysQuantity dt_sp,
                                       PhysQuantity dt_m, PhysQuantity tau,
                                       PhysQuantity t,
                                       std::optional<double> quality = std::nullopt);

struct ClassicalityResult {
  double ratio = 0.0;             // k_B dT / (hbar Omega)
  bool classical = false;         // ratio > 1
  bool strongly_classical = false;  // ratio >= 10
};

// Many-quanta criterion for treating the heating classically.
ClassicalityResult classicality(PhysQuantity dt, PhysQuantity omega,
                                const ConstantsTable& constants = ConstantsTable::si());

// Standard quantum limit of simultaneous precision/back-action at probe
// frequency omega: (hbar / 2 k_B) |Omega^2 - omega^2 + i eta omega / 2| / eta.
PhysQuantity sql_tradeoff(const OscillatorSpec& spec, PhysQuantity omega_probe,
                          const ConstantsTable& constants = ConstantsTable::si());

// The tradeoff bound itself: deltaT_m * DT_m >= sql_product_bound (K^2).
PhysQuantity sql_product_bound(const OscillatorSpec& spec, PhysQuantity omega_probe,
                               const ConstantsTable& constants = ConstantsTable::si());

// Every heating figure is computable two ways: evaluated from first
// principles with CODATA constants, or using the calibrated coefficients
// as published. The two disagree by known factors (about 6.7 for DP and
// about 4 pi^2 for CSL); results therefore always carry their mode.
enum class CalcMode { kFirstPrinciples, kPaperCalibrated };

std::string_view to_string(CalcMode mode);

struct HeatingResult {
  PhysQuantity delta_t;  // K
  CalcMode mode;
};

inline constexpr double kDpPaperCoefficientKPerS = 4.0e-5;
// K per second of tau, per (g/cm^3)/cm of density/thickness:
inline constexpr double kCslPaperCoefficient = 3.2e-6;

// Calibrated DP heating: 4.0e-5 K * tau[s].
HeatingResult delta_T_dp_paper(PhysQuantity tau);

// Calibrated CSL heating: 3.2e-6 K * tau[s] * rho[g/cm^3] / d[cm] * lambda_scale,
// where lambda_scale = lambda / 2.2e-8 s^-1.
HeatingResult delta_T_csl_paper(PhysQuantity tau, PhysQuantity density,
                                PhysQuantity thickness, double lambda_scale);

// Largest CSL rate compatible with a heating ceiling dT_max:
// lambda_max = 2.2e-8 s^-1 * dT_max / delta_T_csl_paper(tau, rho, d, 1).
PhysQuantity csl_lambda_bound(PhysQuantity tau, PhysQuantity density,
                              PhysQuantity thickness, PhysQuantity dt_max);

// Bookkeeping for the temperature ledger of one oscillator:
// effective T' = T + dT_sp, plus dT_m once monitoring back-action has
// reached its steady state.
struct HeatingBudget {
  PhysQuantity delta_t_sp;
  PhysQuantity delta_t_m;
  PhysQuantity base_temperature;
  PhysQuantity effective_temperature;

  static HeatingBudget make(PhysQuantity temperature, PhysQuantity dt_sp,
                            PhysQuantity dt_m, bool monitored_steady_state);
};

}  // namespace spontheat
