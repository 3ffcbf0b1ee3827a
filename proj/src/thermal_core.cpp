#include "spontheat/thermal_core.hpp"

#include <cmath>

namespace spontheat {

namespace {

void require_dimension(const PhysQuantity& q, Dimension d, const char* what) {
  if (q.dimension() != d) {
    throw DimensionError(std::string(what) + " has dimension " +
                         to_string(q.dimension()) + ", expected " + to_string(d));
  }
}

void require_positive(const PhysQuantity& q, const char* what) {
  if (!(q.value() > 0)) {
    throw ValidationError(std::string(what) + " must be positive");
  }
}

void require_non_negative(const PhysQuantity& q, const char* what) {
  if (q.value() < 0) {
    throw ValidationError(std::string(what) + " must be non-negative");
  }
}

}  // namespace

OscillatorSpec OscillatorSpec::from_damping(PhysQuantity mass, PhysQuantity omega,
                                            PhysQuantity eta) {
  require_dimension(mass, dim::mass, "mass");
  require_dimension(omega, dim::rate, "omega");
  require_dimension(eta, dim::rate, "eta");
  require_positive(mass, "mass");
  require_positive(omega, "omega");
  require_positive(eta, "eta");
  return {mass, omega, eta};
}

OscillatorSpec OscillatorSpec::from_quality(PhysQuantity mass, PhysQuantity omega,
                                            double quality) {
  if (!(quality > 0)) {
    throw ValidationError("quality must be positive");
  }
  require_dimension(omega, dim::rate, "omega");
  return from_damping(mass, omega, omega / quality);
}

PhysQuantity OscillatorSpec::tau() const { return 1.0 / eta; }

double OscillatorSpec::quality() const { return (omega / eta).value(); }

DiffusionConstant d_th(const OscillatorSpec& spec, PhysQuantity temperature,
                       const ConstantsTable& constants) {
  require_dimension(temperature, dim::temperature, "temperature");
  require_non_negative(temperature, "temperature");
  return DiffusionConstant(spec.eta * spec.mass * constants.k_b * temperature,
                           DiffusionSource::kThermal);
}

ThermalState make_thermal_state(const OscillatorSpec& spec, PhysQuantity temperature,
                                const ConstantsTable& constants) {
  return {temperature, d_th(spec, temperature, constants)};
}

PhysQuantity delta_T(const DiffusionConstant& d, const OscillatorSpec& spec,
                     const ConstantsTable& constants) {
  return d.value * spec.tau() / (spec.mass * constants.k_b);
}

PhysQuantity stationary_temperature(PhysQuantity temperature,
                                    const DiffusionConstant& d_sp,
                                    const DiffusionConstant& d_thermal) {
  require_dimension(temperature, dim::temperature, "temperature");
  if (d_thermal.value.value() == 0.0) {
    if (d_sp.value.value() > 0.0) {
      throw ValidationError(
          "no stationary state: spontaneous diffusion with zero thermal damping "
          "diffusion heats without bound");
    }
    return temperature;
  }
  return temperature * (1.0 + (d_sp.value / d_thermal.value).value());
}

TransientTemperature heating_transient(PhysQuantity temperature, PhysQuantity dt_sp,
                                       PhysQuantity dt_m, PhysQuantity tau,
                                       PhysQuantity t, std::optional<double> quality) {
  require_dimension(temperature, dim::temperature, "temperature");
  require_dimension(dt_sp, dim::temperature, "dT_sp");
  require_dimension(dt_m, dim::temperature, "dT_m");
  require_dimension(tau, dim::time, "tau");
  require_dimension(t, dim::time, "t");
  require_positive(tau, "tau");
  if (t.value() < 0) {
    throw ValidationError("t must be non-negative");
  }
  const double relax = 1.0 - std::exp(-t.value() / tau.value());
  TransientTemperature result{temperature + dt_sp + relax * dt_m,
                              quality.has_value() && *quality < 10.0};
  return result;
}

ClassicalityResult classicality(PhysQuantity dt, PhysQuantity omega,
                                const ConstantsTable& constants) {
  require_dimension(dt, dim::temperature, "dT");
  require_dimension(omega, dim::rate, "omega");
  require_positive(omega, "omega");
  const double ratio =
      (constants.k_b * dt / (constants.hbar * omega)).value();
  return {ratio, ratio > 1.0, ratio >= 10.0};
}

PhysQuantity sql_tradeoff(const OscillatorSpec& spec, PhysQuantity omega_probe,
                          const ConstantsTable& constants) {
  require_dimension(omega_probe, dim::rate, "omega_probe");
  require_non_negative(omega_probe, "omega_probe");
  const double om2 = spec.omega.value() * spec.omega.value();
  const double w = omega_probe.value();
  const double eta = spec.eta.value();
  // |Omega^2 - w^2 + i eta w / 2|
  const double modulus = std::hypot(om2 - w * w, 0.5 * eta * w);
  PhysQuantity rate_sq(modulus, dim::rate * 2);
  return constants.hbar / (2.0 * constants.k_b) * rate_sq / spec.eta;
}

PhysQuantity sql_product_bound(const OscillatorSpec& spec, PhysQuantity omega_probe,
                               const ConstantsTable& constants) {
  PhysQuantity sql = sql_tradeoff(spec, omega_probe, constants);
  return sql * sql;
}

std::string_view to_string(CalcMode mode) {
  switch (mode) {
    case CalcMode::kFirstPrinciples: return "first-principles";
    case CalcMode::kPaperCalibrated: return "paper-calibrated";
  }
  return "?";
}

HeatingResult delta_T_dp_paper(PhysQuantity tau) {
  require_dimension(tau, dim::time, "tau");
  require_non_negative(tau, "tau");
  return {PhysQuantity(kDpPaperCoefficientKPerS * tau.value(), dim::temperature),
          CalcMode::kPaperCalibrated};
}

HeatingResult delta_T_csl_paper(PhysQuantity tau, PhysQuantity density,
                                PhysQuantity thickness, double lambda_scale) {
  require_dimension(tau, dim::time, "tau");
  require_non_negative(tau, "tau");
  require_positive(density, "density");
  if (lambda_scale < 0) {
    throw ValidationError("lambda_scale must be non-negative");
  }
  if (thickness.value() < kSigmaCslDefaultM) {
    throw ValidationError("thickness below sigma_csl; disk formula invalid");
  }
  // The calibrated coefficient is quoted against CGS density and thickness.
  const double rho_cgs = value_in(density, "g/cm^3");
  const double d_cm = value_in(thickness, "cm");
  return {PhysQuantity(kCslPaperCoefficient * tau.value() * rho_cgs / d_cm * lambda_scale,
                       dim::temperature),
          CalcMode::kPaperCalibrated};
}

PhysQuantity csl_lambda_bound(PhysQuantity tau, PhysQuantity density,
                              PhysQuantity thickness, PhysQuantity dt_max) {
  require_dimension(dt_max, dim::temperature, "dT_max");
  require_positive(dt_max, "dT_max");
  if (!(tau.value() > 0)) {
    throw ValidationError("tau = 0 yields no heating; any lambda is allowed");
  }
  HeatingResult reference = delta_T_csl_paper(tau, density, thickness, 1.0);
  return PhysQuantity(kLambdaCslReferenceHz, dim::rate) *
         (dt_max / reference.delta_t).value();
}

HeatingBudget HeatingBudget::make(PhysQuantity temperature, PhysQuantity dt_sp,
                                  PhysQuantity dt_m, bool monitored_steady_state) {
  require_dimension(temperature, dim::temperature, "temperature");
  require_non_negative(temperature, "temperature");
  require_non_negative(dt_sp, "dT_sp");
  require_non_negative(dt_m, "dT_m");
  PhysQuantity effective = temperature + dt_sp;
  if (monitored_steady_state) effective += dt_m;
  return {dt_sp, dt_m, temperature, effective};
}

}  // namespace spontheat
