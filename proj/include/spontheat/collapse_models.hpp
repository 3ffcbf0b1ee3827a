#pragma once

#include <string>
#include <vector>

#include "spontheat/quantities.hpp"

namespace spontheat {

enum class DiffusionSource { kDp, kCsl, kThermal, kMeasurement };

std::string_view to_string(DiffusionSource s);

// Momentum-diffusion constant, kg^2 m^2 s^-3, tagged with its origin.
struct DiffusionConstant {
  PhysQuantity value;
  DiffusionSource source;

  DiffusionConstant(PhysQuantity v, DiffusionSource s);
};

// DP-model parameters. sigma_dp is the free spatial-resolution parameter;
// the diffusion formula requires sigma_dp much smaller than the lattice
// constant, enforced here as sigma_dp <= lattice_a / 10.
struct DpParams {
  PhysQuantity sigma_dp;   // m
  PhysQuantity lattice_a;  // m
  PhysQuantity density;    // kg/m^3

  static DpParams make(PhysQuantity sigma_dp, PhysQuantity lattice_a,
                       PhysQuantity density);
};

// CSL-model parameters for the perpendicular diffusion of a disk.
// The formula needs thickness >= sigma_csl; the strongest effect is at
// thickness ~ sigma_csl.
struct CslParams {
  PhysQuantity lambda_csl;  // 1/s
  PhysQuantity sigma_csl;   // m
  PhysQuantity density;     // kg/m^3
  PhysQuantity thickness;   // m

  static CslParams make(PhysQuantity lambda_csl, PhysQuantity density,
                        PhysQuantity thickness);
  static CslParams make(PhysQuantity lambda_csl, PhysQuantity density,
                        PhysQuantity thickness, PhysQuantity sigma_csl);
};

// Conjectured/published parameter ranges used by the validator.
inline constexpr double kSigmaDpMinM = 1e-14;
inline constexpr double kSigmaDpMaxM = 1e-7;
inline constexpr double kLambdaCslMinHz = 2.2e-17;
// The published upper estimate spans two orders of magnitude either way;
// validation uses the most permissive edge and reports the band.
inline constexpr double kLambdaCslMaxHz = 2.2e-6;
inline constexpr double kLambdaCslReferenceHz = 2.2e-8;
inline constexpr double kSigmaCslDefaultM = 1e-7;

// Effective DP angular rate: omega_G = sqrt((4 pi G rho / 3) (a / (2 sqrt(pi) sigma))^3).
PhysQuantity omega_g(const DpParams& params,
                     const ConstantsTable& constants = ConstantsTable::si());

// DP diffusion constant (hbar/2) m omega_G^2.
DiffusionConstant d_dp(const PhysQuantity& mass, const DpParams& params,
                       const ConstantsTable& constants = ConstantsTable::si());

// CSL disk diffusion constant lambda (hbar/m0)^2 4 pi sigma^2 rho m / d.
DiffusionConstant d_csl(const PhysQuantity& mass, const CslParams& params,
                        const ConstantsTable& constants = ConstantsTable::si());

struct BoundCheck {
  std::string name;
  double value = 0.0;
  double lower = 0.0;  // -inf when one-sided
  double upper = 0.0;  // +inf when one-sided
  bool passed = false;
};

struct ValidationReport {
  std::vector<BoundCheck> checks;
  bool all_passed() const;
};

ValidationReport validate_params(const DpParams& params);
ValidationReport validate_params(const CslParams& params);

}  // namespace spontheat
