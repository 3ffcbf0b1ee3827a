#include "spontheat/collapse_models.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace spontheat {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

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

BoundCheck check(std::string name, double value, double lower, double upper) {
  return {std::move(name), value, lower, upper, value >= lower && value <= upper};
}

}  // namespace

std::string_view to_string(DiffusionSource s) {
  switch (s) {
    case DiffusionSource::kDp: return "DP";
    case DiffusionSource::kCsl: return "CSL";
    case DiffusionSource::kThermal: return "THERMAL";
    case DiffusionSource::kMeasurement: return "MEASUREMENT";
  }
  return "?";
}

DiffusionConstant::DiffusionConstant(PhysQuantity v, DiffusionSource s)
    : value(v), source(s) {
  require_dimension(v, dim::momentum_diffusion, "diffusion constant");
  if (v.value() < 0) {
    throw ValidationError("diffusion constant must be non-negative");
  }
}

DpParams DpParams::make(PhysQuantity sigma_dp, PhysQuantity lattice_a,
                        PhysQuantity density) {
  require_dimension(sigma_dp, dim::length, "sigma_dp");
  require_dimension(lattice_a, dim::length, "lattice_a");
  require_dimension(density, dim::mass_density, "density");
  require_positive(sigma_dp, "sigma_dp");
  require_positive(lattice_a, "lattice_a");
  require_positive(density, "density");
  if (sigma_dp.value() > lattice_a.value() / 10.0) {
    std::ostringstream msg;
    msg << "sigma_dp = " << sigma_dp.value() << " m exceeds lattice_a/10 = "
        << lattice_a.value() / 10.0 << " m; the diffusion formula needs sigma_dp << a";
    throw ValidationError(msg.str());
  }
  return {sigma_dp, lattice_a, density};
}

CslParams CslParams::make(PhysQuantity lambda_csl, PhysQuantity density,
                          PhysQuantity thickness) {
  return make(lambda_csl, density, thickness,
              si_quantity(kSigmaCslDefaultM, "m"));
}

CslParams CslParams::make(PhysQuantity lambda_csl, PhysQuantity density,
                          PhysQuantity thickness, PhysQuantity sigma_csl) {
  require_dimension(lambda_csl, dim::rate, "lambda_csl");
  require_dimension(density, dim::mass_density, "density");
  require_dimension(thickness, dim::length, "thickness");
  require_dimension(sigma_csl, dim::length, "sigma_csl");
  require_positive(lambda_csl, "lambda_csl");
  require_positive(density, "density");
  require_positive(sigma_csl, "sigma_csl");
  if (thickness.value() < sigma_csl.value()) {
    std::ostringstream msg;
    msg << "thickness = " << thickness.value() << " m is below sigma_csl = "
        << sigma_csl.value() << " m; the disk diffusion formula needs d >= sigma_csl";
    throw ValidationError(msg.str());
  }
  return {lambda_csl, sigma_csl, density, thickness};
}

PhysQuantity omega_g(const DpParams& params, const ConstantsTable& constants) {
  const double pi = std::numbers::pi;
  PhysQuantity ratio =
      params.lattice_a / (2.0 * std::sqrt(pi) * params.sigma_dp);
  PhysQuantity omega_sq =
      (4.0 * pi / 3.0) * constants.G * params.density * pow_int(ratio, 3);
  return sqrt(omega_sq);
}

DiffusionConstant d_dp(const PhysQuantity& mass, const DpParams& params,
                       const ConstantsTable& constants) {
  require_dimension(mass, dim::mass, "mass");
  require_positive(mass, "mass");
  PhysQuantity wg = omega_g(params, constants);
  return DiffusionConstant(0.5 * constants.hbar * mass * wg * wg,
                           DiffusionSource::kDp);
}

DiffusionConstant d_csl(const PhysQuantity& mass, const CslParams& params,
                        const ConstantsTable& constants) {
  require_dimension(mass, dim::mass, "mass");
  require_positive(mass, "mass");
  PhysQuantity hbar_over_m0 = constants.hbar / constants.m0;
  PhysQuantity value = params.lambda_csl * hbar_over_m0 * hbar_over_m0 *
                       (4.0 * std::numbers::pi) * params.sigma_csl * params.sigma_csl *
                       params.density * mass / params.thickness;
  return DiffusionConstant(value, DiffusionSource::kCsl);
}

bool ValidationReport::all_passed() const {
  for (const auto& c : checks) {
    if (!c.passed) return false;
  }
  return true;
}

ValidationReport validate_params(const DpParams& params) {
  ValidationReport report;
  const double sigma = params.sigma_dp.value();
  report.checks.push_back(
      check("sigma_dp >= 1e-14 m (conjectured lower edge)", sigma, kSigmaDpMinM, kInf));
  report.checks.push_back(
      check("sigma_dp <= 1e-7 m (conjectured upper edge)", sigma, -kInf, kSigmaDpMaxM));
  report.checks.push_back(check("sigma_dp <= lattice_a/10 (formula validity)", sigma,
                                -kInf, params.lattice_a.value() / 10.0));
  return report;
}

ValidationReport validate_params(const CslParams& params) {
  ValidationReport report;
  const double lambda = params.lambda_csl.value();
  report.checks.push_back(check("lambda_csl >= 2.2e-17 1/s (lower estimate)", lambda,
                                kLambdaCslMinHz, kInf));
  // The upper estimate is quoted with a two-decade uncertainty either way;
  // the check uses the most permissive edge of that band.
  report.checks.push_back(check("lambda_csl <= 2.2e-6 1/s (upper band edge)", lambda,
                                -kInf, kLambdaCslMaxHz));
  report.checks.push_back(check("thickness >= sigma_csl (formula validity)",
                                params.thickness.value(), params.sigma_csl.value(),
                                kInf));
  return report;
}

}  // namespace spontheat
