#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "spontheat/errors.hpp"

namespace spontheat {

// Exponent tuple over the base dimensions used by the toolkit.
// Example: momentum diffusion (kg^2 m^2 s^-3) is {2, 2, -3, 0}.
struct Dimension {
  std::int8_t mass = 0;
  std::int8_t length = 0;
  std::int8_t time = 0;
  std::int8_t temperature = 0;

  friend constexpr bool operator==(const Dimension&, const Dimension&) = default;
};

constexpr Dimension operator+(Dimension a, Dimension b) {
  return {static_cast<std::int8_t>(a.mass + b.mass),
          static_cast<std::int8_t>(a.length + b.length),
          static_cast<std::int8_t>(a.time + b.time),
          static_cast<std::int8_t>(a.temperature + b.temperature)};
}

constexpr Dimension operator-(Dimension a, Dimension b) {
  return {static_cast<std::int8_t>(a.mass - b.mass),
          static_cast<std::int8_t>(a.length - b.length),
          static_cast<std::int8_t>(a.time - b.time),
          static_cast<std::int8_t>(a.temperature - b.temperature)};
}

constexpr Dimension operator*(Dimension a, int k) {
  return {static_cast<std::int8_t>(a.mass * k), static_cast<std::int8_t>(a.length * k),
          static_cast<std::int8_t>(a.time * k),
          static_cast<std::int8_t>(a.temperature * k)};
}

// Human-readable form, e.g. "kg^2 m^2 s^-3" or "1" for dimensionless.
std::string to_string(Dimension d);

namespace dim {
inline constexpr Dimension none{};
inline constexpr Dimension mass{1, 0, 0, 0};
inline constexpr Dimension length{0, 1, 0, 0};
inline constexpr Dimension time{0, 0, 1, 0};
inline constexpr Dimension temperature{0, 0, 0, 1};
inline constexpr Dimension rate{0, 0, -1, 0};              // 1/s, also angular frequency
inline constexpr Dimension velocity{0, 1, -1, 0};
inline constexpr Dimension momentum{1, 1, -1, 0};
inline constexpr Dimension mass_density{1, -3, 0, 0};
inline constexpr Dimension action{1, 2, -1, 0};            // J s
inline constexpr Dimension energy{1, 2, -2, 0};
inline constexpr Dimension energy_per_temperature{1, 2, -2, -1};  // J/K
inline constexpr Dimension gravitational{-1, 3, -2, 0};    // m^3 kg^-1 s^-2
inline constexpr Dimension momentum_diffusion{2, 2, -3, 0};  // kg^2 m^2 s^-3
}  // namespace dim

// A real value carried together with its dimension. Arithmetic is
// dimension-checked at runtime; any operation that would produce or
// consume a NaN/Inf throws instead. Values are SI-canonical except
// transiently at I/O boundaries (see convert()).
class PhysQuantity {
 public:
  constexpr PhysQuantity() = default;
  PhysQuantity(double value, Dimension d);

  double value() const { return value_; }
  Dimension dimension() const { return dim_; }

  PhysQuantity& operator+=(const PhysQuantity& rhs);
  PhysQuantity& operator-=(const PhysQuantity& rhs);
  PhysQuantity& operator*=(const PhysQuantity& rhs);
  PhysQuantity& operator/=(const PhysQuantity& rhs);
  PhysQuantity operator-() const;

 private:
  double value_ = 0.0;
  Dimension dim_{};
};

PhysQuantity operator+(PhysQuantity a, const PhysQuantity& b);
PhysQuantity operator-(PhysQuantity a, const PhysQuantity& b);
PhysQuantity operator*(PhysQuantity a, const PhysQuantity& b);
PhysQuantity operator/(PhysQuantity a, const PhysQuantity& b);
PhysQuantity operator*(double s, PhysQuantity q);
PhysQuantity operator*(PhysQuantity q, double s);
PhysQuantity operator/(PhysQuantity q, double s);
PhysQuantity operator/(double s, const PhysQuantity& q);

// Square root; every dimension exponent must be even.
PhysQuantity sqrt(const PhysQuantity& q);
// Integer power (exponent may be negative).
PhysQuantity pow_int(const PhysQuantity& q, int k);

inline PhysQuantity dimensionless(double v) { return PhysQuantity(v, dim::none); }

// Unit names accepted at boundaries. Exact strings:
//   "m", "cm", "pm", "kg", "g", "s", "Hz", "K", "g/cm^3", "kg/m^3"
// Throws ValidationError for unknown names.
Dimension unit_dimension(std::string_view unit);

// Value given in `unit`, returned as an SI-canonical quantity.
PhysQuantity si_quantity(double value, std::string_view unit);

// Quantity re-expressed in `target_unit`. The returned object's value()
// is the number in that unit; use only at emission boundaries.
// Throws DimensionError when the unit's dimension differs from q's.
PhysQuantity convert(const PhysQuantity& q, std::string_view target_unit);

// Shorthand for convert(q, unit).value().
double value_in(const PhysQuantity& q, std::string_view unit);

// Fixed physical constants. The SI table carries CODATA values; the
// reduced table sets hbar = k_B = m0 = 1 (and G = 1) for simulator
// unit tests where SI magnitudes would be numerically hostile.
struct ConstantsTable {
  PhysQuantity hbar;  // J s
  PhysQuantity k_b;   // J/K
  PhysQuantity G;     // m^3 kg^-1 s^-2
  PhysQuantity m0;    // kg, atomic mass unit

  static const ConstantsTable& si();
  static const ConstantsTable& reduced();
};

}  // namespace spontheat
