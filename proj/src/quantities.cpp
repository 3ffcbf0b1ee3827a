#include "spontheat/quantities.hpp"

#include <array>
#include <cmath>
#include <sstream>

namespace spontheat {

namespace {

void append_power(std::ostringstream& out, const char* symbol, int exp, bool& first) {
  if (exp == 0) return;
  if (!first) out << ' ';
  first = false;
  out << symbol;
  if (exp != 1) out << '^' << exp;
}

void require_finite(double v, const char* what) {
  if (!std::isfinite(v)) {
    throw DimensionError(std::string("non-finite value in ") + what);
  }
}

struct UnitDef {
  std::string_view name;
  Dimension dim;
  double to_si;  // multiply a value in this unit by to_si to get SI
};

constexpr std::array<UnitDef, 10> kUnits{{
    {"m", dim::length, 1.0},
    {"cm", dim::length, 1e-2},
    {"pm", dim::length, 1e-12},
    {"kg", dim::mass, 1.0},
    {"g", dim::mass, 1e-3},
    {"s", dim::time, 1.0},
    {"Hz", dim::rate, 1.0},
    {"K", dim::temperature, 1.0},
    {"g/cm^3", dim::mass_density, 1000.0},
    {"kg/m^3", dim::mass_density, 1.0},
}};

const UnitDef& lookup_unit(std::string_view unit) {
  for (const auto& u : kUnits) {
    if (u.name == unit) return u;
  }
  throw ValidationError("unknown unit \"" + std::string(unit) + "\"");
}

}  // namespace

std::string to_string(Dimension d) {
  std::ostringstream out;
  bool first = true;
  append_power(out, "kg", d.mass, first);
  append_power(out, "m", d.length, first);
  append_power(out, "s", d.time, first);
  append_power(out, "K", d.temperature, first);
  if (first) return "1";
  return out.str();
}

PhysQuantity::PhysQuantity(double value, Dimension d) : value_(value), dim_(d) {
  require_finite(value, "quantity construction");
}

PhysQuantity& PhysQuantity::operator+=(const PhysQuantity& rhs) {
  if (dim_ != rhs.dim_) {
    throw DimensionError("cannot add " + to_string(dim_) + " and " + to_string(rhs.dim_));
  }
  value_ += rhs.value_;
  require_finite(value_, "addition");
  return *this;
}

PhysQuantity& PhysQuantity::operator-=(const PhysQuantity& rhs) {
  if (dim_ != rhs.dim_) {
    throw DimensionError("cannot subtract " + to_string(rhs.dim_) + " from " +
                         to_string(dim_));
  }
  value_ -= rhs.value_;
  require_finite(value_, "subtraction");
  return *this;
}

PhysQuantity& PhysQuantity::operator*=(const PhysQuantity& rhs) {
  value_ *= rhs.value_;
  dim_ = dim_ + rhs.dim_;
  require_finite(value_, "multiplication");
  return *this;
}

PhysQuantity& PhysQuantity::operator/=(const PhysQuantity& rhs) {
  value_ /= rhs.value_;
  dim_ = dim_ - rhs.dim_;
  require_finite(value_, "division");
  return *this;
}

PhysQuantity PhysQuantity::operator-() const { return PhysQuantity(-value_, dim_); }

PhysQuantity operator+(PhysQuantity a, const PhysQuantity& b) { return a += b; }
PhysQuantity operator-(PhysQuantity a, const PhysQuantity& b) { return a -= b; }
PhysQuantity operator*(PhysQuantity a, const PhysQuantity& b) { return a *= b; }
PhysQuantity operator/(PhysQuantity a, const PhysQuantity& b) { return a /= b; }

PhysQuantity operator*(double s, PhysQuantity q) { return q *= dimensionless(s); }
PhysQuantity operator*(PhysQuantity q, double s) { return q *= dimensionless(s); }
PhysQuantity operator/(PhysQuantity q, double s) { return q /= dimensionless(s); }
PhysQuantity operator/(double s, const PhysQuantity& q) {
  return dimensionless(s) / q;
}

PhysQuantity sqrt(const PhysQuantity& q) {
  Dimension d = q.dimension();
  if (d.mass % 2 || d.length % 2 || d.time % 2 || d.temperature % 2) {
    throw DimensionError("sqrt of " + to_string(d) + " has fractional exponents");
  }
  if (q.value() < 0) {
    throw DimensionError("sqrt of negative quantity");
  }
  return PhysQuantity(std::sqrt(q.value()),
                      {static_cast<std::int8_t>(d.mass / 2),
                       static_cast<std::int8_t>(d.length / 2),
                       static_cast<std::int8_t>(d.time / 2),
                       static_cast<std::int8_t>(d.temperature / 2)});
}

PhysQuantity pow_int(const PhysQuantity& q, int k) {
  return PhysQuantity(std::pow(q.value(), k), q.dimension() * k);
}

Dimension unit_dimension(std::string_view unit) { return lookup_unit(unit).dim; }

PhysQuantity si_quantity(double value, std::string_view unit) {
  const UnitDef& u = lookup_unit(unit);
  return PhysQuantity(value * u.to_si, u.dim);
}

PhysQuantity convert(const PhysQuantity& q, std::string_view target_unit) {
  const UnitDef& u = lookup_unit(target_unit);
  if (u.dim != q.dimension()) {
    throw DimensionError("cannot convert " + to_string(q.dimension()) + " to \"" +
                         std::string(target_unit) + "\" (" + to_string(u.dim) + ")");
  }
  return PhysQuantity(q.value() / u.to_si, q.dimension());
}

double value_in(const PhysQuantity& q, std::string_view unit) {
  return convert(q, unit).value();
}

const ConstantsTable& ConstantsTable::si() {
  static const ConstantsTable table{
      PhysQuantity(1.054571817e-34, dim::action),
      PhysQuantity(1.380649e-23, dim::energy_per_temperature),
      PhysQuantity(6.674e-11, dim::gravitational),
      PhysQuantity(1.66053907e-27, dim::mass),
  };
  return table;
}

const ConstantsTable& ConstantsTable::reduced() {
  static const ConstantsTable table{
      PhysQuantity(1.0, dim::action),
      PhysQuantity(1.0, dim::energy_per_temperature),
      PhysQuantity(1.0, dim::gravitational),
      PhysQuantity(1.0, dim::mass),
  };
  return table;
}

}  // namespace spontheat
