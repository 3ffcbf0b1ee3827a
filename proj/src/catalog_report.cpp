#include "spontheat/catalog_report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

#include <nlohmann/json.hpp>

#include "spontheat/collapse_models.hpp"

namespace spontheat {

namespace {

constexpr std::array<std::string_view, 7> kColumns{
    "name", "mass_kg", "freq_hz", "quality", "temp_k", "density_kg_m3",
    "thickness_m"};

// Unit carried by each numeric column, resolved through the quantities
// layer so a bad suffix surfaces as an unknown-unit error.
constexpr std::array<std::string_view, 7> kColumnUnits{"", "kg", "Hz", "",
                                                       "K", "kg/m^3", "m"};

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::string current;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(current);
      current.clear();
    } else if (c != '\r') {
      current += c;
    }
  }
  fields.push_back(current);
  return fields;
}

double parse_positive(const std::string& text, int line_no,
                      std::string_view column) {
  std::size_t used = 0;
  double value = 0;
  try {
    value = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != text.size() || used == 0) {
    std::ostringstream msg;
    msg << "line " << line_no << ", column " << column << ": cannot parse \""
        << text << "\" as a number";
    throw ValidationError(msg.str());
  }
  if (!(value > 0)) {
    std::ostringstream msg;
    msg << "line " << line_no << ", column " << column << ": value " << value
        << " must be positive";
    throw ValidationError(msg.str());
  }
  return value;
}

std::string format_full(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.16e", v);
  return buf;
}

nlohmann::json record_json(const ExperimentRecord& r) {
  nlohmann::json j{{"name", r.name},
                   {"mass_kg", r.mass.value()},
                   {"freq_hz", r.freq_hz},
                   {"quality", r.quality},
                   {"temp_k", r.temperature.value()},
                   {"density_kg_m3", r.density.value()}};
  if (r.thickness) {
    j["thickness_m"] = r.thickness->value();
  } else {
    j["thickness_m"] = nullptr;
  }
  return j;
}

template <typename Emit>
void emit_to_path(const std::filesystem::path& path, Emit&& emit) {
  std::ofstream out(path);
  if (!out) {
    throw IoError("cannot open \"" + path.string() + "\" for writing");
  }
  emit(out);
  out.flush();
  if (!out) {
    throw IoError("write to \"" + path.string() + "\" failed");
  }
}

}  // namespace

PhysQuantity ExperimentRecord::omega() const {
  return PhysQuantity(2.0 * std::numbers::pi * freq_hz, dim::rate);
}

PhysQuantity ExperimentRecord::tau() const {
  return PhysQuantity(quality / (2.0 * std::numbers::pi * freq_hz), dim::time);
}

OscillatorSpec ExperimentRecord::oscillator() const {
  return OscillatorSpec::from_quality(mass, omega(), quality);
}

std::vector<ExperimentRecord> load_catalog(std::istream& in,
                                           std::string_view source_name) {
  std::string line;
  if (!std::getline(in, line)) {
    throw ValidationError(std::string(source_name) + ": empty file, header expected");
  }
  {
    auto header = split_csv(line);
    if (header.size() != kColumns.size()) {
      std::ostringstream msg;
      msg << source_name << ": header has " << header.size() << " columns, expected "
          << kColumns.size();
      throw ValidationError(msg.str());
    }
    for (std::size_t i = 0; i < kColumns.size(); ++i) {
      if (header[i] != kColumns[i]) {
        std::ostringstream msg;
        msg << source_name << ": header column " << i + 1 << " is \"" << header[i]
            << "\", expected \"" << kColumns[i] << "\"";
        throw ValidationError(msg.str());
      }
      // Resolve the column's unit; a bad suffix is an unknown-unit error.
      if (!kColumnUnits[i].empty()) unit_dimension(kColumnUnits[i]);
    }
  }

  std::vector<ExperimentRecord> records;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    auto fields = split_csv(line);
    if (fields.size() < 5) {
      std::ostringstream msg;
      msg << "line " << line_no << ": only " << fields.size()
          << " fields, columns through temp_k are required";
      throw ValidationError(msg.str());
    }
    if (fields.size() > kColumns.size()) {
      std::ostringstream msg;
      msg << "line " << line_no << ": " << fields.size() << " fields, at most "
          << kColumns.size() << " allowed";
      throw ValidationError(msg.str());
    }
    fields.resize(kColumns.size());

    ExperimentRecord r;
    r.name = fields[0];
    if (r.name.empty()) {
      std::ostringstream msg;
      msg << "line " << line_no << ", column name: must not be empty";
      throw ValidationError(msg.str());
    }
    r.mass = si_quantity(parse_positive(fields[1], line_no, "mass_kg"), "kg");
    r.freq_hz = parse_positive(fields[2], line_no, "freq_hz");
    r.quality = parse_positive(fields[3], line_no, "quality");
    r.temperature = si_quantity(parse_positive(fields[4], line_no, "temp_k"), "K");
    r.density =
        fields[5].empty()
            ? si_quantity(kDefaultDensityKgM3, "kg/m^3")
            : si_quantity(parse_positive(fields[5], line_no, "density_kg_m3"),
                          "kg/m^3");
    if (!fields[6].empty()) {
      r.thickness =
          si_quantity(parse_positive(fields[6], line_no, "thickness_m"), "m");
    }
    records.push_back(std::move(r));
  }
  return records;
}

std::vector<ExperimentRecord> load_catalog(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot open catalog \"" + path.string() + "\"");
  }
  return load_catalog(in, path.string());
}

double TableCell::dt_display() const { return std::pow(10.0, display_exponent); }

const TableCell& DpTable::cell(std::size_t freq_index,
                               std::size_t quality_index) const {
  return cells.at(freq_index * qualities.size() + quality_index);
}

int display_exponent_of(double dt_kelvin) {
  if (!(dt_kelvin > 0)) {
    throw ValidationError("display rounding needs a positive temperature");
  }
  return static_cast<int>(std::floor(std::log10(dt_kelvin) + 0.5));
}

DpTable dp_table(std::span<const double> freqs_hz, std::span<const double> qualities,
                 const DpTableOptions& options) {
  for (double f : freqs_hz) {
    if (!(f > 0)) throw ValidationError("frequencies must be positive");
  }
  for (double q : qualities) {
    if (!(q > 0)) throw ValidationError("qualities must be positive");
  }

  // First-principles mode shares the per-tau rate across all cells.
  double dt_per_tau = kDpPaperCoefficientKPerS;
  if (options.mode == CalcMode::kFirstPrinciples) {
    const auto& c = ConstantsTable::si();
    DpParams params = DpParams::make(si_quantity(options.sigma_dp_m, "m"),
                                     si_quantity(options.lattice_a_m, "m"),
                                     si_quantity(options.density_kg_m3, "kg/m^3"));
    PhysQuantity wg = omega_g(params, c);
    dt_per_tau = (c.hbar * wg * wg / (2.0 * c.k_b)).value();
  }

  DpTable table;
  table.freqs_hz.assign(freqs_hz.begin(), freqs_hz.end());
  table.qualities.assign(qualities.begin(), qualities.end());
  table.mode = options.mode;
  table.cells.reserve(freqs_hz.size() * qualities.size());
  for (double f : freqs_hz) {
    for (double q : qualities) {
      TableCell cell;
      cell.freq_hz = f;
      cell.quality = q;
      const double tau = q / (2.0 * std::numbers::pi * f);
      cell.dt_kelvin = dt_per_tau * tau;
      cell.display_exponent = display_exponent_of(cell.dt_kelvin);
      cell.classical =
          classicality(PhysQuantity(cell.dt_kelvin, dim::temperature),
                       PhysQuantity(2.0 * std::numbers::pi * f, dim::rate))
              .classical;
      cell.emphasized = cell.display_exponent >= -2;
      table.cells.push_back(cell);
    }
  }
  return table;
}

std::string_view to_string(CollapseModel model) {
  switch (model) {
    case CollapseModel::kDp: return "DP";
    case CollapseModel::kCsl: return "CSL";
  }
  return "?";
}

EvaluationRow evaluate(const ExperimentRecord& record, CollapseModel model,
                       const EvaluateOptions& options) {
  const auto& constants = ConstantsTable::si();
  EvaluationRow row;
  row.record = record;
  row.model = model;
  row.mode = options.mode;

  const PhysQuantity tau = record.tau();
  PhysQuantity dt(0.0, dim::temperature);
  if (model == CollapseModel::kDp) {
    if (options.mode == CalcMode::kPaperCalibrated) {
      dt = delta_T_dp_paper(tau).delta_t;
    } else {
      DpParams params = DpParams::make(si_quantity(options.sigma_dp_m, "m"),
                                       si_quantity(options.lattice_a_m, "m"),
                                       record.density);
      dt = delta_T(d_dp(record.mass, params, constants), record.oscillator(),
                   constants);
    }
  } else {
    if (!record.thickness) {
      throw ValidationError("record \"" + record.name +
                            "\" has no thickness; CSL evaluation refused");
    }
    if (options.mode == CalcMode::kPaperCalibrated) {
      dt = delta_T_csl_paper(tau, record.density, *record.thickness,
                             options.lambda_scale)
               .delta_t;
    } else {
      CslParams params = CslParams::make(
          PhysQuantity(options.lambda_scale * kLambdaCslReferenceHz, dim::rate),
          record.density, *record.thickness);
      dt = delta_T(d_csl(record.mass, params, constants), record.oscillator(),
                   constants);
    }
  }
  row.dt_kelvin = dt.value();
  row.classical = classicality(dt, record.omega(), constants).classical;
  return row;
}

double dp_mode_ratio(const DpTableOptions& options) {
  const auto& c = ConstantsTable::si();
  DpParams params = DpParams::make(si_quantity(options.sigma_dp_m, "m"),
                                   si_quantity(options.lattice_a_m, "m"),
                                   si_quantity(options.density_kg_m3, "kg/m^3"));
  PhysQuantity wg = omega_g(params, c);
  const double first_principles = (c.hbar * wg * wg / (2.0 * c.k_b)).value();
  return kDpPaperCoefficientKPerS / first_principles;
}

double csl_mode_ratio() {
  const auto& c = ConstantsTable::si();
  // First-principles coefficient per second of tau at 1 g/cm^3 density and
  // 1 cm thickness, against the calibrated 3.2e-6 K.
  PhysQuantity hbar_over_m0 = c.hbar / c.m0;
  const double first_principles =
      (PhysQuantity(kLambdaCslReferenceHz, dim::rate) * hbar_over_m0 *
       hbar_over_m0 * (4.0 * std::numbers::pi) *
       pow_int(si_quantity(kSigmaCslDefaultM, "m"), 2) *
       si_quantity(1.0, "g/cm^3") / si_quantity(1.0, "cm") / c.k_b *
       si_quantity(1.0, "s"))
          .value();
  return kCslPaperCoefficient / first_principles;
}

ReportFormat parse_report_format(std::string_view name) {
  if (name == "csv") return ReportFormat::kCsv;
  if (name == "json") return ReportFormat::kJson;
  if (name == "plotdata") return ReportFormat::kPlotData;
  throw ValidationError("unknown report format \"" + std::string(name) +
                        "\"; use csv, json or plotdata");
}

void emit_report(const DpTable& table, ReportFormat format, std::ostream& out) {
  switch (format) {
    case ReportFormat::kCsv: {
      out << "freq_hz,quality,dT_K,dT_display_K,classical,emphasized,mode\n";
      for (const auto& cell : table.cells) {
        out << format_full(cell.freq_hz) << ',' << format_full(cell.quality) << ','
            << format_full(cell.dt_kelvin) << ',' << format_full(cell.dt_display())
            << ',' << (cell.classical ? 1 : 0) << ',' << (cell.emphasized ? 1 : 0)
            << ',' << to_string(table.mode) << '\n';
      }
      break;
    }
    case ReportFormat::kJson: {
      nlohmann::json rows = nlohmann::json::array();
      for (const auto& cell : table.cells) {
        rows.push_back({{"freq_hz", cell.freq_hz},
                        {"quality", cell.quality},
                        {"dT", cell.dt_kelvin},
                        {"dT_display", cell.dt_display()},
                        {"classical", cell.classical},
                        {"emphasized", cell.emphasized},
                        {"mode", to_string(table.mode)}});
      }
      out << rows.dump(2) << '\n';
      break;
    }
    case ReportFormat::kPlotData: {
      // One block per quality: dT against frequency.
      for (std::size_t qi = 0; qi < table.qualities.size(); ++qi) {
        if (qi) out << '\n';
        out << "# series Q=" << format_full(table.qualities[qi]) << '\n';
        for (std::size_t fi = 0; fi < table.freqs_hz.size(); ++fi) {
          const auto& cell = table.cell(fi, qi);
          out << format_full(cell.freq_hz) << ' ' << format_full(cell.dt_kelvin)
              << '\n';
        }
      }
      break;
    }
  }
}

void emit_report(std::span<const EvaluationRow> rows, ReportFormat format,
                 std::ostream& out) {
  switch (format) {
    case ReportFormat::kCsv: {
      out << "name,mass_kg,freq_hz,quality,temp_k,density_kg_m3,thickness_m,"
             "model,mode,dT_K,classical,lambda_bound_hz\n";
      for (const auto& row : rows) {
        const auto& r = row.record;
        out << r.name << ',' << format_full(r.mass.value()) << ','
            << format_full(r.freq_hz) << ',' << format_full(r.quality) << ','
            << format_full(r.temperature.value()) << ','
            << format_full(r.density.value()) << ',';
        if (r.thickness) out << format_full(r.thickness->value());
        out << ',' << to_string(row.model) << ',' << to_string(row.mode) << ','
            << format_full(row.dt_kelvin) << ',' << (row.classical ? 1 : 0) << ',';
        if (row.lambda_bound_hz) out << format_full(*row.lambda_bound_hz);
        out << '\n';
      }
      break;
    }
    case ReportFormat::kJson: {
      nlohmann::json array = nlohmann::json::array();
      for (const auto& row : rows) {
        nlohmann::json j{{"record", record_json(row.record)},
                         {"model", to_string(row.model)},
                         {"mode", to_string(row.mode)},
                         {"dT", row.dt_kelvin},
                         {"classical", row.classical}};
        if (row.lambda_bound_hz) {
          j["lambda_bound"] = *row.lambda_bound_hz;
        } else {
          j["lambda_bound"] = nullptr;
        }
        array.push_back(std::move(j));
      }
      out << array.dump(2) << '\n';
      break;
    }
    case ReportFormat::kPlotData: {
      out << "# series dT vs frequency\n";
      for (const auto& row : rows) {
        out << format_full(row.record.freq_hz) << ' ' << format_full(row.dt_kelvin)
            << '\n';
      }
      break;
    }
  }
}

void emit_report(const DpTable& table, ReportFormat format,
                 const std::filesystem::path& path) {
  emit_to_path(path, [&](std::ostream& out) { emit_report(table, format, out); });
}

void emit_report(std::span<const EvaluationRow> rows, ReportFormat format,
                 const std::filesystem::path& path) {
  emit_to_path(path, [&](std::ostream& out) { emit_report(rows, format, out); });
}

}  // namespace spontheat
