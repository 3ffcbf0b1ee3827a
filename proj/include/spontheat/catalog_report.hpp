#pragma once

#include <array>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "spontheat/quantities.hpp"
#include "spontheat/thermal_core.hpp"

namespace spontheat {

// One named oscillator experiment. Frequencies are ordinary (Hz); the
// derived ring-down time is tau = Q / (2 pi f).
struct ExperimentRecord {
  std::string name;
  PhysQuantity mass;         // kg
  double freq_hz = 0.0;
  double quality = 0.0;
  PhysQuantity temperature;  // K
  PhysQuantity density;      // kg/m^3, defaults to 2000
  std::optional<PhysQuantity> thickness;  // m, required for CSL evaluation

  PhysQuantity omega() const;  // 2 pi f, rad/s
  PhysQuantity tau() const;    // Q / (2 pi f), s
  OscillatorSpec oscillator() const;
};

inline constexpr std::string_view kCatalogHeader =
    "name,mass_kg,freq_hz,quality,temp_k,density_kg_m3,thickness_m";
inline constexpr double kDefaultDensityKgM3 = 2000.0;

// CSV catalog with the exact header above; empty trailing fields allowed.
std::vector<ExperimentRecord> load_catalog(std::istream& in,
                                           std::string_view source_name);
std::vector<ExperimentRecord> load_catalog(const std::filesystem::path& path);

// One cell of the heating table over (frequency, quality) axes.
struct TableCell {
  double freq_hz = 0.0;
  double quality = 0.0;
  double dt_kelvin = 0.0;    // unrounded
  int display_exponent = 0;  // dT rounded to the nearest power of ten
  bool classical = false;
  bool emphasized = false;   // display magnitude at or above 1e-2 K

  double dt_display() const;
};

struct DpTable {
  std::vector<double> freqs_hz;
  std::vector<double> qualities;
  CalcMode mode = CalcMode::kPaperCalibrated;
  std::vector<TableCell> cells;  // row-major: freqs x qualities

  const TableCell& cell(std::size_t freq_index, std::size_t quality_index) const;
};

// Axes of the published heating-magnitude table.
inline constexpr std::array<double, 6> kPaperTableFreqsHz{1e5, 1e4, 1e3, 1e2, 10.0, 1.0};
inline constexpr std::array<double, 5> kPaperTableQualities{1e2, 1e3, 1e4, 1e5, 1e6};

struct DpTableOptions {
  CalcMode mode = CalcMode::kPaperCalibrated;
  // Microscopic DP defaults: finest conjectured resolution, 500 pm lattice,
  // 2 g/cm^3 density. Overridable per run; used by first-principles mode.
  double sigma_dp_m = 1e-14;
  double lattice_a_m = 5e-10;
  double density_kg_m3 = kDefaultDensityKgM3;
};

DpTable dp_table(std::span<const double> freqs_hz, std::span<const double> qualities,
                 const DpTableOptions& options = {});

// Nearest power of ten in log10, ties rounding up: 6.4e-3 -> -2.
int display_exponent_of(double dt_kelvin);

enum class CollapseModel { kDp, kCsl };

std::string_view to_string(CollapseModel model);

struct EvaluateOptions {
  CalcMode mode = CalcMode::kPaperCalibrated;
  double lambda_scale = 1.0;  // lambda / 2.2e-8 s^-1
  double sigma_dp_m = 1e-14;
  double lattice_a_m = 5e-10;
};

struct EvaluationRow {
  ExperimentRecord record;
  CollapseModel model = CollapseModel::kDp;
  CalcMode mode = CalcMode::kPaperCalibrated;
  double dt_kelvin = 0.0;
  bool classical = false;
  std::optional<double> lambda_bound_hz;
};

// Heating of one experiment under one model. CSL evaluation refuses
// records without a thickness.
EvaluationRow evaluate(const ExperimentRecord& record, CollapseModel model,
                       const EvaluateOptions& options = {});

// Ratio of the calibrated coefficient to its first-principles evaluation,
// at the default microscopic parameters. These are the honesty figures of
// the toolkit: about 6.7 for DP and about 4 pi^2 for CSL.
double dp_mode_ratio(const DpTableOptions& options = {});
double csl_mode_ratio();

enum class ReportFormat { kCsv, kJson, kPlotData };

ReportFormat parse_report_format(std::string_view name);

// csv: header plus one line per cell/row, every numeric field with 17
//      significant digits, mode tag included.
// json: array of objects keyed by the field names.
// plotdata: blank-line-separated (x, y) blocks, one block per series.
void emit_report(const DpTable& table, ReportFormat format, std::ostream& out);
void emit_report(std::span<const EvaluationRow> rows, ReportFormat format,
                 std::ostream& out);
void emit_report(const DpTable& table, ReportFormat format,
                 const std::filesystem::path& path);
void emit_report(std::span<const EvaluationRow> rows, ReportFormat format,
                 const std::filesystem::path& path);

}  // namespace spontheat
