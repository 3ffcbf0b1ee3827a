// Command-line front end: heating tables, catalog evaluation, collapse-rate
// bounds, trajectory simulation and the phase-space solver checks.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "spontheat/catalog_report.hpp"
#include "spontheat/collapse_models.hpp"
#include "spontheat/errors.hpp"
#include "spontheat/fp_grid.hpp"
#include "spontheat/langevin_sim.hpp"
#include "spontheat/quantities.hpp"
#include "spontheat/thermal_core.hpp"

namespace {

using namespace spontheat;

CalcMode parse_mode(const std::string& name) {
  if (name == "paper") return CalcMode::kPaperCalibrated;
  if (name == "first-principles") return CalcMode::kFirstPrinciples;
  throw ValidationError("unknown mode \"" + name + "\"; use paper or first-principles");
}

std::vector<double> decades_between(double lo, double hi) {
  if (!(lo > 0) || !(hi >= lo)) {
    throw ValidationError("need 0 < min <= max for decade axes");
  }
  std::vector<double> values;
  const int first = static_cast<int>(std::ceil(std::log10(lo) - 1e-9));
  const int last = static_cast<int>(std::floor(std::log10(hi) + 1e-9));
  for (int e = first; e <= last; ++e) values.push_back(std::pow(10.0, e));
  if (values.empty()) {
    throw ValidationError("no powers of ten between the requested bounds");
  }
  return values;
}

// key=value configuration files; '#' starts a comment.
std::map<std::string, std::string> read_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config \"" + path + "\"");
  std::map<std::string, std::string> entries;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    while (!line.empty() && (line.back() == ' ' || line.back() == '\r' ||
                             line.back() == '\t')) {
      line.pop_back();
    }
    std::size_t start = line.find_first_not_of(" \t");
    if (start == std::string::npos) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      std::ostringstream msg;
      msg << path << ":" << line_no << ": expected key=value, got \"" << line << "\"";
      throw ValidationError(msg.str());
    }
    std::string key = line.substr(start, eq - start);
    while (!key.empty() && (key.back() == ' ' || key.back() == '\t')) key.pop_back();
    std::string value = line.substr(eq + 1);
    const auto vstart = value.find_first_not_of(" \t");
    value = vstart == std::string::npos ? "" : value.substr(vstart);
    entries[key] = value;
  }
  return entries;
}

class ConfigReader {
 public:
  ConfigReader(std::map<std::string, std::string> entries, std::string source)
      : entries_(std::move(entries)), source_(std::move(source)) {}

  std::optional<std::string> get(const std::string& key) {
    auto it = entries_.find(key);
    if (it == entries_.end()) return std::nullopt;
    used_.insert(key);
    return it->second;
  }

  std::string require(const std::string& key) {
    auto v = get(key);
    if (!v) throw ValidationError(source_ + ": missing required key \"" + key + "\"");
    return *v;
  }

  double number(const std::string& key, std::optional<double> fallback = {}) {
    auto v = get(key);
    if (!v) {
      if (fallback) return *fallback;
      throw ValidationError(source_ + ": missing required key \"" + key + "\"");
    }
    try {
      std::size_t used = 0;
      const double parsed = std::stod(*v, &used);
      if (used != v->size()) throw std::invalid_argument("trailing characters");
      return parsed;
    } catch (const std::exception&) {
      throw ValidationError(source_ + ": cannot parse " + key + "=\"" + *v + "\"");
    }
  }

  void reject_unknown() const {
    for (const auto& [key, value] : entries_) {
      if (!used_.count(key)) {
        throw ValidationError(source_ + ": unknown key \"" + key + "\"");
      }
    }
  }

 private:
  std::map<std::string, std::string> entries_;
  std::set<std::string> used_;
  std::string source_;
};

const ConstantsTable& constants_for(const std::string& units) {
  if (units == "reduced") return ConstantsTable::reduced();
  if (units == "si") return ConstantsTable::si();
  throw ValidationError("units must be reduced or si, got \"" + units + "\"");
}

int run_dp_table(bool paper_axes, double fmin, double fmax, double qmin, double qmax,
                 const std::string& mode_name, const std::string& out_path,
                 const std::string& format_name) {
  DpTableOptions options;
  options.mode = parse_mode(mode_name);

  std::vector<double> freqs, qualities;
  if (paper_axes) {
    freqs.assign(kPaperTableFreqsHz.begin(), kPaperTableFreqsHz.end());
    qualities.assign(kPaperTableQualities.begin(), kPaperTableQualities.end());
  } else {
    freqs = decades_between(fmin, fmax);
    std::reverse(freqs.begin(), freqs.end());  // high to low, like the table
    qualities = decades_between(qmin, qmax);
  }

  DpTable table = dp_table(freqs, qualities, options);
  if (options.mode == CalcMode::kFirstPrinciples) {
    std::fprintf(stderr,
                 "note: first-principles mode; paper-calibrated values are %.3f"
                 " times larger at the default microscopic parameters\n",
                 dp_mode_ratio(options));
  }
  const ReportFormat format = parse_report_format(format_name);
  if (out_path.empty()) {
    emit_report(table, format, std::cout);
  } else {
    emit_report(table, format, std::filesystem::path(out_path));
  }
  return 0;
}

int run_evaluate(const std::string& catalog_path, const std::string& model_name,
                 const std::string& mode_name, double lambda_scale,
                 const std::string& out_path, const std::string& format_name) {
  CollapseModel model;
  if (model_name == "dp") {
    model = CollapseModel::kDp;
  } else if (model_name == "csl") {
    model = CollapseModel::kCsl;
  } else {
    throw ValidationError("unknown model \"" + model_name + "\"; use dp or csl");
  }
  EvaluateOptions options;
  options.mode = parse_mode(mode_name);
  options.lambda_scale = lambda_scale;

  auto records = load_catalog(std::filesystem::path(catalog_path));
  std::vector<EvaluationRow> rows;
  for (const auto& record : records) {
    if (model == CollapseModel::kCsl && !record.thickness) {
      std::fprintf(stderr, "skipping \"%s\": no thickness, CSL evaluation refused\n",
                   record.name.c_str());
      continue;
    }
    rows.push_back(evaluate(record, model, options));
  }
  if (rows.empty()) {
    throw ValidationError("no evaluable records in \"" + catalog_path + "\"");
  }
  if (options.mode == CalcMode::kFirstPrinciples) {
    const double ratio =
        model == CollapseModel::kDp ? dp_mode_ratio() : csl_mode_ratio();
    std::fprintf(stderr,
                 "note: first-principles mode; paper-calibrated values are %.3f"
                 " times larger\n",
                 ratio);
  }
  const ReportFormat format = parse_report_format(format_name);
  if (out_path.empty()) {
    emit_report(rows, format, std::cout);
  } else {
    emit_report(rows, format, std::filesystem::path(out_path));
  }
  return 0;
}

int run_bound_lambda(const std::string& catalog_path, const std::string& name,
                     double dtmax_kelvin) {
  auto records = load_catalog(std::filesystem::path(catalog_path));
  const ExperimentRecord* found = nullptr;
  for (const auto& record : records) {
    if (record.name == name) {
      found = &record;
      break;
    }
  }
  if (!found) {
    throw ValidationError("no record named \"" + name + "\" in the catalog");
  }
  if (!found->thickness) {
    throw ValidationError("record \"" + name + "\" has no thickness");
  }
  PhysQuantity bound =
      csl_lambda_bound(found->tau(), found->density, *found->thickness,
                       si_quantity(dtmax_kelvin, "K"));
  std::printf("record=%s dT_max_K=%.17g lambda_max_hz=%.17g\n", found->name.c_str(),
              dtmax_kelvin, bound.value());
  if (bound.value() < kLambdaCslMinHz) {
    std::printf("note: bound lies below the published lower estimate %.3g 1/s\n",
                kLambdaCslMinHz);
  } else if (bound.value() < kLambdaCslMaxHz) {
    std::printf("note: bound cuts into the published band [%.3g, %.3g] 1/s\n",
                kLambdaCslMinHz, kLambdaCslMaxHz);
  }
  return 0;
}

int run_simulate(const std::string& config_path) {
  ConfigReader config(read_config(config_path), config_path);
  const auto& constants = constants_for(
      config.get("units").value_or("reduced"));

  const double mass = config.number("mass");
  const double omega = config.number("omega");
  double eta;
  if (auto quality = config.get("quality")) {
    eta = omega / std::stod(*quality);
  } else {
    eta = config.number("eta");
  }
  auto spec = OscillatorSpec::from_damping(PhysQuantity(mass, dim::mass),
                                           PhysQuantity(omega, dim::rate),
                                           PhysQuantity(eta, dim::rate));

  SimConfig sim{
      spec,
      PhysQuantity(config.number("t_bath"), dim::temperature),
      DiffusionConstant(PhysQuantity(config.number("d_sp", 0.0),
                                     dim::momentum_diffusion),
                        DiffusionSource::kDp),
      DiffusionConstant(PhysQuantity(config.number("d_m", 0.0),
                                     dim::momentum_diffusion),
                        DiffusionSource::kMeasurement),
      PhysQuantity(config.number("dt"), dim::time),
      static_cast<std::int64_t>(config.number("n_steps")),
      static_cast<std::int64_t>(config.number("n_traj")),
      static_cast<std::uint64_t>(config.number("seed", 0.0)),
      InitialState{},
      Integrator::kEulerMaruyama,
      static_cast<int>(config.number("noise_substeps", 1.0))};

  const std::string initial = config.get("initial").value_or("gibbs");
  if (initial == "gibbs") {
    sim.initial = InitialState::gibbs(PhysQuantity(
        config.number("t0", sim.t_bath.value()), dim::temperature));
  } else if (initial == "delta") {
    sim.initial =
        InitialState::delta(PhysQuantity(config.number("x0", 0.0), dim::length),
                            PhysQuantity(config.number("p0", 0.0), dim::momentum));
  } else {
    throw ValidationError("initial must be gibbs or delta");
  }

  const std::string integrator = config.get("integrator").value_or("euler-maruyama");
  if (integrator == "euler-maruyama") {
    sim.integrator = Integrator::kEulerMaruyama;
  } else if (integrator == "exact-ou") {
    sim.integrator = Integrator::kExactOu;
  } else {
    throw ValidationError("integrator must be euler-maruyama or exact-ou");
  }

  TemperatureEstimator estimator = TemperatureEstimator::kPooled;
  if (auto name = config.get("estimator")) {
    if (*name == "from_x") {
      estimator = TemperatureEstimator::kFromX;
    } else if (*name == "from_p") {
      estimator = TemperatureEstimator::kFromP;
    } else if (*name == "pooled") {
      estimator = TemperatureEstimator::kPooled;
    } else {
      throw ValidationError("estimator must be from_x, from_p or pooled");
    }
  }

  std::vector<double> checkpoint_times;
  if (auto list = config.get("checkpoints")) {
    std::stringstream ss(*list);
    std::string token;
    while (std::getline(ss, token, ',')) {
      checkpoint_times.push_back(std::stod(token));
    }
  }
  const double horizon = sim.dt.value() * static_cast<double>(sim.n_steps);
  checkpoint_times.push_back(horizon);

  const auto dump_path = config.get("dump");
  config.reject_unknown();

  auto checkpoints = simulate_checkpoints(sim, checkpoint_times, constants);

  std::printf("# n_traj=%lld horizon=%.17g integrator=%s estimator=%s\n",
              static_cast<long long>(sim.n_traj), horizon,
              std::string(to_string(sim.integrator)).c_str(),
              std::string(to_string(estimator)).c_str());
  for (const auto& cp : checkpoints) {
    auto estimate = estimate_temperature(cp.samples, spec, estimator, constants);
    std::printf("t=%.17g T_hat=%.17g std_err=%.17g\n", cp.time, estimate.t_hat,
                estimate.std_err);
  }
  const auto& final_samples = checkpoints.back().samples;
  auto stats = compute_stats(final_samples);
  std::printf(
      "final: mean_x=%.17g (se %.3g) mean_p=%.17g (se %.3g) var_x=%.17g (se %.3g) "
      "var_p=%.17g (se %.3g) n=%lld\n",
      stats.mean_x.value, stats.mean_x.std_err, stats.mean_p.value,
      stats.mean_p.std_err, stats.var_x.value, stats.var_x.std_err,
      stats.var_p.value, stats.var_p.std_err,
      static_cast<long long>(stats.n_samples));

  if (dump_path) {
    std::ofstream out(*dump_path);
    if (!out) throw IoError("cannot open dump \"" + *dump_path + "\"");
    write_trajectory_dump(out, checkpoints);
    if (!out.good()) throw IoError("write to \"" + *dump_path + "\" failed");
  }
  return 0;
}

int run_fp_check(const std::string& config_path) {
  ConfigReader config(read_config(config_path), config_path);
  const auto& constants = constants_for(config.get("units").value_or("reduced"));

  auto spec = OscillatorSpec::from_damping(
      PhysQuantity(config.number("mass", 1.0), dim::mass),
      PhysQuantity(config.number("omega", 1.0), dim::rate),
      PhysQuantity(config.number("eta"), dim::rate));
  PhysQuantity t_bath(config.number("t_bath"), dim::temperature);
  DiffusionConstant spontaneous(
      PhysQuantity(config.number("d_sp"), dim::momentum_diffusion),
      DiffusionSource::kDp);
  const int nx = static_cast<int>(config.number("nx", 256.0));
  const int np = static_cast<int>(config.number("np", 256.0));
  const double duration_tau = config.number("duration_tau", 20.0);
  const double span = config.number("span_sigmas", 6.0);
  const auto snapshot_path = config.get("snapshot");
  config.reject_unknown();

  auto thermal = d_th(spec, t_bath, constants);
  PhysQuantity t_prime = stationary_temperature(t_bath, spontaneous, thermal);
  const DiffusionConstant both[] = {thermal, spontaneous};
  auto params = FpParams::make(spec, both);
  const double tau = spec.tau().value();

  bool all_passed = true;
  auto report = [&](const char* name, bool passed, const std::string& detail) {
    std::printf("%s: %s (%s)\n", passed ? "PASS" : "FAIL", name, detail.c_str());
    all_passed = all_passed && passed;
  };

  {
    auto coarse_geom = geometry_for(spec, t_prime, constants, nx / 2, np / 2, span);
    auto fine_geom = geometry_for(spec, t_prime, constants, nx, np, span);
    const double coarse = stationarity_residual(
        gibbs_density(coarse_geom, spec, t_prime, constants), params);
    const double fine = stationarity_residual(
        gibbs_density(fine_geom, spec, t_prime, constants), params);
    char detail[128];
    std::snprintf(detail, sizeof(detail), "coarse=%.3e fine=%.3e ratio=%.2f", coarse,
                  fine, coarse / fine);
    report("stationarity residual refines >= 3x", coarse / fine >= 3.0, detail);
  }

  {
    auto geom = geometry_for(spec, t_prime, constants, nx, np, span);
    auto start = gibbs_density(geom, spec, t_bath, constants);
    auto heated =
        evolve(start, params, PhysQuantity(duration_tau * tau, dim::time));
    auto m = heated.moments();
    const double kbt = constants.k_b.value() * t_prime.value();
    const double target_x =
        kbt / (spec.mass.value() * spec.omega.value() * spec.omega.value());
    const double target_p = kbt * spec.mass.value();
    const double err_x = std::abs(m.var_x / target_x - 1.0);
    const double err_p = std::abs(m.var_p / target_p - 1.0);
    char detail[160];
    std::snprintf(detail, sizeof(detail), "var_x rel err=%.2e var_p rel err=%.2e",
                  err_x, err_p);
    report("heated moments land on the shifted Gibbs state (1e-3)",
           err_x < 1e-3 && err_p < 1e-3, detail);
    std::snprintf(detail, sizeof(detail), "|mass-1|=%.2e", std::abs(heated.mass() - 1.0));
    report("mass conserved to 1e-6", std::abs(heated.mass() - 1.0) < 1e-6, detail);
    std::snprintf(detail, sizeof(detail), "boundary=%.2e clipped=%.2e",
                  heated.boundary_mass(), heated.clipped_mass());
    report("boundary and clipped mass stay below 1e-6 / 1e-9",
           heated.boundary_mass() < 1e-6 && heated.clipped_mass() < 1e-9, detail);

    if (snapshot_path) {
      std::ofstream out(*snapshot_path);
      if (!out) throw IoError("cannot open snapshot \"" + *snapshot_path + "\"");
      write_snapshot(out, heated);
    }
  }

  {
    auto geom = geometry_for(spec, t_prime, constants, nx, np, span);
    auto gibbs = gibbs_density(geom, spec, t_prime, constants);
    auto evolved = evolve(
        gibbs, params,
        PhysQuantity(std::min(5.0, duration_tau) * tau, dim::time));
    const double drift = evolved.max_abs_difference(gibbs) / gibbs.peak();
    char detail[96];
    std::snprintf(detail, sizeof(detail), "max drift=%.2e of peak", drift);
    report("Gibbs state is stationary (<1e-3 of peak)", drift < 1e-3, detail);
  }

  return all_passed ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spontaneous-heating toolkit for damped mechanical oscillators"};
  app.require_subcommand(1);

  // dp-table
  auto* dp_cmd = app.add_subcommand(
      "dp-table", "Heating magnitudes over (frequency, quality) decade axes");
  bool paper_axes = false;
  double fmin = 1.0, fmax = 1e5, qmin = 1e2, qmax = 1e6;
  std::string mode = "paper", out_path, format = "csv";
  dp_cmd->add_flag("--paper-axes", paper_axes,
                   "use the published 6x5 decade axes");
  dp_cmd->add_option("--fmin", fmin, "lowest frequency decade (Hz)");
  dp_cmd->add_option("--fmax", fmax, "highest frequency decade (Hz)");
  dp_cmd->add_option("--qmin", qmin, "lowest quality decade");
  dp_cmd->add_option("--qmax", qmax, "highest quality decade");
  dp_cmd->add_option("--mode", mode, "paper | first-principles");
  dp_cmd->add_option("--out", out_path, "output file (default stdout)");
  dp_cmd->add_option("--format", format, "csv | json | plotdata");

  // evaluate
  auto* eval_cmd =
      app.add_subcommand("evaluate", "Evaluate collapse heating per catalog record");
  std::string catalog_path, model = "dp", eval_mode = "paper", eval_out,
              eval_format = "csv";
  double lambda_scale = 1.0;
  eval_cmd->add_option("--catalog", catalog_path, "experiment catalog CSV")
      ->required();
  eval_cmd->add_option("--model", model, "dp | csl")->required();
  eval_cmd->add_option("--mode", eval_mode, "paper | first-principles");
  eval_cmd->add_option("--lambda-scale", lambda_scale,
                       "lambda / 2.2e-8 s^-1 (CSL only)");
  eval_cmd->add_option("--out", eval_out, "output file (default stdout)");
  eval_cmd->add_option("--format", eval_format, "csv | json | plotdata");

  // bound-lambda
  auto* bound_cmd = app.add_subcommand(
      "bound-lambda", "Largest CSL rate compatible with a heating ceiling");
  std::string bound_catalog, bound_name;
  double dtmax = 0.0;
  bound_cmd->add_option("--catalog", bound_catalog, "experiment catalog CSV")
      ->required();
  bound_cmd->add_option("--name", bound_name, "record name")->required();
  bound_cmd->add_option("--dtmax", dtmax, "heating ceiling in kelvin")->required();

  // simulate
  auto* sim_cmd =
      app.add_subcommand("simulate", "Langevin ensemble run from a config file");
  std::string sim_config;
  sim_cmd->add_option("--config", sim_config, "key=value config file")->required();

  // fp-check
  auto* fp_cmd = app.add_subcommand(
      "fp-check", "Phase-space solver stationarity and conservation checks");
  std::string fp_config;
  fp_cmd->add_option("--config", fp_config, "key=value config file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }

  try {
    if (dp_cmd->parsed()) {
      return run_dp_table(paper_axes, fmin, fmax, qmin, qmax, mode, out_path, format);
    }
    if (eval_cmd->parsed()) {
      return run_evaluate(catalog_path, model, eval_mode, lambda_scale, eval_out,
                          eval_format);
    }
    if (bound_cmd->parsed()) {
      return run_bound_lambda(bound_catalog, bound_name, dtmax);
    }
    if (sim_cmd->parsed()) {
      return run_simulate(sim_config);
    }
    if (fp_cmd->parsed()) {
      return run_fp_check(fp_config);
    }
  } catch (const IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
