#include "qhd/lab/runner.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

#include "qhd/binary_io.hpp"
#include "qhd/kinetics.hpp"
#include "qhd/lab/check.hpp"
#include "qhd/madelung_engine.hpp"
#include "qhd/observables.hpp"
#include "qhd/snapshot.hpp"
#include "qhd/states.hpp"

#ifndef QHD_VERSION_STRING
#define QHD_VERSION_STRING "0.0.0"
#endif

namespace qhd::lab {

namespace fs = std::filesystem;
using io::format_double;

const char* version() { return QHD_VERSION_STRING; }

namespace {

struct FieldSetup {
  LatticeGrid grid;
  PotentialSpec potential;
  std::vector<double> sampled;
  WaveField initial;
  double dt;
};

std::vector<std::pair<double, double>> read_table(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot read '" + path.string() + "'");
  std::vector<std::pair<double, double>> rows;
  for (std::string line; std::getline(in, line);) {
    const auto cut = line.find('#');
    if (cut != std::string::npos) line.resize(cut);
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ls(line);
    double x = 0.0;
    double v = 0.0;
    if (!(ls >> x)) continue;
    if (!(ls >> v)) throw ValidationError("'" + path.string() + "': expected two columns");
    rows.emplace_back(x, v);
  }
  return rows;
}

std::vector<double> tile(const std::vector<double>& per_particle, std::size_t n, std::size_t d) {
  std::vector<double> out;
  if (per_particle.empty()) return out;
  if (per_particle.size() == n * d) return per_particle;
  if (per_particle.size() != d)
    throw ValidationError("expected " + std::to_string(d) + " or " + std::to_string(n * d) +
                          " components");
  for (std::size_t i = 0; i < n; ++i) out.insert(out.end(), per_particle.begin(), per_particle.end());
  return out;
}

PotentialSpec build_potential(const ExperimentConfig& c) {
  PotentialSpec spec;
  if (c.external == "harmonic") {
    if (!c.center.empty() && c.center.size() != c.dims_per_particle)
      throw ValidationError("[potential] center: one component per particle axis");
    spec = PotentialSpec::harmonic(c.mass, c.omega, c.center);
  } else if (c.external == "samples") {
    if (c.dims_per_particle != 1)
      throw ValidationError("[potential] external_file: samples need d = 1");
    std::vector<double> xs, vs;
    for (const auto& [x, v] : read_table(c.external_file)) {
      xs.push_back(x);
      vs.push_back(v);
    }
    spec.with_external(tabulated_external(xs, vs, c.lengths.at(0)), "samples");
  }
  if (c.pairwise == "radial") {
    std::vector<double> rs, vs;
    for (const auto& [r, v] : read_table(c.pairwise_file)) {
      rs.push_back(r);
      vs.push_back(v);
    }
    spec.with_pairwise(tabulated_radial(rs, vs), "radial");
  }
  return spec;
}

WaveField build_initial(const ExperimentConfig& c, const LatticeGrid& grid) {
  const std::size_t n = c.n_particles;
  const std::size_t d = c.dims_per_particle;
  if (c.initial == "plane_wave") return plane_wave(grid, tile(c.wavenumbers, n, d), c.hbar, c.mass);
  if (c.initial == "gaussian" || c.initial == "periodic_gaussian") {
    GaussianPacket packet{tile(c.widths, n, d), tile(c.centers, n, d), tile(c.wavenumbers, n, d)};
    for (std::size_t a = 0; a < packet.wavenumbers.size(); ++a)
      if (!is_grid_mode(grid, a, packet.wavenumbers[a]))
        throw CommensurabilityError("[initial_state] k: not a grid mode on axis " + std::to_string(a));
    return c.initial == "gaussian" ? gaussian(grid, packet, c.hbar, c.mass)
                                   : periodic_gaussian(grid, packet, c.hbar, c.mass);
  }
  if (c.initial == "harmonic")
    return harmonic_ground_state(grid, c.hbar, c.mass, c.omega, tile(c.center, n, d));
  if (c.initial == "uniform")
    return WaveField::normalized(grid, std::vector<Complex>(grid.size(), Complex(1.0, 0.0)), c.hbar,
                                 c.mass);
  const auto snap = load_snapshot(c.initial_file);
  if (snap.kind == SnapshotKind::complex) {
    auto psi = wavefield_from_snapshot(snap, n, c.hbar, c.mass);
    if (!(psi.grid() == grid)) throw ValidationError("[initial_state] file: grid differs from [grid]");
    return psi;
  }
  if (snap.kind == SnapshotKind::pair) {
    auto psi = to_wavefield(pair_from_snapshot(snap, n, c.hbar), c.mass);
    if (!(psi.grid() == grid)) throw ValidationError("[initial_state] file: grid differs from [grid]");
    return psi;
  }
  throw FormatError("[initial_state] file: expected a complex or pair snapshot");
}

FieldSetup build_field_setup(const ExperimentConfig& c) {
  LatticeGrid grid(c.n_particles, c.dims_per_particle, c.points, c.lengths,
                   c.allow_high_rank ? RankPolicy::allow_high_rank : RankPolicy::capped);
  auto potential = build_potential(c);
  auto sampled = potential.sample(grid);
  for (double v : sampled)
    if (!std::isfinite(v)) throw ValidationError("[potential]: sampled potential is not finite");
  auto initial = build_initial(c, grid);
  const double dt = c.dt.value_or(default_time_step(grid, c.hbar, c.mass));
  return {std::move(grid), std::move(potential), std::move(sampled), std::move(initial), dt};
}

EvolveConfig evolve_config(const ExperimentConfig& c, double dt) {
  EvolveConfig e;
  e.dt = dt;
  e.steps = c.steps;
  e.record_every = c.record_every;
  e.nonlinear = c.nonlinear;
  e.dealias = c.dealias;
  e.spectral_filter = c.spectral_filter;
  e.validate();
  return e;
}

class Outputs {
 public:
  Outputs(const ExperimentConfig& c, RunOutcome& outcome) : c_(c), outcome_(outcome) {
    fs::create_directories(c.directory);
  }

  std::vector<std::string> provenance() const {
    return {std::string("qhdlab ") + version(), "config_hash fnv1a64:" + c_.hash(),
            std::string("engine ") + to_string(c_.engine)};
  }

  std::ofstream open(const std::string& name) {
    const auto path = c_.directory / name;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw FormatError("cannot write '" + path.string() + "'");
    outcome_.outputs.push_back(path);
    return out;
  }

  void diagnostics(const std::string& name, const std::vector<DiagnosticsRecord>& records) {
    if (!c_.write_csv) return;
    auto out = open(name);
    write_diagnostics_csv(out, records, c_.n_particles, provenance());
  }

  void csv(const std::string& name, const std::string& header, const std::vector<std::string>& rows) {
    if (!c_.write_csv) return;
    auto out = open(name);
    for (const auto& line : provenance()) out << "# " << line << '\n';
    out << header << '\n';
    for (const auto& r : rows) out << r << '\n';
  }

  void snapshot(const std::string& name, const Snapshot& snap) {
    if (!c_.write_snapshot) return;
    auto out = open(name);
    write_snapshot(out, snap);
  }

  /// Whitespace-separated columns: coordinates then values; blank line
  /// between rows of a 2D field.
  void plot(const std::string& name, const LatticeGrid& grid,
            const std::vector<std::pair<std::string, std::vector<double>>>& columns) {
    if (!c_.write_plot || grid.rank() > 2) return;
    auto out = open(name);
    out << "#";
    for (std::size_t a = 0; a < grid.rank(); ++a) out << " x" << a;
    for (const auto& [label, _] : columns) out << ' ' << label;
    out << '\n';
    std::vector<double> x(grid.rank());
    for (std::size_t p = 0; p < grid.size(); ++p) {
      if (grid.rank() == 2 && p > 0 && grid.index_along(p, 1) == 0) out << '\n';
      grid.coordinates(p, x);
      for (std::size_t a = 0; a < x.size(); ++a) out << (a ? " " : "") << format_double(x[a]);
      for (const auto& [_, values] : columns) out << ' ' << format_double(values[p]);
      out << '\n';
    }
  }

  void raw_plot(const std::string& name, const std::string& header,
                const std::vector<std::string>& rows) {
    if (!c_.write_plot) return;
    auto out = open(name);
    out << "# " << header << '\n';
    for (const auto& r : rows) out << r << '\n';
  }

 private:
  const ExperimentConfig& c_;
  RunOutcome& outcome_;
};

void plot_wave(Outputs& out, const WaveField& psi) {
  std::vector<double> re, im;
  for (const auto& z : psi.values()) {
    re.push_back(z.real());
    im.push_back(z.imag());
  }
  out.plot("final.dat", psi.grid(), {{"rho", psi.density()}, {"re", re}, {"im", im}});
}

void plot_pair(Outputs& out, const MadelungPair& pair) {
  out.plot("final.dat", pair.grid(),
           {{"rho", {pair.rho().begin(), pair.rho().end()}},
            {"S", {pair.phase().begin(), pair.phase().end()}}});
}

void run_schrodinger(const ExperimentConfig& c, RunOutcome& outcome) {
  auto setup = build_field_setup(c);
  const auto cfg = evolve_config(c, setup.dt);
  Outputs out(c, outcome);
  auto result = evolve(setup.initial, setup.sampled, cfg);
  out.diagnostics("schrodinger.csv", result.records);
  out.snapshot("final.qhd1", make_snapshot(result.state));
  plot_wave(out, result.state);
  outcome.status = result.status;
  outcome.detail = result.detail;
  if (!result.records.empty()) {
    const auto& last = result.records.back();
    outcome.summary.push_back("final_norm=" + format_double(last.norm));
    outcome.summary.push_back("final_H_eq40=" + format_double(last.h_eq40));
  }
}

void run_madelung(const ExperimentConfig& c, RunOutcome& outcome) {
  auto setup = build_field_setup(c);
  const auto cfg = evolve_config(c, setup.dt);
  const auto pair = to_madelung(setup.initial);
  const auto params = ConstitutiveParams::quantum(c.hbar, c.mass, c.nonlinear);
  Outputs out(c, outcome);
  auto result = evolve_madelung(pair, c.mass, setup.sampled, params, cfg);
  out.diagnostics("madelung.csv", result.records);
  out.snapshot("final.qhd1", make_snapshot(result.state));
  plot_pair(out, result.state);
  outcome.status = result.status;
  outcome.detail = result.detail;
  if (!result.records.empty()) {
    const auto& last = result.records.back();
    outcome.summary.push_back("final_mass=" + format_double(last.norm));
    outcome.summary.push_back("final_H_total=" + format_double(last.h_total));
  }
}

void run_compare(const ExperimentConfig& c, RunOutcome& outcome) {
  auto setup = build_field_setup(c);
  auto cfg = evolve_config(c, setup.dt);
  cfg.keep_snapshots = true;
  const auto pair = to_madelung(setup.initial);
  const auto params = ConstitutiveParams::quantum(c.hbar, c.mass, c.nonlinear);
  Outputs out(c, outcome);
  const auto wave = evolve(setup.initial, setup.sampled, cfg);
  const auto hydro = evolve_madelung(pair, c.mass, setup.sampled, params, cfg);
  out.diagnostics("schrodinger.csv", wave.records);
  out.diagnostics("madelung.csv", hydro.records);

  std::vector<std::string> rows;
  double worst = 0.0;
  const std::size_t n = std::min(wave.snapshots.size(), hydro.snapshots.size());
  for (std::size_t k = 0; k < n; ++k) {
    const auto a = wave.snapshots[k].density();
    const auto b = hydro.snapshots[k].rho();
    double s = 0.0;
    for (std::size_t p = 0; p < a.size(); ++p) s += (a[p] - b[p]) * (a[p] - b[p]);
    const double dist = std::sqrt(s * setup.grid.cell_volume());
    worst = std::max(worst, dist);
    rows.push_back(std::to_string(wave.records[k].step) + "," + format_double(wave.records[k].time) +
                   "," + format_double(dist));
  }
  out.csv("compare.csv", "step,time,l2_rho_distance", rows);
  out.snapshot("final_schrodinger.qhd1", make_snapshot(wave.state));
  out.snapshot("final_madelung.qhd1", make_snapshot(hydro.state));
  outcome.summary.push_back("max_l2_rho_distance=" + format_double(worst));
  if (wave.status != RunStatus::completed) {
    outcome.status = wave.status;
    outcome.detail = "schrodinger: " + wave.detail;
  } else if (hydro.status != RunStatus::completed) {
    outcome.status = hydro.status;
    outcome.detail = "madelung: " + hydro.detail;
  }
}

void run_groundstate(const ExperimentConfig& c, RunOutcome& outcome) {
  auto setup = build_field_setup(c);
  auto cfg = evolve_config(c, setup.dt);
  cfg.imaginary_time = true;
  Outputs out(c, outcome);
  const auto gs = ground_state(setup.sampled, cfg, setup.initial, c.tolerance, c.steps);
  auto first = wave_diagnostics(setup.initial, setup.sampled, c.nonlinear);
  first.step = 0;
  first.time = 0.0;
  first.norm = setup.initial.norm();
  auto last = wave_diagnostics(gs.state, setup.sampled, c.nonlinear);
  last.step = gs.steps;
  last.time = double(gs.steps) * setup.dt;
  last.norm = gs.state.norm();
  out.diagnostics("groundstate.csv", {first, last});
  std::vector<std::string> rows;
  for (std::size_t k = 0; k < gs.energy_history.size(); ++k)
    if (k % c.record_every == 0 || k + 1 == gs.energy_history.size())
      rows.push_back(std::to_string(k) + "," + format_double(gs.energy_history[k]));
  out.csv("energy.csv", "step,energy", rows);
  out.snapshot("final.qhd1", make_snapshot(gs.state));
  plot_wave(out, gs.state);
  outcome.summary.push_back("steps=" + std::to_string(gs.steps));
  outcome.summary.push_back("energy=" + format_double(gs.energy));
}

void run_kinetics(const ExperimentConfig& c, RunOutcome& outcome) {
  EnsembleSpec spec;
  spec.count = c.monads;
  spec.dims = c.monad_dims;
  spec.mu = c.monad_mass;
  spec.box = c.box;
  spec.temperature = c.temperature;
  spec.axis_temperatures = c.axis_temperatures;
  spec.drift = c.drift;
  spec.density_amplitude = c.density_amplitude;
  spec.seed = c.seed;
  MonadPotential force;
  if (c.force == "uniform") force = MonadPotential::uniform(c.force_vector);
  if (c.force == "harmonic") force = MonadPotential::harmonic(c.stiffness);
  const CollisionSettings settings{c.cells, c.collision_rate};
  const double dt = *c.dt;
  auto ens = sample_ensemble(spec);
  Outputs out(c, outcome);

  std::string header = "step,time,count";
  for (std::size_t a = 0; a < c.monad_dims; ++a) header += ",P_" + std::to_string(a + 1);
  header += ",kinetic_energy,collisions,max_event_momentum_error,max_event_energy_error";
  std::vector<std::string> rows;
  auto row = [&](const CollisionStats* stats) {
    std::string r = std::to_string(ens.step) + "," + format_double(double(ens.step) * dt) + "," +
                    std::to_string(ens.count());
    for (double p : ens.total_momentum()) r += "," + format_double(p);
    r += "," + format_double(ens.kinetic_energy());
    r += "," + std::to_string(stats ? stats->accepted : 0);
    r += "," + format_double(stats ? stats->max_event_momentum_error : 0.0);
    r += "," + format_double(stats ? stats->max_event_energy_error : 0.0);
    rows.push_back(r);
  };
  std::vector<SplitMoments> series{project_split(ens, c.cells, force, c.min_count)};
  row(nullptr);
  for (std::size_t s = 1; s <= c.steps; ++s) {
    auto step = advance(ens, force, settings, dt);
    ens = std::move(step.ensemble);
    if (s % c.sample_every == 0) series.push_back(project_split(ens, c.cells, force, c.min_count));
    if (s % c.record_every == 0 || s == c.steps) row(&step.stats);
  }
  out.csv("kinetics.csv", header, rows);

  if (series.size() >= 3) {
    const auto res = moment_residuals(series, dt * double(c.sample_every));
    std::vector<std::string> lines;
    auto line = [&](const std::string& name, const ResidualNorm& r) {
      lines.push_back(name + "," + format_double(r.l2) + "," + format_double(r.noise_floor) + "," +
                      format_double(r.ratio()) + "," + format_double(r.normalized()));
      outcome.summary.push_back(name + "_ratio=" + format_double(r.ratio()));
    };
    line("continuity", res.continuity);
    for (std::size_t a = 0; a < res.momentum.size(); ++a)
      line("momentum_" + std::to_string(a + 1), res.momentum[a]);
    line("energy", res.energy);
    out.csv("residuals.csv", "equation,l2,noise_floor,ratio,normalized", lines);
  }

  if (c.write_snapshot) {
    auto f = out.open("final.mon1");
    write_ensemble(f, ens);
  }
  const auto& m = series.back().full;
  std::vector<std::string> cells;
  for (std::size_t cell = 0; cell < m.cell_count(); ++cell) {
    std::string r;
    for (double x : m.cell_center(cell)) r += format_double(x) + " ";
    r += format_double(m.density[cell]);
    for (std::size_t a = 0; a < m.dims; ++a) r += " " + format_double(m.velocity[cell * m.dims + a]);
    r += " " + format_double(m.internal_energy[cell]);
    cells.push_back(r);
  }
  out.raw_plot("moments.dat", "cell center, density, u, internal energy", cells);
  outcome.summary.push_back("final_kinetic_energy=" + format_double(ens.kinetic_energy()));
}

void run_check_engine(const ExperimentConfig& c, RunOutcome& outcome) {
  const auto results = run_checks();
  Outputs out(c, outcome);
  std::vector<std::string> rows;
  for (const auto& r : results)
    rows.push_back("\"" + r.name + "\"," + (r.pass ? "pass" : "fail") + "," + format_double(r.measured) +
                   "," + format_double(r.tolerance));
  out.csv("check.csv", "name,result,measured,tolerance", rows);
  std::ostringstream report;
  outcome.check_exit = report_checks(results, report);
  std::istringstream lines(report.str());
  for (std::string l; std::getline(lines, l);) outcome.summary.push_back(l);
}

}  // namespace

RunOutcome execute(const ExperimentConfig& config) {
  RunOutcome outcome;
  switch (config.engine) {
    case Engine::schrodinger: run_schrodinger(config, outcome); break;
    case Engine::madelung: run_madelung(config, outcome); break;
    case Engine::compare: run_compare(config, outcome); break;
    case Engine::groundstate: run_groundstate(config, outcome); break;
    case Engine::kinetics: run_kinetics(config, outcome); break;
    case Engine::check: run_check_engine(config, outcome); break;
  }
  return outcome;
}

int exit_code_for(ErrorKind kind) {
  if (kind == ErrorKind::SeriesTooShort) return kExitValidation;
  return is_numerical(kind) ? kExitNumerical : kExitValidation;
}

void print_error(std::ostream& err, std::string_view kind, std::string_view message) {
  std::string escaped;
  for (char ch : message) {
    if (ch == '"' || ch == '\\') escaped += '\\';
    escaped += ch == '\n' ? ' ' : ch;
  }
  err << "qhdlab: error kind=" << kind << " message=\"" << escaped << "\"\n";
}

int run_command(const fs::path& config, std::ostream& out, std::ostream& err) {
  try {
    const auto cfg = load_config(config);
    const auto outcome = execute(cfg);
    for (const auto& line : outcome.summary) out << line << '\n';
    for (const auto& path : outcome.outputs) out << "wrote " << path.string() << '\n';
    if (outcome.status == RunStatus::node_formation) {
      print_error(err, to_string(ErrorKind::NodeFormation), outcome.detail);
      return kExitNumerical;
    }
    if (outcome.status == RunStatus::non_finite) {
      print_error(err, to_string(ErrorKind::NonFinite), outcome.detail);
      return kExitNumerical;
    }
    return outcome.check_exit;
  } catch (const Error& e) {
    print_error(err, to_string(e.kind()), e.what());
    return exit_code_for(e.kind());
  } catch (const fs::filesystem_error& e) {
    print_error(err, "IoError", e.what());
    return kExitValidation;
  }
}

int check_command(std::ostream& out, std::ostream& err) {
  try {
    return report_checks(run_checks(), out);
  } catch (const Error& e) {
    print_error(err, to_string(e.kind()), e.what());
    return kExitCheckFailed;
  }
}

int convert_command(const fs::path& snapshot, const std::string& to,
                    const std::optional<fs::path>& output, std::ostream& out, std::ostream& err) {
  try {
    if (to != "csv") throw ValidationError("convert: unsupported target '" + to + "'");
    const auto snap = load_snapshot(snapshot);
    std::ostringstream csv;
    for (std::size_t a = 0; a < snap.dims.size(); ++a) csv << (a ? "," : "") << "x" << a;
    switch (snap.kind) {
      case SnapshotKind::complex: csv << ",re,im\n"; break;
      case SnapshotKind::real: csv << ",value\n"; break;
      case SnapshotKind::pair: csv << ",rho,S\n"; break;
    }
    const std::size_t n = snap.points();
    std::vector<std::size_t> index(snap.dims.size(), 0);
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t a = 0; a < index.size(); ++a) {
        const double h = snap.lengths[a] / double(snap.dims[a]);
        csv << (a ? "," : "") << format_double(-0.5 * snap.lengths[a] + double(index[a]) * h);
      }
      switch (snap.kind) {
        case SnapshotKind::complex:
          csv << ',' << format_double(snap.data[2 * p]) << ',' << format_double(snap.data[2 * p + 1]);
          break;
        case SnapshotKind::real: csv << ',' << format_double(snap.data[p]); break;
        case SnapshotKind::pair:
          csv << ',' << format_double(snap.data[p]) << ',' << format_double(snap.data[n + p]);
          break;
      }
      csv << '\n';
      for (std::size_t a = index.size(); a-- > 0;) {
        if (++index[a] < snap.dims[a]) break;
        index[a] = 0;
      }
    }
    if (output && output->string() == "-") {
      out << csv.str();
      return kExitOk;
    }
    fs::path target = output.value_or(fs::path(snapshot).replace_extension(".csv"));
    std::ofstream f(target, std::ios::binary);
    if (!f) throw FormatError("cannot write '" + target.string() + "'");
    f << csv.str();
    out << "wrote " << target.string() << '\n';
    return kExitOk;
  } catch (const Error& e) {
    print_error(err, to_string(e.kind()), e.what());
    return exit_code_for(e.kind());
  }
}

}  // namespace qhd::lab
