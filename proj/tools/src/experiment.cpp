#include "goalrom/experiment.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>

#include "goalrom/csv.hpp"
#include "goalrom/ecsw.hpp"
#include "goalrom/errors.hpp"
#include "goalrom/lspg.hpp"

namespace goalrom {

namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

std::string path_in(const std::string& dir, const std::string& file) { return (fs::path(dir) / file).string(); }

std::string wall_clock() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream out;
  out << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return out.str();
}

std::string short_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.0e", v);
  return buf;
}

/// Timestamps and wall times for run_meta.txt.
class RunMeta {
 public:
  RunMeta(std::string dir, std::string command)
      : dir_(std::move(dir)), command_(std::move(command)), started_(wall_clock()), start_(Clock::now()) {}

  void add(const std::string& key, const std::string& value) { extra_ << key << " = " << value << '\n'; }

  void write(const std::string& status) const {
    std::ofstream out(path_in(dir_, "run_meta.txt"));
    out << "command = " << command_ << '\n';
    out << "status = " << status << '\n';
    out << "started = " << started_ << '\n';
    out << "finished = " << wall_clock() << '\n';
    out << "wall_seconds = " << std::chrono::duration<double>(Clock::now() - start_).count() << '\n';
    out << extra_.str();
  }

 private:
  std::string dir_;
  std::string command_;
  std::string started_;
  Clock::time_point start_;
  std::ostringstream extra_;
};

void prepare_output(const ExperimentConfig& config) {
  fs::create_directories(config.output_dir);
  std::ofstream out(path_in(config.output_dir, "config.ini"));
  if (!out) throw std::runtime_error("cannot write into " + config.output_dir);
  write_config(out, config);
}

double amplitude_of(const SamplerState& s, const Vector& mu) { return s.params(mu).amplitude; }

Vector probe_point(const ExperimentConfig& c, double rate) {
  if (c.domain.dim() == 1) return Vector::Constant(1, rate);
  return Eigen::Vector2d(rate, 0.5 * (c.domain.lo(1) + c.domain.hi(1)));
}

/// J of the FOM at mu.
struct FomReference {
  Vector state;
  double functional = 0.0;
};

FomReference fom_at(const SamplerState& s, const Vector& mu) {
  const BurgersModel model(s.grid, s.params(mu));
  FomReference out;
  out.state = solve_fom(model, s.config.fom).state;
  out.functional = functional(s.grid, out.state);
  return out;
}

const Vector& nearest_snapshot(const SamplerState& s, const Vector& mu) {
  std::size_t best = 0;
  for (std::size_t k = 1; k < s.snapshot_mu.size(); ++k) {
    if (s.domain.unit_distance(s.snapshot_mu[k], mu) < s.domain.unit_distance(s.snapshot_mu[best], mu)) best = k;
  }
  return s.snapshots.states[best];
}

// ---------------------------------------------------------------------------
// Per-cycle logs

std::vector<std::string> cycles_header() {
  return {"cycle", "added_b", "added_a", "n", "mesh_size", "rom_points", "nonlinear_iterations",
          "rbf_max", "point_max", "point_mean"};
}

void log_cycle(std::ostream& log, const CycleStats& h) {
  log << "cycle " << h.cycle << ": n=" << h.basis_dim << " |E|=" << h.mesh_size << " points=" << h.rom_points
      << " iterations=" << h.nonlinear_iterations << " max=" << h.rbf_max << " mean=" << h.point_mean << '\n';
}

/// Collects the per-point estimates after every cycle.
struct HistoryRecorder {
  std::vector<std::vector<std::string>> rows;

  void capture(const SamplerState& s) {
    for (const RomPoint& p : s.points) {
      std::vector<std::string> row = error_history_row(s.cycle, p.record, s.config.fixed_amplitude);
      row.push_back(CsvWriter::cell(s.indicator(p)));
      rows.push_back(std::move(row));
    }
  }
};

std::vector<std::string> history_header() {
  std::vector<std::string> h = error_history_header();
  h.push_back("indicator");
  return h;
}

void write_cycles(const SamplerState& s, const std::string& dir) {
  CsvWriter out(path_in(dir, "cycles.csv"), cycles_header());
  out.comment("mode=" + to_string(s.config.mode));
  out.comment("N=" + std::to_string(s.grid.num_nodes()));
  out.comment("n_p=" + std::to_string(s.domain.dim()));
  for (const CycleStats& h : s.history) {
    const bool added = h.added.size() > 0;
    out.row({CsvWriter::cell(h.cycle), added ? CsvWriter::cell(h.added(0)) : "",
             added ? CsvWriter::cell(amplitude_of(s, h.added)) : "", CsvWriter::cell(h.basis_dim),
             CsvWriter::cell(h.mesh_size), CsvWriter::cell(h.rom_points), CsvWriter::cell(h.nonlinear_iterations),
             CsvWriter::cell(h.rbf_max), CsvWriter::cell(h.point_max), CsvWriter::cell(h.point_mean)});
  }
}

WorkLedger ledger_from_cycles(const std::string& dir) {
  const CsvTable t = read_csv(path_in(dir, "cycles.csv"), cycles_header());
  std::optional<SamplingMode> mode;
  double n_full = -1;
  int n_p = 1;
  for (const std::string& c : t.comments) {
    if (c.rfind("mode=", 0) == 0) mode = parse_sampling_mode(c.substr(5));
    if (c.rfind("N=", 0) == 0) n_full = std::stod(c.substr(2));
    if (c.rfind("n_p=", 0) == 0) n_p = std::stoi(c.substr(4));
  }
  if (!mode || n_full < 0) throw std::runtime_error(dir + "/cycles.csv: missing mode or N comment");
  std::vector<CycleCostInputs> inputs;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    CycleCostInputs in;
    in.full_dim = n_full;
    in.basis_dim = t.number(r, "n");
    in.mesh_size = t.number(r, "mesh_size");
    in.nonlinear_iterations = t.number(r, "nonlinear_iterations");
    in.num_params = n_p;
    in.cycle = static_cast<int>(r) + 1;
    inputs.push_back(in);
  }
  return build_ledger(*mode, inputs);
}

std::string ledger_path(const std::string& dir, SamplingMode mode) {
  return path_in(dir, "work_" + to_string(mode) + ".csv");
}

// ---------------------------------------------------------------------------
// Final configuration and error maps

struct ModelError {
  double functional_error = kNan;
  bool ok = false;
};

ModelError model_error(const SamplerState& s, const Vector& mu, double j_fom) {
  try {
    const RomSolution rom = s.solve_model(mu);
    return {j_fom - functional(s.grid, rom.state), true};
  } catch (const SolverFailure&) {
  } catch (const SingularSystemError&) {
  }
  return {};
}

void write_final_points(const SamplerState& s, const std::string& dir) {
  CsvWriter out(path_in(dir, "final_points.csv"),
                {"kind", "b", "a", "eps_f", "eps_r_sum", "estimate", "indicator", "true_error"});
  for (const Vector& mu : s.snapshot_mu) {
    const ModelError e = model_error(s, mu, fom_at(s, mu).functional);
    out.row({"snapshot", CsvWriter::cell(mu(0)), CsvWriter::cell(amplitude_of(s, mu)), "0", "0", "0", "0",
             CsvWriter::cell(e.functional_error)});
  }
  for (const RomPoint& p : s.points) {
    const ModelError e = model_error(s, p.mu, fom_at(s, p.mu).functional);
    out.row({"rom_point", CsvWriter::cell(p.mu(0)), CsvWriter::cell(amplitude_of(s, p.mu)),
             CsvWriter::cell(p.record.eps_f), CsvWriter::cell(p.record.eps_r_sum()),
             CsvWriter::cell(p.record.total()), CsvWriter::cell(s.indicator(p)), CsvWriter::cell(e.functional_error)});
  }
}

/// Returns the largest |true error| over the lattice (NaN if a solve failed).
double write_validation(const SamplerState& s, const ExperimentConfig& config, const std::string& dir) {
  CsvWriter out(path_in(dir, "validation.csv"), {"b", "a", "j_fom", "j_rom", "true_error", "surface", "status"});
  double worst = 0.0;
  for (const Vector& mu : validation_lattice(config)) {
    const double j_fom = fom_at(s, mu).functional;
    const ModelError e = model_error(s, mu, j_fom);
    const double surface = rbf_evaluate(s.rbf, s.domain, mu);
    out.row({CsvWriter::cell(mu(0)), CsvWriter::cell(amplitude_of(s, mu)), CsvWriter::cell(j_fom),
             CsvWriter::cell(e.ok ? j_fom - e.functional_error : kNan), CsvWriter::cell(e.functional_error),
             CsvWriter::cell(surface), e.ok ? "ok" : "solve_failed"});
    // A failed solve poisons the maximum: std::max keeps a NaN first argument.
    worst = e.ok ? std::max(worst, std::abs(e.functional_error)) : kNan;
  }
  return worst;
}

/// Everything a finished (or cycle-capped) run leaves behind.
double write_run(const SamplerState& s, const ExperimentConfig& config, const HistoryRecorder& history,
                 std::ostream& log) {
  const std::string& dir = config.output_dir;
  write_cycles(s, dir);
  {
    CsvWriter out(path_in(dir, "error_history.csv"), history_header());
    for (const auto& row : history.rows) out.row(row);
  }
  write_final_points(s, dir);
  save_basis(path_in(dir, "basis.txt"), path_in(dir, "basis_meta.txt"), s.basis, s.snapshots.params);
  if (s.mesh) save_reduced_mesh(path_in(dir, "mesh.csv"), *s.mesh);
  const WorkLedger ledger = build_ledger(s.config.mode, s.cost_inputs());
  save_ledger(ledger_path(dir, s.config.mode), ledger);
  const double worst = write_validation(s, config, dir);
  log << "final: cycles=" << s.cycle << " n=" << s.basis.dim() << " snapshots=" << s.snapshots.size()
      << " rom_points=" << s.points.size() << " work=" << ledger.total() << " validation_max=" << worst << '\n';
  return worst;
}

/// Runs `body` with run_meta.txt written whatever the outcome.
template <typename Body>
void with_meta(RunMeta& meta, Body&& body) {
  try {
    body();
  } catch (...) {
    meta.write("failed");
    throw;
  }
  meta.write("ok");
}

void run_goal_oriented(const ExperimentConfig& config, std::ostream& log, RunMeta& meta) {
  SamplerState s = init_sampler(config.sampler, config.domain);
  HistoryRecorder history;
  history.capture(s);
  log_cycle(log, s.history.back());
  try {
    run_adaptive(s, [&](const SamplerState& st) {
      history.capture(st);
      log_cycle(log, st.history.back());
    });
  } catch (const BudgetExceeded&) {
    write_run(s, config, history, log);
    throw;
  }
  write_run(s, config, history, log);
  for (const CycleStats& h : s.history) meta.add("cycle_" + std::to_string(h.cycle) + "_seconds", std::to_string(h.seconds));
}

// ---------------------------------------------------------------------------
// Verification study

struct StudyRow {
  std::string model;
  std::string training = "none";
  double epsilon = kNan;
  double mesh_size = kNan;
  double achieved_ratio = kNan;
  double state_error = kNan;
  double state_error_rel = kNan;
  double functional_error = kNan;
  double mean_point_error = kNan;
  double lattice_max_error = kNan;
  long failed_solves = 0;
  std::string status = "ok";
};

struct StudyTargets {
  Vector mu;
  FomReference at_mu;
  std::vector<Vector> points;
  std::vector<double> point_j;
  std::vector<Vector> lattice;
  std::vector<double> lattice_j;
};

template <typename Solve>
void evaluate_model(const SamplerState& s, const StudyTargets& t, Solve&& solve, StudyRow& row) {
  const auto attempt = [&](const Vector& mu) -> std::optional<Vector> {
    try {
      return solve(BurgersModel(s.grid, s.params(mu)), nearest_snapshot(s, mu));
    } catch (const SolverFailure&) {
    } catch (const SingularSystemError&) {
    }
    ++row.failed_solves;
    return std::nullopt;
  };

  if (const auto w = attempt(t.mu)) {
    row.state_error = (*w - t.at_mu.state).norm();
    row.state_error_rel = row.state_error / t.at_mu.state.norm();
    row.functional_error = t.at_mu.functional - functional(s.grid, *w);
  }
  double sum = 0.0;
  int count = 0;
  for (std::size_t k = 0; k < t.points.size(); ++k) {
    if (const auto w = attempt(t.points[k])) {
      sum += std::abs(t.point_j[k] - functional(s.grid, *w));
      ++count;
    }
  }
  if (count > 0) row.mean_point_error = sum / count;
  double worst = 0.0;
  for (std::size_t k = 0; k < t.lattice.size(); ++k) {
    if (const auto w = attempt(t.lattice[k])) worst = std::max(worst, std::abs(t.lattice_j[k] - functional(s.grid, *w)));
  }
  row.lattice_max_error = worst;
  if (row.failed_solves > 0) row.status = "solve_failed";
}

std::vector<std::string> study_header() {
  return {"model", "training", "epsilon", "mesh_size", "achieved_ratio", "state_error", "state_error_rel",
          "functional_error", "mean_point_error", "lattice_max_error", "failed_solves", "status"};
}

std::vector<std::string> study_cells(const StudyRow& r) {
  return {r.model,
          r.training,
          CsvWriter::cell(r.epsilon),
          CsvWriter::cell(r.mesh_size),
          CsvWriter::cell(r.achieved_ratio),
          CsvWriter::cell(r.state_error),
          CsvWriter::cell(r.state_error_rel),
          CsvWriter::cell(r.functional_error),
          CsvWriter::cell(r.mean_point_error),
          CsvWriter::cell(r.lattice_max_error),
          CsvWriter::cell(r.failed_solves),
          r.status};
}

}  // namespace

// ---------------------------------------------------------------------------

void cmd_verify(const ExperimentConfig& config_in, std::ostream& log) {
  ExperimentConfig config = config_in;
  config.sampler.mode = SamplingMode::rom;
  prepare_output(config);
  const std::string& dir = config.output_dir;
  RunMeta meta(dir, "verify");
  with_meta(meta, [&] {
    SamplerState s = init_sampler(config.sampler, config.domain);
    run_adaptive(s, [&](const SamplerState& st) { log_cycle(log, st.history.back()); });
    log << "basis: n=" << s.basis.dim() << " from " << s.snapshots.size() << " snapshots\n";
    save_basis(path_in(dir, "basis.txt"), path_in(dir, "basis_meta.txt"), s.basis, s.snapshots.params);

    StudyTargets t;
    t.mu = probe_point(config, config.verify_rate);
    t.at_mu = fom_at(s, t.mu);
    for (const RomPoint& p : s.points) {
      t.points.push_back(p.mu);
      t.point_j.push_back(fom_at(s, p.mu).functional);
    }
    t.lattice = validation_lattice(config);
    for (const Vector& mu : t.lattice) t.lattice_j.push_back(fom_at(s, mu).functional);

    std::vector<StudyRow> rows;
    StudyRow rom;
    rom.model = "ROM";
    rom.mesh_size = s.grid.num_entities();
    evaluate_model(s, t, [&](const BurgersModel& m, const Vector& w0) {
      return solve_rom_exact(m, s.basis, w0, config.sampler.rom).state;
    }, rom);
    rows.push_back(rom);

    for (const TrainingMode mode : {TrainingMode::residual, TrainingMode::jacobian}) {
      const TrainingSystem system = assemble_training(mode, s.grid, s.basis, s.snapshots, s.ecsw_subset());
      const std::vector<double>& eps_list = mode == TrainingMode::residual ? config.residual_eps : config.jacobian_eps;
      for (const double eps : eps_list) {
        StudyRow row;
        row.model = "HROM";
        row.training = to_string(mode);
        row.epsilon = eps;
        try {
          const ReducedMesh mesh = nnls_solve(system, eps);
          row.mesh_size = static_cast<double>(mesh.size());
          row.achieved_ratio = mesh.achieved_ratio;
          save_reduced_mesh(path_in(dir, "mesh_" + to_string(mode) + "_" + short_number(eps) + ".csv"), mesh);
          evaluate_model(s, t, [&](const BurgersModel& m, const Vector& w0) {
            return solve_rom_hyper(m, s.basis, mesh, w0, config.sampler.rom).state;
          }, row);
        } catch (const ConvergenceFailure& e) {
          row.achieved_ratio = e.best_ratio();
          row.status = "nnls_failed";
        } catch (const SingularSystemError&) {
          row.status = "singular";
        }
        rows.push_back(row);
      }
    }

    // A model is degraded when its ROM-point errors leave the sampling
    // tolerance by more than an order of magnitude.
    const double limit = 10.0 * config.sampler.tolerance;
    int degraded = 0;
    CsvWriter out(path_in(dir, "verify_table.csv"), study_header());
    out.comment("b=" + CsvWriter::cell(config.verify_rate) + " n=" + std::to_string(s.basis.dim()) +
                " snapshots=" + std::to_string(s.snapshots.size()));
    for (StudyRow& r : rows) {
      if (r.status == "ok" && !(r.mean_point_error <= limit)) r.status = "degraded";
      if (r.status != "ok") ++degraded;
      out.row(study_cells(r));
      log << std::left << std::setw(5) << r.model << ' ' << std::setw(9) << r.training << " eps=" << std::setw(6)
          << r.epsilon << " |E|=" << std::setw(5) << r.mesh_size << " state=" << r.state_error_rel
          << " func=" << r.functional_error << " mean=" << r.mean_point_error << " [" << r.status << "]\n";
    }
    if (degraded > 0) {
      log << "summary: accuracy degraded or failed for " << degraded << " of " << rows.size()
          << " models (mean ROM-point error above " << limit << ")\n";
    } else {
      log << "summary: all " << rows.size() << " models within " << limit << '\n';
    }
    meta.add("degraded_models", std::to_string(degraded));
  });
}

void cmd_adapt(const ExperimentConfig& config, std::ostream& log) {
  if (config.sampler.mode == SamplingMode::greedy) {
    cmd_greedy(config, log);
    return;
  }
  prepare_output(config);
  RunMeta meta(config.output_dir, "adapt " + to_string(config.sampler.mode));
  with_meta(meta, [&] { run_goal_oriented(config, log, meta); });
}

void cmd_greedy(const ExperimentConfig& config_in, std::ostream& log) {
  ExperimentConfig config = config_in;
  config.sampler.mode = SamplingMode::greedy;
  prepare_output(config);
  const std::string& dir = config.output_dir;
  RunMeta meta(dir, "greedy");
  with_meta(meta, [&] {
    double budget = config.work_budget;
    if (!(budget > 0.0)) {
      std::string source = config.budget_from;
      if (source.empty()) {
        ExperimentConfig ref = config_in;
        ref.sampler.mode = config.reference_mode;
        ref.output_dir = path_in(dir, "reference");
        log << "reference run (" << to_string(ref.sampler.mode) << ") in " << ref.output_dir << '\n';
        cmd_adapt(ref, log);
        source = ref.output_dir;
      }
      budget = run_work_total(source);
    }
    log << "work budget " << budget << '\n';

    SamplerState s = init_sampler(config.sampler, config.domain);
    std::vector<Vector> probes;
    std::vector<double> probe_j;
    for (const double b : config.probe_rates) {
      probes.push_back(probe_point(config, b));
      probe_j.push_back(fom_at(s, probes.back()).functional);
    }
    CsvWriter tracking(path_in(dir, "functional_tracking.csv"),
                       {"cycle", "cumulative_work", "b", "a", "j_fom", "j_rom", "error"});
    const auto track = [&](const SamplerState& st) {
      const double work = build_ledger(st.config.mode, st.cost_inputs()).total();
      for (std::size_t k = 0; k < probes.size(); ++k) {
        const ModelError e = model_error(st, probes[k], probe_j[k]);
        tracking.row({CsvWriter::cell(st.cycle), CsvWriter::cell(work), CsvWriter::cell(probes[k](0)),
                      CsvWriter::cell(amplitude_of(st, probes[k])), CsvWriter::cell(probe_j[k]),
                      CsvWriter::cell(e.ok ? probe_j[k] - e.functional_error : kNan),
                      CsvWriter::cell(e.functional_error)});
      }
    };

    HistoryRecorder history;
    history.capture(s);
    track(s);
    log_cycle(log, s.history.back());
    try {
      run_greedy(s, budget, [&](const SamplerState& st) {
        history.capture(st);
        track(st);
        log_cycle(log, st.history.back());
      });
    } catch (const BudgetExceeded&) {
      write_run(s, config, history, log);
      throw;
    }
    write_run(s, config, history, log);
    const double spent = build_ledger(SamplingMode::greedy, s.cost_inputs()).total();
    log << "greedy: spent " << spent << " of " << budget << " work units (" << spent / budget << ")\n";
    meta.add("budget", CsvWriter::cell(budget));
  });
}

void cmd_work(const ExperimentConfig& config, std::ostream& log) {
  const WorkLedger ledger = ledger_from_cycles(config.output_dir);
  const std::string path = ledger_path(config.output_dir, ledger.mode);
  save_ledger(path, ledger);
  log << to_string(ledger.mode) << ": " << ledger.rows.size() << " cycles, total " << ledger.total() << " -> " << path
      << '\n';
}

double run_work_total(const std::string& run_dir) { return ledger_from_cycles(run_dir).total(); }

int run_command(const std::string& subcommand, const std::string& config_path,
                const std::optional<std::string>& out_dir, const std::optional<std::string>& mode, std::ostream& log,
                std::ostream& err) {
  try {
    ExperimentConfig config = config_path.empty() ? ExperimentConfig{} : load_config(config_path);
    if (out_dir) config.output_dir = *out_dir;
    if (mode) {
      try {
        config.sampler.mode = parse_sampling_mode(*mode);
      } catch (const PreconditionError& e) {
        throw ConfigError(e.what());
      }
    }
    if (subcommand == "verify") {
      cmd_verify(config, log);
    } else if (subcommand == "adapt") {
      cmd_adapt(config, log);
    } else if (subcommand == "greedy") {
      cmd_greedy(config, log);
    } else if (subcommand == "work") {
      cmd_work(config, log);
    } else {
      throw ConfigError("unknown subcommand '" + subcommand + "'");
    }
    return kExitOk;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const PreconditionError& e) {
    err << "invalid input: " << e.what() << '\n';
    return kExitConfig;
  } catch (const BudgetExceeded& e) {
    err << "budget exceeded after " << e.cycles() << " cycles: " << e.what() << '\n';
    return kExitBudget;
  } catch (const SolverFailure& e) {
    err << "solver failure: " << e.what() << '\n';
    return kExitSolver;
  } catch (const SingularSystemError& e) {
    err << "singular system: " << e.what() << '\n';
    return kExitSolver;
  } catch (const ConvergenceFailure& e) {
    err << "NNLS failure (best ratio " << e.best_ratio() << "): " << e.what() << '\n';
    return kExitSolver;
  } catch (const EmptyBasisError& e) {
    err << "empty basis: " << e.what() << '\n';
    return kExitSolver;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
}

}  // namespace goalrom
