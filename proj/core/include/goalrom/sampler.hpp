#pragma once

// Adaptive snapshot selection driven by functional error indicators.
//
// Each cycle adds the FOM snapshot at the RBF maximum of the ROM-point
// errors, rebuilds the basis (and reduced mesh in hyperreduced modes),
// refines the existing indicators, re-solves the points nearest the new
// snapshot and seeds new points between it and its nearest snapshots.

#include <functional>
#include <optional>
#include <vector>

#include "goalrom/burgers.hpp"
#include "goalrom/dwr.hpp"
#include "goalrom/lspg.hpp"
#include "goalrom/pod.hpp"
#include "goalrom/rbf.hpp"
#include "goalrom/reduced_mesh.hpp"
#include "goalrom/work_units.hpp"

namespace goalrom {

struct SamplerConfig {
  int num_nodes = 1024;
  double x_lo = 0.0;
  double x_hi = 100.0;
  SamplingMode mode = SamplingMode::rom;
  /// Stop once the largest |error| on the RBF surface is at or below this.
  double tolerance = 1e-4;
  double nnls_tolerance = 1e-6;
  TrainingMode training = TrainingMode::jacobian;
  /// Initial snapshots per parameter dimension (tensor grid in 2D).
  int initial_per_dim = 3;
  int max_cycles = 100;
  /// Source amplitude for one-parameter runs.
  double fixed_amplitude = 1.0;
  /// Train ECSW on the initial grid only. Defaults to true for 2 parameters.
  std::optional<bool> train_on_initial_grid;
  /// Minimum unit distance between a new snapshot and existing ones.
  double exclusion = 1e-3;
  FomOptions fom;
  RomOptions rom;
};

struct RomPoint {
  Vector mu;
  ErrorRecord record;
  /// Reduced solution the next refinement linearizes about.
  Vector state;
  /// Residual norm ||R(w~)|| used by the greedy baseline.
  double residual_norm = 0.0;
};

struct CycleStats {
  int cycle = 0;  // 0 = initialization
  Vector added;   // empty at initialization
  int basis_dim = 0;
  int mesh_size = 0;
  int rom_points = 0;
  long nonlinear_iterations = 0;
  double rbf_max = 0.0;
  double point_max = 0.0;
  double point_mean = 0.0;
  double seconds = 0.0;
};

/// How often each kind of kernel ran; used to check mode consistency.
struct CallCounters {
  long fom_solves = 0;
  long exact_solves = 0;
  long hyper_solves = 0;
  long eps_r_exact = 0;
  long eps_r_hyper = 0;
  long meshes_trained = 0;
};

struct SamplerState {
  SamplerConfig config;
  ParameterDomain domain;
  Grid1D grid{3};
  std::vector<Vector> snapshot_mu;
  SnapshotSet snapshots;
  /// Initial-grid snapshot indices.
  std::vector<int> training_subset;
  std::vector<RomPoint> points;
  PodBasis basis;
  std::optional<ReducedMesh> mesh;
  RbfModel rbf;
  Vector mu_max;
  double eps_max = 0.0;
  int cycle = 0;
  std::vector<CycleStats> history;
  CallCounters calls;

  BurgersParams params(const Vector& mu) const;
  /// Solves the current model (hyperreduced in HROM modes) at mu, seeded by
  /// the nearest snapshot.
  RomSolution solve_model(const Vector& mu) const;
  /// Per-cycle work-model inputs, index k <-> cycle k + 1.
  std::vector<CycleCostInputs> cost_inputs() const;
  /// Snapshots the ECSW weights are trained on: the initial grid when
  /// config.train_on_initial_grid resolves to true, otherwise all of them.
  std::vector<int> ecsw_subset() const;
  /// Indicator value the RBF interpolates at a ROM point.
  double indicator(const RomPoint& p) const;
};

/// Builds the initial snapshots, basis, reduced mesh and ROM points.
SamplerState init_sampler(const SamplerConfig& config, const ParameterDomain& domain);

/// Called after every completed cycle.
using CycleObserver = std::function<void(const SamplerState&)>;

/// Runs cycles until the RBF maximum is at or below config.tolerance.
/// Throws BudgetExceeded after config.max_cycles cycles; `state` then holds
/// the last completed cycle.
void run_adaptive(SamplerState& state, const CycleObserver& observer = {});

/// Residual-norm baseline: re-solves every ROM point each cycle and stops
/// once cumulative work units reach `work_budget` (the next cycle runs only
/// if half its estimated cost still fits).
void run_greedy(SamplerState& state, double work_budget, const CycleObserver& observer = {});

}  // namespace goalrom
