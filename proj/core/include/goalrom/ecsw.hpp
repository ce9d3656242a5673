#pragma once

#include <iosfwd>
#include <vector>

#include "goalrom/burgers.hpp"
#include "goalrom/pod.hpp"
#include "goalrom/reduced_mesh.hpp"

namespace goalrom {

/// Training data C xi = d. Column e-1 belongs to entity e; each snapshot in
/// the subset contributes a block of n (residual) or n^2 (Jacobian) rows.
struct TrainingSystem {
  Matrix c;
  Vector d;
  TrainingMode mode = TrainingMode::residual;
  std::vector<int> subset;
  int basis_dim = 0;
};

/// Per snapshot s: w~_s = w_ref + V V^T (w^s - w_ref), W the exact test basis
/// at w~_s, and c_se = (row e of W)^T R_e(w~_s). d = C 1.
TrainingSystem assemble_training_residual(const Grid1D& grid, const PodBasis& basis, const SnapshotSet& snapshots,
                                          const std::vector<int>& subset);

/// As above with c_se = vec(a_e^T a_e), a_e = J_e L_{e+} V, column-major.
TrainingSystem assemble_training_jacobian(const Grid1D& grid, const PodBasis& basis, const SnapshotSet& snapshots,
                                          const std::vector<int>& subset);

TrainingSystem assemble_training(TrainingMode mode, const Grid1D& grid, const PodBasis& basis,
                                 const SnapshotSet& snapshots, const std::vector<int>& subset);

struct NnlsResult {
  Vector x;
  double ratio = 1.0;  // ||C x - d|| / ||d||
  int iterations = 0;
  bool success = false;
};

/// Lawson-Hanson active set with early exit once ||C x - d|| <= eps ||d||.
/// Among columns with equal largest gradient the lowest index enters first.
/// An index whose first passive solve is non-positive is dropped and barred
/// until another index enters. Never throws on non-convergence; inspect
/// `success`. max_outer <= 0 means 10 * cols.
NnlsResult nnls_core(const Matrix& c, const Vector& d, double eps, int max_outer = 0);

/// nnls_core on a training system, packaged as a ReducedMesh of the strictly
/// positive weights. Throws ConvergenceFailure with the best ratio when the
/// criterion is not met, PreconditionError for eps outside (0, 1) or d = 0.
ReducedMesh nnls_solve(const TrainingSystem& system, double eps);

/// ||C_E xi - d|| / ||d|| for the given mesh.
double certificate_ratio(const TrainingSystem& system, const ReducedMesh& mesh);

/// Assemble then solve. When `log` is set, one line with |E|, the achieved
/// ratio and wall time is written to it.
ReducedMesh find_weights(const Grid1D& grid, const PodBasis& basis, const SnapshotSet& snapshots,
                         const std::vector<int>& subset, TrainingMode mode, double eps, std::ostream* log = nullptr);

}  // namespace goalrom
