#pragma once

// Least-squares Petrov-Galerkin reduced solves, exact and hyperreduced.
//
// Both modes run Gauss-Newton on the normal equations [W^T W] p = -W^T R with
// the test basis W = (dR/dw) V. The hyperreduced mode replaces W and W^T R by
// their ECSW quadratures, evaluating element kernels only on the reduced mesh.

#include <string>
#include <vector>

#include "goalrom/burgers.hpp"
#include "goalrom/pod.hpp"
#include "goalrom/reduced_mesh.hpp"

namespace goalrom {

struct RomOptions {
  /// Converged when the reduced residual norm drops to this value.
  double tolerance = 1e-10;
  /// Also converged once an accepted step satisfies
  /// ||dw_hat|| <= step_tolerance * max(1, ||w_hat||), which is where
  /// roundoff in R floors the reduced residual for large states.
  double step_tolerance = 1e-12;
  int max_iterations = 100;
  int max_halvings = 30;
};

struct RomSolution {
  Vector reduced;
  Vector state;
  bool converged = false;
  int iterations = 0;
  double final_norm = 0.0;
};

/// Normal-equations data at one linearization point.
struct ReducedSystem {
  /// Rows of the test basis that were assembled. Exact mode: all N-1 rows,
  /// row e-1 <-> entity e. Hyper mode: one row per reduced-mesh entity,
  /// already scaled by its weight.
  Matrix test_rows;
  /// Entity id of each row of test_rows.
  std::vector<int> row_entities;
  Matrix lhs;  // W^T W
  Vector rhs;  // W^T R, or the quadrature R~
  /// Least-squares objective the Gauss-Newton step descends on: ||R||
  /// (exact) or ||(xi_e R_e)_e|| (hyper).
  double objective = 0.0;
};

/// Exact W = (dR/dw) V and W^T R at `state`.
ReducedSystem exact_reduced_system(const BurgersModel& model, const PodBasis& basis, const Vector& state);

/// Hyperreduced quantities at `state`: row e of W~ is xi_e (J_e L_{e+} V) and
/// R~ = sum_e xi_e W~^T L_e^T R_e. Element kernels are called only for e in the mesh.
ReducedSystem hyper_reduced_system(const BurgersModel& model, const PodBasis& basis, const ReducedMesh& mesh,
                                   const Vector& state);

/// R~ alone.
Vector reduced_residual(const BurgersModel& model, const PodBasis& basis, const ReducedMesh& mesh,
                        const Vector& state);

/// Expands test_rows into a dense (N-1) x n matrix with zero rows off the mesh.
Matrix dense_test_basis(const ReducedSystem& system, int num_entities);

/// Solves lhs p = -rhs by Cholesky. Throws SingularSystemError when the
/// factorization fails or the reciprocal condition estimate is below 1e-15.
Vector gauss_newton_step(const ReducedSystem& system);

struct RomIterate {
  Vector reduced;
  double norm = 0.0;
  double objective = 0.0;
};

/// The initial guess is projected onto the trial space before iterating.
/// Steps are halved until the least-squares objective decreases; a full step
/// that only lowers the reduced residual norm is also taken, which is what
/// happens once the objective stops changing at roundoff level. Throws
/// SolverFailure if the iteration or line search stalls and
/// SingularSystemError on a singular normal matrix.
RomSolution solve_rom_exact(const BurgersModel& model, const PodBasis& basis, const Vector& initial_state,
                            const RomOptions& options = {}, std::vector<RomIterate>* trace = nullptr);

/// Hyperreduced LSPG; throws PreconditionError on an empty or invalid mesh.
RomSolution solve_rom_hyper(const BurgersModel& model, const PodBasis& basis, const ReducedMesh& mesh,
                            const Vector& initial_state, const RomOptions& options = {},
                            std::vector<RomIterate>* trace = nullptr);

std::vector<std::string> rom_csv_header();
/// b, a, n, iterations, final_norm, functional
std::vector<std::string> rom_csv_row(const BurgersModel& model, const RomSolution& solution);

}  // namespace goalrom
