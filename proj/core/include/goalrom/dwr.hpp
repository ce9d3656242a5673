#pragma once

// Dual-weighted-residual functional error indicators.
//
//   eps_f  ~ J(w) - J(w~)      FOM adjoint at the reduced solution w~
//   eps_r  ~ J(w~_H) - J(w~_h) reduced adjoint of the fine space at the
//                              coarse solution w~_H
//
// so that eps_f + eps_r tracks J(w) - J(w~_h).

#include <string>
#include <vector>

#include "goalrom/burgers.hpp"
#include "goalrom/pod.hpp"
#include "goalrom/reduced_mesh.hpp"

namespace goalrom {

struct AdjointSolution {
  Vector psi;
  /// ||A^T psi - rhs|| / ||rhs|| of the defining system.
  double residual_ratio = 0.0;
};

/// Solves (dR/dw|_{state})^T psi = (dJ/dw)^T on the interior unknowns.
AdjointSolution fom_adjoint(const BurgersModel& model, const Vector& state);

/// -psi^T R(w~). Throws SingularSystemError on a zero Jacobian pivot.
double epsilon_f(const BurgersModel& model, const Vector& rom_state);

struct FineCorrection {
  double epsilon = 0.0;
  /// Reduced adjoint psi~ (length n_h).
  AdjointSolution adjoint;
  /// Gauss-Newton step delta of the fine model from w~_H; the fine-space
  /// state w~_H + V_h delta satisfies J(w~_H) - J(w~_H + V_h delta) = epsilon.
  Vector step;
};

/// Uses the exact W = (dR/dw) V_h and W^T R at the coarse state.
FineCorrection epsilon_r_exact(const BurgersModel& model, const PodBasis& fine_basis, const Vector& coarse_state);

/// Uses W~ and R~ of the fine reduced mesh; element kernels run only on it.
FineCorrection epsilon_r_hyper(const BurgersModel& model, const PodBasis& fine_basis, const ReducedMesh& fine_mesh,
                               const Vector& coarse_state);

/// Error estimate bookkeeping for one ROM point.
struct ErrorRecord {
  Vector mu;
  double eps_f = 0.0;
  std::vector<double> eps_r;
  int created_cycle = 0;
  int refreshed_cycle = 0;

  double eps_r_sum() const;
  double total() const { return eps_f + eps_r_sum(); }
};

std::vector<std::string> error_history_header();
/// cycle, b, a, eps_f, eps_r_sum, total. A 1-parameter point writes the
/// fixed amplitude in column a.
std::vector<std::string> error_history_row(int cycle, const ErrorRecord& record, double fixed_amplitude = 1.0);

}  // namespace goalrom
