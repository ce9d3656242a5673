#include "goalrom/lspg.hpp"

#include <cmath>
#include <functional>
#include <limits>

#include <Eigen/Cholesky>

#include "goalrom/csv.hpp"
#include "goalrom/errors.hpp"

namespace goalrom {

namespace {

constexpr double kMinReciprocalCondition = 1e-15;

using SystemBuilder = std::function<ReducedSystem(const Vector&)>;

RomSolution gauss_newton(const PodBasis& basis, const Vector& initial_state, const RomOptions& options,
                         const SystemBuilder& build, std::vector<RomIterate>* trace) {
  if (basis.dim() == 0) throw PreconditionError("reduced solve: empty basis");
  if (initial_state.size() != basis.full_dim()) throw PreconditionError("reduced solve: initial state has wrong length");
  if (!(options.tolerance > 0.0)) throw PreconditionError("reduced solve: tolerance must be positive");

  Vector w_hat = project(basis, initial_state);
  Vector state = reconstruct(basis, w_hat);
  ReducedSystem system = build(state);
  double norm = system.rhs.norm();
  if (trace != nullptr) trace->push_back({w_hat, norm, system.objective});

  double last_step = std::numeric_limits<double>::infinity();
  for (int it = 0;; ++it) {
    const bool small_step = last_step <= options.step_tolerance * std::max(1.0, w_hat.norm());
    if (norm <= options.tolerance || small_step) {
      return {std::move(w_hat), std::move(state), true, it, norm};
    }
    if (it == options.max_iterations) break;

    const Vector p = gauss_newton_step(system);
    double length = 1.0;
    bool accepted = false;
    for (int h = 0; h <= options.max_halvings; ++h) {
      Vector trial_hat = w_hat + length * p;
      Vector trial_state = reconstruct(basis, trial_hat);
      ReducedSystem trial = build(trial_state);
      const double trial_norm = trial.rhs.norm();
      const bool descent = trial.objective < system.objective || (h == 0 && trial_norm < norm);
      if (std::isfinite(trial_norm) && std::isfinite(trial.objective) && descent) {
        last_step = (length * p).norm();
        w_hat = std::move(trial_hat);
        state = std::move(trial_state);
        system = std::move(trial);
        norm = trial_norm;
        accepted = true;
        break;
      }
      length *= 0.5;
    }
    if (!accepted) {
      // No decrease along a step that is itself at roundoff scale: the
      // iterate already sits on the noise floor of the reduced residual.
      if (p.norm() <= 1e3 * options.step_tolerance * std::max(1.0, w_hat.norm())) {
        return {std::move(w_hat), std::move(state), true, it, norm};
      }
      throw SolverFailure("reduced solve: line search failed, norm = " + std::to_string(norm), norm, it);
    }
    if (trace != nullptr) trace->push_back({w_hat, norm, system.objective});
  }
  throw SolverFailure("reduced solve: no convergence in " + std::to_string(options.max_iterations) +
                          " iterations, norm = " + std::to_string(norm),
                      norm, options.max_iterations);
}

}  // namespace

ReducedSystem exact_reduced_system(const BurgersModel& model, const PodBasis& basis, const Vector& state) {
  ReducedSystem system;
  system.test_rows = model.jacobian(state).times(basis.modes);
  const Vector r = model.residual(state);
  system.row_entities.resize(system.test_rows.rows());
  for (int i = 0; i < static_cast<int>(system.row_entities.size()); ++i) system.row_entities[i] = i + 1;
  system.lhs = system.test_rows.transpose() * system.test_rows;
  system.rhs = system.test_rows.transpose() * r;
  system.objective = r.norm();
  return system;
}

ReducedSystem hyper_reduced_system(const BurgersModel& model, const PodBasis& basis, const ReducedMesh& mesh,
                                   const Vector& state) {
  const MeshTopology& topo = model.topology();
  const auto m = static_cast<Eigen::Index>(mesh.size());
  ReducedSystem system;
  system.test_rows.resize(m, basis.dim());
  system.row_entities = mesh.entities;
  Vector weighted_r(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const int e = mesh.entities[i];
    const double xi = mesh.weights[i];
    const auto local = topo.localize(state, e);
    const ElementJacobian jac = model.element_jacobian(e, local);
    system.test_rows.row(i) = xi * (jac.upstream * basis.modes.row(e - 1) + jac.own * basis.modes.row(e));
    weighted_r(i) = xi * model.element_residual(e, local);
  }
  system.lhs = system.test_rows.transpose() * system.test_rows;
  system.rhs = system.test_rows.transpose() * weighted_r;
  system.objective = weighted_r.norm();
  return system;
}

Vector reduced_residual(const BurgersModel& model, const PodBasis& basis, const ReducedMesh& mesh,
                        const Vector& state) {
  return hyper_reduced_system(model, basis, mesh, state).rhs;
}

Matrix dense_test_basis(const ReducedSystem& system, int num_entities) {
  Matrix w = Matrix::Zero(num_entities, system.test_rows.cols());
  for (std::size_t i = 0; i < system.row_entities.size(); ++i) {
    w.row(system.row_entities[i] - 1) = system.test_rows.row(static_cast<Eigen::Index>(i));
  }
  return w;
}

Vector gauss_newton_step(const ReducedSystem& system) {
  Eigen::LLT<Matrix> llt(system.lhs);
  if (llt.info() != Eigen::Success) {
    throw SingularSystemError("reduced normal matrix is not positive definite",
                              std::numeric_limits<double>::infinity());
  }
  const double rcond = llt.rcond();
  if (!(rcond >= kMinReciprocalCondition)) {
    throw SingularSystemError("reduced normal matrix is numerically singular", rcond > 0.0 ? 1.0 / rcond : INFINITY);
  }
  return llt.solve(-system.rhs);
}

RomSolution solve_rom_exact(const BurgersModel& model, const PodBasis& basis, const Vector& initial_state,
                            const RomOptions& options, std::vector<RomIterate>* trace) {
  return gauss_newton(
      basis, initial_state, options,
      [&](const Vector& state) { return exact_reduced_system(model, basis, state); }, trace);
}

RomSolution solve_rom_hyper(const BurgersModel& model, const PodBasis& basis, const ReducedMesh& mesh,
                            const Vector& initial_state, const RomOptions& options,
                            std::vector<RomIterate>* trace) {
  mesh.validate(model.grid());
  return gauss_newton(
      basis, initial_state, options,
      [&](const Vector& state) { return hyper_reduced_system(model, basis, mesh, state); }, trace);
}

std::vector<std::string> rom_csv_header() { return {"b", "a", "n", "iterations", "final_norm", "functional"}; }

std::vector<std::string> rom_csv_row(const BurgersModel& model, const RomSolution& solution) {
  return {CsvWriter::cell(model.params().rate),
          CsvWriter::cell(model.params().amplitude),
          CsvWriter::cell(static_cast<int>(solution.reduced.size())),
          CsvWriter::cell(solution.iterations),
          CsvWriter::cell(solution.final_norm),
          CsvWriter::cell(functional(model.grid(), solution.state))};
}

}  // namespace goalrom
