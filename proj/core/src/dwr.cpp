#include "goalrom/dwr.hpp"

#include <numeric>

#include "goalrom/csv.hpp"
#include "goalrom/errors.hpp"
#include "goalrom/lspg.hpp"

namespace goalrom {

namespace {

FineCorrection reduced_dual(const ReducedSystem& system, const PodBasis& fine_basis, const Grid1D& grid) {
  const Vector g_reduced = fine_basis.modes.transpose() * functional_gradient(grid);
  Eigen::LLT<Matrix> llt(system.lhs);
  if (llt.info() != Eigen::Success || !(llt.rcond() >= 1e-15)) {
    throw SingularSystemError("reduced dual system is numerically singular",
                              llt.info() == Eigen::Success && llt.rcond() > 0.0 ? 1.0 / llt.rcond() : INFINITY);
  }
  FineCorrection out;
  // A is symmetric, so A^T psi = -g^T and A delta = -rhs share the factorization.
  out.adjoint.psi = llt.solve(-g_reduced);
  out.adjoint.residual_ratio =
      (system.lhs.transpose() * out.adjoint.psi + g_reduced).norm() / std::max(g_reduced.norm(), 1e-300);
  out.step = llt.solve(-system.rhs);
  out.epsilon = -out.adjoint.psi.dot(system.rhs);
  return out;
}

}  // namespace

AdjointSolution fom_adjoint(const BurgersModel& model, const Vector& state) {
  const BandedJacobian jac = model.jacobian(state);
  const Vector g = functional_gradient(model.grid()).tail(model.grid().num_entities());
  AdjointSolution out;
  out.psi = jac.solve_interior_transpose(g);
  Vector check(g.size());
  for (Eigen::Index r = 0; r < g.size(); ++r) {
    check(r) = jac.own(r) * out.psi(r) + (r + 1 < g.size() ? jac.upstream(r + 1) * out.psi(r + 1) : 0.0);
  }
  out.residual_ratio = (check - g).norm() / g.norm();
  return out;
}

double epsilon_f(const BurgersModel& model, const Vector& rom_state) {
  const AdjointSolution adj = fom_adjoint(model, rom_state);
  return -adj.psi.dot(model.residual(rom_state));
}

FineCorrection epsilon_r_exact(const BurgersModel& model, const PodBasis& fine_basis, const Vector& coarse_state) {
  return reduced_dual(exact_reduced_system(model, fine_basis, coarse_state), fine_basis, model.grid());
}

FineCorrection epsilon_r_hyper(const BurgersModel& model, const PodBasis& fine_basis, const ReducedMesh& fine_mesh,
                               const Vector& coarse_state) {
  fine_mesh.validate(model.grid());
  return reduced_dual(hyper_reduced_system(model, fine_basis, fine_mesh, coarse_state), fine_basis, model.grid());
}

double ErrorRecord::eps_r_sum() const { return std::accumulate(eps_r.begin(), eps_r.end(), 0.0); }

std::vector<std::string> error_history_header() { return {"cycle", "b", "a", "eps_f", "eps_r_sum", "total"}; }

std::vector<std::string> error_history_row(int cycle, const ErrorRecord& record, double fixed_amplitude) {
  const double a = record.mu.size() > 1 ? record.mu(1) : fixed_amplitude;
  return {CsvWriter::cell(cycle),          CsvWriter::cell(record.mu(0)),
          CsvWriter::cell(a),              CsvWriter::cell(record.eps_f),
          CsvWriter::cell(record.eps_r_sum()), CsvWriter::cell(record.total())};
}

}  // namespace goalrom
