#include "goalrom/ecsw.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <ostream>

#include <Eigen/QR>

#include "goalrom/errors.hpp"

namespace goalrom {

namespace {

void check_subset(const SnapshotSet& snapshots, const std::vector<int>& subset) {
  if (subset.empty()) throw PreconditionError("training subset is empty");
  for (int s : subset) {
    if (s < 0 || s >= static_cast<int>(snapshots.size())) {
      throw PreconditionError("training subset index " + std::to_string(s) + " out of range");
    }
  }
}

// Calls fill(block, s_index, e, a_e, r_e) for every (snapshot, entity) pair.
template <class Fill>
TrainingSystem assemble(const Grid1D& grid, const PodBasis& basis, const SnapshotSet& snapshots,
                        const std::vector<int>& subset, TrainingMode mode, int rows_per_snapshot, Fill fill) {
  check_subset(snapshots, subset);
  const int n_e = grid.num_entities();
  TrainingSystem sys;
  sys.mode = mode;
  sys.subset = subset;
  sys.basis_dim = basis.dim();
  sys.c = Matrix::Zero(static_cast<Eigen::Index>(subset.size()) * rows_per_snapshot, n_e);
  for (std::size_t k = 0; k < subset.size(); ++k) {
    const int s = subset[k];
    const BurgersModel model(grid, snapshots.params[s]);
    const Vector w_tilde = reconstruct(basis, project(basis, snapshots.states[s]));
    const MeshTopology& topo = model.topology();
    for (int e = 1; e <= n_e; ++e) {
      const auto local = topo.localize(w_tilde, e);
      const ElementJacobian jac = model.element_jacobian(e, local);
      const Eigen::RowVectorXd a = jac.upstream * basis.modes.row(e - 1) + jac.own * basis.modes.row(e);
      auto block = sys.c.block(static_cast<Eigen::Index>(k) * rows_per_snapshot, e - 1, rows_per_snapshot, 1);
      fill(block, model, e, local, a);
    }
  }
  sys.d = sys.c.rowwise().sum();
  return sys;
}

}  // namespace

TrainingSystem assemble_training_residual(const Grid1D& grid, const PodBasis& basis, const SnapshotSet& snapshots,
                                          const std::vector<int>& subset) {
  return assemble(grid, basis, snapshots, subset, TrainingMode::residual, basis.dim(),
                  [](auto& block, const BurgersModel& model, int e, const std::array<double, 2>& local,
                     const Eigen::RowVectorXd& a) { block = a.transpose() * model.element_residual(e, local); });
}

TrainingSystem assemble_training_jacobian(const Grid1D& grid, const PodBasis& basis, const SnapshotSet& snapshots,
                                          const std::vector<int>& subset) {
  const int n = basis.dim();
  return assemble(grid, basis, snapshots, subset, TrainingMode::jacobian, n * n,
                  [n](auto& block, const BurgersModel&, int, const std::array<double, 2>&,
                      const Eigen::RowVectorXd& a) {
                    const Matrix outer = a.transpose() * a;
                    block = Eigen::Map<const Vector>(outer.data(), static_cast<Eigen::Index>(n) * n);
                  });
}

TrainingSystem assemble_training(TrainingMode mode, const Grid1D& grid, const PodBasis& basis,
                                 const SnapshotSet& snapshots, const std::vector<int>& subset) {
  return mode == TrainingMode::residual ? assemble_training_residual(grid, basis, snapshots, subset)
                                        : assemble_training_jacobian(grid, basis, snapshots, subset);
}

NnlsResult nnls_core(const Matrix& c, const Vector& d, double eps, int max_outer) {
  const Eigen::Index m = c.cols();
  if (d.size() != c.rows()) throw PreconditionError("nnls: C and d have inconsistent dimensions");
  if (max_outer <= 0) max_outer = static_cast<int>(10 * m);

  NnlsResult out;
  out.x = Vector::Zero(m);
  const double d_norm = d.norm();
  if (d_norm == 0.0) {
    out.ratio = 0.0;
    out.success = true;
    return out;
  }

  const double col_scale = c.colwise().norm().maxCoeff();
  std::vector<char> passive(m, 0);
  std::vector<char> barred(m, 0);
  Vector residual = d;
  double ratio = 1.0;
  out.ratio = ratio;

  auto passive_indices = [&] {
    std::vector<Eigen::Index> idx;
    for (Eigen::Index j = 0; j < m; ++j) {
      if (passive[j]) idx.push_back(j);
    }
    return idx;
  };
  auto passive_solve = [&](const std::vector<Eigen::Index>& idx) {
    Matrix cp(c.rows(), static_cast<Eigen::Index>(idx.size()));
    for (std::size_t k = 0; k < idx.size(); ++k) cp.col(static_cast<Eigen::Index>(k)) = c.col(idx[k]);
    return Vector(cp.colPivHouseholderQr().solve(d));
  };

  for (int outer = 0; outer < max_outer; ++outer) {
    out.iterations = outer;
    if (ratio <= eps) {
      out.success = true;
      return out;
    }

    const Vector grad = c.transpose() * residual;
    const double grad_floor = 1e-13 * col_scale * residual.norm();
    Eigen::Index enter = -1;
    double best = grad_floor;
    for (Eigen::Index j = 0; j < m; ++j) {
      if (passive[j] || barred[j]) continue;
      if (grad(j) > best) {
        best = grad(j);
        enter = j;
      }
    }
    if (enter < 0) break;  // KKT point within roundoff

    passive[enter] = 1;
    bool first_solve = true;
    for (;;) {
      const std::vector<Eigen::Index> idx = passive_indices();
      const Vector z = passive_solve(idx);
      if (first_solve) {
        first_solve = false;
        const auto pos = std::find(idx.begin(), idx.end(), enter) - idx.begin();
        if (!(z(pos) > 0.0)) {
          passive[enter] = 0;
          barred[enter] = 1;
          break;
        }
        std::fill(barred.begin(), barred.end(), 0);
      }
      if ((z.array() > 0.0).all()) {
        for (std::size_t k = 0; k < idx.size(); ++k) out.x(idx[k]) = z(static_cast<Eigen::Index>(k));
        break;
      }
      double alpha = std::numeric_limits<double>::infinity();
      for (std::size_t k = 0; k < idx.size(); ++k) {
        const double zk = z(static_cast<Eigen::Index>(k));
        if (zk <= 0.0) {
          const double xk = out.x(idx[k]);
          alpha = std::min(alpha, xk / (xk - zk));
        }
      }
      for (std::size_t k = 0; k < idx.size(); ++k) {
        double& xk = out.x(idx[k]);
        xk += alpha * (z(static_cast<Eigen::Index>(k)) - xk);
        if (xk <= 0.0 || std::abs(xk) < 1e-15) {
          xk = 0.0;
          passive[idx[k]] = 0;
        }
      }
    }

    residual = d - c * out.x;
    ratio = residual.norm() / d_norm;
    out.ratio = std::min(out.ratio, ratio);
  }
  out.iterations = max_outer;
  if (ratio <= eps) out.success = true;
  out.ratio = ratio;
  return out;
}

ReducedMesh nnls_solve(const TrainingSystem& system, double eps) {
  if (!(eps > 0.0 && eps < 1.0)) throw PreconditionError("nnls_solve: eps must lie in (0, 1)");
  if (system.c.cols() == 0 || system.c.rows() != system.d.size()) {
    throw PreconditionError("nnls_solve: C and d have inconsistent dimensions");
  }
  if (system.d.norm() == 0.0) throw PreconditionError("nnls_solve: training right-hand side is zero");

  const NnlsResult res = nnls_core(system.c, system.d, eps);
  if (!res.success) {
    throw ConvergenceFailure("nnls_solve: stopped at ratio " + std::to_string(res.ratio) + " > " +
                                 std::to_string(eps),
                             res.ratio);
  }
  ReducedMesh mesh;
  mesh.mode = system.mode;
  mesh.tolerance = eps;
  for (Eigen::Index j = 0; j < res.x.size(); ++j) {
    if (res.x(j) > 0.0) {
      mesh.entities.push_back(static_cast<int>(j) + 1);
      mesh.weights.push_back(res.x(j));
    }
  }
  mesh.achieved_ratio = certificate_ratio(system, mesh);
  if (!(mesh.achieved_ratio <= eps)) {
    throw ConvergenceFailure("nnls_solve: certificate check failed", mesh.achieved_ratio);
  }
  return mesh;
}

double certificate_ratio(const TrainingSystem& system, const ReducedMesh& mesh) {
  Vector r = -system.d;
  for (std::size_t i = 0; i < mesh.size(); ++i) r += mesh.weights[i] * system.c.col(mesh.entities[i] - 1);
  return r.norm() / system.d.norm();
}

ReducedMesh find_weights(const Grid1D& grid, const PodBasis& basis, const SnapshotSet& snapshots,
                         const std::vector<int>& subset, TrainingMode mode, double eps, std::ostream* log) {
  const auto start = std::chrono::steady_clock::now();
  const TrainingSystem sys = assemble_training(mode, grid, basis, snapshots, subset);
  ReducedMesh mesh = nnls_solve(sys, eps);
  if (log != nullptr) {
    const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
    *log << "ecsw " << to_string(mode) << " eps=" << eps << " |E|=" << mesh.size()
         << " ratio=" << mesh.achieved_ratio << " seconds=" << elapsed.count() << '\n';
  }
  return mesh;
}

}  // namespace goalrom
