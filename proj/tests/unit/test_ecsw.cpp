#include <random>

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "goalrom/ecsw.hpp"
#include "goalrom/errors.hpp"

using namespace goalrom;
using goalrom::testing::all_indices;
using goalrom::testing::march_snapshots;

namespace {

/// min ||C x - d|| over x >= 0 by enumerating every support.
double brute_force_nnls(const Matrix& c, const Vector& d) {
  const int n = static_cast<int>(c.cols());
  double best = d.norm();
  for (int mask = 1; mask < (1 << n); ++mask) {
    std::vector<int> cols;
    for (int j = 0; j < n; ++j) {
      if (mask & (1 << j)) cols.push_back(j);
    }
    Matrix sub(c.rows(), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t k = 0; k < cols.size(); ++k) sub.col(k) = c.col(cols[k]);
    const Vector x = sub.completeOrthogonalDecomposition().solve(d);
    if ((x.array() < 0.0).any()) continue;
    best = std::min(best, (sub * x - d).norm());
  }
  return best;
}

/// Training matrix assembled from the dense global Jacobian and residual.
Matrix dense_training(TrainingMode mode, const Grid1D& grid, const PodBasis& basis, const SnapshotSet& snaps) {
  const int n = basis.dim();
  const int block = mode == TrainingMode::residual ? n : n * n;
  Matrix c(block * static_cast<int>(snaps.size()), grid.num_entities());
  for (std::size_t s = 0; s < snaps.size(); ++s) {
    const BurgersModel model(grid, snaps.params[s]);
    const Vector w = reconstruct(basis, project(basis, snaps.states[s]));
    const Matrix test = model.jacobian(w).dense() * basis.modes;
    const Vector r = model.residual(w);
    for (int e = 1; e <= grid.num_entities(); ++e) {
      const Vector row = test.row(e - 1).transpose();
      if (mode == TrainingMode::residual) {
        c.block(s * block, e - 1, block, 1) = row * r(e - 1);
      } else {
        const Matrix outer = row * row.transpose();
        c.block(s * block, e - 1, block, 1) = outer.reshaped();
      }
    }
  }
  return c;
}

}  // namespace

TEST(Nnls, MatchesBruteForceOnRandomInstances) {
  std::mt19937 rng(2024);
  std::normal_distribution<double> normal;
  for (int trial = 0; trial < 40; ++trial) {
    const int cols = 2 + trial % 7;
    const int rows = cols + 1 + trial % 5;
    Matrix c(rows, cols);
    Vector d(rows);
    for (int i = 0; i < rows; ++i) {
      d(i) = normal(rng);
      for (int j = 0; j < cols; ++j) c(i, j) = normal(rng);
    }
    const NnlsResult res = nnls_core(c, d, 1e-15);
    EXPECT_TRUE((res.x.array() >= 0.0).all());
    EXPECT_NEAR((c * res.x - d).norm(), brute_force_nnls(c, d), 1e-8) << "trial " << trial;
  }
}

TEST(Nnls, EarlyStopMeetsTolerance) {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  Matrix c(30, 8);
  for (int i = 0; i < 30; ++i) {
    for (int j = 0; j < 8; ++j) c(i, j) = uniform(rng);
  }
  const Vector d = c * Vector::Ones(8);
  for (double eps : {1e-1, 1e-3, 1e-6}) {
    const NnlsResult res = nnls_core(c, d, eps);
    ASSERT_TRUE(res.success);
    EXPECT_LE((c * res.x - d).norm(), eps * d.norm());
    EXPECT_NEAR(res.ratio, (c * res.x - d).norm() / d.norm(), 1e-14);
  }
}

TEST(Nnls, TiesEnterLowestIndexFirst) {
  Matrix c(2, 3);
  c << 1, 1, 1, 1, 1, 1;
  TrainingSystem sys;
  sys.c = c;
  sys.d = Vector::Constant(2, 3.0);
  const ReducedMesh mesh = nnls_solve(sys, 0.5);
  ASSERT_EQ(mesh.size(), 1u);
  EXPECT_EQ(mesh.entities.front(), 1);
  EXPECT_NEAR(mesh.weights.front(), 3.0, 1e-14);
}

TEST(Nnls, UnreachableTargetThrowsWithBestRatio) {
  TrainingSystem sys;
  sys.c = Matrix::Identity(3, 2);
  sys.d = Vector::Ones(3);
  try {
    nnls_solve(sys, 1e-3);
    FAIL() << "expected ConvergenceFailure";
  } catch (const ConvergenceFailure& e) {
    EXPECT_NEAR(e.best_ratio(), 1.0 / std::sqrt(3.0), 1e-12);
  }
}

TEST(Nnls, PreconditionErrors) {
  TrainingSystem sys;
  sys.c = Matrix::Identity(2, 2);
  sys.d = Vector::Ones(2);
  EXPECT_THROW(nnls_solve(sys, 0.0), PreconditionError);
  EXPECT_THROW(nnls_solve(sys, 1.0), PreconditionError);
  sys.d.setZero();
  EXPECT_THROW(nnls_solve(sys, 0.1), PreconditionError);
}

TEST(Ecsw, TrainingMatchesDenseAssembly) {
  const Grid1D grid(256);
  const SnapshotSet snaps = march_snapshots(grid, {0.01, 0.04, 0.07, 0.1});
  const PodBasis basis = build_basis(snaps);
  for (TrainingMode mode : {TrainingMode::residual, TrainingMode::jacobian}) {
    const TrainingSystem sys = assemble_training(mode, grid, basis, snaps, all_indices(snaps.size()));
    const Matrix oracle = dense_training(mode, grid, basis, snaps);
    EXPECT_LT((sys.c - oracle).norm(), 1e-12 * oracle.norm()) << to_string(mode);
    EXPECT_LT((sys.d - oracle * Vector::Ones(oracle.cols())).norm(), 1e-12 * sys.d.norm());
  }
}

TEST(Ecsw, ReturnedMeshesPassTheCertificate) {
  const Grid1D grid(1024);
  const SnapshotSet snaps = march_snapshots(grid, {0.01, 0.0302, 0.055, 0.0792, 0.0909, 0.1});
  const PodBasis basis = build_basis(snaps);
  for (TrainingMode mode : {TrainingMode::residual, TrainingMode::jacobian}) {
    const Matrix c = dense_training(mode, grid, basis, snaps);
    const Vector d = c * Vector::Ones(c.cols());
    for (double eps : {1e-4, 1e-6}) {
      const ReducedMesh mesh = find_weights(grid, basis, snaps, all_indices(snaps.size()), mode, eps);
      mesh.validate(grid);
      Vector xi = Vector::Zero(c.cols());
      for (std::size_t k = 0; k < mesh.size(); ++k) {
        EXPECT_GT(mesh.weights[k], 0.0);
        xi(mesh.entities[k] - 1) = mesh.weights[k];
      }
      EXPECT_LE((c * xi - d).norm(), eps * d.norm()) << to_string(mode) << " eps=" << eps;
      EXPECT_LT(mesh.size(), 1023u);
    }
  }
}

TEST(Ecsw, JacobianTrainingGivesSmallerMeshes) {
  const Grid1D grid(1024);
  const SnapshotSet snaps = march_snapshots(grid, {0.01, 0.0302, 0.055, 0.0792, 0.0909, 0.1});
  const PodBasis basis = build_basis(snaps);
  const auto subset = all_indices(snaps.size());
  for (double eps : {1e-4, 1e-6}) {
    const auto jac = find_weights(grid, basis, snaps, subset, TrainingMode::jacobian, eps).size();
    const auto res = find_weights(grid, basis, snaps, subset, TrainingMode::residual, eps).size();
    EXPECT_LT(jac, res) << "eps=" << eps;
  }
}

TEST(Ecsw, MeshGrowsAsToleranceTightens) {
  const Grid1D grid(1024);
  const SnapshotSet snaps = march_snapshots(grid, {0.01, 0.0302, 0.055, 0.0792, 0.1});
  const PodBasis basis = build_basis(snaps);
  const auto subset = all_indices(snaps.size());
  std::size_t previous = 0;
  for (double eps : {1e-2, 1e-4, 1e-6}) {
    const std::size_t size = find_weights(grid, basis, snaps, subset, TrainingMode::jacobian, eps).size();
    EXPECT_GE(size, previous);
    previous = size;
  }
}
