#pragma once

// Steady 1D Burgers full-order model with exponential source
//
//   R_j(w) = (F(w_j) - F(w_{j-1})) / dx - a * exp(b * x_j),   F(u) = u^2 / 2,
//
// on j = 1..N-1 with the Dirichlet value w_0 = 1 eliminated from the unknowns.
// Each interior node is one mesh entity: entity e owns DOF e and its stencil is
// {e-1, e}. Entity ids therefore coincide with node indices and run 1..N-1.

#include <array>
#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace goalrom {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

class Grid1D {
 public:
  explicit Grid1D(int num_nodes, double x_lo = 0.0, double x_hi = 100.0);

  int num_nodes() const noexcept { return num_nodes_; }
  int num_entities() const noexcept { return num_nodes_ - 1; }
  double x_lo() const noexcept { return x_lo_; }
  double x_hi() const noexcept { return x_hi_; }
  double dx() const noexcept { return dx_; }
  double x(int j) const noexcept { return x_lo_ + j * dx_; }

 private:
  int num_nodes_;
  double x_lo_;
  double x_hi_;
  double dx_;
};

/// Source S(x) = amplitude * exp(rate * x). The one-parameter study varies
/// only `rate`; `amplitude` is the optional second design parameter.
struct BurgersParams {
  double rate = 0.05;
  double amplitude = 1.0;
};

/// Maps a parameter-space point (b) or (b, a) to model parameters.
BurgersParams params_from_point(const Vector& mu);

/// Entity-to-DOF maps of the upwind stencil.
class MeshTopology {
 public:
  explicit MeshTopology(const Grid1D& grid) : num_nodes_(grid.num_nodes()) {}

  int num_entities() const noexcept { return num_nodes_ - 1; }
  int first_entity() const noexcept { return 1; }
  int last_entity() const noexcept { return num_nodes_ - 1; }

  /// Own DOF of entity e (d_e = 1). Throws std::out_of_range.
  int own_dof(int e) const;
  /// Stencil DOFs {e-1, e}, own DOF last.
  std::array<int, 2> stencil(int e) const;

  /// L_{e+} w
  std::array<double, 2> localize(const Vector& w, int e) const;
  /// target += L_e^T value
  void scatter_add(Vector& target, int e, double value) const;

 private:
  int num_nodes_;
};

/// Row of dR_e/dw restricted to the stencil: {d/dw_{e-1}, d/dw_e}.
struct ElementJacobian {
  double upstream = 0.0;
  double own = 0.0;
};

/// Optional instrumentation: counts element evaluations per entity id.
struct ElementProbe {
  std::vector<long> residual_calls;
  std::vector<long> jacobian_calls;

  explicit ElementProbe(int num_nodes)
      : residual_calls(num_nodes, 0), jacobian_calls(num_nodes, 0) {}

  long total_residual_calls() const;
  long total_jacobian_calls() const;
  /// Entities with at least one residual or Jacobian evaluation.
  std::vector<int> touched_entities() const;
};

/// Lower-bidiagonal global Jacobian of the interior residual. Row e-1 holds
/// entity e; column 0 is the Dirichlet DOF.
struct BandedJacobian {
  Vector upstream;  // dR_e/dw_{e-1}, length N-1
  Vector own;       // dR_e/dw_e,     length N-1

  int rows() const { return static_cast<int>(own.size()); }

  /// (dR/dw) * M for an N-row matrix M. Result has N-1 rows.
  Matrix times(const Matrix& m) const;
  Vector times(const Vector& v) const;
  /// Solves J_int x = rhs on the interior unknowns (forward substitution).
  Vector solve_interior(const Vector& rhs) const;
  /// Solves J_int^T x = rhs (back substitution).
  Vector solve_interior_transpose(const Vector& rhs) const;
  /// Dense (N-1) x N copy, for tests and small oracles.
  Matrix dense() const;
};

class BurgersModel {
 public:
  BurgersModel(Grid1D grid, BurgersParams params);

  const Grid1D& grid() const noexcept { return grid_; }
  const MeshTopology& topology() const noexcept { return topology_; }
  const BurgersParams& params() const noexcept { return params_; }

  double source(double x) const;

  double element_residual(const Vector& w, int e) const;
  /// Residual of entity e from its localized stencil values {w_{e-1}, w_e}.
  double element_residual(int e, const std::array<double, 2>& local) const;
  ElementJacobian element_jacobian(const Vector& w, int e) const;
  ElementJacobian element_jacobian(int e, const std::array<double, 2>& local) const;

  /// Scatter-sum of all element residuals; length N-1, entry e-1 <-> entity e.
  Vector residual(const Vector& w) const;
  BandedJacobian jacobian(const Vector& w) const;
  /// Source evaluated at every interior node.
  Vector source_vector() const;

  /// Non-owning; pass nullptr to detach. Not thread-safe while attached.
  void attach_probe(ElementProbe* probe) const noexcept { probe_ = probe; }

 private:
  void check_entity(int e) const;

  Grid1D grid_;
  MeshTopology topology_;
  BurgersParams params_;
  mutable ElementProbe* probe_ = nullptr;
};

struct FomOptions {
  /// Converged when ||R||_2 <= tolerance, or when the Newton correction is
  /// below step_tolerance * ||w||_2 (R has reached its roundoff floor, which
  /// exceeds 1e-12 once w^2 / dx is large).
  double tolerance = 1e-12;
  double step_tolerance = 1e-14;
  int max_iterations = 200;
  int max_halvings = 30;
};

struct FomResult {
  Vector state;
  int iterations = 0;
  double residual_norm = 0.0;
};

/// Newton with backtracking on ||R||_2, boundary DOF pinned to 1.
/// Throws SolverFailure on non-convergence.
FomResult solve_fom(const BurgersModel& model, const Vector& initial, const FomOptions& options = {});
FomResult solve_fom(const BurgersModel& model, const FomOptions& options = {});

/// Exact root of the upwind stencil by forward marching from w_0 = 1.
Vector solve_fom_march(const BurgersModel& model);

/// Rectangle-rule integral dx * sum_j w_j.
double functional(const Grid1D& grid, const Vector& w);
/// dJ/dw: the constant row dx * 1^T, length N.
Vector functional_gradient(const Grid1D& grid);

/// One value per line at 17 significant digits.
void write_state(std::ostream& out, const Vector& w);
Vector read_state(std::istream& in);
void save_state(const std::string& path, const Vector& w);
Vector load_state(const std::string& path);

}  // namespace goalrom
