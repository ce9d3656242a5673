#include "goalrom/burgers.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "goalrom/errors.hpp"

namespace goalrom {

Grid1D::Grid1D(int num_nodes, double x_lo, double x_hi)
    : num_nodes_(num_nodes), x_lo_(x_lo), x_hi_(x_hi), dx_(0.0) {
  if (num_nodes < 3) {
    throw PreconditionError("Grid1D: need at least 3 nodes");
  }
  if (!(x_hi > x_lo)) {
    throw PreconditionError("Grid1D: empty domain");
  }
  dx_ = (x_hi - x_lo) / (num_nodes - 1);
}

BurgersParams params_from_point(const Vector& mu) {
  if (mu.size() == 1) return BurgersParams{mu(0), 1.0};
  if (mu.size() == 2) return BurgersParams{mu(0), mu(1)};
  throw PreconditionError("params_from_point: expected 1 or 2 parameters");
}

int MeshTopology::own_dof(int e) const {
  if (e < 1 || e >= num_nodes_) {
    throw std::out_of_range("entity id " + std::to_string(e) + " outside [1, " +
                            std::to_string(num_nodes_ - 1) + "]");
  }
  return e;
}

std::array<int, 2> MeshTopology::stencil(int e) const {
  const int j = own_dof(e);
  return {j - 1, j};
}

std::array<double, 2> MeshTopology::localize(const Vector& w, int e) const {
  const auto s = stencil(e);
  return {w(s[0]), w(s[1])};
}

void MeshTopology::scatter_add(Vector& target, int e, double value) const {
  target(own_dof(e) - 1) += value;
}

long ElementProbe::total_residual_calls() const {
  long total = 0;
  for (long c : residual_calls) total += c;
  return total;
}

long ElementProbe::total_jacobian_calls() const {
  long total = 0;
  for (long c : jacobian_calls) total += c;
  return total;
}

std::vector<int> ElementProbe::touched_entities() const {
  std::vector<int> touched;
  for (std::size_t e = 0; e < residual_calls.size(); ++e) {
    if (residual_calls[e] > 0 || jacobian_calls[e] > 0) touched.push_back(static_cast<int>(e));
  }
  return touched;
}

Matrix BandedJacobian::times(const Matrix& m) const {
  const int n_rows = rows();
  Matrix out(n_rows, m.cols());
  for (int r = 0; r < n_rows; ++r) {
    out.row(r) = upstream(r) * m.row(r) + own(r) * m.row(r + 1);
  }
  return out;
}

Vector BandedJacobian::times(const Vector& v) const {
  const int n_rows = rows();
  Vector out(n_rows);
  for (int r = 0; r < n_rows; ++r) out(r) = upstream(r) * v(r) + own(r) * v(r + 1);
  return out;
}

Vector BandedJacobian::solve_interior(const Vector& rhs) const {
  const int n_rows = rows();
  Vector x(n_rows);
  for (int r = 0; r < n_rows; ++r) {
    if (own(r) == 0.0) throw SingularSystemError("bidiagonal Jacobian has a zero pivot", std::numeric_limits<double>::infinity());
    const double coupled = r > 0 ? upstream(r) * x(r - 1) : 0.0;
    x(r) = (rhs(r) - coupled) / own(r);
  }
  return x;
}

Vector BandedJacobian::solve_interior_transpose(const Vector& rhs) const {
  const int n_rows = rows();
  Vector x(n_rows);
  for (int r = n_rows - 1; r >= 0; --r) {
    if (own(r) == 0.0) throw SingularSystemError("bidiagonal Jacobian has a zero pivot", std::numeric_limits<double>::infinity());
    const double coupled = r + 1 < n_rows ? upstream(r + 1) * x(r + 1) : 0.0;
    x(r) = (rhs(r) - coupled) / own(r);
  }
  return x;
}

Matrix BandedJacobian::dense() const {
  const int n_rows = rows();
  Matrix out = Matrix::Zero(n_rows, n_rows + 1);
  for (int r = 0; r < n_rows; ++r) {
    out(r, r) = upstream(r);
    out(r, r + 1) = own(r);
  }
  return out;
}

BurgersModel::BurgersModel(Grid1D grid, BurgersParams params)
    : grid_(grid), topology_(grid), params_(params) {}

double BurgersModel::source(double x) const {
  return params_.amplitude * std::exp(params_.rate * x);
}

void BurgersModel::check_entity(int e) const { (void)topology_.own_dof(e); }

double BurgersModel::element_residual(const Vector& w, int e) const {
  return element_residual(e, topology_.localize(w, e));
}

double BurgersModel::element_residual(int e, const std::array<double, 2>& local) const {
  check_entity(e);
  if (probe_ != nullptr) ++probe_->residual_calls[e];
  const double flux_up = 0.5 * local[0] * local[0];
  const double flux_own = 0.5 * local[1] * local[1];
  return (flux_own - flux_up) / grid_.dx() - source(grid_.x(e));
}

ElementJacobian BurgersModel::element_jacobian(const Vector& w, int e) const {
  return element_jacobian(e, topology_.localize(w, e));
}

ElementJacobian BurgersModel::element_jacobian(int e, const std::array<double, 2>& local) const {
  check_entity(e);
  if (probe_ != nullptr) ++probe_->jacobian_calls[e];
  const double inv_dx = 1.0 / grid_.dx();
  return {-local[0] * inv_dx, local[1] * inv_dx};
}

Vector BurgersModel::residual(const Vector& w) const {
  Vector r = Vector::Zero(grid_.num_entities());
  for (int e = topology_.first_entity(); e <= topology_.last_entity(); ++e) {
    topology_.scatter_add(r, e, element_residual(w, e));
  }
  return r;
}

BandedJacobian BurgersModel::jacobian(const Vector& w) const {
  const int n_e = grid_.num_entities();
  BandedJacobian jac{Vector(n_e), Vector(n_e)};
  for (int e = topology_.first_entity(); e <= topology_.last_entity(); ++e) {
    const ElementJacobian row = element_jacobian(w, e);
    jac.upstream(e - 1) = row.upstream;
    jac.own(e - 1) = row.own;
  }
  return jac;
}

Vector BurgersModel::source_vector() const {
  Vector s(grid_.num_entities());
  for (int e = 1; e <= grid_.num_entities(); ++e) s(e - 1) = source(grid_.x(e));
  return s;
}

FomResult solve_fom(const BurgersModel& model, const Vector& initial, const FomOptions& options) {
  if (!(options.tolerance > 0.0)) throw PreconditionError("solve_fom: tolerance must be positive");
  const int n = model.grid().num_nodes();
  if (initial.size() != n) throw PreconditionError("solve_fom: initial state has wrong length");

  Vector w = initial;
  w(0) = 1.0;

  Vector r = model.residual(w);
  double norm = r.norm();
  for (int it = 0; it < options.max_iterations; ++it) {
    if (norm <= options.tolerance) return {w, it, norm};

    const Vector step = model.jacobian(w).solve_interior(-r);
    // A Newton correction below roundoff of w: R already sits on its floor.
    if (step.norm() <= options.step_tolerance * w.norm()) return {w, it, norm};
    double length = 1.0;
    bool accepted = false;
    for (int h = 0; h <= options.max_halvings; ++h) {
      Vector trial = w;
      trial.tail(n - 1) += length * step;
      Vector trial_r = model.residual(trial);
      const double trial_norm = trial_r.norm();
      if (std::isfinite(trial_norm) && trial_norm < norm) {
        w = std::move(trial);
        r = std::move(trial_r);
        norm = trial_norm;
        accepted = true;
        break;
      }
      length *= 0.5;
    }
    if (!accepted) break;
  }
  if (norm <= options.tolerance) return {w, options.max_iterations, norm};
  throw SolverFailure("solve_fom: Newton did not converge, ||R|| = " + std::to_string(norm), norm,
                      options.max_iterations);
}

FomResult solve_fom(const BurgersModel& model, const FomOptions& options) {
  return solve_fom(model, Vector::Ones(model.grid().num_nodes()), options);
}

Vector solve_fom_march(const BurgersModel& model) {
  const Grid1D& grid = model.grid();
  Vector w(grid.num_nodes());
  w(0) = 1.0;
  for (int j = 1; j < grid.num_nodes(); ++j) {
    w(j) = std::sqrt(w(j - 1) * w(j - 1) + 2.0 * grid.dx() * model.source(grid.x(j)));
  }
  return w;
}

double functional(const Grid1D& grid, const Vector& w) { return grid.dx() * w.sum(); }

Vector functional_gradient(const Grid1D& grid) {
  return Vector::Constant(grid.num_nodes(), grid.dx());
}

void write_state(std::ostream& out, const Vector& w) {
  out << std::setprecision(17);
  for (Eigen::Index j = 0; j < w.size(); ++j) out << w(j) << '\n';
}

Vector read_state(std::istream& in) {
  std::vector<double> values;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream ls(line);
    double v = 0.0;
    if (!(ls >> v)) throw std::runtime_error("read_state: malformed line '" + line + "'");
    values.push_back(v);
  }
  return Eigen::Map<const Vector>(values.data(), static_cast<Eigen::Index>(values.size()));
}

void save_state(const std::string& path, const Vector& w) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  write_state(out, w);
}

Vector load_state(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  return read_state(in);
}

}  // namespace goalrom
