#pragma once

#include <vector>

#include <Eigen/Dense>

namespace goalrom {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Box-shaped design space with one or two parameters.
struct ParameterDomain {
  Vector lo;
  Vector hi;
  int lattice_1d = 2048;
  int lattice_2d = 256;

  ParameterDomain() = default;
  /// Throws PreconditionError unless 1 <= dim <= 2 and lo < hi componentwise.
  ParameterDomain(Vector lo_, Vector hi_);

  int dim() const noexcept { return static_cast<int>(lo.size()); }
  Vector to_unit(const Vector& mu) const;
  Vector from_unit(const Vector& u) const;
  /// Euclidean distance in unit coordinates.
  double unit_distance(const Vector& a, const Vector& b) const;
  /// Scan points: lattice_1d evenly spaced values (1D) or a lattice_2d^2
  /// tensor grid (2D), endpoints included, in parameter coordinates.
  std::vector<Vector> lattice() const;
};

/// Cubic radial basis interpolant phi(r) = r^3 with a linear polynomial tail,
/// built in unit coordinates of a domain.
struct RbfModel {
  Matrix centers;  // one center per row, unit coordinates
  Vector values;
  Vector weights;
  Vector poly;  // constant term, then one slope per dimension

  double evaluate_unit(const Vector& u) const;
};

/// Requires at least dim + 2 centers. Throws SingularSystemError when two
/// centers coincide or the saddle-point system is singular.
RbfModel rbf_fit(const ParameterDomain& domain, const std::vector<Vector>& centers, const std::vector<double>& values);

double rbf_evaluate(const RbfModel& model, const ParameterDomain& domain, const Vector& mu);

struct RbfMaximum {
  Vector mu;
  double value = 0.0;
};

/// Largest |s(mu)| over the lattice plus `extra_candidates`, skipping any
/// candidate within `exclusion` (unit distance) of a point in `excluded`.
/// Ties keep the earliest candidate; lattice points come first.
RbfMaximum rbf_argmax(const RbfModel& model, const ParameterDomain& domain, const std::vector<Vector>& excluded,
                      const std::vector<Vector>& extra_candidates = {}, double exclusion = 1e-3);

}  // namespace goalrom
