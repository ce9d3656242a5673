#include "goalrom/rbf.hpp"

#include <cmath>

#include <Eigen/LU>

#include "goalrom/errors.hpp"

namespace goalrom {

ParameterDomain::ParameterDomain(Vector lo_, Vector hi_) : lo(std::move(lo_)), hi(std::move(hi_)) {
  if (lo.size() < 1 || lo.size() > 2 || lo.size() != hi.size()) {
    throw PreconditionError("ParameterDomain: need 1 or 2 matching bounds");
  }
  for (Eigen::Index i = 0; i < lo.size(); ++i) {
    if (!(lo(i) < hi(i))) throw PreconditionError("ParameterDomain: lo must be below hi");
  }
}

Vector ParameterDomain::to_unit(const Vector& mu) const {
  return ((mu - lo).array() / (hi - lo).array()).matrix();
}

Vector ParameterDomain::from_unit(const Vector& u) const {
  return (lo.array() + u.array() * (hi - lo).array()).matrix();
}

double ParameterDomain::unit_distance(const Vector& a, const Vector& b) const {
  return ((a - b).array() / (hi - lo).array()).matrix().norm();
}

std::vector<Vector> ParameterDomain::lattice() const {
  std::vector<Vector> pts;
  if (dim() == 1) {
    pts.reserve(lattice_1d);
    for (int k = 0; k < lattice_1d; ++k) {
      pts.push_back(from_unit(Vector::Constant(1, static_cast<double>(k) / (lattice_1d - 1))));
    }
    return pts;
  }
  pts.reserve(static_cast<std::size_t>(lattice_2d) * lattice_2d);
  for (int i = 0; i < lattice_2d; ++i) {
    for (int j = 0; j < lattice_2d; ++j) {
      Vector u(2);
      u << static_cast<double>(i) / (lattice_2d - 1), static_cast<double>(j) / (lattice_2d - 1);
      pts.push_back(from_unit(u));
    }
  }
  return pts;
}

double RbfModel::evaluate_unit(const Vector& u) const {
  double s = poly(0) + poly.tail(poly.size() - 1).dot(u);
  for (Eigen::Index k = 0; k < centers.rows(); ++k) {
    const double r = (centers.row(k).transpose() - u).norm();
    s += weights(k) * r * r * r;
  }
  return s;
}

RbfModel rbf_fit(const ParameterDomain& domain, const std::vector<Vector>& centers, const std::vector<double>& values) {
  const int dim = domain.dim();
  const auto k = static_cast<Eigen::Index>(centers.size());
  if (centers.size() != values.size()) throw PreconditionError("rbf_fit: centers and values differ in length");
  if (k < dim + 2) throw PreconditionError("rbf_fit: need at least n_p + 2 centers");

  RbfModel model;
  model.centers.resize(k, dim);
  model.values = Eigen::Map<const Vector>(values.data(), k);
  for (Eigen::Index i = 0; i < k; ++i) model.centers.row(i) = domain.to_unit(centers[i]).transpose();
  for (Eigen::Index i = 0; i < k; ++i) {
    for (Eigen::Index j = 0; j < i; ++j) {
      if ((model.centers.row(i) - model.centers.row(j)).norm() < 1e-12) {
        throw SingularSystemError("rbf_fit: duplicate centers", INFINITY);
      }
    }
  }

  const Eigen::Index m = k + dim + 1;
  Matrix a = Matrix::Zero(m, m);
  for (Eigen::Index i = 0; i < k; ++i) {
    for (Eigen::Index j = 0; j < k; ++j) {
      const double r = (model.centers.row(i) - model.centers.row(j)).norm();
      a(i, j) = r * r * r;
    }
    a(i, k) = 1.0;
    a(k, i) = 1.0;
    for (int d = 0; d < dim; ++d) {
      a(i, k + 1 + d) = model.centers(i, d);
      a(k + 1 + d, i) = model.centers(i, d);
    }
  }
  Vector rhs = Vector::Zero(m);
  rhs.head(k) = model.values;

  Eigen::FullPivLU<Matrix> lu(a);
  if (!lu.isInvertible()) throw SingularSystemError("rbf_fit: interpolation matrix is singular", INFINITY);
  const Vector coef = lu.solve(rhs);
  model.weights = coef.head(k);
  model.poly = coef.tail(dim + 1);
  return model;
}

double rbf_evaluate(const RbfModel& model, const ParameterDomain& domain, const Vector& mu) {
  return model.evaluate_unit(domain.to_unit(mu));
}

RbfMaximum rbf_argmax(const RbfModel& model, const ParameterDomain& domain, const std::vector<Vector>& excluded,
                      const std::vector<Vector>& extra_candidates, double exclusion) {
  RbfMaximum best;
  best.value = -1.0;
  auto consider = [&](const Vector& mu) {
    for (const Vector& x : excluded) {
      if (domain.unit_distance(mu, x) < exclusion) return;
    }
    const double v = std::abs(rbf_evaluate(model, domain, mu));
    if (v > best.value) {
      best.value = v;
      best.mu = mu;
    }
  };
  for (const Vector& mu : domain.lattice()) consider(mu);
  for (const Vector& mu : extra_candidates) consider(mu);
  if (best.value < 0.0) throw PreconditionError("rbf_argmax: every candidate is excluded");
  return best;
}

}  // namespace goalrom
