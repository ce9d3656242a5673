#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "goalrom/errors.hpp"
#include "goalrom/rbf.hpp"

using namespace goalrom;
using goalrom::testing::unit_domain;

namespace {

std::vector<Vector> points_1d(const std::vector<double>& b) {
  std::vector<Vector> out;
  for (double v : b) out.push_back(Vector::Constant(1, v));
  return out;
}

}  // namespace

TEST(Rbf, InterpolatesAtCenters) {
  const ParameterDomain domain = unit_domain();
  const auto centers = points_1d({0.01, 0.023, 0.04, 0.061, 0.077, 0.1});
  const std::vector<double> values = {0.0, 3e-4, -1e-3, 2e-5, 7e-4, 0.0};
  const RbfModel model = rbf_fit(domain, centers, values);
  for (std::size_t k = 0; k < centers.size(); ++k) {
    EXPECT_NEAR(rbf_evaluate(model, domain, centers[k]), values[k], 1e-8 * 1e-3);
  }
}

TEST(Rbf, ReproducesLinearFunctions) {
  const ParameterDomain domain(Eigen::Vector2d(0.01, 0.5), Eigen::Vector2d(0.1, 1.5));
  std::vector<Vector> centers;
  std::vector<double> values;
  for (double b : {0.01, 0.04, 0.1}) {
    for (double a : {0.5, 0.9, 1.5}) {
      centers.push_back(Eigen::Vector2d(b, a));
      values.push_back(2.0 * b - 0.3 * a + 1.0);
    }
  }
  const RbfModel model = rbf_fit(domain, centers, values);
  EXPECT_NEAR(rbf_evaluate(model, domain, Eigen::Vector2d(0.07, 1.1)), 2.0 * 0.07 - 0.3 * 1.1 + 1.0, 1e-10);
  EXPECT_LT(model.weights.norm(), 1e-9);
}

TEST(Rbf, ZeroValuesGiveZeroMaximum) {
  const ParameterDomain domain = unit_domain();
  const RbfModel model = rbf_fit(domain, points_1d({0.01, 0.05, 0.1}), {0.0, 0.0, 0.0});
  EXPECT_EQ(rbf_argmax(model, domain, {}).value, 0.0);
}

TEST(Rbf, SpikeMaximumSitsAtTheSpike) {
  const ParameterDomain domain = unit_domain();
  const auto centers = points_1d({0.01, 0.025, 0.04, 0.055, 0.07, 0.085, 0.1});
  std::vector<double> values(7, 0.0);
  values[3] = 1e-2;
  const RbfModel model = rbf_fit(domain, centers, values);
  const RbfMaximum best = rbf_argmax(model, domain, {});
  const double cell = (domain.hi(0) - domain.lo(0)) / (domain.lattice_1d - 1);
  EXPECT_LE(std::abs(best.mu(0) - 0.055), cell);
  EXPECT_NEAR(best.value, 1e-2, 1e-4);
}

TEST(Rbf, ExclusionSkipsNearbyCandidates) {
  const ParameterDomain domain = unit_domain();
  const auto centers = points_1d({0.01, 0.025, 0.04, 0.055, 0.07, 0.085, 0.1});
  std::vector<double> values(7, 0.0);
  values[3] = 1e-2;
  const RbfModel model = rbf_fit(domain, centers, values);
  const RbfMaximum best = rbf_argmax(model, domain, {Vector::Constant(1, 0.055)}, {}, 0.05);
  EXPECT_GE(domain.unit_distance(best.mu, Vector::Constant(1, 0.055)), 0.05);
  EXPECT_LT(best.value, 1e-2);
}

TEST(Rbf, Errors) {
  const ParameterDomain domain = unit_domain();
  EXPECT_THROW(rbf_fit(domain, points_1d({0.01, 0.05}), {0.0, 1.0}), PreconditionError);
  EXPECT_THROW(rbf_fit(domain, points_1d({0.01, 0.05, 0.05}), {0.0, 1.0, 2.0}), SingularSystemError);
  EXPECT_THROW(ParameterDomain(Vector::Constant(1, 0.1), Vector::Constant(1, 0.01)), PreconditionError);
}

TEST(Rbf, LatticeShapes) {
  const ParameterDomain d1 = unit_domain();
  EXPECT_EQ(d1.lattice().size(), 2048u);
  EXPECT_DOUBLE_EQ(d1.lattice().front()(0), 0.01);
  EXPECT_DOUBLE_EQ(d1.lattice().back()(0), 0.1);
  const ParameterDomain d2(Eigen::Vector2d(0.01, 0.5), Eigen::Vector2d(0.1, 1.5));
  EXPECT_EQ(d2.lattice().size(), 256u * 256u);
  EXPECT_NEAR(d2.unit_distance(Eigen::Vector2d(0.01, 0.5), Eigen::Vector2d(0.1, 1.5)), std::sqrt(2.0), 1e-15);
}
