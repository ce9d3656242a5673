#pragma once

#include <string>
#include <vector>

#include "goalrom/burgers.hpp"

namespace goalrom {

enum class TrainingMode { residual, jacobian };

std::string to_string(TrainingMode mode);
/// Accepts "residual" or "jacobian"; throws PreconditionError otherwise.
TrainingMode parse_training_mode(const std::string& text);

/// ECSW quadrature: entity ids (ascending) with strictly positive weights.
struct ReducedMesh {
  std::vector<int> entities;
  std::vector<double> weights;
  TrainingMode mode = TrainingMode::residual;
  double tolerance = 0.0;
  double achieved_ratio = 0.0;

  std::size_t size() const noexcept { return entities.size(); }
  bool empty() const noexcept { return entities.empty(); }

  /// Every entity with unit weight; reproduces the exact reduced quantities.
  static ReducedMesh full(const Grid1D& grid);

  /// Throws PreconditionError if empty, unsorted, out of [1, N-1], or a weight <= 0.
  void validate(const Grid1D& grid) const;
};

/// CSV with comment lines for mode, epsilon and achieved ratio, then
/// entity_id,weight rows.
void save_reduced_mesh(const std::string& path, const ReducedMesh& mesh);
ReducedMesh load_reduced_mesh(const std::string& path);

}  // namespace goalrom
