#include "goalrom/reduced_mesh.hpp"

#include <stdexcept>

#include "goalrom/csv.hpp"
#include "goalrom/errors.hpp"

namespace goalrom {

std::string to_string(TrainingMode mode) {
  return mode == TrainingMode::residual ? "residual" : "jacobian";
}

TrainingMode parse_training_mode(const std::string& text) {
  if (text == "residual") return TrainingMode::residual;
  if (text == "jacobian") return TrainingMode::jacobian;
  throw PreconditionError("unknown training mode '" + text + "'");
}

ReducedMesh ReducedMesh::full(const Grid1D& grid) {
  ReducedMesh mesh;
  for (int e = 1; e <= grid.num_entities(); ++e) {
    mesh.entities.push_back(e);
    mesh.weights.push_back(1.0);
  }
  return mesh;
}

void ReducedMesh::validate(const Grid1D& grid) const {
  if (entities.empty()) throw PreconditionError("reduced mesh is empty");
  if (entities.size() != weights.size()) throw PreconditionError("reduced mesh: ids and weights differ in length");
  for (std::size_t i = 0; i < entities.size(); ++i) {
    if (entities[i] < 1 || entities[i] > grid.num_entities()) {
      throw PreconditionError("reduced mesh: entity " + std::to_string(entities[i]) + " out of range");
    }
    if (i > 0 && entities[i] <= entities[i - 1]) throw PreconditionError("reduced mesh: ids not strictly ascending");
    if (!(weights[i] > 0.0)) throw PreconditionError("reduced mesh: non-positive weight");
  }
}

void save_reduced_mesh(const std::string& path, const ReducedMesh& mesh) {
  CsvWriter csv(path, {"entity_id", "weight"});
  csv.comment("mode=" + to_string(mesh.mode));
  csv.comment("epsilon=" + CsvWriter::cell(mesh.tolerance));
  csv.comment("achieved_ratio=" + CsvWriter::cell(mesh.achieved_ratio));
  for (std::size_t i = 0; i < mesh.size(); ++i) {
    csv.row({CsvWriter::cell(mesh.entities[i]), CsvWriter::cell(mesh.weights[i])});
  }
}

ReducedMesh load_reduced_mesh(const std::string& path) {
  const CsvTable table = read_csv(path, {"entity_id", "weight"});
  ReducedMesh mesh;
  for (const std::string& c : table.comments) {
    const auto eq = c.find('=');
    if (eq == std::string::npos) continue;
    const std::string key = c.substr(0, eq);
    const std::string value = c.substr(eq + 1);
    if (key == "mode") mesh.mode = parse_training_mode(value);
    if (key == "epsilon") mesh.tolerance = std::stod(value);
    if (key == "achieved_ratio") mesh.achieved_ratio = std::stod(value);
  }
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    mesh.entities.push_back(static_cast<int>(table.number(r, "entity_id")));
    mesh.weights.push_back(table.number(r, "weight"));
  }
  return mesh;
}

}  // namespace goalrom
