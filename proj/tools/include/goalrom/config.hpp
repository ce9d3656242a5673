#pragma once

// Experiment configuration: INI-style key = value lines grouped in
// [sections]. Unknown sections or keys are rejected.

#include <iosfwd>
#include <string>
#include <vector>

#include "goalrom/rbf.hpp"
#include "goalrom/sampler.hpp"

namespace goalrom {

struct ExperimentConfig {
  SamplerConfig sampler;
  ParameterDomain domain{Vector::Constant(1, 0.01), Vector::Constant(1, 0.1)};

  // [verify]
  double verify_rate = 0.044;
  std::vector<double> residual_eps{1e-4, 1e-6, 1e-8};
  std::vector<double> jacobian_eps{1e-4, 1e-6, 1e-7};

  // [validation]
  int validation_points = 20;  // per dimension
  unsigned seed = 0;
  /// Uniform jitter of interior lattice points, as a fraction of the spacing.
  double jitter = 0.0;

  // [greedy]
  double work_budget = 0.0;  // <= 0: derive from a goal-oriented run
  std::string budget_from;   // run directory whose ledger sets the budget
  SamplingMode reference_mode = SamplingMode::rom;
  std::vector<double> probe_rates{0.02, 0.044, 0.08};

  // [output]
  std::string output_dir = "out";
};

/// Throws ConfigError with the offending key on malformed input.
ExperimentConfig parse_config(std::istream& in);
ExperimentConfig load_config(const std::string& path);
/// Writes every key, so the result parses back to an equal configuration.
void write_config(std::ostream& out, const ExperimentConfig& config);

/// Validation lattice in parameter coordinates: `points` values per
/// dimension, endpoints included, optionally jittered.
std::vector<Vector> validation_lattice(const ExperimentConfig& config);

}  // namespace goalrom
