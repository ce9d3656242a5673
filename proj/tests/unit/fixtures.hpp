#pragma once

#include <numeric>
#include <vector>

#include "goalrom/burgers.hpp"
#include "goalrom/pod.hpp"
#include "goalrom/sampler.hpp"

namespace goalrom::testing {

inline ParameterDomain unit_domain() { return ParameterDomain(Vector::Constant(1, 0.01), Vector::Constant(1, 0.1)); }

/// Marched FOM snapshots at the given source rates.
inline SnapshotSet march_snapshots(const Grid1D& grid, const std::vector<double>& rates) {
  SnapshotSet set;
  for (double b : rates) {
    const BurgersModel model(grid, {b, 1.0});
    set.add(model.params(), solve_fom_march(model));
  }
  return set;
}

inline std::vector<int> all_indices(std::size_t n) {
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  return idx;
}

/// Finished default ROM-mode adaptive run, computed once per process.
inline const SamplerState& default_rom_run() {
  static const SamplerState state = [] {
    SamplerState s = init_sampler(SamplerConfig{}, unit_domain());
    run_adaptive(s);
    return s;
  }();
  return state;
}

}  // namespace goalrom::testing
