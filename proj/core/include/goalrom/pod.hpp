#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "goalrom/burgers.hpp"

namespace goalrom {

/// FOM solutions and the parameters they were computed at.
struct SnapshotSet {
  std::vector<BurgersParams> params;
  std::vector<Vector> states;

  std::size_t size() const noexcept { return states.size(); }
  void add(const BurgersParams& p, Vector w) {
    params.push_back(p);
    states.push_back(std::move(w));
  }
};

/// Affine trial space w_ref + span(modes), modes orthonormal and ordered by
/// descending singular value.
struct PodBasis {
  Vector reference;
  Matrix modes;
  Vector singular_values;

  int dim() const noexcept { return static_cast<int>(modes.cols()); }
  int full_dim() const noexcept { return static_cast<int>(modes.rows()); }
};

/// Columns with sigma_i <= kRankGuard * sigma_1 are dropped.
inline constexpr double kRankGuard = 1e-12;

/// Thin POD of the mean-centred snapshots, followed by a modified
/// Gram-Schmidt pass.
/// Throws PreconditionError on an empty/ragged set and EmptyBasisError when
/// every deviation from the mean vanishes.
PodBasis build_basis(const std::vector<Vector>& states);
PodBasis build_basis(const SnapshotSet& snapshots);

/// V^T (w - w_ref)
Vector project(const PodBasis& basis, const Vector& w);
/// w_ref + V w_hat
Vector reconstruct(const PodBasis& basis, const Vector& reduced);

/// Basis matrix as text (row-major, space separated) plus a metadata sidecar
/// holding n, N, the singular values, the snapshot parameters and w_ref.
void save_basis(const std::string& matrix_path, const std::string& meta_path, const PodBasis& basis,
                const std::vector<BurgersParams>& snapshot_params);
PodBasis load_basis(const std::string& matrix_path, const std::string& meta_path);

}  // namespace goalrom
