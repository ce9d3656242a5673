#include "goalrom/pod.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include <Eigen/QR>
#include <Eigen/SVD>

#include "goalrom/errors.hpp"

namespace goalrom {

namespace {

// A column whose norm drops below this fraction after removing its
// projections on earlier columns is numerically dependent and discarded.
constexpr double kDependenceGuard = 1e-10;

void modified_gram_schmidt(Matrix& q, Vector& sigma) {
  int kept = 0;
  for (int j = 0; j < q.cols(); ++j) {
    Vector v = q.col(j);
    const double original = v.norm();
    // Two sweeps restore orthogonality lost to cancellation.
    for (int sweep = 0; sweep < 2; ++sweep) {
      for (int k = 0; k < kept; ++k) v -= q.col(k).dot(v) * q.col(k);
    }
    const double remaining = v.norm();
    if (!(remaining > kDependenceGuard * original) || remaining == 0.0) continue;
    q.col(kept) = v / remaining;
    sigma(kept) = sigma(j);
    ++kept;
  }
  q.conservativeResize(Eigen::NoChange, kept);
  sigma.conservativeResize(kept);
}

}  // namespace

PodBasis build_basis(const std::vector<Vector>& states) {
  if (states.empty()) throw PreconditionError("build_basis: no snapshots");
  const Eigen::Index n_full = states.front().size();
  for (const Vector& s : states) {
    if (s.size() != n_full) throw PreconditionError("build_basis: snapshots differ in length");
  }
  const auto n_snap = static_cast<Eigen::Index>(states.size());

  Vector reference = Vector::Zero(n_full);
  for (const Vector& s : states) reference += s;
  reference /= static_cast<double>(n_snap);

  Matrix deviations(n_full, n_snap);
  for (Eigen::Index s = 0; s < n_snap; ++s) deviations.col(s) = states[s] - reference;

  // Thin SVD through S = QR and an SVD of the small factor R. This resolves
  // singular values down to roundoff, which the squared Gram spectrum cannot;
  // mean-centring always leaves one exactly zero singular value.
  const Eigen::Index k = std::min(n_full, n_snap);
  Eigen::HouseholderQR<Matrix> qr(deviations);
  const Matrix q = qr.householderQ() * Matrix::Identity(n_full, k);
  const Matrix r = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
  Eigen::JacobiSVD<Matrix> svd(r, Eigen::ComputeThinU);
  const Vector& all_sigma = svd.singularValues();
  const double sigma_max = all_sigma.size() > 0 ? all_sigma(0) : 0.0;
  if (!(sigma_max > 0.0)) throw EmptyBasisError("build_basis: all snapshot deviations are zero");

  int rank = 0;
  while (rank < all_sigma.size() && all_sigma(rank) > kRankGuard * sigma_max) ++rank;
  Matrix modes = q * svd.matrixU().leftCols(rank);
  Vector sigma = all_sigma.head(rank);
  // Rows where every snapshot agrees (the Dirichlet node) stay exactly zero.
  for (Eigen::Index i = 0; i < n_full; ++i) {
    if ((deviations.row(i).array() == 0.0).all()) modes.row(i).setZero();
  }
  modified_gram_schmidt(modes, sigma);
  if (modes.cols() == 0) throw EmptyBasisError("build_basis: numerical rank is zero");

  return PodBasis{std::move(reference), std::move(modes), std::move(sigma)};
}

PodBasis build_basis(const SnapshotSet& snapshots) { return build_basis(snapshots.states); }

Vector project(const PodBasis& basis, const Vector& w) {
  if (w.size() != basis.reference.size()) throw PreconditionError("project: dimension mismatch");
  return basis.modes.transpose() * (w - basis.reference);
}

Vector reconstruct(const PodBasis& basis, const Vector& reduced) {
  if (reduced.size() != basis.modes.cols()) throw PreconditionError("reconstruct: dimension mismatch");
  return basis.reference + basis.modes * reduced;
}

void save_basis(const std::string& matrix_path, const std::string& meta_path, const PodBasis& basis,
                const std::vector<BurgersParams>& snapshot_params) {
  std::ofstream mat(matrix_path);
  if (!mat) throw std::runtime_error("cannot write " + matrix_path);
  mat << std::setprecision(17);
  for (Eigen::Index r = 0; r < basis.modes.rows(); ++r) {
    for (Eigen::Index c = 0; c < basis.modes.cols(); ++c) {
      if (c > 0) mat << ' ';
      mat << basis.modes(r, c);
    }
    mat << '\n';
  }

  std::ofstream meta(meta_path);
  if (!meta) throw std::runtime_error("cannot write " + meta_path);
  meta << std::setprecision(17);
  meta << "n " << basis.dim() << '\n';
  meta << "N " << basis.full_dim() << '\n';
  meta << "sigma";
  for (Eigen::Index i = 0; i < basis.singular_values.size(); ++i) meta << ' ' << basis.singular_values(i);
  meta << '\n';
  meta << "params";
  for (const BurgersParams& p : snapshot_params) meta << ' ' << p.rate << ':' << p.amplitude;
  meta << '\n';
  meta << "reference";
  for (Eigen::Index i = 0; i < basis.reference.size(); ++i) meta << ' ' << basis.reference(i);
  meta << '\n';
}

PodBasis load_basis(const std::string& matrix_path, const std::string& meta_path) {
  std::ifstream meta(meta_path);
  if (!meta) throw std::runtime_error("cannot read " + meta_path);
  int n = -1;
  int n_full = -1;
  std::vector<double> sigma;
  std::vector<double> reference;
  std::string line;
  while (std::getline(meta, line)) {
    std::istringstream ls(line);
    std::string key;
    ls >> key;
    if (key == "n") {
      ls >> n;
    } else if (key == "N") {
      ls >> n_full;
    } else if (key == "sigma") {
      double v;
      while (ls >> v) sigma.push_back(v);
    } else if (key == "reference") {
      double v;
      while (ls >> v) reference.push_back(v);
    }
  }
  if (n < 0 || n_full < 0 || static_cast<int>(reference.size()) != n_full) {
    throw std::runtime_error("load_basis: malformed metadata " + meta_path);
  }

  std::ifstream mat(matrix_path);
  if (!mat) throw std::runtime_error("cannot read " + matrix_path);
  Matrix modes(n_full, n);
  for (int r = 0; r < n_full; ++r) {
    for (int c = 0; c < n; ++c) {
      if (!(mat >> modes(r, c))) throw std::runtime_error("load_basis: truncated matrix " + matrix_path);
    }
  }
  return PodBasis{Eigen::Map<Vector>(reference.data(), n_full), std::move(modes),
                  Eigen::Map<Vector>(sigma.data(), static_cast<Eigen::Index>(sigma.size()))};
}

}  // namespace goalrom
