#include "goalrom/sampler.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

#include "goalrom/ecsw.hpp"
#include "goalrom/errors.hpp"

namespace goalrom {

namespace {

// Unit distance below which two parameter points are the same point.
constexpr double kCoincident = 1e-9;

using Clock = std::chrono::steady_clock;

std::vector<Vector> initial_snapshot_grid(const ParameterDomain& domain, int k) {
  std::vector<Vector> pts;
  auto coord = [k](int i) { return static_cast<double>(i) / (k - 1); };
  if (domain.dim() == 1) {
    for (int i = 0; i < k; ++i) pts.push_back(domain.from_unit(Vector::Constant(1, coord(i))));
    return pts;
  }
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) {
      Vector u(2);
      u << coord(i), coord(j);
      pts.push_back(domain.from_unit(u));
    }
  }
  return pts;
}

std::vector<Vector> initial_rom_points(const ParameterDomain& domain, int k) {
  std::vector<Vector> pts;
  auto mid = [k](int i) { return (i + 0.5) / (k - 1); };
  if (domain.dim() == 1) {
    for (int i = 0; i + 1 < k; ++i) pts.push_back(domain.from_unit(Vector::Constant(1, mid(i))));
    return pts;
  }
  for (int i = 0; i + 1 < k; ++i) {
    for (int j = 0; j + 1 < k; ++j) {
      Vector u(2);
      u << mid(i), mid(j);
      pts.push_back(domain.from_unit(u));
    }
  }
  return pts;
}

// Indices of `pool` ordered by distance to mu; ties by index.
std::vector<std::size_t> by_distance(const ParameterDomain& domain, const std::vector<Vector>& pool, const Vector& mu) {
  std::vector<std::size_t> order(pool.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return domain.unit_distance(pool[a], mu) < domain.unit_distance(pool[b], mu);
  });
  return order;
}

bool near_any(const ParameterDomain& domain, const std::vector<Vector>& pool, const Vector& mu, double radius) {
  return std::any_of(pool.begin(), pool.end(), [&](const Vector& x) { return domain.unit_distance(x, mu) < radius; });
}

std::size_t nearest_snapshot(const SamplerState& s, const Vector& mu) {
  return by_distance(s.domain, s.snapshot_mu, mu).front();
}

void add_snapshot(SamplerState& s, const Vector& mu) {
  const BurgersModel model(s.grid, s.params(mu));
  const FomResult fom = s.snapshots.size() == 0
                            ? solve_fom(model, s.config.fom)
                            : solve_fom(model, s.snapshots.states[nearest_snapshot(s, mu)], s.config.fom);
  ++s.calls.fom_solves;
  s.snapshots.add(model.params(), fom.state);
  s.snapshot_mu.push_back(mu);
}

void rebuild_models(SamplerState& s) {
  s.basis = build_basis(s.snapshots);
  if (!uses_hyperreduction(s.config.mode)) return;
  s.mesh = find_weights(s.grid, s.basis, s.snapshots, s.ecsw_subset(), s.config.training, s.config.nnls_tolerance);
  ++s.calls.meshes_trained;
}

RomSolution counted_solve(SamplerState& s, const Vector& mu) {
  if (uses_hyperreduction(s.config.mode)) {
    ++s.calls.hyper_solves;
  } else {
    ++s.calls.exact_solves;
  }
  return s.solve_model(mu);
}

// Solves the current model at p.mu and restarts its error record.
void reset_point(SamplerState& s, RomPoint& p, long& iterations) {
  const RomSolution sol = counted_solve(s, p.mu);
  iterations += sol.iterations;
  const BurgersModel model(s.grid, s.params(p.mu));
  p.state = sol.state;
  p.residual_norm = model.residual(sol.state).norm();
  p.record.mu = p.mu;
  p.record.eps_r.clear();
  p.record.refreshed_cycle = s.cycle;
  if (s.config.mode != SamplingMode::greedy) p.record.eps_f = epsilon_f(model, sol.state);
}

void create_point(SamplerState& s, const Vector& mu, long& iterations) {
  RomPoint p;
  p.mu = mu;
  p.record.created_cycle = s.cycle;
  reset_point(s, p, iterations);
  s.points.push_back(std::move(p));
}

// Adds eps_r of the new basis at each point and moves its state to the
// fine-space Gauss-Newton estimate, so later increments telescope.
void refine_points(SamplerState& s) {
  const bool hyper = s.config.mode == SamplingMode::hrom_hyperdwr;
  for (RomPoint& p : s.points) {
    const BurgersModel model(s.grid, s.params(p.mu));
    const FineCorrection corr =
        hyper ? epsilon_r_hyper(model, s.basis, *s.mesh, p.state) : epsilon_r_exact(model, s.basis, p.state);
    if (hyper) {
      ++s.calls.eps_r_hyper;
    } else {
      ++s.calls.eps_r_exact;
    }
    p.record.eps_r.push_back(corr.epsilon);
    p.state += s.basis.modes * corr.step;
  }
}

void add_points_around(SamplerState& s, const Vector& mu_new, long& iterations) {
  const int wanted = s.domain.dim() + 1;
  int taken = 0;
  for (std::size_t idx : by_distance(s.domain, s.snapshot_mu, mu_new)) {
    if (taken == wanted) break;
    if (s.domain.unit_distance(s.snapshot_mu[idx], mu_new) < kCoincident) continue;
    ++taken;
    const Vector mid = 0.5 * (mu_new + s.snapshot_mu[idx]);
    std::vector<Vector> existing;
    for (const RomPoint& p : s.points) existing.push_back(p.mu);
    if (near_any(s.domain, existing, mid, kCoincident) || near_any(s.domain, s.snapshot_mu, mid, kCoincident)) continue;
    create_point(s, mid, iterations);
  }
}

void drop_points_at(SamplerState& s, const Vector& mu) {
  std::erase_if(s.points, [&](const RomPoint& p) { return s.domain.unit_distance(p.mu, mu) < kCoincident; });
}

void refresh_surface(SamplerState& s) {
  std::vector<Vector> centers = s.snapshot_mu;
  std::vector<double> values(s.snapshot_mu.size(), 0.0);
  std::vector<Vector> point_mu;
  for (const RomPoint& p : s.points) {
    centers.push_back(p.mu);
    values.push_back(s.indicator(p));
    point_mu.push_back(p.mu);
  }
  s.rbf = rbf_fit(s.domain, centers, values);
  const RbfMaximum best = rbf_argmax(s.rbf, s.domain, s.snapshot_mu, point_mu, s.config.exclusion);
  s.mu_max = best.mu;
  s.eps_max = best.value;
}

void record_cycle(SamplerState& s, const Vector& added, long iterations, Clock::time_point start) {
  CycleStats st;
  st.cycle = s.cycle;
  st.added = added;
  st.basis_dim = s.basis.dim();
  st.mesh_size = s.mesh ? static_cast<int>(s.mesh->size()) : 0;
  st.rom_points = static_cast<int>(s.points.size());
  st.nonlinear_iterations = iterations;
  st.rbf_max = s.eps_max;
  for (const RomPoint& p : s.points) {
    const double v = std::abs(s.indicator(p));
    st.point_max = std::max(st.point_max, v);
    st.point_mean += v;
  }
  if (!s.points.empty()) st.point_mean /= static_cast<double>(s.points.size());
  st.seconds = std::chrono::duration<double>(Clock::now() - start).count();
  s.history.push_back(st);
}

void validate(const SamplerConfig& c) {
  if (!(c.tolerance > 0.0)) throw PreconditionError("sampler: tolerance must be positive");
  if (!(c.nnls_tolerance > 0.0 && c.nnls_tolerance < 1.0)) throw PreconditionError("sampler: NNLS tolerance must lie in (0, 1)");
  if (c.initial_per_dim < 2) throw PreconditionError("sampler: need at least 2 initial snapshots per dimension");
  if (c.max_cycles < 0) throw PreconditionError("sampler: negative cycle cap");
}

}  // namespace

BurgersParams SamplerState::params(const Vector& mu) const {
  if (mu.size() == 1) return BurgersParams{mu(0), config.fixed_amplitude};
  return params_from_point(mu);
}

RomSolution SamplerState::solve_model(const Vector& mu) const {
  const BurgersModel model(grid, params(mu));
  const Vector& seed = snapshots.states[nearest_snapshot(*this, mu)];
  if (uses_hyperreduction(config.mode)) return solve_rom_hyper(model, basis, *mesh, seed, config.rom);
  return solve_rom_exact(model, basis, seed, config.rom);
}

std::vector<CycleCostInputs> SamplerState::cost_inputs() const {
  std::vector<CycleCostInputs> out;
  for (std::size_t k = 0; k < history.size(); ++k) {
    CycleCostInputs in;
    in.full_dim = grid.num_nodes();
    in.basis_dim = history[k].basis_dim;
    in.mesh_size = history[k].mesh_size;
    in.nonlinear_iterations = static_cast<double>(history[k].nonlinear_iterations);
    in.num_params = domain.dim();
    in.cycle = static_cast<int>(k) + 1;
    out.push_back(in);
  }
  return out;
}

std::vector<int> SamplerState::ecsw_subset() const {
  if (config.train_on_initial_grid.value_or(domain.dim() == 2)) return training_subset;
  std::vector<int> all(snapshots.size());
  std::iota(all.begin(), all.end(), 0);
  return all;
}

double SamplerState::indicator(const RomPoint& p) const {
  return config.mode == SamplingMode::greedy ? p.residual_norm : std::abs(p.record.total());
}

SamplerState init_sampler(const SamplerConfig& config, const ParameterDomain& domain) {
  validate(config);
  const auto start = Clock::now();
  SamplerState s;
  s.config = config;
  s.domain = domain;
  s.grid = Grid1D(config.num_nodes, config.x_lo, config.x_hi);

  for (const Vector& mu : initial_snapshot_grid(domain, config.initial_per_dim)) add_snapshot(s, mu);
  s.training_subset.resize(s.snapshots.size());
  std::iota(s.training_subset.begin(), s.training_subset.end(), 0);
  rebuild_models(s);

  long iterations = 0;
  for (const Vector& mu : initial_rom_points(domain, config.initial_per_dim)) create_point(s, mu, iterations);
  refresh_surface(s);
  record_cycle(s, Vector(), iterations, start);
  return s;
}

void run_adaptive(SamplerState& s, const CycleObserver& observer) {
  if (s.config.mode == SamplingMode::greedy) throw PreconditionError("run_adaptive: use run_greedy for the greedy mode");
  while (s.eps_max > s.config.tolerance) {
    if (s.cycle >= s.config.max_cycles) {
      throw BudgetExceeded("adaptive sampling hit the cycle cap with max error " + std::to_string(s.eps_max), s.cycle);
    }
    const auto start = Clock::now();
    ++s.cycle;
    const Vector mu_new = s.mu_max;
    drop_points_at(s, mu_new);
    add_snapshot(s, mu_new);
    rebuild_models(s);
    refine_points(s);

    long iterations = 0;
    std::vector<Vector> point_mu;
    for (const RomPoint& p : s.points) point_mu.push_back(p.mu);
    const std::vector<std::size_t> order = by_distance(s.domain, point_mu, mu_new);
    const std::size_t refresh = std::min<std::size_t>(order.size(), static_cast<std::size_t>(s.domain.dim() + 1));
    for (std::size_t k = 0; k < refresh; ++k) reset_point(s, s.points[order[k]], iterations);

    add_points_around(s, mu_new, iterations);
    refresh_surface(s);
    record_cycle(s, mu_new, iterations, start);
    if (observer) observer(s);
  }
}

void run_greedy(SamplerState& s, double work_budget, const CycleObserver& observer) {
  if (s.config.mode != SamplingMode::greedy) throw PreconditionError("run_greedy: state is not in greedy mode");
  for (;;) {
    const WorkLedger ledger = build_ledger(SamplingMode::greedy, s.cost_inputs());
    const double next_estimate = ledger.rows.empty() ? 0.0 : ledger.rows.back().w_tot;
    if (ledger.total() + 0.5 * next_estimate >= work_budget) return;
    if (s.cycle >= s.config.max_cycles) {
      throw BudgetExceeded("greedy sampling hit the cycle cap", s.cycle);
    }
    const auto start = Clock::now();
    ++s.cycle;
    const Vector mu_new = s.mu_max;
    drop_points_at(s, mu_new);
    add_snapshot(s, mu_new);
    rebuild_models(s);

    long iterations = 0;
    for (RomPoint& p : s.points) reset_point(s, p, iterations);
    add_points_around(s, mu_new, iterations);
    refresh_surface(s);
    record_cycle(s, mu_new, iterations, start);
    if (observer) observer(s);
  }
}

}  // namespace goalrom
