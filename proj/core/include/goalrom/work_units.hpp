#pragma once

// Analytical work-unit model of a sampling run. One unit per residual or
// Jacobian entry evaluated and per FLOP of dense products; the n x n solve is
// charged n^3.

#include <string>
#include <vector>

namespace goalrom {

enum class SamplingMode { rom, hrom, hrom_hyperdwr, greedy };

std::string to_string(SamplingMode mode);
/// "rom", "hrom", "hrom-hyperdwr" or "greedy"; throws PreconditionError otherwise.
SamplingMode parse_sampling_mode(const std::string& text);
bool uses_hyperreduction(SamplingMode mode);

struct CycleCostInputs {
  double full_dim = 0;              // N
  double basis_dim = 0;             // n_i
  double mesh_size = 0;             // n_{e_i}
  double entity_dofs = 1;           // d_e
  double stencil_dofs = 2;          // d_e^+
  double nonlinear_iterations = 0;  // total over the cycle
  int num_params = 1;               // n_p
  int cycle = 1;                    // i, 1-based
};

double w_nonlin_rom(const CycleCostInputs& in);
double w_nonlin_hrom(const CycleCostInputs& in);
double w_dwr_rom(const CycleCostInputs& in);
double w_dwr_hrom(const CycleCostInputs& in);

struct LedgerRow {
  int cycle = 0;
  double w_all_rom = 0;
  double w_all_dwr = 0;
  double w_tot = 0;
  double cumulative = 0;
};

struct WorkLedger {
  SamplingMode mode = SamplingMode::rom;
  std::vector<LedgerRow> rows;

  double total() const { return rows.empty() ? 0.0 : rows.back().cumulative; }
};

/// W_tot(i) = N_i W_nonlin + (n_p + 1)(i - 1) W_DWR with the per-mode pairing
/// rom: ROM/ROM, hrom: HROM/ROM, hrom-hyperdwr: HROM/HROM. The greedy
/// baseline is charged ROM nonlinear iterations only; its residual-norm
/// indicator falls out of the solve. Throws PreconditionError unless
/// cycles[k].cycle == k + 1 and every count is non-negative.
WorkLedger build_ledger(SamplingMode mode, const std::vector<CycleCostInputs>& cycles);

std::vector<std::string> ledger_csv_header();
void save_ledger(const std::string& path, const WorkLedger& ledger);

}  // namespace goalrom
