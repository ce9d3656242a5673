#include "goalrom/work_units.hpp"

#include "goalrom/csv.hpp"
#include "goalrom/errors.hpp"

namespace goalrom {

std::string to_string(SamplingMode mode) {
  switch (mode) {
    case SamplingMode::rom:
      return "rom";
    case SamplingMode::hrom:
      return "hrom";
    case SamplingMode::hrom_hyperdwr:
      return "hrom-hyperdwr";
    case SamplingMode::greedy:
      return "greedy";
  }
  return "rom";
}

SamplingMode parse_sampling_mode(const std::string& text) {
  if (text == "rom") return SamplingMode::rom;
  if (text == "hrom") return SamplingMode::hrom;
  if (text == "hrom-hyperdwr") return SamplingMode::hrom_hyperdwr;
  if (text == "greedy") return SamplingMode::greedy;
  throw PreconditionError("unknown sampling mode '" + text + "'");
}

bool uses_hyperreduction(SamplingMode mode) {
  return mode == SamplingMode::hrom || mode == SamplingMode::hrom_hyperdwr;
}

double w_nonlin_rom(const CycleCostInputs& in) {
  const double N = in.full_dim;
  const double n = in.basis_dim;
  return N + N * N + (2 * N * n + n * n + N + n) * (2 * N - 1) + n * n * n;
}

double w_nonlin_hrom(const CycleCostInputs& in) {
  const double N = in.full_dim;
  const double n = in.basis_dim;
  const double ne = in.mesh_size;
  const double de = in.entity_dofs;
  const double dp = in.stencil_dofs;
  return ne * (de + 2 * n * de + n) + (2 * ne * de * dp + 2 * de * dp * ne * n) + n * n * (2 * N - 1) + n * n * n;
}

double w_dwr_rom(const CycleCostInputs& in) {
  const double N = in.full_dim;
  const double n = in.basis_dim;
  return N + N * N + N + (2 * N * n + n * n + n) * (2 * N - 1) + n * n * n + ((N + n) * (2 * N - 1) + (2 * n - 1));
}

double w_dwr_hrom(const CycleCostInputs& in) {
  const double N = in.full_dim;
  const double n = in.basis_dim;
  const double ne = in.mesh_size;
  const double de = in.entity_dofs;
  const double dp = in.stencil_dofs;
  return ne * (de + 2 * n * de + n) + (ne * de * dp + 2 * de * dp * ne * n) + N +
         (ne * (de * n + n) + n * n * (2 * N - 1) + n * (2 * N - 1)) + n * n * n + (2 * n - 1);
}

WorkLedger build_ledger(SamplingMode mode, const std::vector<CycleCostInputs>& cycles) {
  WorkLedger ledger;
  ledger.mode = mode;
  double cumulative = 0.0;
  for (std::size_t k = 0; k < cycles.size(); ++k) {
    const CycleCostInputs& in = cycles[k];
    if (in.cycle != static_cast<int>(k) + 1) {
      throw PreconditionError("build_ledger: entry " + std::to_string(k) + " is cycle " + std::to_string(in.cycle));
    }
    if (in.full_dim < 0 || in.basis_dim < 0 || in.mesh_size < 0 || in.nonlinear_iterations < 0 || in.num_params < 0) {
      throw PreconditionError("build_ledger: negative count in cycle " + std::to_string(in.cycle));
    }
    const bool hyper_solve = uses_hyperreduction(mode);
    const double nonlin = hyper_solve ? w_nonlin_hrom(in) : w_nonlin_rom(in);
    double dwr = 0.0;
    if (mode == SamplingMode::rom || mode == SamplingMode::hrom) dwr = w_dwr_rom(in);
    if (mode == SamplingMode::hrom_hyperdwr) dwr = w_dwr_hrom(in);

    LedgerRow row;
    row.cycle = in.cycle;
    row.w_all_rom = in.nonlinear_iterations * nonlin;
    row.w_all_dwr = (in.num_params + 1) * static_cast<double>(in.cycle - 1) * dwr;
    row.w_tot = row.w_all_rom + row.w_all_dwr;
    cumulative += row.w_tot;
    row.cumulative = cumulative;
    ledger.rows.push_back(row);
  }
  return ledger;
}

std::vector<std::string> ledger_csv_header() { return {"cycle", "W_allROM", "W_allDWR", "W_tot", "cumulative"}; }

void save_ledger(const std::string& path, const WorkLedger& ledger) {
  CsvWriter csv(path, ledger_csv_header());
  csv.comment("mode=" + to_string(ledger.mode));
  for (const LedgerRow& r : ledger.rows) {
    csv.row({CsvWriter::cell(r.cycle), CsvWriter::cell(r.w_all_rom), CsvWriter::cell(r.w_all_dwr),
             CsvWriter::cell(r.w_tot), CsvWriter::cell(r.cumulative)});
  }
}

}  // namespace goalrom
