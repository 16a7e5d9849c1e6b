#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "smips/mip.hpp"
#include "smips/model.hpp"

namespace smips {

struct ExperimentGrid {
  Family family = Family::sslp_like;
  int m = 1, n = 1, periods = 1, scenarios = 1;
  std::vector<std::uint64_t> seeds;
  std::vector<std::string> methods;  // subset of {"pbgs", "ph", "exact"}
  std::vector<double> rho0_list, beta_list, gamma_factor_list;
  double eps = 1e-3;
  int k_max = 50, l_max = 20;
  long time_limit_ms = 60'000;
  int threads = 1;

  void validate() const;  // throws std::invalid_argument
};

ExperimentGrid parse_grid(const std::string& json_text);

struct ResultRow {
  std::string instance_id;
  std::string family;
  std::uint64_t seed = 0;
  std::string method;
  double rho0 = 0.0, beta = 0.0, gamma_factor = 0.0;
  long outer_iters = 0, inner_iters = 0;
  double wall_ms = 0.0;
  double residual = 0.0;
  double objective = 0.0;        // NaN when no feasible consensus was found
  double exact_objective = 0.0;  // NaN when the exact value was not computed
  double gap = 0.0;              // NaN when either objective is missing
  bool converged = false;
  long nodes = 0, subproblems = 0;  // deterministic effort proxies
  std::string status;               // termination reason or error text
};

std::string csv_header();
std::string to_csv_line(const ResultRow& row);
std::string to_csv(const std::vector<ResultRow>& rows);
std::vector<ResultRow> from_csv(const std::string& text);

// Runs every (seed, method, parameter) cell of the grid; failures become
// rows with the error in `status`. Rows are streamed to `stream` when given.
std::vector<ResultRow> run_experiment(const ExperimentGrid& grid,
                                      MilpBackend* backend = nullptr,
                                      std::ostream* stream = nullptr);

struct SummaryRow {
  double rho0 = 0.0, beta = 0.0, gamma_factor = 0.0;
  int pairs = 0;            // matched (instance, seed) pairs for the combo
  int speedup_pairs = 0;    // pairs kept after removing timed-out partners
  double objdiff_mean = 0.0, objdiff_stdev = 0.0;
  double speedup_mean = 0.0, speedup_stdev = 0.0;
  double ph_conv_fraction = 0.0;
};

struct Summary {
  std::vector<SummaryRow> rows;
  std::string render() const;
};

// Pairs each pbgs row with the ph row of the same (instance, seed, rho0).
// Pairs whose ph run hit the time limit are excluded from the speed-up
// statistics; the convergence fraction counts all ph runs of the combo.
Summary summarize(const std::vector<ResultRow>& rows);

}  // namespace smips
