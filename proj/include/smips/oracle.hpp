#pragma once

#include <vector>

#include "smips/mip.hpp"
#include "smips/model.hpp"
#include "smips/pbgs.hpp"

namespace smips {

// Single deterministic MILP over (x, y_1..y_S) whose optimum is the exact
// value of the two-stage program.
MilpProblem build_extensive_form(const StochasticProgram& p);

struct ExactSolution {
  SolveStatus status = SolveStatus::infeasible;
  double zeta = 0.0;
  std::vector<double> x;
  std::vector<std::vector<double>> y;
  long nodes = 0;
};

ExactSolution solve_exact(const StochasticProgram& p, MilpBackend* backend = nullptr);

// Optimal multipliers of the consensus constraints in the split-variable LP
// relaxation, scaled to scenario space (omega_s = lambda_s / p_s). The
// returned set satisfies sum_s p_s omega_s = 0 within 1e-7.
std::vector<std::vector<double>> lp_nac_multipliers(const StochasticProgram& p);

// Scenario-separable dual bound sum_s p_s min (c + omega_s)'x + q_s'y.
// relaxed=true drops integrality in the subproblems, which makes the value
// at omega = lp_nac_multipliers coincide with the extensive LP relaxation.
// Throws if omega is not dual feasible (sum_s p_s omega_s != 0).
double lagrangian_bound(const StochasticProgram& p,
                        const std::vector<std::vector<double>>& omega,
                        bool relaxed = false, MilpBackend* backend = nullptr);

// Augmented dual value: joint MILP over (x, y, z, w_lo, w_hi) with the
// one-sided discrepancy penalties; z is continuous within the first-stage
// bounds.
double augmented_dual_value(const StochasticProgram& p,
                            const std::vector<std::vector<double>>& omega,
                            const PenaltyWeights& weights,
                            MilpBackend* backend = nullptr);

struct DualityStudy {
  std::vector<double> rho_grid;
  std::vector<double> values;  // augmented dual value per grid point
  double zeta_sip = 0.0;
  bool found = false;
  double threshold_rho = 0.0;  // smallest grid rho closing the gap
  std::vector<std::vector<double>> omega;
};

// Sweeps uniform weights rho over the grid and records where the augmented
// dual reaches the exact optimum.
DualityStudy find_exactness_threshold(const StochasticProgram& p,
                                      const std::vector<std::vector<double>>& omega,
                                      const std::vector<double>& rho_grid,
                                      MilpBackend* backend = nullptr);

}  // namespace smips
