#pragma once

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

#include "smips/mip.hpp"
#include "smips/model.hpp"

namespace smips {

// Asymmetric per-scenario, per-component penalty weights: rho_lo[s][i]
// charges x below the consensus, rho_hi[s][i] charges x above it.
struct PenaltyWeights {
  std::vector<std::vector<double>> rho_lo, rho_hi;

  static PenaltyWeights uniform(int scenarios, int n_x, double rho0);

  // Scenario weights scaled to the per-scenario objective (divided by p_s).
  std::pair<std::vector<double>, std::vector<double>> mu(int s, double prob) const;
};

enum class TieBreak { keep_previous, coin_flip };
enum class MultiplierExponent { k_minus_1, k };

struct PbgsParams {
  double rho0 = 1.0;
  double gamma = 1.0;
  double beta = 1.25;
  double eps = 1e-3;
  int l_max = 20;
  int k_max = 50;
  TieBreak tie_break = TieBreak::keep_previous;
  std::uint64_t seed = 0;
  MultiplierExponent multiplier_exponent = MultiplierExponent::k_minus_1;
  int threads = 1;
  long time_limit_ms = -1;  // < 0 disables the budget
};

enum class PbgsStop { residual_met, k_max, time_limit };

struct PbgsOuterIteration {
  int inner = 0;
  std::vector<double> improvements;  // objective drop per inner pass
  double residual = 0.0;
  std::vector<double> delta;  // consensus-pressure diagnostic per component
  PenaltyWeights weights;     // snapshot after this iteration's update
};

struct PbgsReport {
  std::vector<std::vector<double>> x, y;  // per scenario
  std::vector<double> z;
  std::vector<PbgsOuterIteration> outer;
  PbgsStop termination = PbgsStop::k_max;
  double wall_ms = 0.0;
  long subproblems_solved = 0;
  long total_nodes = 0;
  bool consensus_feasible = false;
  double consensus_objective = 0.0;
};

// Penalized expected objective: sum_s p_s (c'x_s + q_s'y_s) plus
// multiplier * sum_s (rho_lo_s'[x_s - z]^- + rho_hi_s'[z - x_s]^-).
double phi(const StochasticProgram& p, const std::vector<std::vector<double>>& x,
           const std::vector<std::vector<double>>& y, const std::vector<double>& z,
           const PenaltyWeights& w, double multiplier);

// Scenario MILP for the x-update: variables [x, y, w_lo, w_hi] with
// w_lo >= z - x, w_hi >= x - z and objective
// c'x + q'y + multiplier * (mu_lo'w_lo + mu_hi'w_hi).
MilpProblem build_x_subproblem(const StochasticProgram& p, int s,
                               const std::vector<double>& z,
                               const PenaltyWeights& w, double multiplier);

// Exact minimizer of the consensus penalty, componentwise: closed form for
// binary components, weighted-median breakpoint otherwise. rng is consulted
// only for coin_flip ties.
std::vector<double> update_z(const std::vector<std::vector<double>>& x,
                             const PenaltyWeights& w,
                             const std::vector<VarSpec>& kinds,
                             const std::vector<double>& z_prev, TieBreak tie_break,
                             std::mt19937_64* rng = nullptr);

// Subdifferential interval test for consensus optimality, per component.
std::vector<bool> check_z_optimality(const std::vector<std::vector<double>>& x,
                                     const std::vector<double>& z,
                                     const PenaltyWeights& w, double tol = 1e-9);

// Adds gamma-scaled discrepancies to the weights; second member is the
// per-component shift this induces in the optimality interval test.
std::pair<PenaltyWeights, std::vector<double>> update_penalties(
    const PenaltyWeights& w, const std::vector<std::vector<double>>& x,
    const std::vector<double>& z, double gamma);

PbgsReport run_pbgs(const StochasticProgram& p, const PbgsParams& params,
                    MilpBackend* backend = nullptr);

struct ConsensusEvaluation {
  bool feasible = false;
  double objective = 0.0;
  std::vector<double> z_rounded;
  std::vector<std::vector<double>> y;  // recourse per scenario when feasible
  std::vector<int> infeasible_scenarios;
};

// Rounds integer components of z, fixes the first stage, and solves every
// scenario's recourse problem.
ConsensusEvaluation evaluate_consensus(const StochasticProgram& p,
                                       const std::vector<double>& z,
                                       MilpBackend* backend = nullptr);

}  // namespace smips
