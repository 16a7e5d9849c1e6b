#pragma once

#include <cstdint>
#include <vector>

#include "smips/mip.hpp"
#include "smips/model.hpp"

namespace smips {

struct PhParams {
  double rho = 1.0;
  double eps = 1e-3;
  int k_max = 50;
  std::uint64_t seed = 0;  // reserved; iteration is fully deterministic
  int breakpoints = 8;     // piecewise pieces for non-binary first stages
  int threads = 1;
  long time_limit_ms = -1;
};

// Scenario multipliers on the consensus constraints, omega[s] of length n_x.
struct Multipliers {
  std::vector<std::vector<double>> omega;

  // Constraint-space multiplier lambda_s = p_s * omega_s.
  std::vector<double> lambda(int s, double prob) const;
  // Max-norm of sum_s p_s omega_s; zero means dual feasible.
  double feasibility_error(const std::vector<double>& probs) const;
};

enum class PhStop { residual_met, k_max, time_limit };

struct PhReport {
  std::vector<std::vector<double>> x, y;
  std::vector<double> z;
  Multipliers multipliers;
  std::vector<double> residuals;          // per iteration, vs the previous z
  std::vector<double> dual_errors;        // feasibility error per iteration
  PhStop termination = PhStop::k_max;
  double wall_ms = 0.0;
  long subproblems_solved = 0;
  long total_nodes = 0;
  bool used_approximation = false;  // non-binary quadratic handled piecewise
  bool consensus_feasible = false;
  double consensus_objective = 0.0;
};

// Scenario step problem: (c + omega_s)'x + q'y plus (rho/2)||x - z||^2,
// linearized exactly on binary components via x^2 = x and approximated by
// tangent cuts on an epigraph variable for bounded non-binary components.
// Throws when a non-binary first-stage component lacks finite bounds.
MilpProblem build_ph_subproblem(const StochasticProgram& p, int s,
                                const std::vector<double>& z,
                                const std::vector<double>& omega_s, double rho,
                                int breakpoints = 8);

PhReport run_ph(const StochasticProgram& p, const PhParams& params,
                MilpBackend* backend = nullptr);

}  // namespace smips
