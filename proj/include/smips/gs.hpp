#pragma once

#include <functional>
#include <vector>

#include "smips/linear.hpp"

namespace smips {

// Generic two-block alternating-minimization problem: each solver returns an
// exact minimizer of f over its block with the other block held fixed.
struct BlockProblem {
  std::function<double(const std::vector<double>&, const std::vector<double>&)>
      objective;
  std::function<std::vector<double>(const std::vector<double>&)> x_solver;
  std::function<std::vector<double>(const std::vector<double>&)> z_solver;
  std::vector<double> x0, z0;
};

enum class GsStop { eps_criterion, k_max };

struct GsTrajectory {
  std::vector<std::vector<double>> x, z;  // iterate 0 is the starting point
  std::vector<double> objective;
  GsStop termination = GsStop::k_max;

  const std::vector<double>& final_x() const { return x.back(); }
  const std::vector<double>& final_z() const { return z.back(); }
};

// Alternates exact x- and z-block minimizations until the per-iteration
// objective improvement drops to eps or k_max iterations elapse.
GsTrajectory run_block_gs(const BlockProblem& p, double eps, int k_max);

// True iff neither block can improve the objective by more than eps when
// re-solved with the other block fixed at the candidate point.
bool certify_partial_minimum(const BlockProblem& p, const std::vector<double>& x,
                             const std::vector<double>& z, double eps);

// Consensus tie-break order for the assignment example's z-update.
enum class ZRule { lexicographic, reverse_lexicographic };

// Quadratic objective 7x^2 + 10xz + 7z^2 over the integer grid {-2..2}^2.
BlockProblem builtin_ex1();
// -2x - z + rho|x - z| over X = [-2,3], Z = [0,5], exact piecewise-linear
// block minimization; start (x0, z0).
BlockProblem builtin_ex2(double rho, double x0, double z0);
// Two-scenario assignment toy with per-term penalties rho[i][j] |x_ij - z_j|
// and binary consensus z chosen by the given rule; start z0 = (0,0,0).
BlockProblem builtin_ex3(const std::vector<std::vector<double>>& rho, ZRule rule);

}  // namespace smips
