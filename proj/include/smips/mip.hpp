#pragma once

#include <memory>
#include <string>
#include <vector>

#include "smips/linear.hpp"

namespace smips {

// Generic minimization MILP used by every other module.
struct MilpProblem {
  std::vector<double> objective;
  double objective_offset = 0.0;
  std::vector<VarSpec> vars;
  std::vector<SparseRow> rows;

  int num_vars() const { return static_cast<int>(vars.size()); }
  int num_rows() const { return static_cast<int>(rows.size()); }

  // Returns a description of the first structural defect, or "" if valid.
  std::string validate() const;
};

enum class SolveStatus { optimal, infeasible, unbounded, iteration_limit };

inline const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::optimal: return "optimal";
    case SolveStatus::infeasible: return "infeasible";
    case SolveStatus::unbounded: return "unbounded";
    case SolveStatus::iteration_limit: return "iteration_limit";
  }
  return "?";
}

struct MilpSolution {
  SolveStatus status = SolveStatus::infeasible;
  std::vector<double> x;
  double objective = 0.0;
  double bound = -kInf;
  // Filled for pure-LP solves only. Row duals use the relaxation convention
  // L(x) = c'x + sum_i dual_i * (a_i'x - b_i), so dual >= 0 on binding
  // <=-rows of a minimization.
  std::vector<double> duals;
  std::vector<double> reduced_costs;
  long iterations = 0;
  long nodes = 0;
};

struct SolveOptions {
  double feas_tol = 1e-6;
  double int_tol = 1e-6;
  double opt_gap = 0.0;
  long node_limit = 2'000'000;
  long iteration_limit = 200'000;
};

// Bounded-variable primal simplex; integrality is ignored (kinds relaxed).
MilpSolution solve_lp(const MilpProblem& p, const SolveOptions& opt = {});

// Same, with per-variable bound overrides (used by branch-and-bound).
MilpSolution solve_lp_with_bounds(const MilpProblem& p,
                                  const std::vector<double>& lb,
                                  const std::vector<double>& ub,
                                  const SolveOptions& opt);

// LP-based branch-and-bound, best-first with most-fractional branching and
// deterministic tie-break by lowest variable index.
MilpSolution solve_milp(const MilpProblem& p, const SolveOptions& opt = {});

// Pluggable solver backend; the default wraps the embedded solver, an
// external one can shell out to an industrial solver (see lp_io.hpp).
class MilpBackend {
 public:
  virtual ~MilpBackend() = default;
  virtual MilpSolution solve_milp(const MilpProblem& p, const SolveOptions& opt) = 0;
  virtual MilpSolution solve_lp(const MilpProblem& p, const SolveOptions& opt) = 0;
};

class EmbeddedBackend final : public MilpBackend {
 public:
  MilpSolution solve_milp(const MilpProblem& p, const SolveOptions& opt) override {
    return ::smips::solve_milp(p, opt);
  }
  MilpSolution solve_lp(const MilpProblem& p, const SolveOptions& opt) override {
    return ::smips::solve_lp(p, opt);
  }
};

}  // namespace smips
