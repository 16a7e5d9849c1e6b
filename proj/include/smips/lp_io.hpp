#pragma once

#include <string>

#include "smips/mip.hpp"

namespace smips {

// Renders the problem in the standard LP text format (variables x0.., rows
// c0..). The objective constant is not representable in the format; callers
// re-apply objective_offset to reported values.
std::string write_lp(const MilpProblem& p, const std::string& name = "smips",
                     bool relax_integrality = false);

// Shells out to `command <problem.lp> <solution.txt>`. The solution file
// protocol: first line is the status (optimal | infeasible | unbounded),
// then "objective <value>", then one "<var> <value>" line per nonzero
// variable; unlisted variables are zero.
class ExternalBackend final : public MilpBackend {
 public:
  explicit ExternalBackend(std::string command);

  MilpSolution solve_milp(const MilpProblem& p, const SolveOptions& opt) override;
  MilpSolution solve_lp(const MilpProblem& p, const SolveOptions& opt) override;

 private:
  MilpSolution run(const MilpProblem& p, bool relax);
  std::string command_;
};

}  // namespace smips
