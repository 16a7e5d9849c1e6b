// LP-based branch-and-bound: best-first node selection, most-fractional
// branching, ties broken by lowest variable index. Node counts are
// reproducible for fixed inputs.

#include <cmath>
#include <queue>
#include <stdexcept>
#include <vector>

#include "smips/mip.hpp"

namespace smips {

namespace {

struct Node {
  double lp_bound;
  long id;
  std::vector<double> lb, ub;
};

struct NodeOrder {
  bool operator()(const Node& a, const Node& b) const {
    if (a.lp_bound != b.lp_bound) return a.lp_bound > b.lp_bound;
    return a.id > b.id;
  }
};

bool is_int_kind(VarKind k) { return k != VarKind::cont; }

}  // namespace

MilpSolution solve_milp(const MilpProblem& p, const SolveOptions& opt) {
  const std::string err = p.validate();
  if (!err.empty()) throw std::invalid_argument("solve_milp: " + err);
  const int n = p.num_vars();
  for (int j = 0; j < n; ++j) {
    if (is_int_kind(p.vars[j].kind) &&
        (!std::isfinite(p.vars[j].lb) || !std::isfinite(p.vars[j].ub)))
      throw std::invalid_argument("solve_milp: integer variable " + std::to_string(j) +
                                  " must be bounded");
  }

  MilpSolution best;
  best.status = SolveStatus::infeasible;
  best.objective = kInf;
  bool have_incumbent = false;
  long nodes = 0;
  long lp_iters = 0;
  long next_id = 0;

  std::priority_queue<Node, std::vector<Node>, NodeOrder> open;
  {
    Node root;
    root.id = next_id++;
    root.lp_bound = -kInf;
    root.lb.resize(n);
    root.ub.resize(n);
    for (int j = 0; j < n; ++j) {
      root.lb[j] = p.vars[j].lb;
      root.ub[j] = p.vars[j].ub;
    }
    open.push(std::move(root));
  }

  bool hit_node_limit = false;
  while (!open.empty()) {
    if (nodes >= opt.node_limit) {
      hit_node_limit = true;
      break;
    }
    Node node = open.top();
    open.pop();
    if (have_incumbent && node.lp_bound >= best.objective - opt.opt_gap - 1e-9)
      continue;  // parent bound already dominated
    ++nodes;

    MilpSolution lp = solve_lp_with_bounds(p, node.lb, node.ub, opt);
    lp_iters += lp.iterations;
    if (lp.status == SolveStatus::infeasible) continue;
    if (lp.status == SolveStatus::unbounded) {
      // An unbounded relaxation at the root means the MILP is unbounded
      // (integer variables are required bounded, so the ray is continuous).
      MilpSolution out;
      out.status = SolveStatus::unbounded;
      out.nodes = nodes;
      out.iterations = lp_iters;
      return out;
    }
    if (lp.status == SolveStatus::iteration_limit) {
      hit_node_limit = true;
      break;
    }
    if (have_incumbent && lp.objective >= best.objective - opt.opt_gap - 1e-9) continue;

    // First fractional integer variable by index. Low indices hold the
    // structurally important variables (e.g. the first stage of an extensive
    // form), so fixing them first collapses the rest of the relaxation.
    int branch_var = -1;
    for (int j = 0; j < n; ++j) {
      if (!is_int_kind(p.vars[j].kind)) continue;
      const double v = lp.x[j];
      if (std::fabs(v - std::round(v)) > opt.int_tol) {
        branch_var = j;
        break;
      }
    }
    if (branch_var < 0) {
      // Integral: candidate incumbent.
      if (!have_incumbent || lp.objective < best.objective - 1e-9) {
        best.status = SolveStatus::optimal;
        best.x = lp.x;
        for (int j = 0; j < n; ++j)
          if (is_int_kind(p.vars[j].kind)) best.x[j] = std::round(best.x[j]);
        best.objective = lp.objective;
        have_incumbent = true;
      }
      continue;
    }
    const double v = lp.x[branch_var];
    Node down = node;
    down.lp_bound = lp.objective;
    down.id = next_id++;
    down.ub[branch_var] = std::floor(v);
    Node up = std::move(node);
    up.lp_bound = lp.objective;
    up.id = next_id++;
    up.lb[branch_var] = std::ceil(v);
    open.push(std::move(down));
    open.push(std::move(up));
  }

  best.nodes = nodes;
  best.iterations = lp_iters;
  if (hit_node_limit) {
    best.status = SolveStatus::iteration_limit;
    double bound = have_incumbent ? best.objective : kInf;
    // Valid global bound: the least lower bound among open nodes.
    std::priority_queue<Node, std::vector<Node>, NodeOrder> rest = std::move(open);
    while (!rest.empty()) {
      bound = std::min(bound, rest.top().lp_bound);
      rest.pop();
    }
    best.bound = std::isfinite(bound) ? bound : -kInf;
    if (!have_incumbent) {
      best.x.clear();
      best.objective = kInf;
    }
    return best;
  }
  if (have_incumbent) {
    best.bound = best.objective;
  } else {
    best.status = SolveStatus::infeasible;
  }
  return best;
}

}  // namespace smips
