#include "smips/oracle.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace smips {

MilpProblem build_extensive_form(const StochasticProgram& p) {
  MilpProblem ext;
  ext.vars = p.first_stage_vars;
  ext.objective.assign(p.c.begin(), p.c.end());
  for (const auto& sc : p.scenarios) {
    ext.vars.insert(ext.vars.end(), sc.second_stage_vars.begin(),
                    sc.second_stage_vars.end());
    for (double q : sc.q) ext.objective.push_back(sc.prob * q);
  }
  ext.rows = p.first_stage_rows;
  for (int s = 0; s < p.num_scenarios(); ++s) {
    for (const auto& row : p.scenarios[s].rows) {
      SparseRow r = row;
      for (auto& [idx, coef] : r.coeffs)
        if (idx >= p.n_x) idx += s * p.n_y;
      ext.rows.push_back(std::move(r));
    }
  }
  return ext;
}

ExactSolution solve_exact(const StochasticProgram& p, MilpBackend* backend) {
  EmbeddedBackend embedded;
  MilpBackend& be = backend ? *backend : embedded;
  const auto sol = be.solve_milp(build_extensive_form(p), {});
  ExactSolution out;
  out.status = sol.status;
  out.nodes = sol.nodes;
  if (sol.status != SolveStatus::optimal) return out;
  out.zeta = sol.objective;
  out.x.assign(sol.x.begin(), sol.x.begin() + p.n_x);
  for (int s = 0; s < p.num_scenarios(); ++s)
    out.y.emplace_back(sol.x.begin() + p.n_x + s * p.n_y,
                       sol.x.begin() + p.n_x + (s + 1) * p.n_y);
  return out;
}

namespace {

// Split-variable model: x_1..x_S | y_1..y_S | z, consensus rows x_s - z = 0.
// Returns the model plus the row index of the first consensus row.
std::pair<MilpProblem, int> build_split_form(const StochasticProgram& p) {
  const int S = p.num_scenarios();
  const int n_x = p.n_x, n_y = p.n_y;
  MilpProblem lp;
  for (int s = 0; s < S; ++s)
    lp.vars.insert(lp.vars.end(), p.first_stage_vars.begin(),
                   p.first_stage_vars.end());
  for (int s = 0; s < S; ++s)
    lp.vars.insert(lp.vars.end(), p.scenarios[s].second_stage_vars.begin(),
                   p.scenarios[s].second_stage_vars.end());
  for (int i = 0; i < n_x; ++i) lp.vars.push_back({-kInf, kInf, VarKind::cont});
  const int z0 = S * (n_x + n_y);
  lp.objective.assign(z0 + n_x, 0.0);
  for (int s = 0; s < S; ++s) {
    const double ps = p.scenarios[s].prob;
    for (int i = 0; i < n_x; ++i) lp.objective[s * n_x + i] = ps * p.c[i];
    for (int j = 0; j < n_y; ++j)
      lp.objective[S * n_x + s * n_y + j] = ps * p.scenarios[s].q[j];
  }
  for (int s = 0; s < S; ++s) {
    for (const auto& row : p.first_stage_rows) {
      SparseRow r = row;
      for (auto& [idx, coef] : r.coeffs) idx += s * n_x;
      lp.rows.push_back(std::move(r));
    }
    for (const auto& row : p.scenarios[s].rows) {
      SparseRow r = row;
      for (auto& [idx, coef] : r.coeffs) {
        if (idx < n_x)
          idx += s * n_x;
        else
          idx = S * n_x + s * n_y + (idx - n_x);
      }
      lp.rows.push_back(std::move(r));
    }
  }
  const int nac0 = lp.num_rows();
  for (int s = 0; s < S; ++s)
    for (int i = 0; i < n_x; ++i)
      lp.rows.push_back({{{s * n_x + i, 1.0}, {z0 + i, -1.0}}, Sense::eq, 0.0});
  return {std::move(lp), nac0};
}

}  // namespace

std::vector<std::vector<double>> lp_nac_multipliers(const StochasticProgram& p) {
  const auto [lp, nac0] = build_split_form(p);
  const auto sol = solve_lp(lp);
  if (sol.status != SolveStatus::optimal)
    throw std::runtime_error(std::string("lp_nac_multipliers: relaxation ") +
                             to_string(sol.status));
  const int S = p.num_scenarios();
  std::vector<std::vector<double>> omega(S, std::vector<double>(p.n_x));
  for (int s = 0; s < S; ++s)
    for (int i = 0; i < p.n_x; ++i)
      omega[s][i] = sol.duals[nac0 + s * p.n_x + i] / p.scenarios[s].prob;
  std::vector<double> acc(p.n_x, 0.0);
  for (int s = 0; s < S; ++s)
    for (int i = 0; i < p.n_x; ++i) acc[i] += p.scenarios[s].prob * omega[s][i];
  for (double v : acc)
    if (std::fabs(v) > 1e-7)
      throw std::runtime_error("lp_nac_multipliers: multipliers not dual feasible");
  return omega;
}

double lagrangian_bound(const StochasticProgram& p,
                        const std::vector<std::vector<double>>& omega, bool relaxed,
                        MilpBackend* backend) {
  const int S = p.num_scenarios();
  if (static_cast<int>(omega.size()) != S)
    throw std::invalid_argument("lagrangian_bound: omega size mismatch");
  std::vector<double> acc(p.n_x, 0.0);
  for (int s = 0; s < S; ++s)
    for (int i = 0; i < p.n_x; ++i) acc[i] += p.scenarios[s].prob * omega[s][i];
  for (double v : acc)
    if (std::fabs(v) > 1e-7)
      throw std::invalid_argument("lagrangian_bound: omega not dual feasible");
  EmbeddedBackend embedded;
  MilpBackend& be = backend ? *backend : embedded;
  double bound = 0.0;
  for (int s = 0; s < S; ++s) {
    const auto& sc = p.scenarios[s];
    MilpProblem sub;
    sub.vars = p.first_stage_vars;
    sub.vars.insert(sub.vars.end(), sc.second_stage_vars.begin(),
                    sc.second_stage_vars.end());
    sub.objective.resize(p.n_x + p.n_y);
    for (int i = 0; i < p.n_x; ++i) sub.objective[i] = p.c[i] + omega[s][i];
    for (int j = 0; j < p.n_y; ++j) sub.objective[p.n_x + j] = sc.q[j];
    sub.rows = p.first_stage_rows;
    sub.rows.insert(sub.rows.end(), sc.rows.begin(), sc.rows.end());
    const auto sol = relaxed ? be.solve_lp(sub, {}) : be.solve_milp(sub, {});
    if (sol.status != SolveStatus::optimal)
      throw std::runtime_error(std::string("lagrangian_bound: scenario ") +
                               std::to_string(s) + " " + to_string(sol.status));
    bound += sc.prob * sol.objective;
  }
  return bound;
}

double augmented_dual_value(const StochasticProgram& p,
                            const std::vector<std::vector<double>>& omega,
                            const PenaltyWeights& weights, MilpBackend* backend) {
  const int S = p.num_scenarios();
  const int n_x = p.n_x, n_y = p.n_y;
  EmbeddedBackend embedded;
  MilpBackend& be = backend ? *backend : embedded;
  auto [milp, nac0] = build_split_form(p);
  (void)nac0;
  milp.rows.resize(nac0);  // consensus enforced by penalties, not equations
  const int z0 = S * (n_x + n_y);
  for (int i = 0; i < n_x; ++i) {
    milp.vars[z0 + i].lb = p.first_stage_vars[i].lb;
    milp.vars[z0 + i].ub = p.first_stage_vars[i].ub;
  }
  for (int s = 0; s < S; ++s)
    for (int i = 0; i < n_x; ++i)
      milp.objective[s * n_x + i] += p.scenarios[s].prob * omega[s][i];
  // w_lo[s] | w_hi[s] blocks with w_lo >= z - x_s, w_hi >= x_s - z.
  for (int s = 0; s < S; ++s) {
    for (int side = 0; side < 2; ++side) {
      for (int i = 0; i < n_x; ++i) {
        const int w = milp.num_vars();
        milp.vars.push_back({0.0, kInf, VarKind::cont});
        milp.objective.push_back(side == 0 ? weights.rho_lo[s][i]
                                           : weights.rho_hi[s][i]);
        const double sign = side == 0 ? 1.0 : -1.0;
        milp.rows.push_back(
            {{{s * n_x + i, sign}, {z0 + i, -sign}, {w, 1.0}}, Sense::ge, 0.0});
      }
    }
  }
  const auto sol = be.solve_milp(milp, {});
  if (sol.status != SolveStatus::optimal)
    throw std::runtime_error(std::string("augmented_dual_value: ") +
                             to_string(sol.status));
  return sol.objective;
}

DualityStudy find_exactness_threshold(const StochasticProgram& p,
                                      const std::vector<std::vector<double>>& omega,
                                      const std::vector<double>& rho_grid,
                                      MilpBackend* backend) {
  for (size_t i = 0; i < rho_grid.size(); ++i)
    if (rho_grid[i] <= 0 || (i > 0 && rho_grid[i] <= rho_grid[i - 1]))
      throw std::invalid_argument(
          "find_exactness_threshold: grid must be positive and increasing");
  DualityStudy study;
  study.rho_grid = rho_grid;
  study.omega = omega;
  const auto exact = solve_exact(p, backend);
  if (exact.status != SolveStatus::optimal)
    throw std::runtime_error(std::string("find_exactness_threshold: exact solve ") +
                             to_string(exact.status));
  study.zeta_sip = exact.zeta;
  for (double rho : rho_grid) {
    const auto w = PenaltyWeights::uniform(p.num_scenarios(), p.n_x, rho);
    const double value = augmented_dual_value(p, omega, w, backend);
    study.values.push_back(value);
    if (!study.found && std::fabs(value - study.zeta_sip) <= 1e-6) {
      study.found = true;
      study.threshold_rho = rho;
    }
  }
  return study;
}

}  // namespace smips
