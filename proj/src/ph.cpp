#include "smips/ph.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "smips/pbgs.hpp"

namespace smips {

std::vector<double> Multipliers::lambda(int s, double prob) const {
  auto l = omega[s];
  for (double& v : l) v *= prob;
  return l;
}

double Multipliers::feasibility_error(const std::vector<double>& probs) const {
  if (omega.empty()) return 0.0;
  std::vector<double> acc(omega.front().size(), 0.0);
  for (size_t s = 0; s < omega.size(); ++s)
    for (size_t i = 0; i < acc.size(); ++i) acc[i] += probs[s] * omega[s][i];
  double err = 0.0;
  for (double v : acc) err = std::max(err, std::fabs(v));
  return err;
}

MilpProblem build_ph_subproblem(const StochasticProgram& p, int s,
                                const std::vector<double>& z,
                                const std::vector<double>& omega_s, double rho,
                                int breakpoints) {
  if (static_cast<int>(z.size()) != p.n_x ||
      static_cast<int>(omega_s.size()) != p.n_x)
    throw std::invalid_argument("build_ph_subproblem: length mismatch");
  const auto& sc = p.scenarios[s];
  MilpProblem sub;
  sub.vars = p.first_stage_vars;
  sub.vars.insert(sub.vars.end(), sc.second_stage_vars.begin(),
                  sc.second_stage_vars.end());
  sub.objective.resize(p.n_x + p.n_y);
  for (int i = 0; i < p.n_x; ++i) sub.objective[i] = p.c[i] + omega_s[i];
  for (int j = 0; j < p.n_y; ++j) sub.objective[p.n_x + j] = sc.q[j];
  sub.rows = p.first_stage_rows;
  sub.rows.insert(sub.rows.end(), sc.rows.begin(), sc.rows.end());

  for (int i = 0; i < p.n_x; ++i) {
    const auto& v = p.first_stage_vars[i];
    const bool is_binary =
        v.kind == VarKind::bin ||
        (v.kind == VarKind::integer && v.lb == 0.0 && v.ub == 1.0);
    if (is_binary) {
      // (rho/2)(x - z)^2 = (rho/2)((1 - 2z)x + z^2) on x in {0,1}.
      sub.objective[i] += 0.5 * rho * (1.0 - 2.0 * z[i]);
      sub.objective_offset += 0.5 * rho * z[i] * z[i];
      continue;
    }
    if (!std::isfinite(v.lb) || !std::isfinite(v.ub))
      throw std::invalid_argument(
          "build_ph_subproblem: non-binary first-stage component " +
          std::to_string(i) + " needs finite bounds for the quadratic penalty");
    // Epigraph variable t_i >= tangent cuts of (rho/2)(x - z)^2.
    const int t_idx = sub.num_vars();
    sub.vars.push_back({0.0, kInf, VarKind::cont});
    sub.objective.push_back(1.0);
    const int B = std::max(2, breakpoints);
    for (int b = 0; b < B; ++b) {
      const double xb = v.lb + (v.ub - v.lb) * b / (B - 1);
      const double slope = rho * (xb - z[i]);
      const double val = 0.5 * rho * (xb - z[i]) * (xb - z[i]);
      // t >= slope*(x - xb) + val  <=>  -slope*x + t >= val - slope*xb.
      sub.rows.push_back(
          {{{i, -slope}, {t_idx, 1.0}}, Sense::ge, val - slope * xb});
    }
  }
  return sub;
}

namespace {

std::vector<MilpSolution> solve_ph_scenarios(const StochasticProgram& p,
                                             const std::vector<double>& z,
                                             const Multipliers& mult, double rho,
                                             int breakpoints, MilpBackend& backend,
                                             int threads, const char* context) {
  const int S = p.num_scenarios();
  std::vector<MilpSolution> sols(S);
  auto worker = [&](int begin, int step) {
    for (int s = begin; s < S; s += step)
      sols[s] = backend.solve_milp(
          build_ph_subproblem(p, s, z, mult.omega[s], rho, breakpoints), {});
  };
  if (threads <= 1 || S <= 1) {
    worker(0, 1);
  } else {
    const int t = std::min(threads, S);
    std::vector<std::thread> pool;
    for (int i = 0; i < t; ++i) pool.emplace_back(worker, i, t);
    for (auto& th : pool) th.join();
  }
  for (int s = 0; s < S; ++s)
    if (sols[s].status != SolveStatus::optimal)
      throw std::runtime_error(std::string("ph: scenario ") + std::to_string(s) +
                               " subproblem " + to_string(sols[s].status) +
                               " during " + context);
  return sols;
}

}  // namespace

PhReport run_ph(const StochasticProgram& p, const PhParams& params,
                MilpBackend* backend) {
  if (params.rho <= 0 || params.eps < 0 || params.k_max < 1)
    throw std::invalid_argument("run_ph: invalid parameters");
  EmbeddedBackend embedded;
  MilpBackend& be = backend ? *backend : embedded;
  const auto t0 = std::chrono::steady_clock::now();
  auto elapsed_ms = [&] {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                     t0)
        .count();
  };
  const int S = p.num_scenarios();
  const int n_x = p.n_x;
  std::vector<double> probs(S);
  for (int s = 0; s < S; ++s) probs[s] = p.scenarios[s].prob;

  PhReport rep;
  for (int i = 0; i < n_x; ++i) {
    const auto& v = p.first_stage_vars[i];
    const bool is_binary =
        v.kind == VarKind::bin ||
        (v.kind == VarKind::integer && v.lb == 0.0 && v.ub == 1.0);
    if (!is_binary) rep.used_approximation = true;
  }
  rep.multipliers.omega.assign(S, std::vector<double>(n_x, 0.0));

  // Penalty-free initial solves, then the probability-weighted average
  // consensus with no rounding.
  std::vector<std::vector<double>> xs(S), ys(S);
  {
    std::vector<MilpSolution> sols(S);
    auto worker = [&](int begin, int step) {
      for (int s = begin; s < S; s += step) {
        MilpProblem sub;
        const auto& sc = p.scenarios[s];
        sub.vars = p.first_stage_vars;
        sub.vars.insert(sub.vars.end(), sc.second_stage_vars.begin(),
                        sc.second_stage_vars.end());
        sub.objective.assign(p.c.begin(), p.c.end());
        sub.objective.insert(sub.objective.end(), sc.q.begin(), sc.q.end());
        sub.rows = p.first_stage_rows;
        sub.rows.insert(sub.rows.end(), sc.rows.begin(), sc.rows.end());
        sols[s] = be.solve_milp(sub, {});
      }
    };
    if (params.threads <= 1 || S <= 1) {
      worker(0, 1);
    } else {
      const int t = std::min(params.threads, S);
      std::vector<std::thread> pool;
      for (int i = 0; i < t; ++i) pool.emplace_back(worker, i, t);
      for (auto& th : pool) th.join();
    }
    for (int s = 0; s < S; ++s) {
      if (sols[s].status != SolveStatus::optimal)
        throw std::runtime_error(std::string("ph: scenario ") + std::to_string(s) +
                                 " subproblem " + to_string(sols[s].status) +
                                 " during initialization");
      xs[s].assign(sols[s].x.begin(), sols[s].x.begin() + n_x);
      ys[s].assign(sols[s].x.begin() + n_x, sols[s].x.begin() + n_x + p.n_y);
      rep.total_nodes += sols[s].nodes;
    }
    rep.subproblems_solved += S;
  }
  std::vector<double> z(n_x, 0.0);
  for (int s = 0; s < S; ++s)
    for (int i = 0; i < n_x; ++i) z[i] += probs[s] * xs[s][i];

  rep.termination = PhStop::k_max;
  for (int k = 1; k <= params.k_max; ++k) {
    const std::vector<double> z_prev = z;
    const auto sols = solve_ph_scenarios(p, z_prev, rep.multipliers, params.rho,
                                         params.breakpoints, be, params.threads,
                                         "iteration");
    rep.subproblems_solved += S;
    for (int s = 0; s < S; ++s) {
      xs[s].assign(sols[s].x.begin(), sols[s].x.begin() + n_x);
      ys[s].assign(sols[s].x.begin() + n_x, sols[s].x.begin() + n_x + p.n_y);
      rep.total_nodes += sols[s].nodes;
    }
    std::fill(z.begin(), z.end(), 0.0);
    for (int s = 0; s < S; ++s)
      for (int i = 0; i < n_x; ++i) z[i] += probs[s] * xs[s][i];
    double residual = 0.0;
    for (int s = 0; s < S; ++s)
      for (int i = 0; i < n_x; ++i) {
        const double d = xs[s][i] - z_prev[i];
        residual += d * d;
      }
    rep.residuals.push_back(residual);
    const bool met = residual <= params.eps;
    const bool timed_out =
        params.time_limit_ms >= 0 && elapsed_ms() > params.time_limit_ms;
    if (met || k == params.k_max || timed_out) {
      rep.dual_errors.push_back(rep.multipliers.feasibility_error(probs));
      rep.termination = met ? PhStop::residual_met
                            : (timed_out ? PhStop::time_limit : PhStop::k_max);
      break;
    }
    for (int s = 0; s < S; ++s)
      for (int i = 0; i < n_x; ++i)
        rep.multipliers.omega[s][i] += params.rho * (xs[s][i] - z[i]);
    rep.dual_errors.push_back(rep.multipliers.feasibility_error(probs));
  }

  rep.x = std::move(xs);
  rep.y = std::move(ys);
  rep.z = std::move(z);
  const auto eval = evaluate_consensus(p, rep.z, &be);
  rep.consensus_feasible = eval.feasible;
  rep.consensus_objective = eval.objective;
  rep.wall_ms = elapsed_ms();
  return rep;
}

}  // namespace smips
