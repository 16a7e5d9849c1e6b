#include "smips/pbgs.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>
#include <thread>

namespace smips {

PenaltyWeights PenaltyWeights::uniform(int scenarios, int n_x, double rho0) {
  PenaltyWeights w;
  w.rho_lo.assign(scenarios, std::vector<double>(n_x, rho0));
  w.rho_hi.assign(scenarios, std::vector<double>(n_x, rho0));
  return w;
}

std::pair<std::vector<double>, std::vector<double>> PenaltyWeights::mu(
    int s, double prob) const {
  auto lo = rho_lo[s];
  auto hi = rho_hi[s];
  for (double& v : lo) v /= prob;
  for (double& v : hi) v /= prob;
  return {std::move(lo), std::move(hi)};
}

double phi(const StochasticProgram& p, const std::vector<std::vector<double>>& x,
           const std::vector<std::vector<double>>& y, const std::vector<double>& z,
           const PenaltyWeights& w, double multiplier) {
  const int S = p.num_scenarios();
  if (static_cast<int>(x.size()) != S || static_cast<int>(y.size()) != S ||
      static_cast<int>(z.size()) != p.n_x)
    throw std::invalid_argument("phi: dimension mismatch");
  double value = 0.0;
  for (int s = 0; s < S; ++s) {
    const auto& sc = p.scenarios[s];
    double term = 0.0;
    for (int i = 0; i < p.n_x; ++i) term += p.c[i] * x[s][i];
    for (int j = 0; j < p.n_y; ++j) term += sc.q[j] * y[s][j];
    value += sc.prob * term;
    double pen = 0.0;
    for (int i = 0; i < p.n_x; ++i) {
      pen += w.rho_lo[s][i] * std::max(0.0, z[i] - x[s][i]);
      pen += w.rho_hi[s][i] * std::max(0.0, x[s][i] - z[i]);
    }
    value += multiplier * pen;
  }
  return value;
}

MilpProblem build_x_subproblem(const StochasticProgram& p, int s,
                               const std::vector<double>& z,
                               const PenaltyWeights& w, double multiplier) {
  const auto& sc = p.scenarios[s];
  const int n_x = p.n_x, n_y = p.n_y;
  MilpProblem sub;
  // Layout: x | y | w_lo | w_hi.
  sub.vars = p.first_stage_vars;
  sub.vars.insert(sub.vars.end(), sc.second_stage_vars.begin(),
                  sc.second_stage_vars.end());
  for (int i = 0; i < 2 * n_x; ++i) sub.vars.push_back({0.0, kInf, VarKind::cont});
  const auto [mu_lo, mu_hi] = w.mu(s, sc.prob);
  sub.objective.assign(p.c.begin(), p.c.end());
  sub.objective.insert(sub.objective.end(), sc.q.begin(), sc.q.end());
  for (int i = 0; i < n_x; ++i) sub.objective.push_back(multiplier * mu_lo[i]);
  for (int i = 0; i < n_x; ++i) sub.objective.push_back(multiplier * mu_hi[i]);
  sub.rows = p.first_stage_rows;
  sub.rows.insert(sub.rows.end(), sc.rows.begin(), sc.rows.end());
  for (int i = 0; i < n_x; ++i) {
    // x_i + w_lo_i >= z_i and -x_i + w_hi_i >= -z_i.
    sub.rows.push_back({{{i, 1.0}, {n_x + n_y + i, 1.0}}, Sense::ge, z[i]});
    sub.rows.push_back({{{i, -1.0}, {n_x + n_y + n_x + i, 1.0}}, Sense::ge, -z[i]});
  }
  return sub;
}

namespace {

double consensus_cost_component(const std::vector<std::vector<double>>& x,
                                const PenaltyWeights& w, int i, double zi) {
  double cost = 0.0;
  for (size_t s = 0; s < x.size(); ++s) {
    cost += w.rho_lo[s][i] * std::max(0.0, zi - x[s][i]);
    cost += w.rho_hi[s][i] * std::max(0.0, x[s][i] - zi);
  }
  return cost;
}

}  // namespace

std::vector<double> update_z(const std::vector<std::vector<double>>& x,
                             const PenaltyWeights& w,
                             const std::vector<VarSpec>& kinds,
                             const std::vector<double>& z_prev, TieBreak tie_break,
                             std::mt19937_64* rng) {
  const int S = static_cast<int>(x.size());
  const int n = static_cast<int>(kinds.size());
  std::vector<double> z(n);
  for (int i = 0; i < n; ++i) {
    const bool is_binary =
        kinds[i].kind == VarKind::bin ||
        (kinds[i].kind == VarKind::integer && kinds[i].lb == 0.0 && kinds[i].ub == 1.0);
    if (is_binary) {
      double cost_one = 0.0, cost_zero = 0.0;
      for (int s = 0; s < S; ++s) {
        cost_one += (1.0 - x[s][i]) * w.rho_lo[s][i];
        cost_zero += x[s][i] * w.rho_hi[s][i];
      }
      if (cost_one < cost_zero - 1e-12) {
        z[i] = 1.0;
      } else if (cost_one > cost_zero + 1e-12) {
        z[i] = 0.0;
      } else if (tie_break == TieBreak::coin_flip && rng) {
        z[i] = static_cast<double>((*rng)() % 2);
      } else {
        z[i] = std::round(z_prev[i]);
      }
      continue;
    }
    // Piecewise-linear convex in z_i; some breakpoint x_{s,i} minimizes.
    std::vector<double> bps;
    for (int s = 0; s < S; ++s) bps.push_back(x[s][i]);
    std::sort(bps.begin(), bps.end());
    bps.erase(std::unique(bps.begin(), bps.end()), bps.end());
    double best = kInf;
    std::vector<double> minimizers;
    for (double b : bps) {
      const double cost = consensus_cost_component(x, w, i, b);
      if (cost < best - 1e-12) {
        best = cost;
        minimizers = {b};
      } else if (cost < best + 1e-12) {
        minimizers.push_back(b);
      }
    }
    if (consensus_cost_component(x, w, i, z_prev[i]) < best + 1e-12 &&
        tie_break == TieBreak::keep_previous) {
      z[i] = z_prev[i];
    } else if (tie_break == TieBreak::coin_flip && rng && minimizers.size() > 1) {
      z[i] = minimizers[(*rng)() % minimizers.size()];
    } else {
      z[i] = minimizers.front();
    }
  }
  return z;
}

std::vector<bool> check_z_optimality(const std::vector<std::vector<double>>& x,
                                     const std::vector<double>& z,
                                     const PenaltyWeights& w, double tol) {
  const int n = static_cast<int>(z.size());
  std::vector<bool> ok(n);
  for (int i = 0; i < n; ++i) {
    double lhs = 0.0, lo_sum = 0.0, hi_sum = 0.0;
    for (size_t s = 0; s < x.size(); ++s) {
      if (x[s][i] > z[i] + tol) {
        lhs += w.rho_hi[s][i];
      } else if (x[s][i] < z[i] - tol) {
        lhs -= w.rho_lo[s][i];
      } else {
        lo_sum += w.rho_lo[s][i];
        hi_sum += w.rho_hi[s][i];
      }
    }
    ok[i] = lhs >= -hi_sum - tol && lhs <= lo_sum + tol;
  }
  return ok;
}

std::pair<PenaltyWeights, std::vector<double>> update_penalties(
    const PenaltyWeights& w, const std::vector<std::vector<double>>& x,
    const std::vector<double>& z, double gamma) {
  PenaltyWeights out = w;
  const int n = static_cast<int>(z.size());
  std::vector<double> delta(n, 0.0);
  for (size_t s = 0; s < x.size(); ++s) {
    for (int i = 0; i < n; ++i) {
      const double d = x[s][i] - z[i];
      if (d < 0.0) {
        out.rho_lo[s][i] += gamma * (-d);
        delta[i] -= gamma * (-d);
      } else if (d > 0.0) {
        out.rho_hi[s][i] += gamma * d;
        delta[i] += gamma * d;
      }
    }
  }
  return {std::move(out), std::move(delta)};
}

namespace {

// Solves each scenario's subproblem; results land in fixed scenario order so
// objective accumulation is schedule-independent.
std::vector<MilpSolution> solve_scenarios(
    const StochasticProgram& p, const std::vector<double>& z,
    const PenaltyWeights& w, double multiplier, MilpBackend& backend, int threads,
    const char* context) {
  const int S = p.num_scenarios();
  std::vector<MilpSolution> sols(S);
  auto worker = [&](int begin, int step) {
    for (int s = begin; s < S; s += step)
      sols[s] = backend.solve_milp(build_x_subproblem(p, s, z, w, multiplier), {});
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
      throw std::runtime_error(std::string("pbgs: scenario ") + std::to_string(s) +
                               " subproblem " + to_string(sols[s].status) + " during " +
                               context);
  return sols;
}

}  // namespace

PbgsReport run_pbgs(const StochasticProgram& p, const PbgsParams& params,
                    MilpBackend* backend) {
  if (params.rho0 <= 0 || params.gamma <= 0 || params.beta <= 1 || params.eps < 0 ||
      params.l_max < 1 || params.k_max < 1)
    throw std::invalid_argument("run_pbgs: invalid parameters");
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
  std::mt19937_64 rng(params.seed);

  PbgsReport rep;
  auto weights = PenaltyWeights::uniform(S, n_x, params.rho0);

  // Penalty-free initial scenario solves.
  std::vector<std::vector<double>> xs(S), ys(S);
  {
    const auto sols =
        solve_scenarios(p, std::vector<double>(n_x, 0.0), weights, 0.0, be,
                        params.threads, "initialization");
    for (int s = 0; s < S; ++s) {
      xs[s].assign(sols[s].x.begin(), sols[s].x.begin() + n_x);
      ys[s].assign(sols[s].x.begin() + n_x, sols[s].x.begin() + n_x + p.n_y);
      rep.total_nodes += sols[s].nodes;
    }
    rep.subproblems_solved += S;
  }
  // Probability average, rounded on integer-kind components.
  std::vector<double> z(n_x, 0.0);
  for (int s = 0; s < S; ++s)
    for (int i = 0; i < n_x; ++i) z[i] += p.scenarios[s].prob * xs[s][i];
  for (int i = 0; i < n_x; ++i)
    if (p.first_stage_vars[i].kind != VarKind::cont) z[i] = std::round(z[i]);

  rep.termination = PbgsStop::k_max;
  for (int k = 1; k <= params.k_max; ++k) {
    const double exponent =
        params.multiplier_exponent == MultiplierExponent::k_minus_1 ? k - 1 : k;
    const double mult = std::pow(params.beta, exponent) - 1.0;
    PbgsOuterIteration it;
    double prev_phi = phi(p, xs, ys, z, weights, mult);
    for (int l = 1; l <= params.l_max; ++l) {
      const auto sols = solve_scenarios(p, z, weights, mult, be, params.threads,
                                        "x-update");
      rep.subproblems_solved += S;
      for (int s = 0; s < S; ++s) {
        xs[s].assign(sols[s].x.begin(), sols[s].x.begin() + n_x);
        ys[s].assign(sols[s].x.begin() + n_x, sols[s].x.begin() + n_x + p.n_y);
        rep.total_nodes += sols[s].nodes;
      }
      // With a zero multiplier the z-step is degenerate (any z is optimal);
      // the consensus stays put until the multiplier activates.
      if (mult > 0.0)
        z = update_z(xs, weights, p.first_stage_vars, z, params.tie_break, &rng);
      const double cur_phi = phi(p, xs, ys, z, weights, mult);
      it.improvements.push_back(prev_phi - cur_phi);
      it.inner = l;
      const bool done = prev_phi - cur_phi <= params.eps;
      prev_phi = cur_phi;
      if (done) break;
      if (params.time_limit_ms >= 0 && elapsed_ms() > params.time_limit_ms) break;
    }
    double residual = 0.0;
    for (int s = 0; s < S; ++s)
      for (int i = 0; i < n_x; ++i) {
        const double d = xs[s][i] - z[i];
        residual += d * d;
      }
    it.residual = residual;
    const bool met = residual <= params.eps;
    const bool timed_out =
        params.time_limit_ms >= 0 && elapsed_ms() > params.time_limit_ms;
    if (met || k == params.k_max || timed_out) {
      it.delta.assign(n_x, 0.0);
      it.weights = weights;
      rep.outer.push_back(std::move(it));
      rep.termination = met ? PbgsStop::residual_met
                            : (timed_out ? PbgsStop::time_limit : PbgsStop::k_max);
      break;
    }
    auto [next, delta] = update_penalties(weights, xs, z, params.gamma);
    weights = std::move(next);
    it.delta = std::move(delta);
    it.weights = weights;
    rep.outer.push_back(std::move(it));
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

ConsensusEvaluation evaluate_consensus(const StochasticProgram& p,
                                       const std::vector<double>& z,
                                       MilpBackend* backend) {
  if (static_cast<int>(z.size()) != p.n_x)
    throw std::invalid_argument("evaluate_consensus: z length mismatch");
  EmbeddedBackend embedded;
  MilpBackend& be = backend ? *backend : embedded;
  ConsensusEvaluation out;
  out.z_rounded = z;
  for (int i = 0; i < p.n_x; ++i)
    if (p.first_stage_vars[i].kind != VarKind::cont)
      out.z_rounded[i] = std::round(out.z_rounded[i]);

  const double tol = 1e-6;
  bool first_stage_ok = true;
  for (int i = 0; i < p.n_x; ++i) {
    const auto& v = p.first_stage_vars[i];
    if (out.z_rounded[i] < v.lb - tol || out.z_rounded[i] > v.ub + tol)
      first_stage_ok = false;
  }
  for (const auto& row : p.first_stage_rows)
    if (row.violation(out.z_rounded) > tol) first_stage_ok = false;

  double objective = 0.0;
  for (int i = 0; i < p.n_x; ++i) objective += p.c[i] * out.z_rounded[i];
  out.y.assign(p.num_scenarios(), {});
  for (int s = 0; s < p.num_scenarios(); ++s) {
    const auto& sc = p.scenarios[s];
    MilpProblem sub;
    sub.vars = sc.second_stage_vars;
    sub.objective = sc.q;
    for (const auto& row : sc.rows) {
      SparseRow r;
      r.sense = row.sense;
      r.rhs = row.rhs;
      for (const auto& [idx, coef] : row.coeffs) {
        if (idx < p.n_x)
          r.rhs -= coef * out.z_rounded[idx];
        else
          r.coeffs.push_back({idx - p.n_x, coef});
      }
      if (r.coeffs.empty()) {
        // Constant row: either trivially satisfied or scenario-infeasible.
        const double lhs = 0.0;
        const bool sat = r.sense == Sense::le   ? lhs <= r.rhs + tol
                         : r.sense == Sense::ge ? lhs >= r.rhs - tol
                                                : std::fabs(lhs - r.rhs) <= tol;
        if (!sat) {
          out.infeasible_scenarios.push_back(s);
          break;
        }
        continue;
      }
      sub.rows.push_back(std::move(r));
    }
    if (!out.infeasible_scenarios.empty() && out.infeasible_scenarios.back() == s)
      continue;
    const auto sol = be.solve_milp(sub, {});
    if (sol.status != SolveStatus::optimal) {
      out.infeasible_scenarios.push_back(s);
      continue;
    }
    out.y[s] = sol.x;
    objective += sc.prob * sol.objective;
  }
  out.feasible = first_stage_ok && out.infeasible_scenarios.empty();
  out.objective = objective;
  return out;
}

}  // namespace smips
