#include "smips/gs.hpp"

#include <cmath>
#include <stdexcept>

namespace smips {

GsTrajectory run_block_gs(const BlockProblem& p, double eps, int k_max) {
  GsTrajectory t;
  t.x.push_back(p.x0);
  t.z.push_back(p.z0);
  t.objective.push_back(p.objective(p.x0, p.z0));
  t.termination = GsStop::k_max;
  for (int k = 0; k < k_max; ++k) {
    auto x = p.x_solver(t.z.back());
    auto z = p.z_solver(x);
    const double f = p.objective(x, z);
    const double improvement = t.objective.back() - f;
    t.x.push_back(std::move(x));
    t.z.push_back(std::move(z));
    t.objective.push_back(f);
    if (improvement <= eps) {
      t.termination = GsStop::eps_criterion;
      break;
    }
  }
  return t;
}

bool certify_partial_minimum(const BlockProblem& p, const std::vector<double>& x,
                             const std::vector<double>& z, double eps) {
  const double f = p.objective(x, z);
  if (f - p.objective(p.x_solver(z), z) > eps) return false;
  if (f - p.objective(x, p.z_solver(x)) > eps) return false;
  return true;
}

namespace {

// Picks the best candidate; ties go to the point closest (l1) to `anchor`,
// then to the earlier candidate.
struct ArgMin {
  double best = kInf;
  double best_dist = kInf;
  std::vector<double> point;

  void offer(std::vector<double> cand, double value,
             const std::vector<double>& anchor) {
    double dist = 0.0;
    for (size_t i = 0; i < cand.size() && i < anchor.size(); ++i)
      dist += std::fabs(cand[i] - anchor[i]);
    if (value < best - 1e-12 || (value < best + 1e-12 && dist < best_dist - 1e-12)) {
      best = value;
      best_dist = dist;
      point = std::move(cand);
    }
  }
};

}  // namespace

BlockProblem builtin_ex1() {
  BlockProblem p;
  p.objective = [](const std::vector<double>& x, const std::vector<double>& z) {
    return 7.0 * x[0] * x[0] + 10.0 * x[0] * z[0] + 7.0 * z[0] * z[0];
  };
  auto grid_min = [](double other, bool x_block) {
    ArgMin am;
    for (int v = -2; v <= 2; ++v) {
      const double xv = x_block ? v : other;
      const double zv = x_block ? other : v;
      am.offer({static_cast<double>(v)}, 7.0 * xv * xv + 10.0 * xv * zv + 7.0 * zv * zv,
               {other});
    }
    return am.point;
  };
  p.x_solver = [grid_min](const std::vector<double>& z) { return grid_min(z[0], true); };
  p.z_solver = [grid_min](const std::vector<double>& x) { return grid_min(x[0], false); };
  p.x0 = {2.0};
  p.z0 = {-2.0};
  return p;
}

BlockProblem builtin_ex2(double rho, double x0, double z0) {
  BlockProblem p;
  p.objective = [rho](const std::vector<double>& x, const std::vector<double>& z) {
    return -2.0 * x[0] - z[0] + rho * std::fabs(x[0] - z[0]);
  };
  // Piecewise-linear in each block: the minimum sits at an interval endpoint
  // or at the kink x = z, so exact minimization checks those candidates.
  auto interval_min = [](double lo, double hi, double kink,
                         const std::function<double(double)>& g, double anchor) {
    ArgMin am;
    am.offer({lo}, g(lo), {anchor});
    am.offer({hi}, g(hi), {anchor});
    if (kink > lo && kink < hi) am.offer({kink}, g(kink), {anchor});
    return am.point;
  };
  p.x_solver = [rho, interval_min](const std::vector<double>& z) {
    return interval_min(
        -2.0, 3.0, z[0],
        [&](double x) { return -2.0 * x + rho * std::fabs(x - z[0]); }, z[0]);
  };
  p.z_solver = [rho, interval_min](const std::vector<double>& x) {
    return interval_min(
        0.0, 5.0, x[0], [&](double z) { return -z + rho * std::fabs(x[0] - z); },
        x[0]);
  };
  p.x0 = {x0};
  p.z0 = {z0};
  return p;
}

BlockProblem builtin_ex3(const std::vector<std::vector<double>>& rho, ZRule rule) {
  if (rho.size() != 2 || rho[0].size() != 3 || rho[1].size() != 3)
    throw std::invalid_argument("builtin_ex3: rho must be 2x3");
  static const double cost[2][3] = {{2.0, -1.0, -2.0}, {-2.0, -1.0, 2.0}};
  BlockProblem p;
  p.objective = [rho](const std::vector<double>& x, const std::vector<double>& z) {
    double f = 0.0;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 3; ++j) {
        f += cost[i][j] * x[3 * i + j];
        f += rho[i][j] * std::fabs(x[3 * i + j] - z[j]);
      }
    return f;
  };
  // Each scenario picks one of {0, e1, e2, e3}; separable across scenarios.
  p.x_solver = [rho](const std::vector<double>& z) {
    std::vector<double> x(6, 0.0);
    for (int i = 0; i < 2; ++i) {
      double best = kInf;
      int best_pick = -1;
      for (int pick = 0; pick < 4; ++pick) {  // 0 = empty, else e_{pick-1}
        double f = 0.0;
        for (int j = 0; j < 3; ++j) {
          const double xij = pick == j + 1 ? 1.0 : 0.0;
          f += cost[i][j] * xij + rho[i][j] * std::fabs(xij - z[j]);
        }
        if (f < best - 1e-12) {
          best = f;
          best_pick = pick;
        }
      }
      if (best_pick > 0) x[3 * i + best_pick - 1] = 1.0;
    }
    return x;
  };
  p.z_solver = [rho, rule](const std::vector<double>& x) {
    double best = kInf;
    std::vector<double> best_z;
    for (int step = 0; step < 8; ++step) {
      const int mask = rule == ZRule::lexicographic ? step : 7 - step;
      std::vector<double> z{static_cast<double>((mask >> 2) & 1),
                            static_cast<double>((mask >> 1) & 1),
                            static_cast<double>(mask & 1)};
      double f = 0.0;
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 3; ++j) f += rho[i][j] * std::fabs(x[3 * i + j] - z[j]);
      if (f < best - 1e-12) {
        best = f;
        best_z = std::move(z);
      }
    }
    return best_z;
  };
  p.x0 = std::vector<double>(6, 0.0);
  p.z0 = {0.0, 0.0, 0.0};
  return p;
}

}  // namespace smips
