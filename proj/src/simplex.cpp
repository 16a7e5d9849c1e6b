// Bounded-variable primal simplex with a dense explicit basis inverse.
// Phase I uses artificial variables; Bland's rule kicks in after a
// degenerate streak to prevent cycling.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "smips/mip.hpp"

namespace smips {

std::string MilpProblem::validate() const {
  const int n = num_vars();
  if (static_cast<int>(objective.size()) != n)
    return "objective length != variable count";
  for (int j = 0; j < n; ++j) {
    const VarSpec& v = vars[j];
    if (std::isnan(v.lb) || std::isnan(v.ub))
      return "NaN bound on variable " + std::to_string(j);
    if (v.lb > v.ub) return "lb > ub on variable " + std::to_string(j);
    if (v.kind == VarKind::bin && (v.lb < 0.0 || v.ub > 1.0))
      return "binary variable " + std::to_string(j) + " has bounds outside [0,1]";
    if (!std::isfinite(objective[j]))
      return "non-finite objective coefficient on variable " + std::to_string(j);
  }
  for (size_t i = 0; i < rows.size(); ++i) {
    for (const auto& [j, v] : rows[i].coeffs) {
      if (j < 0 || j >= n)
        return "row " + std::to_string(i) + " references variable " + std::to_string(j);
      if (!std::isfinite(v)) return "non-finite coefficient in row " + std::to_string(i);
    }
    if (!std::isfinite(rows[i].rhs)) return "non-finite rhs in row " + std::to_string(i);
  }
  return "";
}

namespace {

constexpr double kPivTol = 1e-9;
constexpr double kDualTol = 1e-9;
constexpr double kFeasTol = 1e-9;

enum NbState : uint8_t { kAtLb, kAtUb, kFreeZero };

class BoundedSimplex {
 public:
  BoundedSimplex(const MilpProblem& p, const std::vector<double>& lb,
                 const std::vector<double>& ub, const SolveOptions& opt)
      : prob_(p), opt_(opt) {
    n_ = p.num_vars();
    m_ = p.num_rows();
    lb_.assign(lb.begin(), lb.end());
    ub_.assign(ub.begin(), ub.end());
    // Slack per row: le -> [0,inf), ge -> (-inf,0], eq -> [0,0].
    cols_.resize(n_ + m_);
    for (int i = 0; i < m_; ++i) {
      for (const auto& [j, v] : p.rows[i].coeffs) cols_[j].push_back({i, v});
      cols_[n_ + i].push_back({i, 1.0});
      switch (p.rows[i].sense) {
        case Sense::le: lb_.push_back(0.0); ub_.push_back(kInf); break;
        case Sense::ge: lb_.push_back(-kInf); ub_.push_back(0.0); break;
        case Sense::eq: lb_.push_back(0.0); ub_.push_back(0.0); break;
      }
    }
    b_.resize(m_);
    for (int i = 0; i < m_; ++i) b_[i] = p.rows[i].rhs;
  }

  MilpSolution run() {
    MilpSolution sol;
    for (int j = 0; j < n_; ++j) {
      if (lb_[j] > ub_[j] + 1e-12) {
        sol.status = SolveStatus::infeasible;
        return sol;
      }
    }
    init_point();
    if (!phase_one(sol)) return sol;
    phase_two(sol);
    return sol;
  }

 private:
  const MilpProblem& prob_;
  SolveOptions opt_;
  int n_ = 0, m_ = 0;
  std::vector<std::vector<std::pair<int, double>>> cols_;
  std::vector<double> lb_, ub_, b_;
  std::vector<double> cost_;     // active objective (phase dependent)
  std::vector<double> xval_;     // current value of every column
  std::vector<uint8_t> nbstate_; // meaningful for nonbasic columns
  std::vector<int> basis_;       // row -> column
  std::vector<int> in_basis_;    // column -> row or -1
  std::vector<double> Binv_;     // m_ x m_, row-major
  long iters_ = 0;
  int first_artificial_ = -1;

  int ncols() const { return static_cast<int>(cols_.size()); }

  void init_point() {
    const int N = ncols();
    xval_.assign(N, 0.0);
    nbstate_.assign(N, kAtLb);
    in_basis_.assign(N, -1);
    for (int j = 0; j < n_; ++j) {
      if (std::isfinite(lb_[j])) {
        xval_[j] = lb_[j];
        nbstate_[j] = kAtLb;
      } else if (std::isfinite(ub_[j])) {
        xval_[j] = ub_[j];
        nbstate_[j] = kAtUb;
      } else {
        xval_[j] = 0.0;
        nbstate_[j] = kFreeZero;
      }
    }
    // Residual each slack must absorb.
    std::vector<double> resid(b_);
    for (int j = 0; j < n_; ++j) {
      if (xval_[j] == 0.0) continue;
      for (const auto& [i, v] : cols_[j]) resid[i] -= v * xval_[j];
    }
    basis_.assign(m_, -1);
    first_artificial_ = ncols();
    for (int i = 0; i < m_; ++i) {
      const int sj = n_ + i;
      if (resid[i] >= lb_[sj] - kFeasTol && resid[i] <= ub_[sj] + kFeasTol) {
        basis_[i] = sj;
        in_basis_[sj] = i;
        xval_[sj] = resid[i];
      } else {
        // Clamp slack to its nearest bound, absorb the rest in an artificial.
        const double sv = resid[i] > ub_[sj] ? ub_[sj] : lb_[sj];
        xval_[sj] = sv;
        nbstate_[sj] = resid[i] > ub_[sj] ? kAtUb : kAtLb;
        const double r = resid[i] - sv;
        const int aj = ncols();
        cols_.push_back({{i, r > 0 ? 1.0 : -1.0}});
        lb_.push_back(0.0);
        ub_.push_back(kInf);
        xval_.push_back(std::fabs(r));
        nbstate_.push_back(kAtLb);
        in_basis_.push_back(i);
        basis_[i] = aj;
      }
    }
    refactorize();
  }

  void refactorize() {
    // Invert the basis matrix by Gauss-Jordan with partial pivoting.
    std::vector<double> M(static_cast<size_t>(m_) * m_, 0.0);
    Binv_.assign(static_cast<size_t>(m_) * m_, 0.0);
    for (int r = 0; r < m_; ++r) {
      for (const auto& [i, v] : cols_[basis_[r]]) M[static_cast<size_t>(i) * m_ + r] = v;
      Binv_[static_cast<size_t>(r) * m_ + r] = 1.0;
    }
    for (int col = 0; col < m_; ++col) {
      int piv = col;
      double best = std::fabs(M[static_cast<size_t>(col) * m_ + col]);
      for (int r = col + 1; r < m_; ++r) {
        const double a = std::fabs(M[static_cast<size_t>(r) * m_ + col]);
        if (a > best) { best = a; piv = r; }
      }
      if (best < 1e-12)
        throw std::runtime_error("simplex: singular basis during refactorization");
      if (piv != col) {
        for (int k = 0; k < m_; ++k) {
          std::swap(M[static_cast<size_t>(piv) * m_ + k], M[static_cast<size_t>(col) * m_ + k]);
          std::swap(Binv_[static_cast<size_t>(piv) * m_ + k], Binv_[static_cast<size_t>(col) * m_ + k]);
        }
      }
      const double d = 1.0 / M[static_cast<size_t>(col) * m_ + col];
      for (int k = 0; k < m_; ++k) {
        M[static_cast<size_t>(col) * m_ + k] *= d;
        Binv_[static_cast<size_t>(col) * m_ + k] *= d;
      }
      for (int r = 0; r < m_; ++r) {
        if (r == col) continue;
        const double f = M[static_cast<size_t>(r) * m_ + col];
        if (f == 0.0) continue;
        for (int k = 0; k < m_; ++k) {
          M[static_cast<size_t>(r) * m_ + k] -= f * M[static_cast<size_t>(col) * m_ + k];
          Binv_[static_cast<size_t>(r) * m_ + k] -= f * Binv_[static_cast<size_t>(col) * m_ + k];
        }
      }
    }
    recompute_basic_values();
  }

  void recompute_basic_values() {
    std::vector<double> rhs(b_);
    for (int j = 0; j < ncols(); ++j) {
      if (in_basis_[j] >= 0 || xval_[j] == 0.0) continue;
      for (const auto& [i, v] : cols_[j]) rhs[i] -= v * xval_[j];
    }
    for (int r = 0; r < m_; ++r) {
      double s = 0.0;
      const double* row = &Binv_[static_cast<size_t>(r) * m_];
      for (int i = 0; i < m_; ++i) s += row[i] * rhs[i];
      xval_[basis_[r]] = s;
    }
  }

  std::vector<double> compute_y() const {
    std::vector<double> y(m_, 0.0);
    for (int r = 0; r < m_; ++r) {
      const double cb = cost_[basis_[r]];
      if (cb == 0.0) continue;
      const double* row = &Binv_[static_cast<size_t>(r) * m_];
      for (int i = 0; i < m_; ++i) y[i] += cb * row[i];
    }
    return y;
  }

  double reduced_cost(int j, const std::vector<double>& y) const {
    double d = cost_[j];
    for (const auto& [i, v] : cols_[j]) d -= y[i] * v;
    return d;
  }

  std::vector<double> ftran(int j) const {
    std::vector<double> w(m_, 0.0);
    for (const auto& [i, v] : cols_[j]) {
      const double a = v;
      for (int r = 0; r < m_; ++r) w[r] += Binv_[static_cast<size_t>(r) * m_ + i] * a;
    }
    return w;
  }

  // Core loop shared by both phases. Returns final status.
  SolveStatus iterate(long iter_limit) {
    int degen_streak = 0;
    bool bland = false;
    long since_refactor = 0;
    while (true) {
      if (iters_ >= iter_limit) return SolveStatus::iteration_limit;
      ++iters_;
      const std::vector<double> y = compute_y();
      int enter = -1;
      double best_viol = kDualTol;
      int dir = +1;
      for (int j = 0; j < ncols(); ++j) {
        if (in_basis_[j] >= 0) continue;
        if (lb_[j] == ub_[j]) continue;  // fixed (incl. retired artificials)
        const double d = reduced_cost(j, y);
        double viol = 0.0;
        int jdir = +1;
        if (nbstate_[j] == kAtLb) {
          viol = -d;
          jdir = +1;
        } else if (nbstate_[j] == kAtUb) {
          viol = d;
          jdir = -1;
        } else {  // free at zero
          viol = std::fabs(d);
          jdir = d < 0 ? +1 : -1;
        }
        if (viol > best_viol) {
          enter = j;
          dir = jdir;
          best_viol = viol;
          if (bland) break;  // Bland: first eligible by index
        }
      }
      if (enter < 0) return SolveStatus::optimal;

      const std::vector<double> w = ftran(enter);
      // Max step before a basic variable (or the entering variable itself)
      // hits a bound.
      double t = kInf;
      int leave_r = -1;
      bool leave_to_ub = false;
      if (std::isfinite(lb_[enter]) && std::isfinite(ub_[enter]))
        t = ub_[enter] - lb_[enter];
      for (int r = 0; r < m_; ++r) {
        const double delta = dir * w[r];
        const int bj = basis_[r];
        if (delta > kPivTol && std::isfinite(lb_[bj])) {
          const double lim = (xval_[bj] - lb_[bj]) / delta;
          if (lim < t - 1e-12 ||
              (lim < t + 1e-12 && (leave_r < 0 || bj < basis_[leave_r]))) {
            t = std::max(lim, 0.0);
            leave_r = r;
            leave_to_ub = false;
          }
        } else if (delta < -kPivTol && std::isfinite(ub_[bj])) {
          const double lim = (ub_[bj] - xval_[bj]) / (-delta);
          if (lim < t - 1e-12 ||
              (lim < t + 1e-12 && (leave_r < 0 || bj < basis_[leave_r]))) {
            t = std::max(lim, 0.0);
            leave_r = r;
            leave_to_ub = true;
          }
        }
      }
      if (!std::isfinite(t)) return SolveStatus::unbounded;

      if (t <= 1e-10) {
        if (++degen_streak > 2 * m_ + 20) bland = true;
      } else {
        degen_streak = 0;
        bland = false;
      }

      // Apply the step.
      for (int r = 0; r < m_; ++r) xval_[basis_[r]] -= dir * t * w[r];
      xval_[enter] += dir * t;

      if (leave_r < 0) {
        // Bound flip, no basis change.
        nbstate_[enter] = nbstate_[enter] == kAtLb ? kAtUb : kAtLb;
        xval_[enter] = nbstate_[enter] == kAtUb ? ub_[enter] : lb_[enter];
        continue;
      }
      const int leave = basis_[leave_r];
      xval_[leave] = leave_to_ub ? ub_[leave] : lb_[leave];
      nbstate_[leave] = leave_to_ub ? kAtUb : kAtLb;
      in_basis_[leave] = -1;
      basis_[leave_r] = enter;
      in_basis_[enter] = leave_r;

      // Binv update: eliminate the entering column.
      const double piv = w[leave_r];
      if (std::fabs(piv) < kPivTol) {
        refactorize();
        continue;
      }
      double* prow = &Binv_[static_cast<size_t>(leave_r) * m_];
      const double inv = 1.0 / piv;
      for (int k = 0; k < m_; ++k) prow[k] *= inv;
      for (int r = 0; r < m_; ++r) {
        if (r == leave_r) continue;
        const double f = w[r];
        if (f == 0.0) continue;
        double* row = &Binv_[static_cast<size_t>(r) * m_];
        for (int k = 0; k < m_; ++k) row[k] -= f * prow[k];
      }
      if (++since_refactor >= 100) {
        refactorize();
        since_refactor = 0;
      }
    }
  }

  bool phase_one(MilpSolution& sol) {
    if (first_artificial_ >= ncols()) return true;  // slack basis feasible
    cost_.assign(ncols(), 0.0);
    for (int j = first_artificial_; j < ncols(); ++j) cost_[j] = 1.0;
    const SolveStatus st = iterate(opt_.iteration_limit);
    double infeas = 0.0;
    for (int j = first_artificial_; j < ncols(); ++j) infeas += xval_[j];
    if (st == SolveStatus::iteration_limit) {
      sol.status = SolveStatus::iteration_limit;
      sol.iterations = iters_;
      return false;
    }
    if (infeas > 1e-7) {
      sol.status = SolveStatus::infeasible;
      sol.iterations = iters_;
      return false;
    }
    // Retire artificials: pivot basic ones out where possible, freeze all.
    for (int j = first_artificial_; j < ncols(); ++j) {
      const int r = in_basis_[j];
      if (r >= 0 && std::fabs(xval_[j]) < 1e-9) {
        int repl = -1;
        std::vector<double> wbest;
        for (int k = 0; k < first_artificial_; ++k) {
          if (in_basis_[k] >= 0 || lb_[k] == ub_[k]) continue;
          std::vector<double> w = ftran(k);
          if (std::fabs(w[r]) > 1e-7) {
            repl = k;
            wbest = std::move(w);
            break;
          }
        }
        if (repl >= 0) {
          in_basis_[j] = -1;
          nbstate_[j] = kAtLb;
          xval_[j] = 0.0;
          basis_[r] = repl;
          in_basis_[repl] = r;
          xval_[repl] = nbstate_[repl] == kAtUb ? ub_[repl] : xval_[repl];
          refactorize();
        }
      }
      lb_[j] = ub_[j] = 0.0;  // never re-enters
    }
    recompute_basic_values();
    return true;
  }

  void phase_two(MilpSolution& sol) {
    cost_.assign(ncols(), 0.0);
    for (int j = 0; j < n_; ++j) cost_[j] = prob_.objective[j];
    const SolveStatus st = iterate(opt_.iteration_limit);
    sol.status = st;
    sol.iterations = iters_;
    sol.x.assign(xval_.begin(), xval_.begin() + n_);
    double obj = prob_.objective_offset;
    for (int j = 0; j < n_; ++j) obj += prob_.objective[j] * xval_[j];
    sol.objective = obj;
    if (st == SolveStatus::optimal) {
      sol.bound = obj;
      const std::vector<double> y = compute_y();
      sol.duals.resize(m_);
      for (int i = 0; i < m_; ++i) sol.duals[i] = -y[i];
      sol.reduced_costs.resize(n_);
      for (int j = 0; j < n_; ++j)
        sol.reduced_costs[j] = in_basis_[j] >= 0 ? 0.0 : reduced_cost(j, y);
    } else if (st == SolveStatus::unbounded) {
      sol.bound = -kInf;
    }
  }
};

}  // namespace

MilpSolution solve_lp_with_bounds(const MilpProblem& p, const std::vector<double>& lb,
                                  const std::vector<double>& ub, const SolveOptions& opt) {
  const std::string err = p.validate();
  if (!err.empty()) throw std::invalid_argument("solve_lp: " + err);
  BoundedSimplex s(p, lb, ub, opt);
  return s.run();
}

MilpSolution solve_lp(const MilpProblem& p, const SolveOptions& opt) {
  std::vector<double> lb(p.num_vars()), ub(p.num_vars());
  for (int j = 0; j < p.num_vars(); ++j) {
    lb[j] = p.vars[j].lb;
    ub[j] = p.vars[j].ub;
  }
  return solve_lp_with_bounds(p, lb, ub, opt);
}

}  // namespace smips
