#include "smips/penalty.hpp"

#include <algorithm>
#include <cmath>

#include "smips/mip.hpp"

namespace smips {

std::vector<double> neg_part(std::span<const double> v) {
  std::vector<double> out(v.size());
  for (size_t i = 0; i < v.size(); ++i) out[i] = -std::min(0.0, v[i]);
  return out;
}

PositiveBasis PositiveBasis::plus_minus_axes(int m) {
  PositiveBasis b;
  b.m = m;
  for (int i = 0; i < m; ++i) {
    std::vector<double> e(m, 0.0);
    e[i] = 1.0;
    b.vectors.push_back(e);
    e[i] = -1.0;
    b.vectors.push_back(e);
  }
  return b;
}

PositiveBasis PositiveBasis::axes_and_antidiagonal(int m) {
  PositiveBasis b;
  b.m = m;
  for (int i = 0; i < m; ++i) {
    std::vector<double> e(m, 0.0);
    e[i] = 1.0;
    b.vectors.push_back(e);
  }
  b.vectors.push_back(std::vector<double>(m, -1.0));
  return b;
}

SpanCheck is_positive_basis(const PositiveBasis& basis) {
  const int m = basis.m;
  for (const auto& v : basis.vectors) {
    if (static_cast<int>(v.size()) != m)
      throw std::invalid_argument("is_positive_basis: vector dimension mismatch");
    double norm = 0.0;
    for (double x : v) norm += std::fabs(x);
    if (norm == 0.0) throw std::invalid_argument("is_positive_basis: zero vector");
  }
  // Spans iff the cone {u : n_i'u <= 0 for all i} is {0}. Probe the cone
  // along every signed coordinate direction with one LP each.
  MilpProblem p;
  p.vars.assign(m, VarSpec{-1.0, 1.0, VarKind::cont});
  p.objective.assign(m, 0.0);
  for (const auto& nv : basis.vectors) {
    SparseRow row;
    for (int j = 0; j < m; ++j)
      if (nv[j] != 0.0) row.coeffs.push_back({j, nv[j]});
    row.sense = Sense::le;
    row.rhs = 0.0;
    p.rows.push_back(std::move(row));
  }
  for (int j = 0; j < m; ++j) {
    for (double sign : {1.0, -1.0}) {
      std::fill(p.objective.begin(), p.objective.end(), 0.0);
      p.objective[j] = -sign;  // maximize sign * u_j
      const auto s = solve_lp(p);
      if (s.status == SolveStatus::optimal && -s.objective > 1e-7)
        return {false, s.x};
    }
  }
  return {true, {}};
}

// ---------------------------------------------------------------------------
// AugmentingFunction
// ---------------------------------------------------------------------------

AugmentingFunction AugmentingFunction::psi_inf(PositiveBasis basis) {
  AugmentingFunction f;
  f.kind_ = Kind::psi_inf;
  f.m_ = basis.m;
  f.basis_ = std::move(basis);
  return f;
}

AugmentingFunction AugmentingFunction::psi_one(PositiveBasis basis) {
  AugmentingFunction f;
  f.kind_ = Kind::psi_one;
  f.m_ = basis.m;
  f.basis_ = std::move(basis);
  return f;
}

AugmentingFunction AugmentingFunction::psi_rho(std::vector<double> rho_lo,
                                               std::vector<double> rho_hi) {
  if (rho_lo.size() != rho_hi.size())
    throw std::invalid_argument("psi_rho: weight length mismatch");
  AugmentingFunction f;
  f.kind_ = Kind::psi_rho;
  f.m_ = static_cast<int>(rho_lo.size());
  f.rho_lo_ = std::move(rho_lo);
  f.rho_hi_ = std::move(rho_hi);
  return f;
}

AugmentingFunction AugmentingFunction::compose(std::vector<AugmentingFunction> children,
                                               Mode mode) {
  if (children.empty()) throw std::invalid_argument("compose: empty children list");
  const int m = children.front().dim();
  for (const auto& c : children)
    if (c.dim() != m) throw std::invalid_argument("compose: dimension mismatch");
  AugmentingFunction f;
  f.kind_ = Kind::composed;
  f.mode_ = mode;
  f.m_ = m;
  f.children_ = std::move(children);
  return f;
}

double AugmentingFunction::eval(std::span<const double> u) const {
  if (static_cast<int>(u.size()) != m_)
    throw std::invalid_argument("AugmentingFunction::eval: dimension mismatch");
  switch (kind_) {
    case Kind::psi_inf: {
      double best = -kInf;
      for (const auto& nv : basis_.vectors) {
        double d = 0.0;
        for (int j = 0; j < m_; ++j) d += nv[j] * u[j];
        best = std::max(best, d);
      }
      return best;
    }
    case Kind::psi_one: {
      double sum = 0.0;
      for (const auto& nv : basis_.vectors) {
        double d = 0.0;
        for (int j = 0; j < m_; ++j) d += nv[j] * u[j];
        sum += std::max(d, 0.0);
      }
      return sum;
    }
    case Kind::psi_rho: {
      double sum = 0.0;
      for (int j = 0; j < m_; ++j)
        sum += rho_lo_[j] * std::max(0.0, -u[j]) + rho_hi_[j] * std::max(0.0, u[j]);
      return sum;
    }
    case Kind::composed: {
      double acc = mode_ == Mode::sum ? 0.0 : -kInf;
      for (const auto& c : children_) {
        const double v = c.eval(u);
        acc = mode_ == Mode::sum ? acc + v : std::max(acc, v);
      }
      return acc;
    }
  }
  return 0.0;
}

// ---------------------------------------------------------------------------
// Growth-constant estimation
// ---------------------------------------------------------------------------

namespace {

double linf_norm(std::span<const double> u) {
  double n = 0.0;
  for (double x : u) n = std::max(n, std::fabs(x));
  return n;
}

double halton(long index, int base) {
  double f = 1.0, r = 0.0;
  long i = index;
  while (i > 0) {
    f /= base;
    r += f * (i % base);
    i /= base;
  }
  return r;
}

int nth_prime(int k) {
  static const int primes[] = {2,  3,  5,  7,  11, 13, 17, 19, 23, 29,
                               31, 37, 41, 43, 47, 53, 59, 61, 67, 71,
                               73, 79, 83, 89, 97, 101, 103, 107, 109, 113};
  return primes[k % 30] + 113 * (k / 30);  // crude extension past 30 dims
}

// Exact minimization of t -> max_i (a_i + b_i t) over [lo, hi].
double min_upper_envelope(const std::vector<double>& a, const std::vector<double>& b,
                          double lo, double hi, double* at = nullptr) {
  std::vector<double> cand{lo, hi};
  const size_t l = a.size();
  for (size_t i = 0; i < l; ++i)
    for (size_t k = i + 1; k < l; ++k) {
      const double db = b[i] - b[k];
      if (std::fabs(db) < 1e-14) continue;
      const double t = (a[k] - a[i]) / db;
      if (t > lo && t < hi) cand.push_back(t);
    }
  std::sort(cand.begin(), cand.end());
  double best = kInf, best_t = lo;
  for (double t : cand) {
    double v = -kInf;
    for (size_t i = 0; i < l; ++i) v = std::max(v, a[i] + b[i] * t);
    if (v < best - 1e-15) {
      best = v;
      best_t = t;
    }
  }
  if (at) *at = best_t;
  return best;
}

// Per-face coordinate descent for psi_inf on the l-inf sphere: the max-abs
// coordinate stays pinned, all others get exact 1-D line minimization.
double refine_on_sphere(const PositiveBasis& basis, std::vector<double> u, double eps,
                        std::vector<double>* out) {
  const int m = basis.m;
  const auto& N = basis.vectors;
  const size_t l = N.size();
  auto value = [&](const std::vector<double>& x) {
    double v = -kInf;
    for (const auto& nv : N) {
      double d = 0.0;
      for (int j = 0; j < m; ++j) d += nv[j] * x[j];
      v = std::max(v, d);
    }
    return v;
  };
  int face = 0;
  for (int j = 1; j < m; ++j)
    if (std::fabs(u[j]) > std::fabs(u[face])) face = j;
  u[face] = u[face] >= 0 ? eps : -eps;
  double cur = value(u);
  for (int sweep = 0; sweep < 50; ++sweep) {
    bool improved = false;
    for (int j = 0; j < m; ++j) {
      if (j == face) continue;
      std::vector<double> a(l), b(l);
      for (size_t i = 0; i < l; ++i) {
        double d = 0.0;
        for (int k = 0; k < m; ++k)
          if (k != j) d += N[i][k] * u[k];
        a[i] = d;
        b[i] = N[i][j];
      }
      double t;
      const double v = min_upper_envelope(a, b, -eps, eps, &t);
      if (v < cur - 1e-12) {
        cur = v;
        u[j] = t;
        improved = true;
      }
    }
    if (!improved) break;
  }
  if (out) *out = u;
  return cur;
}

}  // namespace

GrowthCertificate estimate_growth_constants(const AugmentingFunction& f,
                                            const PositiveBasis& basis, double eps_v,
                                            long n_samples, std::uint64_t seed) {
  if (eps_v <= 0.0) throw std::invalid_argument("estimate_growth_constants: eps_v <= 0");
  const auto chk = is_positive_basis(basis);
  if (!chk.spans)
    throw GrowthError("estimate_growth_constants: vectors do not positively span",
                      chk.witness);
  const int m = basis.m;
  const auto psi_inf = AugmentingFunction::psi_inf(basis);

  std::vector<std::vector<double>> samples;
  // Face centers.
  for (int j = 0; j < m; ++j)
    for (double sign : {1.0, -1.0}) {
      std::vector<double> u(m, 0.0);
      u[j] = sign * eps_v;
      samples.push_back(std::move(u));
    }
  // Sphere corners for small m.
  if (m <= 10) {
    for (long mask = 0; mask < (1L << m); ++mask) {
      std::vector<double> u(m);
      for (int j = 0; j < m; ++j) u[j] = (mask >> j) & 1 ? eps_v : -eps_v;
      samples.push_back(std::move(u));
    }
  }
  // Low-discrepancy fill.
  const long start = 1 + static_cast<long>(seed % 997);
  for (long i = 0; static_cast<long>(samples.size()) < n_samples; ++i) {
    std::vector<double> u(m);
    for (int j = 0; j < m; ++j)
      u[j] = 2.0 * halton(start + i, nth_prime(j)) - 1.0;
    const double nrm = linf_norm(u);
    if (nrm < 1e-9) continue;
    for (double& x : u) x *= eps_v / nrm;
    samples.push_back(std::move(u));
  }

  double delta = kInf;
  std::vector<double> argmin;
  std::vector<size_t> best_ids;
  std::vector<double> vals(samples.size());
  for (size_t i = 0; i < samples.size(); ++i) {
    vals[i] = psi_inf.eval(samples[i]);
    if (vals[i] < delta) {
      delta = vals[i];
      argmin = samples[i];
    }
  }
  // Refine from the most promising starts.
  std::vector<size_t> order(samples.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](size_t a, size_t b) { return vals[a] < vals[b]; });
  const size_t n_refine = std::min<size_t>(order.size(), 8 + 2 * m);
  for (size_t k = 0; k < n_refine; ++k) {
    std::vector<double> u;
    const double v = refine_on_sphere(basis, samples[order[k]], eps_v, &u);
    if (v < delta) {
      delta = v;
      argmin = u;
    }
  }
  if (delta <= 0.0)
    throw GrowthError("estimate_growth_constants: psi_inf non-positive on the sphere",
                      argmin);
  const double gamma = delta / eps_v;

  // Certify the sampled inequalities for the supplied function.
  for (const auto& u : samples) {
    const double fu = f.eval(u);
    if (fu < gamma * linf_norm(u) - 1e-9)
      throw GrowthError("estimate_growth_constants: growth inequality violated", u);
    // Scaled copies outside V must clear delta.
    for (double t : {1.0, 2.0, 10.0}) {
      std::vector<double> v(u);
      for (double& x : v) x *= t;
      if (f.eval(v) < delta - 1e-9)
        throw GrowthError("estimate_growth_constants: delta inequality violated", v);
    }
  }

  GrowthCertificate cert;
  cert.eps_v = eps_v;
  cert.delta = delta;
  cert.gamma_growth = gamma;
  cert.samples = static_cast<long>(samples.size());
  return cert;
}

}  // namespace smips
