#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "smips/penalty.hpp"

using namespace smips;

namespace {

std::vector<double> random_vec(std::mt19937_64& rng, int m, double scale = 1.0) {
  std::vector<double> u(m);
  for (double& x : u) {
    // keep the generated stream platform-stable: integers only
    const long r = static_cast<long>(rng() % 2001) - 1000;
    x = scale * r / 1000.0;
  }
  return u;
}

double linf(const std::vector<double>& u) {
  double n = 0.0;
  for (double x : u) n = std::max(n, std::fabs(x));
  return n;
}

double l1(const std::vector<double>& u) {
  double n = 0.0;
  for (double x : u) n += std::fabs(x);
  return n;
}

}  // namespace

TEST_CASE("neg_part matches componentwise definition") {
  const std::vector<double> v{1.0, -2.0, 0.0};
  CHECK(neg_part(v) == std::vector<double>{0.0, 2.0, 0.0});
  CHECK(neg_part(std::vector<double>{}) == std::vector<double>{});
  CHECK(neg_part(std::vector<double>{-3.5}) == std::vector<double>{3.5});
  std::mt19937_64 rng(5);
  for (int t = 0; t < 50; ++t) {
    const auto u = random_vec(rng, 6);
    const auto n = neg_part(u);
    for (size_t i = 0; i < u.size(); ++i) {
      CHECK(n[i] >= 0.0);
      CHECK(n[i] == -std::min(0.0, u[i]));
    }
  }
}

TEST_CASE("is_positive_basis: signed axes span") {
  CHECK(is_positive_basis(PositiveBasis::plus_minus_axes(2)).spans);
  CHECK(is_positive_basis(PositiveBasis::plus_minus_axes(5)).spans);
}

TEST_CASE("is_positive_basis: axes plus antidiagonal span") {
  CHECK(is_positive_basis(PositiveBasis::axes_and_antidiagonal(2)).spans);
  CHECK(is_positive_basis(PositiveBasis::axes_and_antidiagonal(4)).spans);
}

TEST_CASE("is_positive_basis: {e1, e2} fails with a violating witness") {
  PositiveBasis b;
  b.m = 2;
  b.vectors = {{1.0, 0.0}, {0.0, 1.0}};
  const auto chk = is_positive_basis(b);
  REQUIRE(!chk.spans);
  REQUIRE(chk.witness.size() == 2);
  CHECK(linf(chk.witness) > 1e-7);
  for (const auto& nv : b.vectors) {
    double d = 0.0;
    for (int j = 0; j < 2; ++j) d += nv[j] * chk.witness[j];
    CHECK(d <= 1e-9);
  }
}

TEST_CASE("is_positive_basis: input validation") {
  PositiveBasis b;
  b.m = 2;
  b.vectors = {{1.0, 0.0}, {0.0}};
  CHECK_THROWS_AS(is_positive_basis(b), std::invalid_argument);
  b.vectors = {{1.0, 0.0}, {0.0, 0.0}};
  CHECK_THROWS_AS(is_positive_basis(b), std::invalid_argument);
}

TEST_CASE("eval: psi_one on axes+antidiagonal at (1,1) is 2") {
  const auto f = AugmentingFunction::psi_one(PositiveBasis::axes_and_antidiagonal(2));
  CHECK(f.eval(std::vector<double>{1.0, 1.0}) == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("eval: psi_rho single-scenario example") {
  const auto f = AugmentingFunction::psi_rho({2.0}, {3.0});
  CHECK(f.eval(std::vector<double>{-1.0}) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(f.eval(std::vector<double>{1.0}) == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("eval: every kind vanishes at the origin") {
  const std::vector<double> zero(3, 0.0);
  CHECK(AugmentingFunction::psi_inf(PositiveBasis::plus_minus_axes(3)).eval(zero) == 0.0);
  CHECK(AugmentingFunction::psi_one(PositiveBasis::axes_and_antidiagonal(3)).eval(zero) ==
        0.0);
  CHECK(AugmentingFunction::psi_rho({1.0, 2.0, 3.0}, {4.0, 5.0, 6.0}).eval(zero) == 0.0);
  std::vector<AugmentingFunction> kids;
  kids.push_back(AugmentingFunction::psi_inf(PositiveBasis::plus_minus_axes(3)));
  kids.push_back(AugmentingFunction::psi_rho({1.0, 1.0, 1.0}, {1.0, 1.0, 1.0}));
  CHECK(AugmentingFunction::compose(std::move(kids), AugmentingFunction::Mode::max)
            .eval(zero) == 0.0);
}

TEST_CASE("eval: psi_one on signed axes is the l1 norm, psi_inf the linf norm") {
  const auto f1 = AugmentingFunction::psi_one(PositiveBasis::plus_minus_axes(7));
  const auto fi = AugmentingFunction::psi_inf(PositiveBasis::plus_minus_axes(7));
  std::mt19937_64 rng(11);
  for (int t = 0; t < 200; ++t) {
    const auto u = random_vec(rng, 7, 3.0);
    CHECK(f1.eval(u) == doctest::Approx(l1(u)).epsilon(1e-12));
    CHECK(fi.eval(u) == doctest::Approx(linf(u)).epsilon(1e-12));
  }
}

TEST_CASE("eval: dimension mismatch rejected") {
  const auto f = AugmentingFunction::psi_inf(PositiveBasis::plus_minus_axes(3));
  CHECK_THROWS_AS(f.eval(std::vector<double>{1.0}), std::invalid_argument);
}

TEST_CASE("psi_rho equals psi_one over the weighted basis, exactly") {
  std::mt19937_64 rng(21);
  for (int t = 0; t < 100; ++t) {
    const int m = 1 + static_cast<int>(rng() % 8);
    std::vector<double> lo(m), hi(m);
    for (int i = 0; i < m; ++i) {
      lo[i] = 0.001 * static_cast<double>(1 + rng() % 5000);
      hi[i] = 0.001 * static_cast<double>(1 + rng() % 5000);
    }
    PositiveBasis nb;
    nb.m = m;
    for (int i = 0; i < m; ++i) {
      std::vector<double> e(m, 0.0);
      e[i] = hi[i];
      nb.vectors.push_back(e);
      e[i] = -lo[i];
      nb.vectors.push_back(e);
    }
    const auto fr = AugmentingFunction::psi_rho(lo, hi);
    const auto f1 = AugmentingFunction::psi_one(nb);
    for (int k = 0; k < 5; ++k) {
      const auto u = random_vec(rng, m, 2.0);
      CHECK(fr.eval(u) == f1.eval(u));
    }
  }
}

TEST_CASE("compose: sum of l1 and linf, idempotent max, errors") {
  std::vector<AugmentingFunction> kids;
  kids.push_back(AugmentingFunction::psi_one(PositiveBasis::plus_minus_axes(2)));
  kids.push_back(AugmentingFunction::psi_inf(PositiveBasis::plus_minus_axes(2)));
  const auto fsum = AugmentingFunction::compose(kids, AugmentingFunction::Mode::sum);
  CHECK(fsum.eval(std::vector<double>{1.0, -1.0}) ==
        doctest::Approx(3.0).epsilon(1e-12));

  const auto fi = AugmentingFunction::psi_inf(PositiveBasis::plus_minus_axes(4));
  const auto fmax = AugmentingFunction::compose({fi, fi}, AugmentingFunction::Mode::max);
  std::mt19937_64 rng(31);
  for (int t = 0; t < 100; ++t) {
    const auto u = random_vec(rng, 4, 2.0);
    CHECK(fmax.eval(u) == fi.eval(u));
  }

  CHECK_THROWS_AS(AugmentingFunction::compose({}, AugmentingFunction::Mode::sum),
                  std::invalid_argument);
}

TEST_CASE("positive homogeneity across all kinds") {
  std::vector<AugmentingFunction> fs;
  fs.push_back(AugmentingFunction::psi_inf(PositiveBasis::axes_and_antidiagonal(4)));
  fs.push_back(AugmentingFunction::psi_one(PositiveBasis::plus_minus_axes(4)));
  fs.push_back(AugmentingFunction::psi_rho({1.5, 0.5, 2.0, 3.0}, {0.25, 4.0, 1.0, 2.0}));
  fs.push_back(AugmentingFunction::compose({fs[0], fs[1]}, AugmentingFunction::Mode::sum));
  fs.push_back(AugmentingFunction::compose({fs[1], fs[2]}, AugmentingFunction::Mode::max));
  std::mt19937_64 rng(41);
  for (const auto& f : fs) {
    for (int trial = 0; trial < 50; ++trial) {
      const auto u = random_vec(rng, 4, 2.0);
      const double fu = f.eval(u);
      for (double t : {0.0, 0.5, 2.0, 10.0}) {
        std::vector<double> tu(u);
        for (double& x : tu) x *= t;
        CHECK(f.eval(tu) == doctest::Approx(t * fu).epsilon(0).scale(1).epsilon(1e-9));
      }
    }
  }
}

TEST_CASE("strict positivity off the origin for verified bases") {
  const auto fi = AugmentingFunction::psi_inf(PositiveBasis::axes_and_antidiagonal(5));
  const auto f1 = AugmentingFunction::psi_one(PositiveBasis::plus_minus_axes(5));
  std::mt19937_64 rng(51);
  int checked = 0;
  while (checked < 1000) {
    const auto u = random_vec(rng, 5, 1.0);
    if (linf(u) < 1e-9) continue;
    CHECK(fi.eval(u) > 0.0);
    CHECK(f1.eval(u) > 0.0);
    ++checked;
  }
}

TEST_CASE("sampled ratio psi_one / psi_inf stays bounded away from zero") {
  const auto base = PositiveBasis::axes_and_antidiagonal(3);
  const auto fi = AugmentingFunction::psi_inf(base);
  const auto f1 = AugmentingFunction::psi_one(base);
  std::mt19937_64 rng(61);
  double min_ratio = kInf;
  for (int t = 0; t < 500; ++t) {
    auto u = random_vec(rng, 3, 1.0);
    const double n = linf(u);
    if (n < 1e-9) continue;
    for (double& x : u) x /= n;
    min_ratio = std::min(min_ratio, f1.eval(u) / fi.eval(u));
  }
  CHECK(min_ratio > 0.0);
}

TEST_CASE("growth constants: signed axes give delta = gamma = 1") {
  const auto base = PositiveBasis::plus_minus_axes(2);
  const auto f = AugmentingFunction::psi_inf(base);
  const auto cert = estimate_growth_constants(f, base, 1.0, 500, 3);
  CHECK(cert.delta == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(cert.gamma_growth == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(cert.eps_v == 1.0);
  CHECK(cert.samples >= 500);
}

TEST_CASE("growth constants: axes plus antidiagonal give delta = 1/2") {
  const auto base = PositiveBasis::axes_and_antidiagonal(2);
  const auto f = AugmentingFunction::psi_inf(base);
  const auto cert = estimate_growth_constants(f, base, 1.0, 500, 3);
  CHECK(cert.delta == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(cert.gamma_growth == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("growth constants: radius scales delta but not gamma") {
  const auto base = PositiveBasis::axes_and_antidiagonal(3);
  const auto f = AugmentingFunction::psi_inf(base);
  const auto c1 = estimate_growth_constants(f, base, 1.0, 400, 9);
  const auto c2 = estimate_growth_constants(f, base, 0.25, 400, 9);
  CHECK(c2.delta == doctest::Approx(0.25 * c1.delta).epsilon(1e-9));
  CHECK(c2.gamma_growth == doctest::Approx(c1.gamma_growth).epsilon(1e-9));
  CHECK(c1.delta > 0.0);
}

TEST_CASE("growth constants: non-spanning set raises with witness") {
  PositiveBasis b;
  b.m = 2;
  b.vectors = {{1.0, 0.0}, {0.0, 1.0}};
  const auto f = AugmentingFunction::psi_inf(b);
  bool threw = false;
  try {
    estimate_growth_constants(f, b, 1.0, 100, 1);
  } catch (const GrowthError& e) {
    threw = true;
    CHECK(!e.witness.empty());
  }
  CHECK(threw);
}
