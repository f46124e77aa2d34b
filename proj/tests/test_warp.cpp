#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "hornindex/quadrature.hpp"
#include "hornindex/warp.hpp"

using namespace hornindex;

namespace {
// reference quadrature that respects the profile's C1 joints: split at the
// breakpoints, then many small panels per piece
double piecewise_integral(const std::function<double(double)>& f, double a,
                          double b, const std::vector<double>& brk) {
  std::vector<double> cuts{a};
  for (double c : brk)
    if (c > a && c < b) cuts.push_back(c);
  cuts.push_back(b);
  double acc = 0.0;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    for (int j = 0; j < 64; ++j) {
      double x0 = cuts[k] + (cuts[k + 1] - cuts[k]) * j / 64.0;
      double x1 = cuts[k] + (cuts[k + 1] - cuts[k]) * (j + 1) / 64.0;
      acc += gl_integrate(f, x0, x1, 16);
    }
  }
  return acc;
}
}  // namespace

TEST_CASE("gauss rules integrate polynomials to machine precision") {
  // order-n Gauss is exact through degree 2n-1
  auto poly = [](double x) { return ((3.0 * x - 2.0) * x + 1.0) * x * x; };
  double exact = 3.0 / 5.0 - 2.0 / 4.0 + 1.0 / 3.0;  // int_0^1
  CHECK(gl_integrate(poly, 0.0, 1.0, 4) == Catch::Approx(exact).epsilon(1e-14));
  CHECK(gl_integrate(poly, 0.0, 1.0, 8) == Catch::Approx(exact).epsilon(1e-14));
  CHECK(gl_integrate(poly, 0.0, 1.0, 16) == Catch::Approx(exact).epsilon(1e-14));

  double x15 = gl_integrate([](double x) { return std::pow(x, 15.0); }, 0.0,
                            1.0, 8);
  CHECK(x15 == Catch::Approx(1.0 / 16.0).epsilon(1e-13));
}

TEST_CASE("graded mesh nodes and locate agree") {
  GradedMesh m(64, 3.0, 0.5);
  REQUIRE(m.node(0) == 0.0);
  REQUIRE(m.node(64) == Catch::Approx(0.5));
  for (std::size_t i = 0; i + 1 <= 64; ++i) CHECK(m.node(i) < m.node(i + 1));
  for (int t = 1; t < 40; ++t) {
    double x = 0.5 * double(t) / 40.0;
    std::size_t c = m.locate(x);
    CHECK(m.node(c) <= x * (1.0 + 1e-14));
    CHECK(x <= m.node(c + 1) * (1.0 + 1e-14));
  }
}

TEST_CASE("integrate_upto plus integrate_from recovers the whole integral") {
  CompositeQuad q(GradedMesh(32, 2.0, 1.0), 8);
  CHECK(q.integrate([](double x) { return std::cos(3.0 * x); }) ==
        Catch::Approx(std::sin(3.0) / 3.0).epsilon(1e-12));
  auto f = [](double x) { return std::exp(-2.0 * x) * (1.0 + x); };
  double whole = q.integrate(f);
  for (double x : {0.017, 0.25, 0.5, 0.93}) {
    double a = q.integrate_upto(x, f);
    double b = q.integrate_from(x, f);
    CHECK(a + b == Catch::Approx(whole).epsilon(1e-12));
  }
}

TEST_CASE("pure power profile closed forms") {
  WarpProfile p = WarpProfile::pure_power(2.0);
  CHECK(p.gamma() == 2.0);
  CHECK(p.h(0.3) == Catch::Approx(0.09));
  CHECK(p.hprime(0.3) == Catch::Approx(0.6));
  CHECK(p.hsecond(0.3) == Catch::Approx(2.0));
  CHECK(p.log_h(0.3) == Catch::Approx(2.0 * std::log(0.3)));
  // anchored at 1: mu(x) = 1/x - 1 for the square profile
  CHECK(p.mu(0.5) == Catch::Approx(1.0));
  CHECK(p.mu(1e-6) == Catch::Approx(999999.0).epsilon(1e-12));
  CHECK(p.hprime_at_zero_limit() == 0.0);

  WarpProfile cone = WarpProfile::pure_power(1.0, true);
  CHECK(cone.mu(0.25) == Catch::Approx(std::log(4.0)));
  CHECK(cone.hprime_at_zero_limit() == 1.0);

  CHECK_THROWS_AS(WarpProfile::pure_power(1.0), std::invalid_argument);
  CHECK_THROWS_AS(WarpProfile::pure_power(0.8, true), std::invalid_argument);
}

TEST_CASE("derivatives of the blended profile match finite differences") {
  WarpProfile p = WarpProfile::power_horn(1.7, 0.2, 0.9);
  const double dx = 1e-6;
  // stay off the two joints themselves; h'' jumps there
  for (double x : {0.05, 0.21, 0.3, 0.39, 0.45, 0.95}) {
    double fd1 = (p.h(x + dx) - p.h(x - dx)) / (2.0 * dx);
    double fd2 = (p.h(x + dx) - 2.0 * p.h(x) + p.h(x - dx)) / (dx * dx);
    CHECK(p.hprime(x) == Catch::Approx(fd1).margin(1e-6));
    CHECK(p.hsecond(x) == Catch::Approx(fd2).margin(2e-3));
  }
  // value and slope are continuous across both joints
  for (double b : p.breakpoints()) {
    CHECK(p.h(b - 1e-9) == Catch::Approx(p.h(b + 1e-9)).margin(1e-7));
    CHECK(p.hprime(b - 1e-9) == Catch::Approx(p.hprime(b + 1e-9)).margin(1e-5));
  }
}

TEST_CASE("mu of a blended profile matches direct quadrature") {
  WarpProfile p = WarpProfile::power_horn(2.0, 0.25, 0.75);
  auto inv = [&](double y) { return 1.0 / p.h(y); };
  for (double x : {0.3, 0.5, 0.8, 0.97}) {
    double direct = piecewise_integral(inv, x, 1.0, p.breakpoints());
    CHECK(p.mu(x) == Catch::Approx(direct).epsilon(1e-7));
  }
  // below eps0 the closed form takes over; check the splice point itself
  double direct = piecewise_integral(inv, 0.25, 1.0, p.breakpoints());
  CHECK(p.mu(0.25) == Catch::Approx(direct).epsilon(1e-6));
}

TEST_CASE("channel coefficients carry consistent integrals") {
  WarpProfile p = WarpProfile::power_horn(1.5, 0.25, 0.8);
  ChannelCoefficient t = coefficient(p, CoeffKind::HornRatio);
  ChannelCoefficient v = coefficient(p, CoeffKind::Inverse);
  for (auto [y, x] : {std::pair{0.1, 0.4}, {0.3, 0.7}, {0.05, 0.9}}) {
    double ti = piecewise_integral(t.eval, y, x, p.breakpoints());
    double vi = piecewise_integral(v.eval, y, x, p.breakpoints());
    CHECK(t.integral(y, x) == Catch::Approx(ti).epsilon(1e-7));
    CHECK(v.integral(y, x) == Catch::Approx(vi).epsilon(1e-7));
  }
  CHECK(t.lower_bound_C > 0.0);
  CHECK(v.lower_bound_C > 0.0);
}

TEST_CASE("interpolating family pins the mixing weight by value matching") {
  WarpProfile h1 = WarpProfile::power_horn(1.0, 0.25, 0.75, -1.0, true);
  WarpProfile h2 = WarpProfile::power_horn(2.0, 0.25, 0.75);
  HomotopyFamily fam = make_homotopy(h1, h2, 0.1);
  // a solves e0^b = a e0^b1 + (1-a) e0^b2 at e0 = 1/4, so b = 3/2 gives 1/3
  CHECK(fam.mix_weight(1.5) == Catch::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(fam.mix_weight(1.0) == Catch::Approx(1.0));
  CHECK(fam.mix_weight(2.0) == Catch::Approx(0.0).margin(1e-12));

  FamilyMember m = fam.member(1.5);
  CHECK(m.beta() == 1.5);
  // pure power below the interpolation cutoff
  CHECK(m.h(0.05) == Catch::Approx(std::pow(0.05, 1.5)).epsilon(1e-13));
  // monotone increasing on a sample grid
  double prev = 0.0;
  for (int i = 1; i <= 100; ++i) {
    double v = m.h(double(i) / 100.0);
    CHECK(v > prev);
    prev = v;
  }
}

TEST_CASE("family member mu is continuous across the closed form splice") {
  WarpProfile h1 = WarpProfile::power_horn(1.5, 0.25, 0.75);
  WarpProfile h2 = WarpProfile::power_horn(2.0, 0.25, 0.75);
  FamilyMember m = make_homotopy(h1, h2, 0.1).member(1.7);
  CHECK(m.mu(0.1 - 1e-9) == Catch::Approx(m.mu(0.1 + 1e-9)).margin(1e-5));
  // mu decreases in x
  CHECK(m.mu(0.05) > m.mu(0.2));
  CHECK(m.mu(0.2) > m.mu(0.9));
}

TEST_CASE("ill posed families are rejected") {
  WarpProfile a = WarpProfile::power_horn(1.5, 0.25, 0.75);
  WarpProfile b = WarpProfile::power_horn(2.0, 0.25, 0.75);
  WarpProfile c = WarpProfile::power_horn(2.0, 0.3, 0.75);
  CHECK_THROWS_AS(make_homotopy(a, a, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(make_homotopy(a, c, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(make_homotopy(a, b, 0.4), std::invalid_argument);
  CHECK_THROWS_AS(make_homotopy(a, b, 0.0), std::invalid_argument);
  HomotopyFamily fam = make_homotopy(a, b, 0.1);
  CHECK_THROWS_AS(fam.member(1.4), std::invalid_argument);
  CHECK_THROWS_AS(fam.member(2.1), std::invalid_argument);
}

TEST_CASE("family validation reports uniform coefficient floors") {
  WarpProfile h1 = WarpProfile::power_horn(1.5, 0.25, 0.75);
  WarpProfile h2 = WarpProfile::power_horn(2.0, 0.25, 0.75);
  auto rep = validate_family(make_homotopy(h1, h2, 0.1), 1.0, 512, 5);
  CHECK(rep.bounds_pass);
  CHECK(rep.min_horn_ratio >= 1.0);
  CHECK(rep.min_inverse >= 1.0);
  CHECK(rep.sup_diffs.size() == 4);
  CHECK(rep.sup_diffs_decreasing);
  CHECK(rep.fitted_lipschitz > 0.0);
}
