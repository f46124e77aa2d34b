#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <map>

#include "hornindex/geometry.hpp"
#include "support/hodge_fourier_oracle.hpp"

using namespace hornindex;

namespace {
// collect (lambda bucket, degree, type) -> mult from the catalog
std::map<std::pair<int, int>, std::pair<long long, long long>> catalog_buckets(
    const CrossSection& cs, int mmax) {
  std::map<std::pair<int, int>, std::pair<long long, long long>> out;
  const double fourpi2 = 4.0 * M_PI * M_PI;
  for (const auto& e : cs.form_spectrum(fourpi2 * (double(mmax) + 0.5))) {
    int m = int(std::lround(e.lambda / fourpi2));
    auto& slot = out[{m, e.degree}];
    if (e.type == FormType::Closed) slot.first += e.mult;
    else slot.second += e.mult;
  }
  return out;
}
}  // namespace

TEST_CASE("flat torus form spectra match a rank computation") {
  for (const char* name : {"torus2", "torus3"}) {
    CrossSection cs = catalog_cross_section(name);
    const int mmax = 6;
    auto got = catalog_buckets(cs, mmax);
    auto want = testsupport::torus_form_buckets(cs.dim(), mmax);
    for (const auto& [key, bucket] : want) {
      if (bucket.closed == 0 && bucket.coclosed == 0) continue;
      INFO(name << " lattice class " << key.first << " degree " << key.second);
      auto it = got.find(key);
      REQUIRE(it != got.end());
      CHECK(it->second.first == bucket.closed);
      CHECK(it->second.second == bucket.coclosed);
    }
    // and nothing extra below the cutoff
    for (const auto& [key, mults] : got) {
      auto it = want.find(key);
      bool present = it != want.end() &&
                     (it->second.closed > 0 || it->second.coclosed > 0);
      INFO(name << " unexpected lattice class " << key.first << " degree "
                << key.second);
      CHECK(present);
    }
  }
}

TEST_CASE("flat torus spinor spectra match a direct eigensolve") {
  for (const char* name : {"torus2", "torus3"}) {
    CrossSection cs = catalog_cross_section(name);
    const double smax = 14.0;
    auto want = testsupport::torus_dirac_buckets(cs.dim(), smax);
    std::map<double, long long> got;
    for (const auto& e : cs.dirac_spectrum(smax, SpinStructure::Trivial))
      got[e.s] += e.mult;
    got[0.0] += cs.dirac_kernel_dim(SpinStructure::Trivial);
    for (const auto& [lam, mult] : want) {
      INFO(name << " eigenvalue " << lam);
      REQUIRE(got.count(lam) == 1);
      CHECK(got[lam] == mult);
    }
    CHECK(got.size() == want.size());
  }
}

TEST_CASE("circle spinor ladder for both structures") {
  CrossSection c = catalog_cross_section("circle");
  CHECK(c.dirac_kernel_dim(SpinStructure::Trivial) == 1);
  CHECK(c.dirac_kernel_dim(SpinStructure::NonTrivial) == 0);
  auto triv = c.dirac_spectrum(7.0, SpinStructure::Trivial);
  // +-2 pi only below the cutoff
  REQUIRE(triv.size() == 2);
  CHECK(triv[0].s == Catch::Approx(-2.0 * M_PI));
  CHECK(triv[1].s == Catch::Approx(2.0 * M_PI));
  CHECK(triv[0].mult == 1);
  auto anti = c.dirac_spectrum(10.0, SpinStructure::NonTrivial);
  // half integer ladder +-pi, +-3 pi, ordered by magnitude
  REQUIRE(anti.size() == 4);
  CHECK(anti[0].s == Catch::Approx(-M_PI));
  CHECK(anti[1].s == Catch::Approx(M_PI));
  CHECK(anti[2].s == Catch::Approx(-3.0 * M_PI));
  CHECK(anti[3].s == Catch::Approx(3.0 * M_PI));
}

TEST_CASE("round sphere spectra carry the classical multiplicities") {
  CrossSection s2 = catalog_cross_section("sphere2");
  auto spec2 = s2.form_spectrum(2.5);  // just the l = 1 shell
  // lambda = 2: coexact functions, exact and coexact 1 forms, exact 2 forms
  std::map<std::pair<int, int>, long long> got;
  for (const auto& e : spec2)
    got[{e.degree, e.type == FormType::Closed ? 0 : 1}] += e.mult;
  CHECK(got[{0, 1}] == 3);
  CHECK(got[{1, 0}] == 3);
  CHECK(got[{1, 1}] == 3);
  CHECK(got[{2, 0}] == 3);

  CrossSection s3 = catalog_cross_section("sphere3");
  std::map<double, long long> tot;
  for (const auto& e : s3.form_spectrum(4.5)) tot[e.lambda] += e.mult;
  // l = 1 shell at 3 across four degrees, plus the l = 1 coexact shell at 4
  CHECK(tot[3.0] == 16);
  CHECK(tot[4.0] == 12);

  auto d2 = s2.dirac_spectrum(2.5, SpinStructure::Trivial);
  std::map<double, long long> db;
  for (const auto& e : d2) db[e.s] += e.mult;
  CHECK(db[1.0] == 2);
  CHECK(db[-1.0] == 2);
  CHECK(db[2.0] == 4);
  auto d3 = s3.dirac_spectrum(2.6, SpinStructure::Trivial);
  std::map<double, long long> db3;
  for (const auto& e : d3) db3[e.s] += e.mult;
  CHECK(db3[1.5] == 2);
  CHECK(db3[2.5] == 6);
  CHECK(s2.dirac_kernel_dim(SpinStructure::Trivial) == 0);
}

TEST_CASE("eigenform complexes alternate away to zero") {
  // for lambda > 0 the alternating sum over degrees must cancel
  for (const char* name : {"torus2", "torus3", "sphere2", "sphere3"}) {
    CrossSection cs = catalog_cross_section(name);
    std::map<double, long long> alt;
    for (const auto& e : cs.form_spectrum(50.0))
      alt[e.lambda] += (e.degree % 2 == 0 ? 1 : -1) * e.mult;
    for (const auto& [lam, sum] : alt) {
      INFO(name << " at eigenvalue " << lam);
      CHECK(sum == 0);
    }
  }
}

TEST_CASE("catalog invariants") {
  CHECK(catalog_cross_section("circle").betti() == std::vector<int>{1, 1});
  CHECK(catalog_cross_section("torus2").betti() == std::vector<int>{1, 2, 1});
  CHECK(catalog_cross_section("torus3").betti() ==
        std::vector<int>{1, 3, 3, 1});
  CHECK(catalog_cross_section("sphere2").betti() == std::vector<int>{1, 0, 1});
  CHECK(catalog_cross_section("sphere3").betti() ==
        std::vector<int>{1, 0, 0, 1});
  CHECK(catalog_cross_section("sphere3").curvature() ==
        CurvatureSign::Positive);
  CHECK(catalog_cross_section("torus3").curvature() == CurvatureSign::Zero);
  for (const char* name : {"circle", "torus2", "torus3", "sphere2", "sphere3"})
    CHECK(catalog_cross_section(name).eta() == 0.0);
  CHECK_THROWS_AS(catalog_cross_section("klein"), std::invalid_argument);
  // only the flat structure is tabulated on higher tori
  CHECK_THROWS_AS(catalog_cross_section("torus3").dirac_spectrum(
                      5.0, SpinStructure::NonTrivial),
                  std::invalid_argument);
}

TEST_CASE("degree coefficients of the two normal forms") {
  CHECK(gb_degree_coefficient(0, 2) == -1.0);
  CHECK(gb_degree_coefficient(1, 2) == 0.0);
  CHECK(gb_degree_coefficient(2, 2) == 1.0);
  CHECK(gb_degree_coefficient(0, 3) == -1.5);
  CHECK(gb_degree_coefficient(1, 3) == 0.5);
  CHECK(signature_degree_coefficient(0, 3) == 1.5);
  CHECK(signature_degree_coefficient(1, 3) == 0.5);
  CHECK(signature_degree_coefficient(3, 3) == -1.5);
}

TEST_CASE("coupled pairs average the adjacent degree coefficients") {
  auto model = gb_normal_form(catalog_cross_section("torus2"));
  auto pairs = model.tilde_pairs(7.0);  // just the first lattice shell
  REQUIRE(pairs.size() == 2);
  CHECK(pairs[0].j == 0);
  CHECK(pairs[0].a_avg == Catch::Approx(-0.5));
  CHECK(pairs[0].a_off == Catch::Approx(-0.5));
  CHECK(pairs[1].j == 1);
  CHECK(pairs[1].a_avg == Catch::Approx(0.5));
  CHECK(pairs[1].a_off == Catch::Approx(-0.5));
  CHECK(pairs[0].mult == 4);

  // spinor channels carry no off diagonal coupling at all
  auto dmodel =
      dirac_normal_form(catalog_cross_section("torus3"), SpinStructure::Trivial);
  for (const auto& p : dmodel.tilde_pairs(9.0)) {
    CHECK(p.a_avg == 0.0);
    CHECK(p.a_off == 0.0);
  }
}

TEST_CASE("quarter dimension block matrices") {
  auto m1 = signature_block_matrix(1, 0, 10.0);
  CHECK(m1.diag1 == Catch::Approx(1.5));
  CHECK(m1.diag2 == Catch::Approx(-2.5));
  CHECK(m1.diag1 + m1.diag2 == Catch::Approx(-1.0));
  CHECK(m1.off * m1.off == Catch::Approx(10.0));
  auto m2 = signature_block_matrix(2, 0, 10.0);
  CHECK(m2.diag1 + m2.diag2 == Catch::Approx(1.0));
  auto m3 = signature_block_matrix(3, 1, 4.0);
  CHECK(m3.diag1 == Catch::Approx(2.5));
  CHECK(m3.diag2 == Catch::Approx(-3.5));
  auto m4 = signature_block_matrix(4, 1, 4.0);
  CHECK(m4.diag1 == Catch::Approx(3.5));
  CHECK(m4.diag2 == Catch::Approx(-2.5));
}

TEST_CASE("block structure on the first flat lattice shell") {
  auto model = signature_normal_form(catalog_cross_section("torus3"));
  auto blocks = model.blocks(45.0);  // one shell: lambda = 4 pi^2
  REQUIRE(blocks.size() == 6);
  CHECK(blocks[0].l == 3);
  CHECK(blocks[0].degrees == std::vector<int>{1, 3});
  CHECK(blocks[0].mult == 6);
  CHECK(blocks[1].l == 4);
  CHECK(blocks[1].degrees == std::vector<int>{0, 2});
  CHECK(blocks[1].mult == 6);
  // scalar families split evenly over the two signs
  CHECK(blocks[2].l == 5);
  CHECK(blocks[2].diag1 == -0.5);
  CHECK(blocks[2].degrees == std::vector<int>{2});
  CHECK(blocks[2].mult == 6);
  CHECK(blocks[2].sign + blocks[3].sign == 0);
  CHECK(blocks[4].l == 6);
  CHECK(blocks[4].diag1 == 0.5);
  CHECK(blocks[4].degrees == std::vector<int>{1});
  CHECK(blocks[4].mult == 6);

  auto gb = gb_normal_form(catalog_cross_section("torus3"));
  CHECK_THROWS_AS(gb.blocks(45.0), std::logic_error);
}

TEST_CASE("block decomposition accounts for every eigenform") {
  for (const char* name : {"torus3", "sphere3"}) {
    auto model = signature_normal_form(catalog_cross_section(name));
    auto rep = verify_block_assembly(model, 60.0);
    INFO(name);
    for (const auto& m : rep.mismatches) INFO(m);
    CHECK(rep.pass);
  }
}

TEST_CASE("normal forms enforce their dimension constraints") {
  CHECK_THROWS_AS(signature_normal_form(catalog_cross_section("torus2")),
                  std::invalid_argument);
  CHECK_THROWS_AS(dirac_normal_form(catalog_cross_section("torus2"),
                                    SpinStructure::Trivial),
                  std::invalid_argument);
  CHECK_NOTHROW(signature_normal_form(catalog_cross_section("sphere3")));
  CHECK_NOTHROW(gb_normal_form(catalog_cross_section("sphere2")));
}
