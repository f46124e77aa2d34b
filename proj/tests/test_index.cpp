#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "hornindex/index_formulas.hpp"
#include "hornindex/warp.hpp"

using namespace hornindex;

namespace {
const ExtensionSpec kMin{ExtensionVariant::Min, {}};
const ExtensionSpec kMax{ExtensionVariant::Max, {}};
const ExtensionSpec kDelta{ExtensionVariant::Delta, {}};
}  // namespace

TEST_CASE("slope one spinor window holds the kernel and nothing else") {
  auto w3 = cone_dirac_window(catalog_cross_section("torus3"),
                              SpinStructure::Trivial);
  REQUIRE(w3.size() == 1);
  CHECK(w3[0].s == 0.0);
  CHECK(w3[0].mult == 2);
  CHECK(w3[0].quotient);
  auto w1 = cone_dirac_window(catalog_cross_section("circle"),
                              SpinStructure::NonTrivial);
  CHECK(w1.empty());
}

TEST_CASE("spinor cone index over the three torus") {
  CrossSection t3 = catalog_cross_section("torus3");
  auto del = cone_dirac_index(t3, SpinStructure::Trivial, kDelta);
  CHECK(del.terms.kernel_term == -1.0);
  CHECK(del.terms.eta_term == 0.0);
  CHECK(del.terms.extension_term == 0.0);
  CHECK(del.index == -1);
  CHECK(del.integral_ok);
  auto mx = cone_dirac_index(t3, SpinStructure::Trivial, kMax);
  CHECK(mx.index == 1);
  auto mn = cone_dirac_index(t3, SpinStructure::Trivial, kMin);
  CHECK(mn.index == -1);
  // picking the whole kernel line by hand reproduces the maximal value
  auto sub = cone_dirac_index(t3, SpinStructure::Trivial,
                              ExtensionSpec{ExtensionVariant::Subspace, {0.0}});
  CHECK(sub.index == 1);
  CHECK_THROWS_AS(cone_dirac_index(t3, SpinStructure::Trivial,
                                   ExtensionSpec{ExtensionVariant::Subspace, {0.37}}),
                  std::invalid_argument);
  // odd total dimension is rejected
  CHECK_THROWS_AS(cone_dirac_index(catalog_cross_section("torus2"),
                                   SpinStructure::Trivial, kDelta),
                  std::invalid_argument);
}

TEST_CASE("steep spinor index keeps the plus minus one split") {
  CrossSection t3 = catalog_cross_section("torus3");
  for (double alpha : {1.1, 1.5, 2.0, 3.0}) {
    auto mx = horn_dirac_index(t3, SpinStructure::Trivial, alpha, kMax);
    auto mn = horn_dirac_index(t3, SpinStructure::Trivial, alpha, kMin);
    CHECK(mx.index == 1);
    CHECK(mn.index == -1);
    CHECK(mx.integral_ok);
  }
  // a nonzero interior integral shifts the value additively
  auto shifted =
      horn_dirac_index(t3, SpinStructure::Trivial, 2.0, kMax, 3.0);
  CHECK(shifted.index == 4);
}

TEST_CASE("truncated even odd counts") {
  auto c = l2_euler_characteristics(catalog_cross_section("circle"));
  CHECK(c.chi_absolute == 1.0);
  CHECK(c.chi_relative == 1.0);
  auto s3 = l2_euler_characteristics(catalog_cross_section("sphere3"));
  CHECK(s3.chi_absolute == 1.0);
  CHECK(s3.chi_relative == 1.0);
  auto t2 = l2_euler_characteristics(catalog_cross_section("torus2"));
  CHECK(t2.chi_absolute == -1.0);
  CHECK(t2.chi_relative == -1.0);
}

TEST_CASE("form count index on a teardrop") {
  // one warped point on a sphere: interior term 1, boundary halves sum to 1
  auto rep = horn_gb_index(catalog_cross_section("circle"), 1.5, 1.0);
  CHECK(rep.terms.betti_term == 1.0);
  CHECK(rep.terms.extension_term == 0.0);
  CHECK(rep.index == 2);
  CHECK(rep.integral_ok);
  // independent of the steepness and of the extension
  for (double alpha : {1.1, 2.0, 3.0}) {
    CHECK(horn_gb_index(catalog_cross_section("circle"), alpha, 1.0).index == 2);
    CHECK(horn_gb_index(catalog_cross_section("circle"), alpha, 1.0, kMax).index ==
          2);
  }
}

TEST_CASE("four dimensional form count carries a fractional defect") {
  auto rep = horn_gb_index(catalog_cross_section("sphere3"), 1.5, 0.25);
  CHECK(rep.raw_value == Catch::Approx(1.25));
  CHECK_FALSE(rep.integral_ok);
  CHECK(rep.terms.betti_term == 1.0);
}

TEST_CASE("middle dimensional pairing index") {
  auto rep = horn_signature_index(catalog_cross_section("sphere3"), 1.5, 3.0);
  CHECK(rep.index == 3);
  CHECK(rep.integral_ok);
  CHECK(rep.note.empty());
  // a non integer interior value is reported, never thrown
  auto odd = horn_signature_index(catalog_cross_section("sphere3"), 1.5, 2.5);
  CHECK_FALSE(odd.integral_ok);
  CHECK_FALSE(odd.note.empty());
  CHECK(odd.raw_value == Catch::Approx(2.5));
  // wrong dimension is rejected before any numerics
  CHECK_THROWS_AS(horn_signature_index(catalog_cross_section("torus2"), 1.5, 0.0),
                  std::invalid_argument);
}

TEST_CASE("difference of two extensions counts the chosen lines") {
  auto model = dirac_normal_form(catalog_cross_section("torus3"),
                                 SpinStructure::Trivial);
  CHECK(index_difference_law(model, 2.0, kMax, kMin) == 2);
  CHECK(index_difference_law(model, 2.0, kMin, kMax) == -2);
  CHECK(index_difference_law(model, 2.0, kDelta, kMin) == 0);
  auto gb = gb_normal_form(catalog_cross_section("torus2"));
  CHECK(index_difference_law(gb, 1.5, kMax, kMin) == 2);
}

TEST_CASE("window dimension bookkeeping") {
  std::vector<QuotientChannelRow> rows{
      {-0.3, 2, Family::T, true, ""},
      {0.0, 1, Family::Tilde, true, ""},
      {0.2, 3, Family::T, false, ""},  // not in the quotient, never counted
  };
  CHECK(extension_w_dim(rows, kMin) == 0);
  CHECK(extension_w_dim(rows, kMax) == 3);
  CHECK(extension_w_dim(rows, kDelta) == 2);
  CHECK(extension_w_dim(rows, ExtensionSpec{ExtensionVariant::Subspace, {0.0}}) ==
        1);
  CHECK(extension_w_dim(
            rows, ExtensionSpec{ExtensionVariant::Subspace, {-0.3, 0.0}}) == 3);
}

TEST_CASE("spinor uniqueness through tangential curvature") {
  auto s = lichnerowicz_uniqueness(catalog_cross_section("sphere3"),
                                   SpinStructure::Trivial, 2.0);
  CHECK(s.unique);
  CHECK(s.via_curvature);
  auto t = lichnerowicz_uniqueness(catalog_cross_section("torus3"),
                                   SpinStructure::Trivial, 2.0);
  CHECK_FALSE(t.unique);
  CHECK_FALSE(t.via_curvature);
  auto c = lichnerowicz_uniqueness(catalog_cross_section("circle"),
                                   SpinStructure::NonTrivial, 2.0);
  CHECK(c.unique);
  CHECK_FALSE(c.via_curvature);  // kernel empty for spectral reasons only
}

TEST_CASE("collar curvature integral against the slope difference") {
  auto quad = warped_surface_euler_integral(WarpProfile::pure_power(2.0), 0.1, 0.5);
  CHECK(quad.closed_form == Catch::Approx(-0.8));
  CHECK(quad.abs_diff < 1e-12);
  // a straight cone has no interior curvature at all
  auto flat = warped_surface_euler_integral(WarpProfile::pure_power(1.0, true), 0.1, 0.5);
  CHECK(flat.quadrature_value == 0.0);
  CHECK(flat.closed_form == 0.0);
  // spliced profile: quadrature splits at the joints and still matches
  auto spliced =
      warped_surface_euler_integral(WarpProfile::power_horn(1.7, 0.2, 0.9), 0.05, 0.85);
  CHECK(spliced.abs_diff < 1e-8);
  CHECK_THROWS_AS(warped_surface_euler_integral(WarpProfile::pure_power(2.0), 0.5, 0.1),
                  std::invalid_argument);
}

TEST_CASE("tip slope drop lowers the interior term but not the count") {
  auto rows = skip_phenomenon_scan(2.0, 1, {1.0, 1.5, 2.0, 3.0});
  REQUIRE(rows.size() == 4);
  CHECK(rows[0].euler_integral == 2.0);
  CHECK(rows[0].gb_index == 2);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    CHECK(rows[i].euler_integral == 1.0);
    CHECK(rows[i].gb_index == 2);
  }
  // two points on a torus
  auto t = skip_phenomenon_scan(0.0, 2, {1.0, 2.0});
  CHECK(t[0].euler_integral == 0.0);
  CHECK(t[1].euler_integral == -2.0);
  CHECK(t[1].gb_index == 0);
  CHECK_THROWS_AS(skip_phenomenon_scan(2.0, 1, {0.5}), std::invalid_argument);
}
