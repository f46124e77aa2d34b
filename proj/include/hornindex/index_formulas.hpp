#pragma once

// Index formulas for the cataloged operators, split into labeled terms.
// Geometric integrals (A-roof, L, interior Euler density) are inputs; the
// channel bookkeeping supplies the extension-dependent corrections.

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "hornindex/channels.hpp"
#include "hornindex/geometry.hpp"
#include "hornindex/warp.hpp"

namespace hornindex {

struct IndexTerms {
  double geometric_integral = 0.0;
  double eta_term = 0.0;        // signed contribution, usually -eta/2 or -eta
  double kernel_term = 0.0;     // signed contribution of dim ker D_N
  double extension_term = 0.0;  // dim W minus the negative-window count
  double betti_term = 0.0;
};

struct IndexReport {
  std::string operator_tag;
  std::string extension;
  std::string cross_section;
  double alpha = 0.0;  // 1 marks the cone case
  IndexTerms terms;
  double raw_value = 0.0;
  long long index = 0;
  bool integral_ok = false;
  std::string note;
};

inline void finalize_index(IndexReport& rep) {
  rep.raw_value = rep.terms.geometric_integral + rep.terms.eta_term +
                  rep.terms.kernel_term + rep.terms.extension_term +
                  rep.terms.betti_term;
  rep.index = std::llround(rep.raw_value);
  rep.integral_ok = std::fabs(rep.raw_value - double(rep.index)) <= 1e-6;
}

// dim W for the extension, over the given quotient-window channels.
inline long long extension_w_dim(const std::vector<QuotientChannelRow>& window,
                                 const ExtensionSpec& ext) {
  long long dimw = 0;
  for (const auto& row : window) {
    if (!row.quotient) continue;
    bool in = false;
    switch (ext.variant) {
      case ExtensionVariant::Min: in = false; break;
      case ExtensionVariant::Max: in = true; break;
      case ExtensionVariant::Delta: in = row.s < 0.0; break;
      case ExtensionVariant::Subspace:
        for (double s1 : ext.subspace)
          if (std::fabs(row.s - s1) <= 1e-12) in = true;
        break;
    }
    if (in) dimw += row.mult;
  }
  return dimw;
}

// Spinor channels of the cone (slope-1) case inside the window (-1/2, 1/2):
// the tangential spectrum plus the kernel at parameter 0.
inline std::vector<QuotientChannelRow> cone_dirac_window(const CrossSection& cs,
                                                         SpinStructure spin) {
  std::vector<QuotientChannelRow> rows;
  int b = cs.dirac_kernel_dim(spin);
  if (b > 0) rows.push_back({0.0, b, Family::Tilde, true, "kernel"});
  for (const auto& e : cs.dirac_spectrum(0.5, spin)) {
    if (std::fabs(e.s) >= 0.5 || e.s == 0.0) continue;
    rows.push_back({e.s, e.mult, Family::Tilde, true, "spectrum"});
  }
  return rows;
}

// Cone index: geometric term, half the (eta + kernel) defect, and the
// extension correction dim W - #(spectrum in (-1/2, 0)).
inline IndexReport cone_dirac_index(const CrossSection& cs, SpinStructure spin,
                                    const ExtensionSpec& ext,
                                    double ahat_integral = 0.0) {
  if ((cs.dim() + 1) % 2 != 0)
    throw std::invalid_argument("cone_dirac_index: total dimension must be even");
  IndexReport rep;
  rep.operator_tag = "chou";
  rep.extension = extension_tag(ext);
  rep.cross_section = cs.name();
  rep.alpha = 1.0;
  int b = cs.dirac_kernel_dim(spin);
  auto window = cone_dirac_window(cs, spin);
  long long neg = 0;
  for (const auto& row : window)
    if (row.s < 0.0) neg += row.mult;
  if (ext.variant == ExtensionVariant::Subspace)
    for (double s1 : ext.subspace) {
      bool found = false;
      for (const auto& row : window)
        if (std::fabs(row.s - s1) <= 1e-12) found = true;
      if (!found)
        throw std::invalid_argument("cone_dirac_index: subspace parameter outside the window");
    }
  rep.terms.geometric_integral = ahat_integral;
  rep.terms.eta_term = -0.5 * cs.eta();
  rep.terms.kernel_term = -0.5 * double(b);
  rep.terms.extension_term = double(extension_w_dim(window, ext) - neg);
  finalize_index(rep);
  return rep;
}

// Steep-horn Dirac index: same shape, but the only window channel is the
// kernel at parameter 0, so the correction reads dim W - b/2 .. 0 - b/2.
inline IndexReport horn_dirac_index(const CrossSection& cs, SpinStructure spin,
                                    double alpha, const ExtensionSpec& ext,
                                    double ahat_integral = 0.0) {
  IndexReport rep;
  GeometricOperatorModel model = dirac_normal_form(cs, spin);
  validate_extension(model, alpha, ext);
  rep.operator_tag = "spindirac";
  rep.extension = extension_tag(ext);
  rep.cross_section = cs.name();
  rep.alpha = alpha;
  auto q = quotient_dimension(model, alpha);
  int b = cs.dirac_kernel_dim(spin);
  rep.terms.geometric_integral = ahat_integral;
  rep.terms.eta_term = -0.5 * cs.eta();
  rep.terms.kernel_term = -0.5 * double(b);
  rep.terms.extension_term = double(extension_w_dim(q.rows, ext));
  finalize_index(rep);
  return rep;
}

struct L2EulerPair {
  double chi_absolute = 0.0;  // alternating betti sum below the middle
  double chi_relative = 0.0;  // minus the alternating sum from the middle up
};

inline L2EulerPair l2_euler_characteristics(const CrossSection& cs) {
  L2EulerPair p;
  const int m = cs.dim() + 1;
  for (int j = 0; j <= cs.dim(); ++j) {
    double t = (j % 2 == 0 ? 1.0 : -1.0) * cs.betti()[std::size_t(j)];
    if (2 * j < m)
      p.chi_absolute += t;
    else
      p.chi_relative -= t;
  }
  return p;
}

// Even/odd form count index: interior integral plus half the difference of
// the two truncated Euler characteristics.
inline IndexReport horn_gb_index(const CrossSection& cs, double alpha,
                                 double euler_integral,
                                 const ExtensionSpec& ext = {ExtensionVariant::Delta, {}}) {
  IndexReport rep;
  GeometricOperatorModel model = gb_normal_form(cs);
  validate_extension(model, alpha, ext);
  rep.operator_tag = "gb";
  rep.extension = extension_tag(ext);
  rep.cross_section = cs.name();
  rep.alpha = alpha;
  auto p = l2_euler_characteristics(cs);
  rep.terms.geometric_integral = euler_integral;
  rep.terms.betti_term = 0.5 * (p.chi_absolute + p.chi_relative);
  auto q = quotient_dimension(model, alpha);
  long long neg = 0;
  for (const auto& row : q.rows)
    if (row.quotient && row.s < 0.0) neg += row.mult;
  rep.terms.extension_term = double(extension_w_dim(q.rows, ext) - neg);
  finalize_index(rep);
  return rep;
}

inline IndexReport horn_signature_index(const CrossSection& cs, double alpha,
                                        double l_integral) {
  IndexReport rep;
  signature_normal_form(cs);  // validates the dimension
  rep.operator_tag = "signature";
  rep.extension = "delta";
  rep.cross_section = cs.name();
  rep.alpha = alpha;
  rep.terms.geometric_integral = l_integral;
  rep.terms.eta_term = -cs.eta();
  finalize_index(rep);
  if (!rep.integral_ok)
    rep.note = "value is not an integer; the interior integral input is inconsistent";
  return rep;
}

// Indices of two extensions of the same operator differ by dim W1 - dim W2.
inline long long index_difference_law(const GeometricOperatorModel& model,
                                      double alpha, const ExtensionSpec& e1,
                                      const ExtensionSpec& e2) {
  validate_extension(model, alpha, e1);
  validate_extension(model, alpha, e2);
  auto q = quotient_dimension(model, alpha);
  return extension_w_dim(q.rows, e1) - extension_w_dim(q.rows, e2);
}

struct UniquenessReport {
  bool unique = false;
  bool via_curvature = false;
  std::string note;
};

// Positive tangential curvature kills the spinor kernel, which is the only
// quotient channel; the operator is then essentially self-adjoint.
inline UniquenessReport lichnerowicz_uniqueness(const CrossSection& cs,
                                                SpinStructure spin,
                                                double alpha) {
  UniquenessReport rep;
  GeometricOperatorModel model = dirac_normal_form(cs, spin);
  rep.unique = quotient_dimension(model, alpha).dim == 0;
  rep.via_curvature = cs.curvature() == CurvatureSign::Positive;
  if (rep.unique)
    rep.note = rep.via_curvature
                   ? "no harmonic spinors (positive tangential curvature)"
                   : "no harmonic spinors for this structure";
  else
    rep.note = "harmonic spinors present; extensions form a genuine family";
  return rep;
}

// ---------------------------------------------------------------------------
// Warped surface collar terms

struct EulerTermBreakdown {
  double quadrature_value = 0.0;  // -(integral_delta^eps h'')
  double closed_form = 0.0;       // h'(delta) - h'(eps)
  double abs_diff = 0.0;
};

// Total curvature of the collar {delta <= x <= eps} of a warped surface,
// divided by 2 pi: the density is -h'' dx.  Pieces are integrated between
// the profile's breakpoints so the Gauss rule never crosses a C1 joint.
inline EulerTermBreakdown warped_surface_euler_integral(const WarpProfile& p,
                                                        double delta, double eps,
                                                        int order = 16) {
  if (!(delta > 0.0) || !(delta < eps) || !(eps <= 1.0))
    throw std::invalid_argument("warped_surface_euler_integral: need 0 < delta < eps <= 1");
  EulerTermBreakdown out;
  std::vector<double> cuts{delta};
  for (double b : p.breakpoints())
    if (b > delta && b < eps) cuts.push_back(b);
  cuts.push_back(eps);
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
    acc += gl_integrate([&](double x) { return p.hsecond(x); }, cuts[i],
                        cuts[i + 1], order);
  out.quadrature_value = -acc;
  out.closed_form = p.hprime(delta) - p.hprime(eps);
  out.abs_diff = std::fabs(out.quadrature_value - out.closed_form);
  return out;
}

struct SkipRow {
  double beta = 0.0;
  double euler_integral = 0.0;
  long long gb_index = 0;
};

// A closed surface with k warped points keeps its combinatorial index while
// the interior curvature integral drops by one unit per point as soon as the
// profile leaves slope 1 at the tip (h'(0+) jumps from 1 to 0).
inline std::vector<SkipRow> skip_phenomenon_scan(double base_chi, int k,
                                                 const std::vector<double>& betas) {
  std::vector<SkipRow> rows;
  for (double b : betas) {
    if (!(b >= 1.0))
      throw std::invalid_argument("skip_phenomenon_scan: beta must be >= 1");
    double tip_slope = b == 1.0 ? 1.0 : 0.0;
    SkipRow r;
    r.beta = b;
    r.euler_integral = base_chi - double(k) * (1.0 - tip_slope);
    double boundary = b == 1.0 ? 0.0 : double(k);  // one unit per point
    r.gb_index = std::llround(r.euler_integral + boundary);
    rows.push_back(r);
  }
  return rows;
}

}  // namespace hornindex
