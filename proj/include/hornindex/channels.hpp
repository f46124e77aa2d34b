#pragma once

// Closed extensions of the model operator, channel by channel.  The maximal
// and minimal domains differ exactly on the h'/h channels with |alpha s| < 1/2;
// every choice of extension picks, per channel, which end of the interval the
// solution operator integrates from.

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "hornindex/geometry.hpp"
#include "hornindex/kernels.hpp"
#include "hornindex/spectral.hpp"
#include "hornindex/warp.hpp"

namespace hornindex {

enum class ExtensionVariant { Min, Max, Delta, Subspace };

struct ExtensionSpec {
  ExtensionVariant variant = ExtensionVariant::Delta;
  std::vector<double> subspace;  // selected h'/h channel parameters (Subspace)
};

inline std::string extension_tag(const ExtensionSpec& e) {
  switch (e.variant) {
    case ExtensionVariant::Min: return "min";
    case ExtensionVariant::Max: return "max";
    case ExtensionVariant::Delta: return "delta";
    case ExtensionVariant::Subspace: {
      std::string t = "W:";
      for (std::size_t i = 0; i < e.subspace.size(); ++i) {
        if (i) t += ",";
        t += std::to_string(e.subspace[i]);
      }
      return t;
    }
  }
  return "?";
}

struct QuotientChannelRow {
  double s = 0.0;
  int mult = 0;
  Family family = Family::T;
  bool quotient = false;
  std::string origin;
};

struct QuotientReport {
  double alpha = 0.0;
  int dim = 0;  // dim D(max)/D(min), multiplicities counted
  std::vector<QuotientChannelRow> rows;
};

inline QuotientReport quotient_dimension(const GeometricOperatorModel& model,
                                         double alpha,
                                         double tilde_s_max = 0.0) {
  if (!(alpha > 1.0))
    throw std::invalid_argument("quotient_dimension: alpha must exceed 1");
  QuotientReport rep;
  rep.alpha = alpha;
  for (const auto& ch : model.t_channels()) {
    auto cls = classify_channel(ch.s, alpha, Family::T);
    rep.rows.push_back({ch.s, ch.mult, Family::T, cls.quotient, ch.origin});
    if (cls.quotient) rep.dim += ch.mult;
  }
  if (tilde_s_max > 0.0) {
    for (const auto& ch : model.tilde_channels(tilde_s_max)) {
      auto cls = classify_channel(ch.s, alpha, Family::Tilde);
      rep.rows.push_back({ch.s, ch.mult, Family::Tilde, cls.quotient, ch.origin});
      if (cls.quotient) rep.dim += ch.mult;
    }
  }
  return rep;
}

// Subspace specs may only select whole quotient channels.
inline void validate_extension(const GeometricOperatorModel& model, double alpha,
                               const ExtensionSpec& ext) {
  if (ext.variant != ExtensionVariant::Subspace) return;
  auto rep = quotient_dimension(model, alpha);
  for (double s1 : ext.subspace) {
    bool found = false;
    for (const auto& row : rep.rows)
      if (row.quotient && std::fabs(row.s - s1) <= 1e-12) found = true;
    if (!found)
      throw std::invalid_argument(
          "extension subspace selects a parameter outside the quotient: " +
          std::to_string(s1));
  }
  for (std::size_t i = 0; i < ext.subspace.size(); ++i)
    for (std::size_t j = i + 1; j < ext.subspace.size(); ++j)
      if (std::fabs(ext.subspace[i] - ext.subspace[j]) <= 1e-12)
        throw std::invalid_argument("extension subspace lists a parameter twice");
}

inline ExtensionSpec adjoint_extension(const GeometricOperatorModel& model,
                                       double alpha, const ExtensionSpec& ext) {
  validate_extension(model, alpha, ext);
  switch (ext.variant) {
    case ExtensionVariant::Min: return {ExtensionVariant::Max, {}};
    case ExtensionVariant::Max: return {ExtensionVariant::Min, {}};
    case ExtensionVariant::Delta: {
      // adjoint keeps the nonnegative half of the quotient window
      ExtensionSpec out{ExtensionVariant::Subspace, {}};
      for (const auto& row : quotient_dimension(model, alpha).rows)
        if (row.quotient && row.s >= 0.0) out.subspace.push_back(row.s);
      return out;
    }
    case ExtensionVariant::Subspace: {
      ExtensionSpec out{ExtensionVariant::Subspace, {}};
      for (const auto& row : quotient_dimension(model, alpha).rows) {
        if (!row.quotient) continue;
        bool sel = false;
        for (double s1 : ext.subspace)
          if (std::fabs(row.s - s1) <= 1e-12) sel = true;
        if (!sel) out.subspace.push_back(row.s);
      }
      return out;
    }
  }
  return ext;
}

// Which end a channel's solution operator integrates from, per extension.
inline Branch channel_branch(Family fam, double s, double alpha,
                             const ExtensionSpec& ext) {
  if (fam == Family::Tilde)
    return s < 0.0 ? Branch::FromOne : Branch::FromZero;
  const double split = 0.5 / alpha;
  switch (ext.variant) {
    case ExtensionVariant::Max:
      return s < split ? Branch::FromOne : Branch::FromZero;
    case ExtensionVariant::Min:
      return s <= -split ? Branch::FromOne : Branch::FromZero;
    case ExtensionVariant::Delta:
      return s < 0.0 ? Branch::FromOne : Branch::FromZero;
    case ExtensionVariant::Subspace: {
      if (std::fabs(alpha * s) < 0.5) {
        for (double s1 : ext.subspace)
          if (std::fabs(s - s1) <= 1e-12) return Branch::FromOne;
        return Branch::FromZero;
      }
      // outside the quotient all extensions agree
      return s < split ? Branch::FromOne : Branch::FromZero;
    }
  }
  return Branch::FromZero;
}

struct ParametrixChannel {
  double s = 0.0;
  int mult = 0;
  Family family = Family::T;
  Branch branch = Branch::FromZero;
  std::string origin;
};

struct ParametrixReport {
  std::string extension;
  double alpha = 0.0;
  double eps = 0.0;
  double s_max = 0.0;
  double tail_bound = 0.0;  // norm bound for every dropped tilde channel
  std::vector<ParametrixChannel> rows;
};

// Channel table of the parametrix for a given extension: every h'/h channel
// plus the 1/h channels up to |s| <= s_max; the rest are controlled by the
// uniform 1/|s| norm bound.
inline ParametrixReport assemble_parametrix(const GeometricOperatorModel& model,
                                            double alpha,
                                            const ExtensionSpec& ext,
                                            double s_max, double eps = 0.5) {
  if (!(alpha > 1.0))
    throw std::invalid_argument("assemble_parametrix: alpha must exceed 1");
  validate_extension(model, alpha, ext);
  ParametrixReport rep;
  rep.extension = extension_tag(ext);
  rep.alpha = alpha;
  rep.eps = eps;
  rep.s_max = s_max;
  WarpProfile p = WarpProfile::pure_power(alpha);
  rep.tail_bound = p.h(eps) / s_max;  // C0/s for the 1/h family on (0, eps]
  for (const auto& ch : model.t_channels())
    rep.rows.push_back({ch.s, ch.mult, Family::T,
                        channel_branch(Family::T, ch.s, alpha, ext), ch.origin});
  for (const auto& ch : model.tilde_channels(s_max))
    rep.rows.push_back({ch.s, ch.mult, Family::Tilde,
                        channel_branch(Family::Tilde, ch.s, alpha, ext),
                        ch.origin});
  return rep;
}

// Solution operator of one channel over (0, eps) on the pure-power profile.
inline KernelOperator channel_operator(Family fam, double s, Branch br,
                                       const WarpProfile& p, double eps,
                                       std::size_t cells = 256) {
  ChannelCoefficient c = coefficient(
      p, fam == Family::T ? CoeffKind::HornRatio : CoeffKind::Inverse);
  double g = fam == Family::T ? 2.0 : default_grading(p.gamma());
  return KernelOperator(br, s, c, eps, cells, g);
}

// ---------------------------------------------------------------------------
// Boundary functional

struct PhiResult {
  double value = 0.0;
  bool converged = false;
  double spread = 0.0;
};

// lim_{x->0} x^weight u(x) via Aitken extrapolation on a geometric ladder.
// The error of x^w u along x_k = x_min 2^k is a single geometric mode, which
// the delta-squared step removes exactly.
template <class U>
PhiResult boundary_value_phi(U&& u, double weight, double x_min = 1e-4,
                             int nodes = 8, double tol = 1e-6) {
  std::vector<double> g(static_cast<std::size_t>(nodes));
  double gmax = 0.0;
  for (int k = 0; k < nodes; ++k) {
    // descending x so the sequence runs toward the limit
    double x = x_min * std::pow(2.0, double(nodes - 1 - k));
    g[std::size_t(k)] = std::pow(x, weight) * u(x);
    gmax = std::max(gmax, std::fabs(g[std::size_t(k)]));
  }
  if (gmax < 1e-300) return {0.0, true, 0.0};
  std::vector<double> a;
  for (int k = 0; k + 2 < nodes; ++k) {
    double d1 = g[std::size_t(k + 1)] - g[std::size_t(k)];
    double d2 = g[std::size_t(k + 2)] - g[std::size_t(k + 1)];
    double den = d2 - d1;
    if (std::fabs(den) < 1e-14 * std::max(std::fabs(d1), std::fabs(d2)) ||
        den == 0.0)
      a.push_back(g[std::size_t(k + 2)]);
    else
      a.push_back(g[std::size_t(k + 2)] - d2 * d2 / den);
  }
  PhiResult res;
  res.value = a.back();
  res.spread = std::fabs(a.back() - a[a.size() - 2]);
  res.converged = res.spread <= tol * std::max(1.0, std::fabs(res.value));
  return res;
}

// ---------------------------------------------------------------------------
// Output decay of the from-zero 1/h solution operator

struct DecayReport {
  double slope = 0.0;
  double slope_floor = 0.0;
  bool pass = false;
  std::vector<std::pair<double, double>> samples;  // (x, u)
};

// Feed a plateau (identically 1 near 0) through the channel; outputs must
// vanish at least like x^{alpha/2}.  Measured over the decade two below the
// plateau edge; the observed rate is the full alpha.
inline DecayReport check_decay(double alpha, double s, double eps,
                               std::size_t cells = 512) {
  if (!(s > 0.0)) throw std::invalid_argument("check_decay: needs s > 0");
  DecayReport rep;
  rep.slope_floor = 0.5 * alpha - 0.1;
  WarpProfile p = WarpProfile::pure_power(alpha);
  ChannelCoefficient c = coefficient(p, CoeffKind::Inverse);
  KernelOperator K(Branch::FromZero, s, c, eps, cells, default_grading(alpha));
  const double lo = 0.5 * eps, hi = 0.75 * eps;
  auto plateau = [lo, hi](double x) {
    if (x <= lo) return 1.0;
    if (x >= hi) return 0.0;
    double t = (x - lo) / (hi - lo);
    return 1.0 - (3.0 * t * t - 2.0 * t * t * t);
  };
  std::vector<double> lx, ly;
  for (int i = 0; i < 12; ++i) {
    double x = eps * std::pow(10.0, -3.0 + 1.0 * double(i) / 11.0);
    double u = K.apply(plateau, x);
    rep.samples.push_back({x, u});
    if (u > 0.0) {
      lx.push_back(std::log(x));
      ly.push_back(std::log(u));
    }
  }
  if (lx.size() >= 2) {
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) { mx += lx[i]; my += ly[i]; }
    mx /= double(lx.size());
    my /= double(lx.size());
    double num = 0, den = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
      num += (lx[i] - mx) * (ly[i] - my);
      den += (lx[i] - mx) * (lx[i] - mx);
    }
    rep.slope = num / den;
  }
  rep.pass = rep.slope >= rep.slope_floor;
  return rep;
}

// ---------------------------------------------------------------------------
// Norm of the h'/h admixture composed with the channel parametrix

struct PerturbationReport {
  double value = 0.0;          // max block norm over coupled pairs at eps
  double value_half = 0.0;     // same at eps/2
  double scaling_ratio = 0.0;  // value_half / value
  double ratio_bound = 0.0;    // 2^{-(alpha-1)} + 0.07
  bool ratio_pass = false;
  double eps_below_half = 0.0; // largest tried eps with value < 1/2
  std::size_t pairs = 0;
};

namespace detail {

// sigma_max of the discretized 2x2 block (a A / x) o diag(P_+, P_-) on one pair.
inline double pair_block_norm(const TildePairData& pair, double alpha,
                              double eps, std::size_t cells) {
  WarpProfile p = WarpProfile::pure_power(alpha);
  ChannelCoefficient c = coefficient(p, CoeffKind::Inverse);
  CompositeQuad q(GradedMesh(cells, default_grading(alpha), eps), 4);
  const auto& xs = q.points();
  const auto& ws = q.weights();
  const std::size_t n = xs.size();
  const double r = std::sqrt(pair.lambda);
  const double A[2][2] = {{pair.a_avg, pair.a_off}, {pair.a_off, pair.a_avg}};
  const double sgn[2] = {+1.0, -1.0};
  // per-sign scalar kernels
  std::vector<double> P(2 * n * n, 0.0);
  for (int b = 0; b < 2; ++b) {
    double s = sgn[b] * r;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        double tri;
        if (s >= 0.0)  // from zero
          tri = j < i ? 1.0 : (j == i ? 0.5 : 0.0);
        else
          tri = j > i ? 1.0 : (j == i ? 0.5 : 0.0);
        if (tri == 0.0) continue;
        double val;
        if (j == i) {
          // Own-node mass: the kernel drops off inside the cell once
          // |s| mu-spacing is large, so the plain 0.5 w_i slot would
          // overestimate it badly at small x.  The one-sided mass is
          // bounded by h(x)/|s| exactly; take the smaller of the two.
          double mass = std::min(0.5 * ws[i], p.h(xs[i]) / std::fabs(s));
          val = std::sqrt(ws[i]) * (mass / ws[i]) * std::sqrt(ws[i]);
        } else {
          double e = -s * c.integral(xs[j], xs[i]);
          val = std::sqrt(ws[i]) * std::exp(std::clamp(e, -700.0, 700.0)) *
                std::sqrt(ws[j]) * tri;
        }
        P[std::size_t(b) * n * n + i * n + j] = val;
      }
  }
  // B[(a,i),(b,j)] = (alpha A_ab / x_i) P_b[i,j]
  const std::size_t N = 2 * n;
  std::vector<double> v(N, 1.0 / std::sqrt(double(N))), bv(N), btbv(N);
  auto matvec = [&](const std::vector<double>& in, std::vector<double>& out) {
    for (int a = 0; a < 2; ++a)
      for (std::size_t i = 0; i < n; ++i) {
        double acc = 0.0;
        for (int b = 0; b < 2; ++b) {
          if (A[a][b] == 0.0) continue;
          const double* row = &P[std::size_t(b) * n * n + i * n];
          double dot = 0.0;
          for (std::size_t j = 0; j < n; ++j)
            dot += row[j] * in[std::size_t(b) * n + j];
          acc += alpha * A[a][b] / xs[i] * dot;
        }
        out[std::size_t(a) * n + i] = acc;
      }
  };
  auto matvec_t = [&](const std::vector<double>& in, std::vector<double>& out) {
    std::fill(out.begin(), out.end(), 0.0);
    for (int a = 0; a < 2; ++a)
      for (std::size_t i = 0; i < n; ++i) {
        double w = in[std::size_t(a) * n + i];
        if (w == 0.0) continue;
        for (int b = 0; b < 2; ++b) {
          if (A[a][b] == 0.0) continue;
          const double* row = &P[std::size_t(b) * n * n + i * n];
          double f = alpha * A[a][b] / xs[i] * w;
          for (std::size_t j = 0; j < n; ++j)
            out[std::size_t(b) * n + j] += f * row[j];
        }
      }
  };
  double sigma = 0.0;
  for (int it = 0; it < 1000; ++it) {
    matvec(v, bv);
    matvec_t(bv, btbv);
    double lam = 0.0, nrm = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      lam += v[i] * btbv[i];
      nrm += btbv[i] * btbv[i];
    }
    nrm = std::sqrt(nrm);
    if (nrm == 0.0) return 0.0;
    for (std::size_t i = 0; i < N; ++i) v[i] = btbv[i] / nrm;
    double snew = std::sqrt(std::max(lam, 0.0));
    if (it > 4 && std::fabs(snew - sigma) <= 1e-8 * std::max(snew, 1e-300))
      return snew;
    sigma = snew;
  }
  return sigma;
}

}  // namespace detail

inline PerturbationReport perturbation_norm_bound(
    const GeometricOperatorModel& model, double alpha, double eps,
    double s_max, std::size_t cells = 64) {
  if (!(alpha > 1.0))
    throw std::invalid_argument("perturbation_norm_bound: alpha must exceed 1");
  PerturbationReport rep;
  // Halving eps should shave the norm by about 2^{-(alpha-1)}.  The finite
  // eps correction sits near +0.05 at eps = 1/2 across 1.5 <= alpha <= 3,
  // so 0.07 of slack separates genuine scaling from no decay at all.
  rep.ratio_bound = std::pow(2.0, -(alpha - 1.0)) + 0.07;
  auto pairs = model.tilde_pairs(s_max);
  rep.pairs = pairs.size();
  auto value_at = [&](double e) {
    double worst = 0.0;
    for (const auto& pr : pairs)
      worst = std::max(worst, detail::pair_block_norm(pr, alpha, e, cells));
    return worst;
  };
  rep.value = value_at(eps);
  rep.value_half = value_at(0.5 * eps);
  if (rep.value > 0.0) {
    rep.scaling_ratio = rep.value_half / rep.value;
    rep.ratio_pass = rep.scaling_ratio <= rep.ratio_bound;
  } else {
    rep.scaling_ratio = 0.0;
    rep.ratio_pass = true;
  }
  double e = eps, v = rep.value;
  for (int k = 0; k < 24 && !(v < 0.5); ++k) {
    e *= 0.5;
    v = e == 0.5 * eps ? rep.value_half : value_at(e);
  }
  rep.eps_below_half = v < 0.5 ? e : 0.0;
  return rep;
}

}  // namespace hornindex
