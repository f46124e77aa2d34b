#pragma once

// Continuity of the channel calculus along a deformation of the warp
// exponent: Hilbert-Schmidt distance of solution kernels, the contraction
// certificate pushing a parameter-1 bound to all higher parameters, index
// constancy along the family, and the graph-operator lower bound.

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "hornindex/geometry.hpp"
#include "hornindex/kernels.hpp"
#include "hornindex/oracle.hpp"
#include "hornindex/warp.hpp"

namespace hornindex {

// Smallest integer parameter from which the mean-value contraction factor
// s (1-w)^{s-1} drops below one.
inline int contraction_threshold(double w) {
  if (!(w > 0.0) || !(w < 1.0))
    throw std::invalid_argument("contraction_threshold: w must lie in (0,1)");
  for (int s = 1; s <= 1000000; ++s) {
    if (double(s) * std::pow(1.0 - w, double(s - 1)) < 1.0) return s;
  }
  throw std::runtime_error("contraction_threshold: no threshold below 1e6");
}

inline std::vector<double> make_beta_samples(double lo, double hi,
                                             std::size_t count = 9) {
  std::vector<double> out;
  for (std::size_t i = 0; i < count; ++i) {
    double t = count == 1
                   ? 0.0
                   : 0.5 * (1.0 - std::cos(M_PI * double(i) / double(count - 1)));
    out.push_back(lo + (hi - lo) * t);
  }
  return out;
}

// Hilbert-Schmidt distance of the two from-zero kernels at parameter s over
// the triangle 0 < y < x < eps.
inline double hs_diff(const ChannelCoefficient& a, const ChannelCoefficient& b,
                      double s, double eps, std::size_t cells = 128) {
  CompositeQuad q(GradedMesh(cells, 2.0, eps), 8);
  double acc = q.integrate([&](double x) {
    return q.integrate_upto(x, [&](double y) {
      double ka = std::exp(std::clamp(-s * a.integral(y, x), -700.0, 700.0));
      double kb = std::exp(std::clamp(-s * b.integral(y, x), -700.0, 700.0));
      double d = ka - kb;
      return d * d;
    });
  });
  return std::sqrt(std::max(acc, 0.0));
}

struct ContinuityPairRow {
  double beta = 0.0, gamma = 0.0;
  double sup_hs_t = 0.0, sup_hs_tilde = 0.0, sup_hs = 0.0;  // at s = 1
  bool cert_ok = false;
};

struct ContinuityReport {
  std::vector<ContinuityPairRow> rows;
  bool monotone = false;
  double minorant_c = 0.0;  // x F_min(x) >= c across the family, both kinds
  double w = 0.0;
  double vol_bound = 0.0;   // certified area of the small-gap region
  double delta0 = 0.0;
  int s_w = 0;
  double fitted_L = 0.0;
  bool contraction_samples_ok = false;
  bool pass = false;
};

// Kernels shrink together once the parameter clears the contraction
// threshold: off the small-gap region every member kernel is <= 1-w and the
// mean-value bound |k^s - l^s| <= s (1-w)^{s-1} |k - l| applies; the region
// itself has certified area below delta0/2.  Hence
//   diff(s)^2 <= diff(1)^2 + delta0/2    for every s >= s_w,
// which the scan also verifies by direct evaluation.
inline ContinuityReport hs_continuity_scan(const HomotopyFamily& fam,
                                           double eps, double delta0,
                                           std::size_t cells = 128) {
  ContinuityReport rep;
  rep.delta0 = delta0;
  const double lo = fam.beta_lo(), hi = fam.beta_hi();
  const double span = hi - lo, anchor = 0.5 * (lo + hi);

  // uniform minorant c with F >= c/x for every sampled member and both kinds
  double c = std::numeric_limits<double>::infinity();
  for (double b : make_beta_samples(lo, hi, 9)) {
    FamilyMember m = fam.member(b);
    for (int i = 0; i < 1024; ++i) {
      double x = eps * std::pow(10.0, -6.0 + 6.0 * double(i) / 1023.0);
      c = std::min(c, x * m.hprime(x) / m.h(x));
      c = std::min(c, x / m.h(x));
    }
  }
  if (!(c > 0.0))
    throw std::runtime_error("hs_continuity_scan: no positive minorant");
  rep.minorant_c = c;

  // largest w whose small-gap area bound  eps^2 (1 - e^{-tau/c}) / 2  stays
  // below delta0/2; closed form since gap(x, y) >= c log(x/y)
  if (!(delta0 > 0.0) || !(delta0 < eps * eps))
    throw std::invalid_argument("hs_continuity_scan: need 0 < delta0 < eps^2");
  rep.w = 1.0 - std::pow(1.0 - delta0 / (eps * eps), c);
  if (rep.w >= 1.0) rep.w = 1.0 - 1e-12;
  double tau = -std::log(1.0 - rep.w);
  rep.vol_bound = 0.5 * eps * eps * (1.0 - std::exp(-tau / c));
  rep.s_w = contraction_threshold(rep.w);

  const double ds[4] = {0.2, 0.1, 0.05, 0.025};
  for (double dfrac : ds) {
    double d = dfrac * span;
    FamilyMember mb = fam.member(anchor);
    FamilyMember mg = fam.member(anchor + d);
    ChannelCoefficient bt = mb.coefficient(CoeffKind::HornRatio);
    ChannelCoefficient gt = mg.coefficient(CoeffKind::HornRatio);
    ChannelCoefficient bi = mb.coefficient(CoeffKind::Inverse);
    ChannelCoefficient gi = mg.coefficient(CoeffKind::Inverse);
    ContinuityPairRow row;
    row.beta = anchor;
    row.gamma = anchor + d;
    row.sup_hs_t = hs_diff(bt, gt, 1.0, eps, cells);
    row.sup_hs_tilde = hs_diff(bi, gi, 1.0, eps, cells);
    row.sup_hs = std::max(row.sup_hs_t, row.sup_hs_tilde);
    row.cert_ok = true;
    for (double s : {double(rep.s_w), 2.0 * rep.s_w}) {
      double dt = hs_diff(bt, gt, s, eps, cells);
      double di = hs_diff(bi, gi, s, eps, cells);
      double cap_t = row.sup_hs_t * row.sup_hs_t + 0.5 * delta0;
      double cap_i = row.sup_hs_tilde * row.sup_hs_tilde + 0.5 * delta0;
      if (dt * dt > cap_t + 1e-12 || di * di > cap_i + 1e-12) row.cert_ok = false;
    }
    rep.rows.push_back(row);
    if (d > 0.0) rep.fitted_L = std::max(rep.fitted_L, row.sup_hs / d);
  }
  rep.monotone = true;
  for (std::size_t i = 0; i + 1 < rep.rows.size(); ++i)
    if (!(rep.rows[i + 1].sup_hs < rep.rows[i].sup_hs)) rep.monotone = false;

  // spot-check the pointwise contraction off the small-gap region
  rep.contraction_samples_ok = true;
  {
    FamilyMember mb = fam.member(anchor);
    FamilyMember mg = fam.member(anchor + 0.2 * span);
    ChannelCoefficient a = mb.coefficient(CoeffKind::HornRatio);
    ChannelCoefficient b = mg.coefficient(CoeffKind::HornRatio);
    double s = double(rep.s_w);
    double fac = s * std::pow(1.0 - rep.w, s - 1.0);
    for (int i = 1; i <= 12; ++i) {
      double x = eps * double(i) / 12.0;
      double ycut = x * std::exp(-tau / c);  // below this the gap clears tau
      for (int j = 1; j <= 8; ++j) {
        double y = ycut * double(j) / 9.0;
        if (!(y > 0.0)) continue;
        double k1a = std::exp(-a.integral(y, x));
        double k1b = std::exp(-b.integral(y, x));
        double ksa = std::pow(k1a, s), ksb = std::pow(k1b, s);
        if (std::fabs(ksa - ksb) >
            fac * std::fabs(k1a - k1b) + 1e-12)
          rep.contraction_samples_ok = false;
      }
    }
  }
  bool certs = true;
  for (const auto& r : rep.rows) certs = certs && r.cert_ok;
  rep.pass = rep.monotone && certs && rep.contraction_samples_ok;
  return rep;
}

// sigma_min of [[I, -A^T], [A, I]]; always >= 1, structurally sqrt(1+sigma^2).
inline double graph_operator_sigma_min(const Eigen::MatrixXd& A) {
  const Eigen::Index m = A.rows(), k = A.cols();
  Eigen::MatrixXd E = Eigen::MatrixXd::Zero(m + k, m + k);
  E.topLeftCorner(k, k).setIdentity();
  E.topRightCorner(k, m) = -A.transpose();
  E.bottomLeftCorner(m, k) = A;
  E.bottomRightCorner(m, m).setIdentity();
  Eigen::BDCSVD<Eigen::MatrixXd> svd(E);
  return svd.singularValues().minCoeff();
}

inline double model_graph_sigma_min(const GeometricOperatorModel& model,
                                    double s_max) {
  double worst = std::numeric_limits<double>::infinity();
  for (const auto& p : model.tilde_pairs(s_max)) {
    Eigen::MatrixXd A(2, 2);
    A << p.a_avg, p.a_off, p.a_off, p.a_avg;
    worst = std::min(worst, graph_operator_sigma_min(A));
  }
  if (!std::isfinite(worst)) worst = 1.0;  // no pairs below s_max
  return worst;
}

struct StabilityRow {
  Family family = Family::T;
  double s = 0.0;
  int mult = 0;
  std::vector<std::array<int, 3>> counts;  // (ker, coker, index) per sample
  bool constant = false;
};

struct StabilityReport {
  std::vector<StabilityRow> rows;
  std::size_t beta_count = 0;
  bool pass = false;
};

// Per-channel kernel and cokernel counts must not move as the warp exponent
// sweeps the family (both mesh resolutions, spectral-cut encoding at 0,
// Dirichlet at eps).
inline StabilityReport channel_index_stability(const GeometricOperatorModel& model,
                                               const std::vector<double>& betas,
                                               double s_max = 10.0,
                                               double eps = 0.5,
                                               std::size_t cells = 256) {
  StabilityReport rep;
  rep.beta_count = betas.size();
  std::vector<SpectralChannel> chans = model.t_channels();
  for (const auto& ch : model.tilde_channels(s_max)) chans.push_back(ch);
  for (const auto& ch : chans) {
    StabilityRow row;
    row.family = ch.family;
    row.s = ch.s;
    row.mult = ch.mult;
    for (double b : betas) {
      ZeroBC zbc = ch.s < 0.0 ? ZeroBC::Free : ZeroBC::KillSingular;
      for (std::size_t n : {cells, 2 * cells}) {
        auto r = channel_index(ch.family, ch.s, b, eps, zbc, EpsBC::Dirichlet, n);
        row.counts.push_back({r.kernel, r.cokernel, r.index});
      }
    }
    row.constant = true;
    for (const auto& t : row.counts)
      if (t != row.counts.front()) row.constant = false;
    rep.rows.push_back(row);
  }
  rep.pass = true;
  for (const auto& r : rep.rows) rep.pass = rep.pass && r.constant;
  return rep;
}

struct PerturbationRemovalReport {
  std::vector<double> mu_grid;
  std::vector<int> indices;
  bool constant = false;
  double relative_bound = 0.0;  // largest coupling/base coefficient ratio seen
};

// Switching the h'/h admixture on and off must not move the discrete index
// of a coupled pair.  The coupling enters each cell row midpoint-sampled and
// windowed by a plateau that dies at eps.
inline PerturbationRemovalReport remove_perturbation_check(
    const TildePairData& pair, double beta, double eps,
    std::vector<double> mu_grid = {0.0, 0.5, 1.0}, std::size_t cells = 128) {
  PerturbationRemovalReport rep;
  rep.mu_grid = mu_grid;
  WarpProfile p = beta == 1.0 ? WarpProfile::pure_power(1.0, true)
                              : WarpProfile::pure_power(beta);
  ChannelCoefficient ci = coefficient(p, CoeffKind::Inverse);
  const double r = std::sqrt(pair.lambda);
  const double A[2][2] = {{pair.a_avg, pair.a_off}, {pair.a_off, pair.a_avg}};
  const double sgn[2] = {+1.0, -1.0};
  const std::size_t n = cells + 1;
  std::vector<double> nodes(n);
  double g = default_grading(beta);
  for (std::size_t i = 0; i < n; ++i)
    nodes[i] = eps * std::pow(double(i + 1) / double(n), g);
  auto plateau = [eps](double x) {
    double lo = 0.5 * eps, hi = 0.75 * eps;
    if (x <= lo) return 1.0;
    if (x >= hi) return 0.0;
    double t = (x - lo) / (hi - lo);
    return 1.0 - (3.0 * t * t - 2.0 * t * t * t);
  };
  for (double mu : mu_grid) {
    Eigen::MatrixXd M =
        Eigen::MatrixXd::Zero(Eigen::Index(2 * cells + 2), Eigen::Index(2 * n));
    for (int a = 0; a < 2; ++a) {
      double s = sgn[a] * r;
      for (std::size_t i = 0; i + 1 < n; ++i) {
        double x0 = nodes[i], x1 = nodes[i + 1];
        double mid = 0.5 * (x0 + x1), len = x1 - x0;
        double ea = std::clamp(s * ci.integral(mid, x0), -700.0, 700.0);
        double eb = std::clamp(s * ci.integral(mid, x1), -700.0, 700.0);
        double ca = -std::exp(ea), cb = std::exp(eb);
        double nrm = std::max(std::fabs(ca), std::fabs(cb)) * len;
        Eigen::Index row = Eigen::Index(std::size_t(a) * cells + i);
        M(row, Eigen::Index(std::size_t(a) * n + i)) = ca * len / nrm;
        M(row, Eigen::Index(std::size_t(a) * n + i + 1)) = cb * len / nrm;
        if (mu != 0.0) {
          double v = mu * (p.hprime(mid) / p.h(mid)) * plateau(mid);
          for (int bb = 0; bb < 2; ++bb) {
            if (A[a][bb] == 0.0) continue;
            double entry = v * A[a][bb] * 0.5 * len * len / nrm;
            M(row, Eigen::Index(std::size_t(bb) * n + i)) += entry;
            M(row, Eigen::Index(std::size_t(bb) * n + i + 1)) += entry;
            rep.relative_bound = std::max(
                rep.relative_bound, std::fabs(2.0 * entry) / (len / nrm * std::max(std::fabs(ca), std::fabs(cb))));
          }
        }
      }
      // Dirichlet at eps per channel
      M(Eigen::Index(2 * cells + std::size_t(a)),
        Eigen::Index(std::size_t(a) * n + n - 1)) = 1.0;
    }
    auto cts = svd_counts(M);
    rep.indices.push_back(cts.kernel - cts.cokernel);
  }
  rep.constant = true;
  for (int v : rep.indices)
    if (v != rep.indices.front()) rep.constant = false;
  return rep;
}

}  // namespace hornindex
