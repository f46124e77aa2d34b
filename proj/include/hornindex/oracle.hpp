#pragma once

// Independent discretization of single channels, used to cross-check the
// analytic channel classification.  Cell rows use the exact integrating
// factor, so the discrete kernel contains the sampled homogeneous mode with
// machine-zero residual; membership decisions (which modes count) are made
// by explicit boundary rows, never by under-resolved finite differences.

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "hornindex/geometry.hpp"
#include "hornindex/kernels.hpp"
#include "hornindex/spectral.hpp"
#include "hornindex/warp.hpp"

namespace hornindex {

enum class ZeroBC { Free, KillSingular };
enum class EpsBC { Free, Dirichlet };

struct DiscreteChannel {
  Eigen::MatrixXd A;  // (cells + boundary rows) x nodes
  std::vector<double> nodes;
  Family family = Family::T;
  double s = 0.0, beta = 0.0, eps = 0.0;
  bool kill_row = false;
  bool dirichlet_row = false;
};

// Graded nodes eps (i/n)^g, i = 1..n; no node at 0.  One row per cell:
//   e^{s (G(b) - G_mid)} u(b) - e^{s (G(a) - G_mid)} u(a)   over cell length,
// normalized to unit max coefficient.  Identically zero on e^{-s G}.
inline DiscreteChannel discretize_channel(Family fam, double s, double beta,
                                          double eps, ZeroBC zbc, EpsBC ebc,
                                          std::size_t cells = 256,
                                          double grading = 0.0,
                                          bool allow_near_wall = false) {
  if (!(beta >= 1.0))
    throw std::invalid_argument("discretize_channel: beta must be >= 1");
  auto cls = classify_channel(s, beta, fam);
  if (!allow_near_wall) {
    // tilde channels with beta > 1 have no wall; their modes are never powers
    double w = fam == Family::T ? std::fabs(beta * s)
                                : (beta == 1.0 ? std::fabs(s) : 0.0);
    if (w >= 0.45 && w <= 0.55)
      throw std::invalid_argument(
          "discretize_channel: refusing a mesh near the square-integrability "
          "wall (weight in [0.45, 0.55]); pass allow_near_wall to override");
  }
  WarpProfile p = beta == 1.0 ? WarpProfile::pure_power(1.0, true)
                              : WarpProfile::pure_power(beta);
  ChannelCoefficient c = coefficient(
      p, fam == Family::T ? CoeffKind::HornRatio : CoeffKind::Inverse);
  double g = grading > 0.0
                 ? grading
                 : (fam == Family::T ? 2.0 : default_grading(beta));
  const std::size_t n = cells + 1;  // nodes
  DiscreteChannel d;
  d.family = fam;
  d.s = s;
  d.beta = beta;
  d.eps = eps;
  d.nodes.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    d.nodes[i] = eps * std::pow(double(i + 1) / double(n), g);
  bool kill = false;
  if (zbc == ZeroBC::Free)
    kill = fam == Family::T && !cls.mode_l2;
  else
    kill = (fam == Family::T && !cls.mode_l2) || cls.quotient;
  d.kill_row = kill;
  d.dirichlet_row = ebc == EpsBC::Dirichlet;
  const std::size_t rows = cells + (kill ? 1u : 0u) + (d.dirichlet_row ? 1u : 0u);
  d.A = Eigen::MatrixXd::Zero(Eigen::Index(rows), Eigen::Index(n));
  for (std::size_t i = 0; i + 1 < n; ++i) {
    double a = d.nodes[i], b = d.nodes[i + 1];
    double mid = 0.5 * (a + b);
    double ea = std::clamp(s * c.integral(mid, a), -700.0, 700.0);
    double eb = std::clamp(s * c.integral(mid, b), -700.0, 700.0);
    double ca = -std::exp(ea), cb = std::exp(eb);
    double len = b - a;
    double nrm = std::max(std::fabs(ca), std::fabs(cb)) * len;
    d.A(Eigen::Index(i), Eigen::Index(i)) = ca * len / nrm;
    d.A(Eigen::Index(i), Eigen::Index(i + 1)) = cb * len / nrm;
  }
  std::size_t r = cells;
  if (kill) d.A(Eigen::Index(r++), 0) = 1.0;
  if (d.dirichlet_row) d.A(Eigen::Index(r++), Eigen::Index(n - 1)) = 1.0;
  return d;
}

struct SvdCounts {
  int kernel = 0;
  int cokernel = 0;
  bool borderline = false;  // a singular value within 10x of the cut
  double sigma_max = 0.0;
};

// Rank by SVD after column and row max-equilibration; the scaling recovers
// directions whose raw coefficients underflowed toward zero.
inline SvdCounts svd_counts(Eigen::MatrixXd A, double tol = 1e-7) {
  const Eigen::Index rows = A.rows(), cols = A.cols();
  for (Eigen::Index j = 0; j < cols; ++j) {
    double m = A.col(j).cwiseAbs().maxCoeff();
    if (m > 0.0) A.col(j) /= m;
  }
  for (Eigen::Index i = 0; i < rows; ++i) {
    double m = A.row(i).cwiseAbs().maxCoeff();
    if (m > 0.0) A.row(i) /= m;
  }
  Eigen::BDCSVD<Eigen::MatrixXd> svd(A);
  const auto& sv = svd.singularValues();
  SvdCounts out;
  out.sigma_max = sv.size() > 0 ? sv(0) : 0.0;
  if (out.sigma_max <= 0.0) {
    out.kernel = int(cols);
    out.cokernel = int(rows);
    return out;
  }
  const double cut = tol * out.sigma_max;
  int rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > cut) ++rank;
    if (sv(i) > 0.1 * cut && sv(i) < 10.0 * cut) out.borderline = true;
  }
  out.kernel = int(cols) - rank;
  out.cokernel = int(rows) - rank;
  return out;
}

struct ChannelIndexResult {
  int kernel = 0;
  int cokernel = 0;
  int index = 0;
  bool borderline = false;
};

inline ChannelIndexResult channel_index(Family fam, double s, double beta,
                                        double eps, ZeroBC zbc, EpsBC ebc,
                                        std::size_t cells = 256) {
  auto d = discretize_channel(fam, s, beta, eps, zbc, ebc, cells);
  auto c = svd_counts(d.A);
  return {c.kernel, c.cokernel, c.kernel - c.cokernel, c.borderline};
}

// Number of square-integrable homogeneous solutions near 0 (0 or 1).
inline int l2_solution_count(Family fam, double s, double beta) {
  return classify_channel(s, beta, fam).mode_l2 ? 1 : 0;
}

struct OracleQuotientResult {
  int dim = 0;
  int channels_checked = 0;  // channels that needed an actual SVD pair
  bool borderline = false;
};

// dim D(max)/D(min) recomputed per channel as the kernel-count difference
// between the free and the killed boundary encodings.  Channels where the
// two encodings build the same matrix contribute exactly zero and are
// skipped; only genuine quotient channels reach the SVD.
inline OracleQuotientResult oracle_quotient_dim(const GeometricOperatorModel& model,
                                                double alpha,
                                                std::size_t cells = 256,
                                                double eps = 0.5) {
  OracleQuotientResult out;
  for (const auto& ch : model.t_channels()) {
    auto cls = classify_channel(ch.s, alpha, Family::T);
    if (!cls.quotient) continue;  // free and killed encodings coincide
    auto free0 = discretize_channel(Family::T, ch.s, alpha, eps, ZeroBC::Free,
                                    EpsBC::Free, cells);
    auto kill0 = discretize_channel(Family::T, ch.s, alpha, eps,
                                    ZeroBC::KillSingular, EpsBC::Free, cells);
    auto cf = svd_counts(free0.A);
    auto ck = svd_counts(kill0.A);
    out.dim += ch.mult * (cf.kernel - ck.kernel);
    out.borderline = out.borderline || cf.borderline || ck.borderline;
    ++out.channels_checked;
  }
  return out;
}

}  // namespace hornindex
