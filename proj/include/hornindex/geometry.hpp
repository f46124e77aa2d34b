#pragma once

// Cross-section catalog and the channel normal forms of the three geometric
// operators over a horn with that cross-section.  Catalog entries carry
// closed-form spectra (flat tori, round spheres); eta invariants and Dirac
// kernel dimensions are cataloged constants for these spaces, not recomputed.

#include <algorithm>
#include <cmath>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "hornindex/spectral.hpp"

namespace hornindex {

enum class FormType { Closed, Coclosed };
enum class SpinStructure { Trivial, NonTrivial };
enum class CurvatureSign { Negative, Zero, Positive };
enum class OperatorKind { Dirac, GaussBonnet, Signature };

struct FormEigen {
  double lambda = 0.0;
  int degree = 0;
  FormType type = FormType::Coclosed;
  int mult = 0;
};

struct DiracEigen {
  double s = 0.0;  // signed eigenvalue
  int mult = 0;
};

namespace detail {

// lattice point counts |k|^2 = m, k in Z^dim \ {0}
inline std::vector<int> lattice_counts(int dim, int mmax) {
  std::vector<int> r(std::size_t(mmax) + 1, 0);
  int K = int(std::ceil(std::sqrt(double(mmax))));
  if (dim == 1) {
    for (int a = -K; a <= K; ++a) {
      int m = a * a;
      if (m >= 1 && m <= mmax) ++r[std::size_t(m)];
    }
  } else if (dim == 2) {
    for (int a = -K; a <= K; ++a)
      for (int b = -K; b <= K; ++b) {
        int m = a * a + b * b;
        if (m >= 1 && m <= mmax) ++r[std::size_t(m)];
      }
  } else if (dim == 3) {
    for (int a = -K; a <= K; ++a)
      for (int b = -K; b <= K; ++b)
        for (int cc = -K; cc <= K; ++cc) {
          int m = a * a + b * b + cc * cc;
          if (m >= 1 && m <= mmax) ++r[std::size_t(m)];
        }
  } else {
    throw std::invalid_argument("lattice_counts: dim must be 1, 2 or 3");
  }
  return r;
}

inline long long binom(int n, int k) {
  if (k < 0 || k > n) return 0;
  long long r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace detail

// A closed cross-section with explicitly known Hodge and Dirac spectra.
class CrossSection {
 public:
  enum class Id { Circle, Torus2, Torus3, Sphere2, Sphere3 };

  CrossSection(Id id) : id_(id) {
    switch (id) {
      case Id::Circle:  name_ = "circle";  n_ = 1; betti_ = {1, 1}; curv_ = CurvatureSign::Zero; break;
      case Id::Torus2:  name_ = "torus2";  n_ = 2; betti_ = {1, 2, 1}; curv_ = CurvatureSign::Zero; break;
      case Id::Torus3:  name_ = "torus3";  n_ = 3; betti_ = {1, 3, 3, 1}; curv_ = CurvatureSign::Zero; break;
      case Id::Sphere2: name_ = "sphere2"; n_ = 2; betti_ = {1, 0, 1}; curv_ = CurvatureSign::Positive; break;
      case Id::Sphere3: name_ = "sphere3"; n_ = 3; betti_ = {1, 0, 0, 1}; curv_ = CurvatureSign::Positive; break;
    }
  }

  Id id() const { return id_; }
  const std::string& name() const { return name_; }
  int dim() const { return n_; }
  const std::vector<int>& betti() const { return betti_; }
  CurvatureSign curvature() const { return curv_; }

  // All catalog entries have symmetric tangential spectra.
  double eta() const { return 0.0; }

  int dirac_kernel_dim(SpinStructure spin) const {
    switch (id_) {
      case Id::Circle: return spin == SpinStructure::Trivial ? 1 : 0;
      case Id::Torus2:
      case Id::Torus3:
        if (spin != SpinStructure::Trivial)
          throw std::invalid_argument("dirac_kernel_dim: only the all-periodic torus structure is cataloged");
        return 1 << (n_ / 2);
      case Id::Sphere2:
      case Id::Sphere3: return 0;
    }
    return 0;
  }

  // Coexact/exact eigen-j-forms with 0 < lambda <= lambda_max, sorted.
  std::vector<FormEigen> form_spectrum(double lambda_max) const {
    std::vector<FormEigen> out;
    const double pi2_4 = 4.0 * M_PI * M_PI;
    switch (id_) {
      case Id::Circle:
      case Id::Torus2:
      case Id::Torus3: {
        int mmax = int(std::floor(lambda_max / pi2_4));
        if (mmax < 1) break;
        auto r = detail::lattice_counts(n_, mmax);
        for (int m = 1; m <= mmax; ++m) {
          if (r[std::size_t(m)] == 0) continue;
          double lam = pi2_4 * m;
          for (int j = 0; j <= n_; ++j) {
            int ccl = int(detail::binom(n_ - 1, j)) * r[std::size_t(m)];
            int cl = int(detail::binom(n_ - 1, j - 1)) * r[std::size_t(m)];
            if (ccl > 0) out.push_back({lam, j, FormType::Coclosed, ccl});
            if (cl > 0) out.push_back({lam, j, FormType::Closed, cl});
          }
        }
        break;
      }
      case Id::Sphere2: {
        for (int l = 1;; ++l) {
          double lam = double(l) * double(l + 1);
          if (lam > lambda_max) break;
          int m = 2 * l + 1;
          out.push_back({lam, 0, FormType::Coclosed, m});
          out.push_back({lam, 1, FormType::Closed, m});
          out.push_back({lam, 1, FormType::Coclosed, m});
          out.push_back({lam, 2, FormType::Closed, m});
        }
        break;
      }
      case Id::Sphere3: {
        for (int l = 1;; ++l) {
          double lam = double(l) * double(l + 2);
          if (lam > lambda_max) break;
          int m = (l + 1) * (l + 1);
          out.push_back({lam, 0, FormType::Coclosed, m});
          out.push_back({lam, 1, FormType::Closed, m});
          out.push_back({lam, 2, FormType::Coclosed, m});
          out.push_back({lam, 3, FormType::Closed, m});
        }
        // coexact 1-forms (and their duals) sit on the shifted series
        for (int l = 1;; ++l) {
          double lam = double(l + 1) * double(l + 1);
          if (lam > lambda_max) break;
          int m = 2 * l * (l + 2);
          out.push_back({lam, 1, FormType::Coclosed, m});
          out.push_back({lam, 2, FormType::Closed, m});
        }
        break;
      }
    }
    std::sort(out.begin(), out.end(), [](const FormEigen& a, const FormEigen& b) {
      if (a.lambda != b.lambda) return a.lambda < b.lambda;
      if (a.degree != b.degree) return a.degree < b.degree;
      return int(a.type) < int(b.type);
    });
    return out;
  }

  // Nonzero Dirac eigenvalues with |s| <= s_max, both signs listed.
  std::vector<DiracEigen> dirac_spectrum(double s_max, SpinStructure spin) const {
    std::vector<DiracEigen> out;
    switch (id_) {
      case Id::Circle: {
        const double w = 2.0 * M_PI;
        if (spin == SpinStructure::Trivial) {
          for (int k = 1; w * k <= s_max; ++k) {
            out.push_back({w * k, 1});
            out.push_back({-w * k, 1});
          }
        } else {
          for (int k = 0; w * (k + 0.5) <= s_max; ++k) {
            out.push_back({w * (k + 0.5), 1});
            out.push_back({-w * (k + 0.5), 1});
          }
        }
        break;
      }
      case Id::Torus2:
      case Id::Torus3: {
        if (spin != SpinStructure::Trivial)
          throw std::invalid_argument("dirac_spectrum: only the all-periodic torus structure is cataloged");
        const double w = 2.0 * M_PI;
        int mmax = int(std::floor((s_max / w) * (s_max / w)));
        if (mmax < 1) break;
        auto r = detail::lattice_counts(n_, mmax);
        // rank-2^{floor(n/2)} spinor bundle: one +|s| and one -|s| branch per
        // lattice vector and half-rank
        int half = (1 << (n_ / 2)) / 2;
        if (half == 0) half = 1;
        for (int m = 1; m <= mmax; ++m) {
          if (r[std::size_t(m)] == 0) continue;
          double s = w * std::sqrt(double(m));
          out.push_back({s, half * r[std::size_t(m)]});
          out.push_back({-s, half * r[std::size_t(m)]});
        }
        break;
      }
      case Id::Sphere2:
      case Id::Sphere3: {
        for (int l = 0;; ++l) {
          double s = 0.5 * n_ + l;
          if (s > s_max) break;
          int m = (1 << (n_ / 2)) * int(detail::binom(l + n_ - 1, l));
          out.push_back({s, m});
          out.push_back({-s, m});
        }
        break;
      }
    }
    std::sort(out.begin(), out.end(), [](const DiracEigen& a, const DiracEigen& b) {
      if (std::fabs(a.s) != std::fabs(b.s)) return std::fabs(a.s) < std::fabs(b.s);
      return a.s < b.s;
    });
    return out;
  }

 private:
  Id id_;
  std::string name_;
  int n_ = 0;
  std::vector<int> betti_;
  CurvatureSign curv_ = CurvatureSign::Zero;
};

inline CrossSection catalog_cross_section(const std::string& name) {
  if (name == "circle") return CrossSection(CrossSection::Id::Circle);
  if (name == "torus2") return CrossSection(CrossSection::Id::Torus2);
  if (name == "torus3") return CrossSection(CrossSection::Id::Torus3);
  if (name == "sphere2") return CrossSection(CrossSection::Id::Sphere2);
  if (name == "sphere3") return CrossSection(CrossSection::Id::Sphere3);
  throw std::invalid_argument("catalog_cross_section: unknown name '" + name +
                              "' (circle, torus2, torus3, sphere2, sphere3)");
}

// de Rham degree coefficients on the h'/h diagonal.
inline double gb_degree_coefficient(int j, int n) {
  return (j % 2 == 0 ? 1.0 : -1.0) * (double(j) - 0.5 * double(n));
}
inline double signature_degree_coefficient(int j, int n) {
  return 0.5 * double(n) - double(j);
}

// One coupled pair of tilde channels (+sqrt(lambda), -sqrt(lambda)) together
// with the h'/h admixture written in the +- eigenbasis.
struct TildePairData {
  double lambda = 0.0;
  int j = 0;  // lower degree of the pair, or 0 for spinors
  int mult = 0;
  double c_low = 0.0, c_high = 0.0;  // h'/h diagonal in the natural basis
  double a_avg = 0.0, a_off = 0.0;   // same matrix in the +- eigenbasis
};

// Signature channel blocks.  l = 1..4 are 2x2 with an h'/h diagonal and a
// +-sqrt(lambda)/h off part; l = 5, 6 are scalars with h'/h coefficient
// -1/2 resp. +1/2 and a signed sqrt(lambda)/h term.
struct SignatureBlock {
  int l = 0;
  int j = 0;
  double lambda = 0.0;
  int mult = 0;
  int sign = 0;           // l = 5, 6 only: sign of the sqrt(lambda) term
  double diag1 = 0.0, diag2 = 0.0, off = 0.0;
  std::vector<int> degrees;
};

// 2x2 matrix data of the four coupled block families at any size parameter.
inline SignatureBlock signature_block_matrix(int l, int j, double lambda) {
  SignatureBlock b;
  b.l = l;
  b.j = j;
  b.lambda = lambda;
  b.off = (j % 2 == 0 ? 1.0 : -1.0) * std::sqrt(lambda);
  switch (l) {
    case 1: b.diag1 = 2.0 * j + 1.5; b.diag2 = -(2.0 * j + 2.5); break;
    case 2: b.diag1 = 2.0 * j + 2.5; b.diag2 = -(2.0 * j + 1.5); break;
    case 3: b.diag1 = 2.0 * j + 0.5; b.diag2 = -(2.0 * j + 1.5); break;
    case 4: b.diag1 = 2.0 * j + 1.5; b.diag2 = -(2.0 * j + 0.5); break;
    default:
      throw std::invalid_argument("signature_block_matrix: l must be 1..4");
  }
  return b;
}

class GeometricOperatorModel {
 public:
  OperatorKind kind = OperatorKind::GaussBonnet;
  SpinStructure spin = SpinStructure::Trivial;
  std::shared_ptr<const CrossSection> section;

  int n() const { return section->dim(); }

  // Uncoupled h'/h channels (harmonic data).
  std::vector<SpectralChannel> t_channels() const {
    std::vector<SpectralChannel> out;
    const auto& b = section->betti();
    switch (kind) {
      case OperatorKind::Dirac: {
        int bk = section->dirac_kernel_dim(spin);
        if (bk > 0) out.push_back({0.0, bk, Family::T, "harmonic spinors"});
        break;
      }
      case OperatorKind::GaussBonnet:
        for (int j = 0; j <= n(); ++j)
          if (b[std::size_t(j)] > 0)
            out.push_back({gb_degree_coefficient(j, n()), b[std::size_t(j)],
                           Family::T, "harmonic " + std::to_string(j) + "-forms"});
        break;
      case OperatorKind::Signature:
        for (int j = 0; j <= n(); ++j)
          if (b[std::size_t(j)] > 0)
            out.push_back({signature_degree_coefficient(j, n()), b[std::size_t(j)],
                           Family::T, "harmonic " + std::to_string(j) + "-forms"});
        break;
    }
    return out;
  }

  // Coupled pairs from the nonzero tangential spectrum.
  std::vector<TildePairData> tilde_pairs(double s_max) const {
    std::vector<TildePairData> out;
    if (kind == OperatorKind::Dirac) {
      auto spec = section->dirac_spectrum(s_max, spin);
      for (const auto& e : spec) {
        if (e.s <= 0.0) continue;  // each pair listed once
        TildePairData p;
        p.lambda = e.s * e.s;
        p.mult = e.mult;
        out.push_back(p);
      }
      return out;
    }
    if (kind == OperatorKind::GaussBonnet) {
      auto spec = section->form_spectrum(s_max * s_max);
      for (const auto& e : spec) {
        if (e.type != FormType::Coclosed || e.degree >= n()) continue;
        TildePairData p;
        p.lambda = e.lambda;
        p.j = e.degree;
        p.mult = e.mult;
        p.c_low = gb_degree_coefficient(e.degree, n());
        p.c_high = gb_degree_coefficient(e.degree + 1, n());
        p.a_avg = 0.5 * (p.c_low + p.c_high);
        p.a_off = 0.5 * (p.c_low - p.c_high);
        out.push_back(p);
      }
      return out;
    }
    // signature: pairs carried by the 2x2 blocks
    for (const auto& blk : blocks(s_max * s_max)) {
      if (blk.l > 4) continue;
      TildePairData p;
      p.lambda = blk.lambda;
      p.j = blk.degrees.empty() ? 0 : blk.degrees.front();
      p.mult = blk.mult;
      p.c_low = blk.diag1;
      p.c_high = blk.diag2;
      p.a_avg = 0.5 * (blk.diag1 + blk.diag2);
      p.a_off = 0.5 * (blk.diag1 - blk.diag2);
      out.push_back(p);
    }
    return out;
  }

  // Flat list of tilde channels with signed s = +-sqrt(lambda).
  std::vector<SpectralChannel> tilde_channels(double s_max) const {
    std::vector<SpectralChannel> out;
    if (kind == OperatorKind::Signature) {
      for (const auto& blk : blocks(s_max * s_max)) {
        double r = std::sqrt(blk.lambda);
        if (blk.l <= 4) {
          out.push_back({r, blk.mult, Family::Tilde, "block l" + std::to_string(blk.l)});
          out.push_back({-r, blk.mult, Family::Tilde, "block l" + std::to_string(blk.l)});
        } else {
          out.push_back({blk.sign * r, blk.mult, Family::Tilde,
                         "block l" + std::to_string(blk.l)});
        }
      }
      return out;
    }
    for (const auto& p : tilde_pairs(s_max)) {
      double r = std::sqrt(p.lambda);
      out.push_back({r, p.mult, Family::Tilde, "pair j" + std::to_string(p.j)});
      out.push_back({-r, p.mult, Family::Tilde, "pair j" + std::to_string(p.j)});
    }
    return out;
  }

  // Signature block decomposition for quarter-dimension k = (n+1)/4.
  std::vector<SignatureBlock> blocks(double lambda_max) const {
    if (kind != OperatorKind::Signature)
      throw std::logic_error("blocks: signature models only");
    const int k = (n() + 1) / 4;
    if (k != 1)
      throw std::invalid_argument("blocks: cataloged cross-sections cover k = 1 only");
    std::vector<SignatureBlock> out;
    auto spec = section->form_spectrum(lambda_max);
    // group multiplicities per lambda
    std::vector<double> lams;
    for (const auto& e : spec)
      if (lams.empty() || e.lambda > lams.back() + 1e-12) lams.push_back(e.lambda);
    auto dim_of = [&](double lam, int deg, FormType t) {
      int acc = 0;
      for (const auto& e : spec)
        if (std::fabs(e.lambda - lam) < 1e-12 && e.degree == deg && e.type == t)
          acc += e.mult;
      return acc;
    };
    for (double lam : lams) {
      int e1cl = dim_of(lam, 1, FormType::Closed);
      int e0ccl = dim_of(lam, 0, FormType::Coclosed);
      int e2cl = dim_of(lam, 2, FormType::Closed);
      int e1ccl = dim_of(lam, 1, FormType::Coclosed);
      if (e1cl > 0) {
        SignatureBlock b = signature_block_matrix(3, 0, lam);
        b.mult = e1cl;
        b.degrees = {1, 3};
        out.push_back(b);
      }
      if (e0ccl > 0) {
        SignatureBlock b = signature_block_matrix(4, 0, lam);
        b.mult = e0ccl;
        b.degrees = {0, 2};
        out.push_back(b);
      }
      // scalar families: the duality involution splits these evenly for the
      // cataloged cross-sections (symmetric curl spectra)
      if (e2cl > 0) {
        if (e2cl % 2 != 0)
          throw std::logic_error("blocks: uneven split of the degree-2 closed space");
        for (int sgn : {+1, -1}) {
          SignatureBlock b;
          b.l = 5;
          b.lambda = lam;
          b.mult = e2cl / 2;
          b.sign = sgn;
          b.diag1 = -0.5;
          b.off = sgn * std::sqrt(lam);
          b.degrees = {2};
          out.push_back(b);
        }
      }
      if (e1ccl > 0) {
        if (e1ccl % 2 != 0)
          throw std::logic_error("blocks: uneven split of the degree-1 coclosed space");
        for (int sgn : {+1, -1}) {
          SignatureBlock b;
          b.l = 6;
          b.lambda = lam;
          b.mult = e1ccl / 2;
          b.sign = sgn;
          b.diag1 = 0.5;
          b.off = sgn * std::sqrt(lam);
          b.degrees = {1};
          out.push_back(b);
        }
      }
    }
    return out;
  }
};

inline GeometricOperatorModel gb_normal_form(const CrossSection& cs) {
  GeometricOperatorModel m;
  m.kind = OperatorKind::GaussBonnet;
  m.section = std::make_shared<CrossSection>(cs);
  return m;
}

inline GeometricOperatorModel signature_normal_form(const CrossSection& cs) {
  if ((cs.dim() + 1) % 4 != 0)
    throw std::invalid_argument("signature_normal_form: total dimension must be a multiple of 4");
  GeometricOperatorModel m;
  m.kind = OperatorKind::Signature;
  m.section = std::make_shared<CrossSection>(cs);
  return m;
}

inline GeometricOperatorModel dirac_normal_form(const CrossSection& cs,
                                                SpinStructure spin) {
  if ((cs.dim() + 1) % 2 != 0)
    throw std::invalid_argument("dirac_normal_form: total dimension must be even");
  GeometricOperatorModel m;
  m.kind = OperatorKind::Dirac;
  m.spin = spin;
  m.section = std::make_shared<CrossSection>(cs);
  return m;
}

struct BlockAssemblyReport {
  bool pass = false;
  std::vector<std::string> mismatches;
};

// Consistency of the signature blocks against the raw form spectrum:
// every 2x2 diagonal entry must equal the degree coefficient n/2 - degree,
// off parts must square to lambda, and block dimensions must exhaust the
// eigenspaces.  Harmonic forms stay outside the blocks.
inline BlockAssemblyReport verify_block_assembly(const GeometricOperatorModel& m,
                                                 double lambda_max) {
  BlockAssemblyReport rep;
  const int n = m.n();
  auto blocks = m.blocks(lambda_max);
  auto spec = m.section->form_spectrum(lambda_max);
  for (const auto& b : blocks) {
    if (b.l <= 4) {
      double want1 = signature_degree_coefficient(b.degrees[0], n);
      double want2 = signature_degree_coefficient(b.degrees[1], n);
      if (b.diag1 != want1 || b.diag2 != want2)
        rep.mismatches.push_back("block l" + std::to_string(b.l) +
                                 " diagonal vs degree coefficient");
      if (std::fabs(b.off * b.off - b.lambda) > 1e-9 * std::max(1.0, b.lambda))
        rep.mismatches.push_back("block l" + std::to_string(b.l) + " off part");
    } else {
      double want = signature_degree_coefficient(b.degrees[0], n);
      if (b.diag1 != want)
        rep.mismatches.push_back("block l" + std::to_string(b.l) +
                                 " scalar coefficient vs degree coefficient");
    }
  }
  // dimension audit per lambda
  std::vector<double> lams;
  for (const auto& e : spec)
    if (lams.empty() || e.lambda > lams.back() + 1e-12) lams.push_back(e.lambda);
  for (double lam : lams) {
    long long total = 0;
    for (const auto& e : spec)
      if (std::fabs(e.lambda - lam) < 1e-12) total += e.mult;
    long long covered = 0;
    for (const auto& b : blocks)
      if (std::fabs(b.lambda - lam) < 1e-12)
        covered += (b.l <= 4 ? 2LL : 1LL) * b.mult;
    if (total != covered)
      rep.mismatches.push_back("dimension audit at lambda=" + std::to_string(lam));
  }
  rep.pass = rep.mismatches.empty();
  return rep;
}

}  // namespace hornindex
