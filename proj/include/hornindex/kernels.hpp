#pragma once

// Volterra solution operators for the first-order channel problems
//   (d/dx + s F) u = f   on (0, eps),
// integrating either from 0 or from the outer end.  Kernels are evaluated
// through the coefficient's closed-form primitive, so k(x,y) costs one exp.
// Also the numeric checks for the three operator-norm estimates the rest of
// the library leans on (labelled mls1 / schur / normp on the CLI).

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "hornindex/quadrature.hpp"
#include "hornindex/warp.hpp"

namespace hornindex {

enum class Branch { FromZero, FromOne };

inline double default_grading(double beta) {
  if (beta <= 1.0) return 2.0;
  return std::max(2.0, std::min(12.0, 2.0 / (beta - 1.0)));
}

class KernelOperator {
 public:
  KernelOperator(Branch branch, double s, ChannelCoefficient coeff, double eps,
                 std::size_t mesh_cells = 256, double grading = 0.0,
                 int order = 8)
      : branch_(branch), s_(s), coeff_(std::move(coeff)), eps_(eps),
        grading_(grading > 0.0 ? grading : 2.0),
        quad_(GradedMesh(mesh_cells, grading_, eps), order) {
    if (!(eps > 0.0) || !(eps <= 1.0))
      throw std::invalid_argument("KernelOperator: eps must lie in (0,1]");
    if (branch_ == Branch::FromZero) {
      // mass at the inner end must be square integrable
      if (coeff_.kind == CoeffKind::HornRatio && s_ * coeff_.sing_c <= -0.5)
        throw std::invalid_argument(
            "KernelOperator: from-zero branch diverges, need s * c > -1/2");
      if (coeff_.kind == CoeffKind::Inverse && s_ < 0.0)
        throw std::invalid_argument(
            "KernelOperator: from-zero branch with 1/h coefficient needs s >= 0");
    }
  }

  Branch branch() const { return branch_; }
  double s() const { return s_; }
  double eps() const { return eps_; }
  const ChannelCoefficient& coefficient() const { return coeff_; }
  const CompositeQuad& quad() const { return quad_; }

  // exp(-s integral_y^x F); zero outside the branch's triangle.
  double kernel(double x, double y) const {
    if (x <= 0.0 || y <= 0.0) return 0.0;
    if (branch_ == Branch::FromZero) {
      if (!(y <= x && x <= eps_)) return 0.0;
    } else {
      if (!(x <= y)) return 0.0;
    }
    double e = -s_ * coeff_.integral(y, x);
    return std::exp(std::clamp(e, -700.0, 700.0));
  }

  // From zero: u(x) = integral_0^x k(x,y) f(y) dy.
  // From one:  u(x) = -integral_x^eps k(x,y) f(y) dy  (f vanishes past eps).
  template <class F>
  double apply(F&& f, double x) const {
    if (branch_ == Branch::FromZero) {
      if (x <= 0.0) return 0.0;
      auto g = [&](double y) { return kernel(x, y) * f(y); };
      if (x >= eps_ && x > quad_.mesh().length) {
        double acc = quad_.integrate(g);
        return acc + gl_integrate(g, quad_.mesh().length, x, quad_.order());
      }
      return quad_.integrate_upto(x, g);
    }
    if (x >= eps_) return 0.0;
    auto g = [&](double y) { return kernel(x, y) * f(y); };
    return -quad_.integrate_from(std::max(x, 0.0), g);
  }

  // Values at the mesh nodes x_1..x_N via the semigroup recursion; one short
  // Gauss pass per cell, no error accumulation in the transported part.
  template <class F>
  std::vector<double> apply_at_nodes(F&& f) const {
    const auto& m = quad_.mesh();
    const std::size_t n = m.cells;
    std::vector<double> u(n, 0.0);
    if (branch_ == Branch::FromZero) {
      double x1 = m.node(1);
      u[0] = gl_integrate([&](double y) { return kernel(x1, y) * f(y); }, 0.0,
                          x1, quad_.order());
      for (std::size_t i = 1; i < n; ++i) {
        double a = m.node(i), b = m.node(i + 1);
        double dg = coeff_.integral(a, b);
        double cell = gl_integrate([&](double y) { return kernel(b, y) * f(y); },
                                   a, b, quad_.order());
        u[i] = std::exp(std::clamp(-s_ * dg, -700.0, 700.0)) * u[i - 1] + cell;
      }
    } else {
      u[n - 1] = 0.0;  // node(n) == eps
      for (std::size_t i = n - 1; i-- > 0;) {
        double a = m.node(i + 1), b = m.node(i + 2);
        double dg = coeff_.integral(a, b);
        double cell = gl_integrate([&](double y) { return kernel(a, y) * f(y); },
                                   a, b, quad_.order());
        u[i] = std::exp(std::clamp(s_ * dg, -700.0, 700.0)) * u[i + 1] - cell;
      }
    }
    return u;
  }

  // Hilbert-Schmidt norm: sqrt of the double integral of k^2 over the triangle.
  double hs_norm() const {
    double acc = 0.0;
    if (branch_ == Branch::FromZero) {
      acc = quad_.integrate([&](double x) {
        return quad_.integrate_upto(x, [&](double y) {
          double k = kernel(x, y);
          return k * k;
        });
      });
    } else {
      acc = quad_.integrate([&](double x) {
        return quad_.integrate_from(x, [&](double y) {
          double k = kernel(x, y);
          return k * k;
        });
      });
    }
    return std::sqrt(std::max(acc, 0.0));
  }

  // Largest singular value of the discretized operator, optionally with
  // monomial weights x^row_gb on the output and y^col_gb on the input side.
  double op_norm_estimate(double row_gb = 0.0, double col_gb = 0.0,
                          std::size_t cells = 96, int order = 4) const {
    CompositeQuad q(GradedMesh(cells, grading_, eps_), order);
    const auto& xs = q.points();
    const auto& ws = q.weights();
    const std::size_t n = xs.size();
    std::vector<double> B(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      double rw = std::sqrt(ws[i]) * (row_gb != 0.0 ? std::pow(xs[i], row_gb) : 1.0);
      for (std::size_t j = 0; j < n; ++j) {
        double tri;
        if (branch_ == Branch::FromZero)
          tri = j < i ? 1.0 : (j == i ? 0.5 : 0.0);
        else
          tri = j > i ? 1.0 : (j == i ? 0.5 : 0.0);
        if (tri == 0.0) continue;
        double cw = std::sqrt(ws[j]) * (col_gb != 0.0 ? std::pow(xs[j], col_gb) : 1.0);
        double e = -s_ * coeff_.integral(xs[j], xs[i]);
        B[i * n + j] = rw * std::exp(std::clamp(e, -700.0, 700.0)) * cw * tri;
      }
    }
    std::vector<double> v(n, 1.0 / std::sqrt(double(n))), bv(n), btbv(n);
    double sigma = 0.0;
    for (int it = 0; it < 2000; ++it) {
      for (std::size_t i = 0; i < n; ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < n; ++j) acc += B[i * n + j] * v[j];
        bv[i] = acc;
      }
      for (std::size_t j = 0; j < n; ++j) {
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i) acc += B[i * n + j] * bv[i];
        btbv[j] = acc;
      }
      double lam = 0.0, nrm = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        lam += v[j] * btbv[j];
        nrm += btbv[j] * btbv[j];
      }
      nrm = std::sqrt(nrm);
      if (nrm == 0.0) return 0.0;
      for (std::size_t j = 0; j < n; ++j) v[j] = btbv[j] / nrm;
      double snew = std::sqrt(std::max(lam, 0.0));
      if (it > 4 && std::fabs(snew - sigma) <= 1e-8 * std::max(snew, 1e-300))
        return snew;
      sigma = snew;
    }
    return sigma;
  }

 private:
  Branch branch_;
  double s_;
  ChannelCoefficient coeff_;
  double eps_;
  double grading_;
  CompositeQuad quad_;
};

// ---------------------------------------------------------------------------
// Test-function families and identity checks

struct TestFunction {
  std::string name;
  std::function<double(double)> f;
  std::function<double(double)> fprime;
  bool compact_support = false;  // support strictly inside (0, eps)
};

// Unit L2(0, eps) norm throughout.
inline std::vector<TestFunction> test_function_family(double eps,
                                                      int sine_count = 8) {
  CompositeQuad q(GradedMesh(512, 2.0, eps), 8);
  auto normalized = [&](std::function<double(double)> f,
                        std::function<double(double)> fp, std::string name,
                        bool compact) {
    double n2 = q.integrate([&](double x) { return f(x) * f(x); });
    double c = 1.0 / std::sqrt(n2);
    return TestFunction{std::move(name),
                        [f, c](double x) { return c * f(x); },
                        [fp, c](double x) { return c * fp(x); }, compact};
  };
  std::vector<TestFunction> out;
  out.push_back(normalized([](double) { return 1.0; },
                           [](double) { return 0.0; }, "const", false));
  out.push_back(normalized([](double x) { return x; },
                           [](double) { return 1.0; }, "linear", false));
  for (int k = 1; k <= sine_count; ++k) {
    double w = double(k) * M_PI / eps;
    out.push_back(normalized([w](double x) { return std::sin(w * x); },
                             [w](double x) { return w * std::cos(w * x); },
                             "sin" + std::to_string(k), false));
  }
  // bump centered at eps/2, support [eps/4, 3 eps/4]
  double c0 = eps / 2.0, r = eps / 4.0;
  auto bump = [c0, r](double x) {
    double t = (x - c0) / r;
    if (std::fabs(t) >= 1.0) return 0.0;
    return std::exp(-1.0 / (1.0 - t * t));
  };
  auto bumpp = [c0, r, bump](double x) {
    double t = (x - c0) / r;
    if (std::fabs(t) >= 1.0) return 0.0;
    double d = 1.0 - t * t;
    return bump(x) * (-2.0 * t / (d * d)) / r;
  };
  out.push_back(normalized(bump, bumpp, "bump", true));
  return out;
}

struct InverseIdentityResult {
  double right_residual = 0.0;  // (d/dx + sF) K f  vs  f, sup-rel at nodes
  double left_residual = 0.0;   // K (f' + sF f)    vs  f, sup-rel at samples
};

// K is a two-sided inverse of d/dx + sF on suitable functions.  The right
// check differentiates K f with a five-point nonuniform stencil (exact on
// quartics, three-point at the ends); the left check needs f compactly
// supported inside (0, eps).
// Residuals are taken over [0.02 eps, eps]: for 1/h coefficients the kernel
// concentrates on a layer of width h(x)/s, which outruns any fixed mesh as
// x -> 0; the tip itself is covered by the decay and pointwise-bound checks.
inline InverseIdentityResult verify_inverse_identity(const KernelOperator& K,
                                                     const TestFunction& tf) {
  InverseIdentityResult res;
  const auto& m = K.quad().mesh();
  const std::size_t n = m.cells;
  std::vector<double> u = K.apply_at_nodes(tf.f);
  double fsup = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    fsup = std::max(fsup, std::fabs(tf.f(m.node(i + 1))));
  if (fsup == 0.0) fsup = 1.0;
  // derivative of the lagrange interpolant through the given nodes, at xs[k]
  auto lagrange_d = [](const double* xs, const double* us, int len, int k) {
    double d = 0.0;
    for (int j = 0; j < len; ++j) {
      if (j == k) {
        double acc = 0.0;
        for (int q = 0; q < len; ++q)
          if (q != k) acc += 1.0 / (xs[k] - xs[q]);
        d += us[k] * acc;
      } else {
        double num = 1.0, den = 1.0;
        for (int q = 0; q < len; ++q) {
          if (q == j) continue;
          if (q != k) num *= xs[k] - xs[q];
          den *= xs[j] - xs[q];
        }
        d += us[j] * num / den;
      }
    }
    return d;
  };
  double worst = 0.0;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (m.node(i + 1) < 0.02 * K.eps()) continue;
    double du;
    if (i >= 2 && i + 2 < n) {
      double xs[5], us[5];
      for (int j = 0; j < 5; ++j) {
        xs[j] = m.node(i - 1 + j);
        us[j] = u[i - 2 + j];
      }
      du = lagrange_d(xs, us, 5, 2);
    } else {
      double xs[3] = {m.node(i), m.node(i + 1), m.node(i + 2)};
      double us[3] = {u[i - 1], u[i], u[i + 1]};
      du = lagrange_d(xs, us, 3, 1);
    }
    double x0 = m.node(i + 1);
    double resid = du + K.s() * K.coefficient().eval(x0) * u[i] - tf.f(x0);
    worst = std::max(worst, std::fabs(resid));
  }
  res.right_residual = worst / fsup;
  if (tf.compact_support) {
    auto g = [&](double y) {
      return tf.fprime(y) + K.s() * K.coefficient().eval(y) * tf.f(y);
    };
    double worst2 = 0.0;
    for (int i = 0; i < 33; ++i) {
      double x = K.eps() * (0.02 + 0.96 * double(i) / 32.0);
      worst2 = std::max(worst2, std::fabs(K.apply(g, x) - tf.f(x)));
    }
    res.left_residual = worst2 / fsup;
  }
  return res;
}

// integral of (K f)(x) g(x) over (0, eps) with K's own composite rule.  K f is
// continued from the stored node values by one transport step plus a short
// Gauss pass, so the cost stays linear in the mesh size.
inline double pairing_integral(const KernelOperator& K,
                               const std::function<double(double)>& f,
                               const std::function<double(double)>& g) {
  const auto& m = K.quad().mesh();
  const int order = K.quad().order();
  const std::size_t n = m.cells;
  std::vector<double> u = K.apply_at_nodes(f);
  double acc = 0.0;
  if (K.branch() == Branch::FromZero) {
    for (std::size_t i = 0; i < n; ++i) {
      double a = m.node(i), b = m.node(i + 1);
      double ua = i == 0 ? 0.0 : u[i - 1];
      acc += gl_integrate(
          [&](double x) {
            double d = K.coefficient().integral(a, x);
            double ux = std::exp(std::clamp(-K.s() * d, -700.0, 700.0)) * ua +
                        gl_integrate(
                            [&](double y) { return K.kernel(x, y) * f(y); }, a,
                            x, order);
            return ux * g(x);
          },
          a, b, order);
    }
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      double a = m.node(i), b = m.node(i + 1);
      double ub = u[i];
      acc += gl_integrate(
          [&](double x) {
            double d = K.coefficient().integral(x, b);
            double ux = std::exp(std::clamp(K.s() * d, -700.0, 700.0)) * ub -
                        gl_integrate(
                            [&](double y) { return K.kernel(x, y) * f(y); }, x,
                            b, order);
            return ux * g(x);
          },
          a, b, order);
    }
  }
  return acc;
}

// <P0 f, g> + <f, P1m g> where P1m was built with the negated parameter.
// Vanishes when the two operators are adjoint up to sign.
inline double adjoint_pair_residual(const KernelOperator& P0,
                                    const KernelOperator& P1m,
                                    const std::function<double(double)>& f,
                                    const std::function<double(double)>& g) {
  return pairing_integral(P0, f, g) + pairing_integral(P1m, g, f);
}

// ---------------------------------------------------------------------------
// Operator-bound checks

struct BoundSample {
  std::string lemma;
  double s = 0.0, x = 0.0, gb = 0.0;
  double lhs = 0.0, rhs = 0.0;
  double margin = 0.0;  // (rhs - lhs) / rhs
};

struct BoundCheckReport {
  std::string lemma;
  std::vector<BoundSample> samples;
  std::size_t violations = 0;
  bool pass = false;
  double worst_margin = std::numeric_limits<double>::infinity();
  double fitted_constant = 0.0;
  double fitted_slope = 0.0;
};

inline void finish_report(BoundCheckReport& rep, double slack = 1e-8) {
  rep.violations = 0;
  rep.worst_margin = std::numeric_limits<double>::infinity();
  for (const auto& smp : rep.samples) {
    rep.worst_margin = std::min(rep.worst_margin, smp.margin);
    if (smp.margin < -slack) ++rep.violations;
  }
  rep.pass = rep.violations == 0;
}

// Pointwise bound |u(x)| <= sqrt(h(x) / (2s)) for u = (from-zero, 1/h) applied
// to unit-norm data, s > 0.
inline BoundCheckReport check_mls1_bounds(const WarpProfile& p, double eps,
                                          const std::vector<double>& svals,
                                          std::size_t x_count = 12,
                                          std::size_t mesh_cells = 256) {
  BoundCheckReport rep;
  rep.lemma = "mls1";
  ChannelCoefficient c = coefficient(p, CoeffKind::Inverse);
  auto fam = test_function_family(eps, 4);
  for (double s : svals) {
    if (!(s > 0.0))
      throw std::invalid_argument("check_mls1_bounds: needs s > 0");
    KernelOperator K(Branch::FromZero, s, c, eps, mesh_cells,
                     default_grading(p.gamma()));
    for (const auto& tf : fam) {
      for (std::size_t ix = 0; ix < x_count; ++ix) {
        double x = eps * std::pow(10.0, -3.0 + 3.0 * double(ix) / double(x_count - 1));
        double lhs = std::fabs(K.apply(tf.f, x));
        double rhs = std::sqrt(p.h(x) / (2.0 * s));
        rep.samples.push_back({rep.lemma, s, x, 0.0, lhs, rhs,
                               (rhs - lhs) / std::max(rhs, 1e-300)});
      }
    }
  }
  finish_report(rep);
  return rep;
}

struct DecayFitReport {
  double fitted_constant = 0.0;  // max over samples of lhs / (x^{g/2} / sqrt|s|)
  double fitted_slope = 0.0;     // log-log slope of sup_f |u(x)| over last decade
  double slope_floor = 0.0;      // gamma / 2
  bool slope_pass = false;
};

// Negative-parameter counterpart: outputs of the from-one branch decay at
// least like x^{gamma/2}.  The constant is reported, only the slope asserted.
inline DecayFitReport check_mls1_decay_fit(const WarpProfile& p, double eps,
                                           const std::vector<double>& svals,
                                           std::size_t mesh_cells = 256) {
  DecayFitReport rep;
  rep.slope_floor = 0.5 * p.gamma();
  ChannelCoefficient c = coefficient(p, CoeffKind::Inverse);
  auto fam = test_function_family(eps, 4);
  std::vector<double> lx, ly;
  for (double s : svals) {
    if (!(s < 0.0))
      throw std::invalid_argument("check_mls1_decay_fit: needs s < 0");
    KernelOperator K(Branch::FromOne, s, c, eps, mesh_cells,
                     default_grading(p.gamma()));
    for (int ix = 0; ix < 16; ++ix) {
      double x = eps * std::pow(10.0, -2.0 + 1.6 * double(ix) / 15.0);
      double sup = 0.0;
      for (const auto& tf : fam) sup = std::max(sup, std::fabs(K.apply(tf.f, x)));
      if (sup > 0.0) {
        rep.fitted_constant = std::max(
            rep.fitted_constant,
            sup / (std::pow(x, rep.slope_floor) / std::sqrt(-s)));
        if (x <= 0.1 * eps) {
          lx.push_back(std::log(x));
          ly.push_back(std::log(sup));
        }
      }
    }
  }
  // least-squares slope over the collected decade
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
    rep.fitted_slope = num / den;
  }
  rep.slope_pass = rep.fitted_slope >= rep.slope_floor - 0.1;
  return rep;
}

// Weighted norm bounds, one sample per (s, gb, side):
//   ||x^gb (from-zero, 1/h)|| and ||(from-one, -s, 1/h) x^gb||  <=  eps^{g+gb}/s.
inline BoundCheckReport check_schur_bounds(const WarpProfile& p, double eps,
                                           const std::vector<double>& svals,
                                           const std::vector<double>& gbs = {0.0, 1.0, 2.0}) {
  BoundCheckReport rep;
  rep.lemma = "schur";
  ChannelCoefficient c = coefficient(p, CoeffKind::Inverse);
  for (double s : svals) {
    if (!(s > 0.0))
      throw std::invalid_argument("check_schur_bounds: needs s > 0");
    for (double gb : gbs) {
      double rhs = std::pow(eps, p.gamma() + gb) / s;
      KernelOperator K0(Branch::FromZero, s, c, eps, 96,
                        default_grading(p.gamma()));
      double t0 = K0.op_norm_estimate(gb, 0.0);
      rep.samples.push_back({rep.lemma, s, 0.0, gb, t0, rhs,
                             (rhs - t0) / std::max(rhs, 1e-300)});
      KernelOperator K1(Branch::FromOne, -s, c, eps, 96,
                        default_grading(p.gamma()));
      double t1 = K1.op_norm_estimate(0.0, gb);
      rep.samples.push_back({rep.lemma, -s, 0.0, gb, t1, rhs,
                             (rhs - t1) / std::max(rhs, 1e-300)});
    }
  }
  finish_report(rep);
  return rep;
}

// ||P_{j,s}|| <= C0 / |s| whenever F >= 1/C0 on (0, eps] and the parameter
// sign matches the branch (positive from zero, negative from one).
inline BoundCheckReport check_normp_bound(const ChannelCoefficient& c,
                                          Branch branch, double eps,
                                          const std::vector<double>& svals,
                                          double grading = 2.0) {
  BoundCheckReport rep;
  rep.lemma = "normp";
  // lower bound of F over the operator's own interval
  double fmin = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 2048; ++i) {
    double x = eps * std::pow(10.0, -8.0 + 8.0 * double(i) / 2047.0);
    fmin = std::min(fmin, c.eval(x));
  }
  if (!(fmin > 0.0))
    throw std::invalid_argument("check_normp_bound: F not positive on (0,eps]");
  double C0 = 1.0 / fmin;
  rep.fitted_constant = C0;
  for (double s : svals) {
    bool sign_ok = branch == Branch::FromZero ? s > 0.0 : s < 0.0;
    if (!sign_ok)
      throw std::invalid_argument("check_normp_bound: parameter sign mismatch");
    KernelOperator K(branch, s, c, eps, 96, grading);
    double lhs = K.op_norm_estimate();
    double rhs = C0 / std::fabs(s);
    rep.samples.push_back({rep.lemma, s, 0.0, 0.0, lhs, rhs,
                           (rhs - lhs) / std::max(rhs, 1e-300)});
  }
  finish_report(rep);
  return rep;
}

}  // namespace hornindex
