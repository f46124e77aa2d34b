#pragma once

// Warp profiles h on (0, 1]: pure powers x^beta and "power horns" that are
// x^beta near 0 and exactly x near 1, joined by a C1 cubic Hermite blend.
// Also the two channel coefficient families driven by a profile,
//   F = h'/h   and   F = 1/h,
// each carrying a closed-form primitive so kernels never need nested
// quadrature, and the one-parameter interpolation family between two horns.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "hornindex/quadrature.hpp"

namespace hornindex {

// Cumulative table for mu(x) = integral_x^1 dy/h(y) over [lo, 1].
// Geometric segments, one GL8 per segment; queries do one partial pass.
class MuTable {
 public:
  MuTable() = default;

  MuTable(std::function<double(double)> hinv, double lo, std::size_t segs = 64)
      : hinv_(std::move(hinv)), lo_(lo) {
    if (!(lo > 0.0) || !(lo < 1.0))
      throw std::invalid_argument("MuTable: lo must lie in (0,1)");
    edges_.resize(segs + 1);
    for (std::size_t i = 0; i <= segs; ++i)
      edges_[i] = lo * std::pow(1.0 / lo, double(i) / double(segs));
    edges_.back() = 1.0;
    cum_.assign(segs + 1, 0.0);
    for (std::size_t i = segs; i-- > 0;)
      cum_[i] = cum_[i + 1] + gl_integrate(hinv_, edges_[i], edges_[i + 1], 8);
  }

  bool empty() const { return edges_.empty(); }
  double lo() const { return lo_; }

  double at(double x) const {
    if (x >= 1.0) return 0.0;
    if (x < lo_) throw std::invalid_argument("MuTable: query below table range");
    auto it = std::upper_bound(edges_.begin(), edges_.end(), x);
    std::size_t i = (it == edges_.begin()) ? 0 : std::size_t(it - edges_.begin()) - 1;
    if (i + 1 >= edges_.size()) i = edges_.size() - 2;
    return cum_[i + 1] + gl_integrate(hinv_, x, edges_[i + 1], 8);
  }

 private:
  std::function<double(double)> hinv_;
  double lo_ = 0.0;
  std::vector<double> edges_;
  std::vector<double> cum_;
};

enum class WarpKind { PurePower, PowerHorn };

// h on (0, 1].  PurePower: h = x^beta throughout.  PowerHorn: x^beta on
// (0, eps0], cubic Hermite on [eps0, eps1], identity on [eps1, 1].
// The blend matches value and slope at both joints, so h is C1; construction
// rejects parameter combinations where the cubic loses monotonicity.
class WarpProfile {
 public:
  static WarpProfile pure_power(double beta, bool cone = false) {
    check_beta(beta, cone);
    WarpProfile p;
    p.kind_ = WarpKind::PurePower;
    p.beta_ = beta;
    return p;
  }

  // eps0 < eps1 <= eps <= 1 with eps1 defaulting to the midpoint of [eps0, eps].
  static WarpProfile power_horn(double alpha, double eps0, double eps,
                                double eps1 = -1.0, bool cone = false) {
    check_beta(alpha, cone);
    if (eps1 < 0.0) eps1 = 0.5 * (eps0 + eps);
    if (!(eps0 > 0.0) || !(eps0 < eps1) || !(eps1 <= eps) || !(eps <= 1.0))
      throw std::invalid_argument("power_horn: need 0 < eps0 < eps1 <= eps <= 1");
    WarpProfile p;
    p.kind_ = WarpKind::PowerHorn;
    p.beta_ = alpha;
    p.eps0_ = eps0;
    p.eps1_ = eps1;
    p.hv0_ = std::pow(eps0, alpha);
    p.hd0_ = alpha * std::pow(eps0, alpha - 1.0);
    // slope check across [eps0, eps1]
    for (int i = 0; i <= 256; ++i) {
      double x = eps0 + (eps1 - eps0) * double(i) / 256.0;
      if (!(p.hprime(x) > 0.0))
        throw std::invalid_argument("power_horn: blend not monotone; widen [eps0, eps1]");
    }
    p.mu_table_ = std::make_shared<MuTable>(
        [p](double y) { return 1.0 / p.h(y); }, eps0, 96);
    return p;
  }

  WarpKind kind() const { return kind_; }
  double gamma() const { return beta_; }
  double eps0() const { return eps0_; }
  double eps1() const { return eps1_; }

  // Interior breakpoints where h is only C1, for piecewise quadrature.
  std::vector<double> breakpoints() const {
    if (kind_ == WarpKind::PurePower) return {};
    return {eps0_, eps1_};
  }

  double h(double x) const {
    if (kind_ == WarpKind::PurePower || x <= eps0_) return std::pow(x, beta_);
    if (x >= eps1_) return x;
    return hermite(x).v;
  }

  double hprime(double x) const {
    if (kind_ == WarpKind::PurePower || x <= eps0_)
      return beta_ * std::pow(x, beta_ - 1.0);
    if (x >= eps1_) return 1.0;
    return hermite(x).d;
  }

  double hsecond(double x) const {
    if (kind_ == WarpKind::PurePower || x <= eps0_)
      return beta_ * (beta_ - 1.0) * std::pow(x, beta_ - 2.0);
    if (x >= eps1_) return 0.0;
    return hermite(x).dd;
  }

  double log_h(double x) const {
    if (kind_ == WarpKind::PurePower || x <= eps0_) return beta_ * std::log(x);
    return std::log(h(x));
  }

  // mu(x) = integral_x^1 dy/h.  Closed form on the pure-power range, cached
  // table across the blend and tail.
  double mu(double x) const {
    if (kind_ == WarpKind::PurePower) return mu_power(x, 1.0);
    if (x >= eps0_) return mu_table_->at(x);
    return mu_table_->at(eps0_) + mu_power(x, eps0_);
  }

  // lim_{x->0+} h'(x): 1 for the cone slope, 0 for every steeper power.
  double hprime_at_zero_limit() const { return beta_ == 1.0 ? 1.0 : 0.0; }

 private:
  static void check_beta(double beta, bool cone) {
    if (cone) {
      if (!(beta >= 1.0))
        throw std::invalid_argument("warp: cone profiles need beta >= 1");
    } else if (!(beta > 1.0)) {
      throw std::invalid_argument("warp: beta must exceed 1 (pass cone=true for beta = 1)");
    }
  }

  // integral_x^b y^-beta dy
  double mu_power(double x, double b) const {
    if (beta_ == 1.0) return std::log(b / x);
    return (std::pow(x, 1.0 - beta_) - std::pow(b, 1.0 - beta_)) / (beta_ - 1.0);
  }

  struct HermiteEval {
    double v, d, dd;
  };
  HermiteEval hermite(double x) const {
    const double w = eps1_ - eps0_;
    const double t = (x - eps0_) / w;
    const double t2 = t * t, t3 = t2 * t;
    const double b00 = 2 * t3 - 3 * t2 + 1, b10 = t3 - 2 * t2 + t;
    const double b01 = -2 * t3 + 3 * t2, b11 = t3 - t2;
    const double d00 = 6 * t2 - 6 * t, d10 = 3 * t2 - 4 * t + 1;
    const double d01 = -6 * t2 + 6 * t, d11 = 3 * t2 - 2 * t;
    const double s00 = 12 * t - 6, s10 = 6 * t - 4;
    const double s01 = -12 * t + 6, s11 = 6 * t - 2;
    const double v1 = eps1_, d1 = 1.0;
    HermiteEval e;
    e.v = b00 * hv0_ + b10 * w * hd0_ + b01 * v1 + b11 * w * d1;
    e.d = (d00 * hv0_ + d10 * w * hd0_ + d01 * v1 + d11 * w * d1) / w;
    e.dd = (s00 * hv0_ + s10 * w * hd0_ + s01 * v1 + s11 * w * d1) / (w * w);
    return e;
  }

  WarpKind kind_ = WarpKind::PurePower;
  double beta_ = 2.0;
  double eps0_ = 0.0, eps1_ = 0.0;
  double hv0_ = 0.0, hd0_ = 0.0;
  std::shared_ptr<MuTable> mu_table_;
};

enum class CoeffKind { HornRatio, Inverse, Custom };

// A first-order channel coefficient F together with its exact primitive.
// lower_bound_C is the smallest C found with F >= 1/C on (0, 1]; sing_c the
// smallest value of x*F(x) seen, so F >= sing_c / x holds on the scan grid.
struct ChannelCoefficient {
  CoeffKind kind = CoeffKind::Custom;
  double lower_bound_C = 0.0;
  double sing_c = 0.0;
  std::function<double(double)> eval;
  // integral(y, x) = integral_y^x F(t) dt, either order of arguments
  std::function<double(double, double)> integral;
};

namespace detail {
inline std::pair<double, double> scan_coefficient_bounds(
    const std::function<double(double)>& f, std::size_t grid = 2048) {
  double fmin = std::numeric_limits<double>::infinity();
  double xfmin = fmin;
  for (std::size_t i = 0; i < grid; ++i) {
    // log-spaced over [1e-8, 1]
    double x = std::pow(10.0, -8.0 + 8.0 * double(i) / double(grid - 1));
    double v = f(x);
    fmin = std::min(fmin, v);
    xfmin = std::min(xfmin, x * v);
  }
  return {fmin, xfmin};
}
}  // namespace detail

inline ChannelCoefficient coefficient(const WarpProfile& p, CoeffKind kind) {
  ChannelCoefficient c;
  c.kind = kind;
  switch (kind) {
    case CoeffKind::HornRatio:
      c.eval = [p](double x) { return p.hprime(x) / p.h(x); };
      c.integral = [p](double y, double x) { return p.log_h(x) - p.log_h(y); };
      break;
    case CoeffKind::Inverse:
      c.eval = [p](double x) { return 1.0 / p.h(x); };
      c.integral = [p](double y, double x) { return p.mu(y) - p.mu(x); };
      break;
    case CoeffKind::Custom:
      throw std::invalid_argument("coefficient: use custom_coefficient for Custom");
  }
  auto [fmin, xfmin] = detail::scan_coefficient_bounds(c.eval);
  if (!(fmin > 0.0))
    throw std::invalid_argument("coefficient: F must be positive on (0,1]");
  c.lower_bound_C = 1.0 / fmin;
  c.sing_c = xfmin;
  return c;
}

inline ChannelCoefficient custom_coefficient(
    std::function<double(double)> eval,
    std::function<double(double, double)> integral) {
  ChannelCoefficient c;
  c.kind = CoeffKind::Custom;
  c.eval = std::move(eval);
  c.integral = std::move(integral);
  auto [fmin, xfmin] = detail::scan_coefficient_bounds(c.eval);
  c.lower_bound_C = fmin > 0.0 ? 1.0 / fmin : std::numeric_limits<double>::infinity();
  c.sing_c = xfmin;
  return c;
}

// One member h_beta of the interpolation family below.  Owns its mu table.
class FamilyMember {
 public:
  FamilyMember(double beta, double a, double eps_tilde, double eps0,
               WarpProfile h1, WarpProfile h2)
      : beta_(beta), a_(a), et_(eps_tilde), e0_(eps0),
        h1_(std::move(h1)), h2_(std::move(h2)) {
    for (int i = 1; i <= 256; ++i) {
      double x = double(i) / 256.0;
      if (!(hprime(x) > 0.0))
        throw std::runtime_error("family member lost monotonicity at beta=" +
                                 std::to_string(beta));
    }
    mu_table_ = std::make_shared<MuTable>(
        [this](double y) { return 1.0 / h(y); }, et_, 96);
  }

  double beta() const { return beta_; }

  double h(double x) const {
    if (x <= et_) return std::pow(x, beta_);
    if (x >= e0_) return mix(x);
    const double p = phi(x);
    return p * std::pow(x, beta_) + (1.0 - p) * mix(x);
  }

  double hprime(double x) const {
    if (x <= et_) return beta_ * std::pow(x, beta_ - 1.0);
    if (x >= e0_) return mixp(x);
    const double p = phi(x), dp = phiprime(x);
    return dp * (std::pow(x, beta_) - mix(x)) +
           p * (beta_ * std::pow(x, beta_ - 1.0) - mixp(x)) + mixp(x);
  }

  double log_h(double x) const {
    if (x <= et_) return beta_ * std::log(x);
    return std::log(h(x));
  }

  double mu(double x) const {
    if (x >= et_) return mu_table_->at(x);
    double base = mu_table_->at(et_);
    if (beta_ == 1.0) return base + std::log(et_ / x);
    return base + (std::pow(x, 1.0 - beta_) - std::pow(et_, 1.0 - beta_)) /
                      (beta_ - 1.0);
  }

  ChannelCoefficient coefficient(CoeffKind kind) const {
    if (kind == CoeffKind::HornRatio) {
      FamilyMember self = *this;
      ChannelCoefficient c;
      c.kind = kind;
      c.eval = [self](double x) { return self.hprime(x) / self.h(x); };
      c.integral = [self](double y, double x) { return self.log_h(x) - self.log_h(y); };
      auto [fmin, xfmin] = detail::scan_coefficient_bounds(c.eval);
      c.lower_bound_C = 1.0 / fmin;
      c.sing_c = xfmin;
      return c;
    }
    if (kind == CoeffKind::Inverse) {
      FamilyMember self = *this;
      ChannelCoefficient c;
      c.kind = kind;
      c.eval = [self](double x) { return 1.0 / self.h(x); };
      c.integral = [self](double y, double x) { return self.mu(y) - self.mu(x); };
      auto [fmin, xfmin] = detail::scan_coefficient_bounds(c.eval);
      c.lower_bound_C = 1.0 / fmin;
      c.sing_c = xfmin;
      return c;
    }
    throw std::invalid_argument("FamilyMember::coefficient: HornRatio or Inverse only");
  }

 private:
  // phi = 1 below eps_tilde, 0 above eps0, complementary smoothstep between;
  // phi' vanishes at both joints so h_beta stays C1.
  double phi(double x) const {
    const double t = (x - et_) / (e0_ - et_);
    return 1.0 - (3.0 * t * t - 2.0 * t * t * t);
  }
  double phiprime(double x) const {
    const double w = e0_ - et_;
    const double t = (x - et_) / w;
    return -(6.0 * t - 6.0 * t * t) / w;
  }
  double mix(double x) const { return a_ * h1_.h(x) + (1.0 - a_) * h2_.h(x); }
  double mixp(double x) const {
    return a_ * h1_.hprime(x) + (1.0 - a_) * h2_.hprime(x);
  }

  double beta_, a_, et_, e0_;
  WarpProfile h1_, h2_;
  std::shared_ptr<MuTable> mu_table_;
};

// Interpolation between two power horns with identical blend breakpoints.
// h_beta = phi * x^beta + (1 - phi) * (a_beta h1 + (1 - a_beta) h2), with
// a_beta fixed so the two pieces agree in value where phi hits zero.
class HomotopyFamily {
 public:
  HomotopyFamily(WarpProfile h1, WarpProfile h2, double eps_tilde)
      : h1_(std::move(h1)), h2_(std::move(h2)), et_(eps_tilde) {
    if (h1_.kind() != WarpKind::PowerHorn || h2_.kind() != WarpKind::PowerHorn)
      throw std::invalid_argument("HomotopyFamily: endpoints must be power horns");
    if (h1_.eps0() != h2_.eps0() || h1_.eps1() != h2_.eps1())
      throw std::invalid_argument("HomotopyFamily: endpoints must share blend breakpoints");
    if (h1_.gamma() == h2_.gamma())
      throw std::invalid_argument("HomotopyFamily: endpoint exponents must differ");
    if (!(h1_.gamma() >= 1.0) || !(h2_.gamma() >= 1.0))
      throw std::invalid_argument("HomotopyFamily: exponents below 1 unsupported");
    if (!(eps_tilde > 0.0) || !(eps_tilde < h1_.eps0()))
      throw std::invalid_argument("HomotopyFamily: need 0 < eps_tilde < eps0");
  }

  double beta_lo() const { return std::min(h1_.gamma(), h2_.gamma()); }
  double beta_hi() const { return std::max(h1_.gamma(), h2_.gamma()); }
  double eps_tilde() const { return et_; }
  double eps0() const { return h1_.eps0(); }

  double mix_weight(double beta) const {
    const double e0 = h1_.eps0();
    const double p1 = std::pow(e0, h1_.gamma()), p2 = std::pow(e0, h2_.gamma());
    return (std::pow(e0, beta) - p2) / (p1 - p2);
  }

  FamilyMember member(double beta) const {
    if (!(beta >= beta_lo()) || !(beta <= beta_hi()))
      throw std::invalid_argument("HomotopyFamily::member: beta outside family range");
    return FamilyMember(beta, mix_weight(beta), et_, h1_.eps0(), h1_, h2_);
  }

 private:
  WarpProfile h1_, h2_;
  double et_;
};

inline HomotopyFamily make_homotopy(const WarpProfile& h1, const WarpProfile& h2,
                                    double eps_tilde) {
  return HomotopyFamily(h1, h2, eps_tilde);
}

struct FamilyValidationReport {
  bool bounds_pass = false;
  double min_horn_ratio = 0.0;   // min over sampled members and grid of h'/h
  double min_inverse = 0.0;      // same for 1/h
  double witness_beta = 0.0, witness_x = 0.0;
  std::vector<double> sup_diffs;  // sup_x |h_b - h_g| per consecutive sample pair
  bool sup_diffs_decreasing = false;
  double fitted_lipschitz = 0.0;  // max over pairs of sup / |b - g|
};

// Uniform lower bounds F >= 1/C for both coefficient families across sampled
// members, plus a crude Lipschitz fit of beta -> h_beta in sup norm.
inline FamilyValidationReport validate_family(const HomotopyFamily& fam,
                                              double C, std::size_t grid = 2048,
                                              std::size_t beta_samples = 9) {
  FamilyValidationReport rep;
  std::vector<FamilyMember> ms;
  std::vector<double> betas;
  for (std::size_t i = 0; i < beta_samples; ++i) {
    double t = beta_samples == 1
                   ? 0.0
                   : 0.5 * (1.0 - std::cos(M_PI * double(i) / double(beta_samples - 1)));
    double b = fam.beta_lo() + (fam.beta_hi() - fam.beta_lo()) * t;
    betas.push_back(b);
    ms.push_back(fam.member(b));
  }
  rep.min_horn_ratio = std::numeric_limits<double>::infinity();
  rep.min_inverse = rep.min_horn_ratio;
  for (std::size_t m = 0; m < ms.size(); ++m) {
    for (std::size_t i = 0; i < grid; ++i) {
      double x = std::pow(10.0, -6.0 + 6.0 * double(i) / double(grid - 1));
      double fr = ms[m].hprime(x) / ms[m].h(x);
      double fi = 1.0 / ms[m].h(x);
      if (fr < rep.min_horn_ratio) {
        rep.min_horn_ratio = fr;
        rep.witness_beta = betas[m];
        rep.witness_x = x;
      }
      rep.min_inverse = std::min(rep.min_inverse, fi);
    }
  }
  rep.bounds_pass = rep.min_horn_ratio >= 1.0 / C && rep.min_inverse >= 1.0 / C;
  // sup_x |h_b - h_{b+d}| for halving gaps d anchored at the family midpoint
  rep.fitted_lipschitz = 0.0;
  const double bmid = 0.5 * (fam.beta_lo() + fam.beta_hi());
  const double span = fam.beta_hi() - fam.beta_lo();
  FamilyMember base = fam.member(bmid);
  for (int k = 2; k <= 5; ++k) {
    double d = span / double(1 << k);
    FamilyMember other = fam.member(bmid + d);
    double sup = 0.0;
    for (std::size_t i = 0; i < 512; ++i) {
      double x = std::pow(10.0, -6.0 + 6.0 * double(i) / 511.0);
      sup = std::max(sup, std::fabs(base.h(x) - other.h(x)));
    }
    rep.sup_diffs.push_back(sup);
    rep.fitted_lipschitz = std::max(rep.fitted_lipschitz, sup / d);
  }
  rep.sup_diffs_decreasing = true;
  for (std::size_t i = 0; i + 1 < rep.sup_diffs.size(); ++i)
    if (!(rep.sup_diffs[i + 1] < rep.sup_diffs[i])) rep.sup_diffs_decreasing = false;
  return rep;
}

}  // namespace hornindex
