#pragma once

// Gauss-Legendre rules and graded composite quadrature on (0, L].
// Meshes are graded toward 0 because every integrand in this library has its
// interesting behaviour (power singularities, kernel mass) at the small end.

#include <cassert>
#include <cmath>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <vector>

namespace hornindex {

struct GaussRule {
  std::vector<double> nodes;    // on [-1, 1], symmetric
  std::vector<double> weights;  // sum to 2

  // Supported orders: 4, 8, 16.
  static const GaussRule& of(int order) {
    static const GaussRule g4 = make4();
    static const GaussRule g8 = make8();
    static const GaussRule g16 = make16();
    switch (order) {
      case 4: return g4;
      case 8: return g8;
      case 16: return g16;
      default: throw std::invalid_argument("GaussRule: order must be 4, 8 or 16");
    }
  }

 private:
  static GaussRule from_half(const std::vector<double>& x,
                             const std::vector<double>& w) {
    GaussRule r;
    for (std::size_t i = x.size(); i-- > 0;) {
      r.nodes.push_back(-x[i]);
      r.weights.push_back(w[i]);
    }
    for (std::size_t i = 0; i < x.size(); ++i) {
      r.nodes.push_back(x[i]);
      r.weights.push_back(w[i]);
    }
    return r;
  }
  static GaussRule make4() {
    return from_half({0.3399810435848563, 0.8611363115940526},
                     {0.6521451548625461, 0.3478548451374538});
  }
  static GaussRule make8() {
    return from_half({0.1834346424956498, 0.5255324099163290,
                      0.7966664774136267, 0.9602898564975363},
                     {0.3626837833783620, 0.3137066458778873,
                      0.2223810344533745, 0.1012285362903763});
  }
  static GaussRule make16() {
    return from_half({0.0950125098376374, 0.2816035507792589,
                      0.4580167776572274, 0.6178762444026438,
                      0.7554044083550030, 0.8656312023878318,
                      0.9445750230732326, 0.9894009349916499},
                     {0.1894506104550685, 0.1826034150449236,
                      0.1691565193950025, 0.1495959888165767,
                      0.1246289712555339, 0.0951585116824928,
                      0.0622535239386479, 0.0271524594117541});
  }
};

// One Gauss pass over [a, b].
template <class F>
double gl_integrate(F&& f, double a, double b, int order = 8) {
  const GaussRule& r = GaussRule::of(order);
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  double acc = 0.0;
  for (std::size_t i = 0; i < r.nodes.size(); ++i)
    acc += r.weights[i] * f(mid + half * r.nodes[i]);
  return acc * half;
}

// Cell edges x_i = L * (i/N)^g, i = 0..N.  No node sits at 0; the first cell
// still touches it, so integrands only ever get evaluated at interior Gauss
// points strictly inside (0, L).
struct GradedMesh {
  std::size_t cells;
  double grading;
  double length;

  GradedMesh(std::size_t n, double g, double len)
      : cells(n), grading(g), length(len) {
    if (n == 0 || !(g >= 1.0) || !(len > 0.0))
      throw std::invalid_argument("GradedMesh: need cells>=1, grading>=1, length>0");
  }

  double node(std::size_t i) const {
    assert(i <= cells);
    return length * std::pow(double(i) / double(cells), grading);
  }

  // Index of the cell containing x (clamped to [0, cells-1]).
  std::size_t locate(double x) const {
    if (x <= 0.0) return 0;
    if (x >= length) return cells - 1;
    double t = std::pow(x / length, 1.0 / grading);
    auto i = static_cast<std::size_t>(t * double(cells));
    if (i >= cells) i = cells - 1;
    // pow round-off can put x just outside the predicted cell
    while (i > 0 && x < node(i)) --i;
    while (i + 1 < cells && x >= node(i + 1)) ++i;
    return i;
  }
};

// Composite Gauss rule over a graded mesh with precomputed points/weights.
class CompositeQuad {
 public:
  CompositeQuad(GradedMesh mesh, int order = 8)
      : mesh_(mesh), order_(order) {
    const GaussRule& r = GaussRule::of(order);
    pts_.reserve(mesh_.cells * r.nodes.size());
    wts_.reserve(mesh_.cells * r.nodes.size());
    for (std::size_t c = 0; c < mesh_.cells; ++c) {
      const double a = mesh_.node(c), b = mesh_.node(c + 1);
      const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
      for (std::size_t i = 0; i < r.nodes.size(); ++i) {
        pts_.push_back(mid + half * r.nodes[i]);
        wts_.push_back(half * r.weights[i]);
      }
    }
  }

  const GradedMesh& mesh() const { return mesh_; }
  int order() const { return order_; }
  const std::vector<double>& points() const { return pts_; }
  const std::vector<double>& weights() const { return wts_; }

  template <class F>
  double integrate(F&& f) const {
    double acc = 0.0;
    for (std::size_t i = 0; i < pts_.size(); ++i) acc += wts_[i] * f(pts_[i]);
    return acc;
  }

  // integral_0^x f: full cells below x, one fresh Gauss pass on the partial cell.
  template <class F>
  double integrate_upto(double x, F&& f) const {
    if (x <= 0.0) return 0.0;
    if (x >= mesh_.length) return integrate(f);
    const std::size_t c = mesh_.locate(x);
    const std::size_t per = GaussRule::of(order_).nodes.size();
    double acc = 0.0;
    for (std::size_t i = 0; i < c * per; ++i) acc += wts_[i] * f(pts_[i]);
    acc += gl_integrate(f, mesh_.node(c), x, order_);
    return acc;
  }

  // integral_x^L f
  template <class F>
  double integrate_from(double x, F&& f) const {
    if (x <= 0.0) return integrate(f);
    if (x >= mesh_.length) return 0.0;
    const std::size_t c = mesh_.locate(x);
    const std::size_t per = GaussRule::of(order_).nodes.size();
    double acc = gl_integrate(f, x, mesh_.node(c + 1), order_);
    for (std::size_t i = (c + 1) * per; i < pts_.size(); ++i)
      acc += wts_[i] * f(pts_[i]);
    return acc;
  }

 private:
  GradedMesh mesh_;
  int order_;
  std::vector<double> pts_, wts_;
};

}  // namespace hornindex
