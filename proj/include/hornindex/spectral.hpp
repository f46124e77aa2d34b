#pragma once

// Channel bookkeeping.  Every geometric operator on the horn decomposes into
// scalar (or small-block) channels d/dx + s*F with F = h'/h (the "T" family)
// or F = 1/h (the "tilde" family).  What survives into L2 near 0, and which
// channels separate the maximal from the minimal extension, depends only on
// (family, s, beta) with beta the warp exponent.

#include <cmath>
#include <stdexcept>
#include <string>

namespace hornindex {

enum class Family { T, Tilde };

struct SpectralChannel {
  double s = 0.0;
  int mult = 0;
  Family family = Family::T;
  std::string origin;
};

struct ChannelClassification {
  bool mode_l2 = false;   // homogeneous solution near 0 square integrable
  bool quotient = false;  // contributes to D(max)/D(min)
};

// T family: the homogeneous mode is h^{-s} ~ x^{-beta s}.
// Tilde family: the mode is exp(s mu(x)); for beta > 1 it either vanishes to
// all orders or blows up faster than any power, so it never sits in the
// quotient.  beta = 1 degenerates to the power mode x^{-s}.
inline ChannelClassification classify_channel(double s, double beta, Family fam) {
  if (!(beta >= 1.0))
    throw std::invalid_argument("classify_channel: beta must be >= 1");
  ChannelClassification c;
  if (fam == Family::T) {
    c.mode_l2 = beta * s < 0.5;
    c.quotient = std::fabs(beta * s) < 0.5;
    return c;
  }
  if (s == 0.0)
    throw std::invalid_argument("classify_channel: tilde channel with s = 0 is degenerate");
  if (beta > 1.0) {
    c.mode_l2 = s < 0.0;
    c.quotient = false;
  } else {
    c.mode_l2 = s < 0.5;
    c.quotient = std::fabs(s) < 0.5;
  }
  return c;
}

}  // namespace hornindex
