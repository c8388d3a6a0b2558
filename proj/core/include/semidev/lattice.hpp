#pragma once

#include <cstdint>
#include <vector>

#include "semidev/family.hpp"
#include "semidev/params.hpp"

namespace semidev {

// Finite lattice law: point k carries masses[k] at offset + k*step.
struct LatticeDist {
  double step = 1.0;
  double offset = 0.0;
  std::vector<double> masses;
  double mean = 0.0;

  double point(std::size_t k) const {
    return offset + static_cast<double>(k) * step;
  }
  double min_support() const { return offset; }
  double max_support() const { return point(masses.size() - 1); }
};

// Validates masses (nonnegative, summing to 1 within 1e-12) and caches the
// mean.
LatticeDist make_lattice(double step, double offset, std::vector<double> masses);

struct Discretization {
  LatticeDist dist;
  // sup-norm gap between the lattice CDF and the truncated law's CDF
  // (largest single bin mass).
  double cdf_sup_bound = 0.0;
};

// Bins the truncated continuous family on a step-h grid: bin [kh,(k+1)h)
// carries its exact probability, the lower tail is clipped at quantile 1e-12
// with the clipped mass folded into the bottom bin, and the support is
// shifted so the lattice mean is exactly zero.
Discretization discretize(const SemiexpFamily& family,
                          const TruncationParams& trunc, double h);

struct TiltResult {
  double lambda = 0.0;  // tilt parameter, >= 0
  double cgf = 0.0;     // log E[exp(lambda Y)] at that lambda
};

// Solves (d/dlambda) log E[exp(lambda Y)] = target_mean. Targets at or below
// the lattice mean return the untilted measure; targets at or beyond the top
// support point are unattainable.
TiltResult cgf_and_tilt(const LatticeDist& dist, double target_mean);

double lattice_cgf(const LatticeDist& dist, double lambda);

// log P(sum of n i.i.d. draws >= threshold), exact up to floating-point
// summation error. Internally convolves the exponentially tilted law by
// binary doubling so far-tail masses stay well scaled, then removes the tilt.
double exact_tail_convolution(const LatticeDist& dist, std::int64_t n,
                              double threshold);

}  // namespace semidev
