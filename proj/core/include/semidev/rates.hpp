#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "semidev/params.hpp"

namespace semidev {

// Thresholds of the rate-function phase structure. y0: the interior local
// minimum of f(theta) appears; y1: interior and Gaussian branches tie;
// y3, c0, y01, y02: truncated-model analogues (present only with c).
struct Thresholds {
  double y0 = 0.0;
  double y1 = 0.0;
  std::optional<double> y3;
  std::optional<double> c0;
  std::optional<double> y01;
  std::optional<double> y02;
};

enum class RateId {
  gaussian,
  max_jump,
  transition,
  transition2,
  trunc_max_jump,
  transition3,
  t0,
};

const char* to_string(RateId id);
std::optional<RateId> rate_id_from_string(const std::string& name);

// Which piece of a piecewise rate produced the value.
enum class RateBranch {
  gaussian,      // quadratic y^2/(2 sigma^2)
  interior,      // interior minimizer theta(y) of the transition infimum
  max_jump,      // q y^(1-eps)
  trunc_max_jump,// q y c^(-eps)
  transition2,   // saturated jumps plus one partial jump
  affine,        // affine piece of the transition-3 rate
  i01,           // saturated jumps plus a Gaussian remainder
  i02,           // saturated jumps plus a transition remainder
};

const char* to_string(RateBranch branch);

struct RateEvaluation {
  double y = 0.0;
  double value = 0.0;
  std::optional<double> theta;       // optimizer of the infimum, when one exists
  RateBranch branch = RateBranch::gaussian;
  std::optional<std::int64_t> jumps; // saturated-jump count of the branch
};

Thresholds thresholds(const RateParams& params);

// Greatest root in [eps/(1+eps), 1] of (1-theta) theta^eps = (1-eps) q
// sigma^2 / y^(1+eps); defined for y > y0. Residual below 1e-12.
double theta_root(const RateParams& params, double y);

RateEvaluation gaussian_rate(const RateParams& params, double y);
RateEvaluation max_jump_rate(const RateParams& params, double y);
RateEvaluation transition_rate(const RateParams& params, double y);
RateEvaluation trunc_transition2_rate(const RateParams& params, double y);
RateEvaluation trunc_max_jump_rate(const RateParams& params, double y);
RateEvaluation transition3_rate(const RateParams& params, double y);
RateEvaluation t0_rate(const RateParams& params, double y);

RateEvaluation evaluate_rate(RateId id, const RateParams& params, double y);

// Brute-force minimum of the infimum-defined rates: coarse scan plus
// golden-section refinement for the continuous variables, exhaustive search
// over saturated-jump counts for the discrete ones. Verification oracle;
// valid ids: transition, transition2, transition3, t0.
double rate_oracle_grid(RateId id, const RateParams& params, double y,
                        int grid_resolution);

std::vector<RateEvaluation> emit_curve(RateId id, const RateParams& params,
                                       double y_min, double y_max,
                                       int n_points);

// CSV with header "y,value,theta,branch,jumps", 12 significant digits,
// empty cells where a column does not apply.
void write_curve_csv(std::ostream& os, const std::vector<RateEvaluation>& rows);

}  // namespace semidev
