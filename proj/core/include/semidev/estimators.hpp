#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "semidev/family.hpp"
#include "semidev/lattice.hpp"
#include "semidev/phase.hpp"

namespace semidev {

enum class Estimator { naive, tilted_is, big_jump_split, exact_lattice };

const char* to_string(Estimator estimator);

struct EstimateResult {
  std::int64_t n = 0;
  double y = 0.0;  // deviation parameter; the raw threshold for lattice runs
  double log_prob = 0.0;
  double std_err = 0.0;
  std::uint64_t samples = 0;
  Estimator estimator = Estimator::naive;
  std::uint64_t seed = 0;
  std::int64_t hits = 0;
  std::vector<std::string> flags;
  std::optional<double> bias_bound;   // unexplored binomial mass (big-jump)
  std::optional<double> lr_ratio;     // likelihood-ratio identity diagnostic
  std::optional<double> lr_ratio_se;
};

// One JSON line: {"n":...,"y":...,"log_prob":...,"std_err":...,"samples":...,
// "estimator":...,"seed":...}; non-finite values serialize as null, flags are
// appended when present.
std::string to_json_line(const EstimateResult& result);

// Importance sampling under the exponentially tilted lattice law whose mean
// sits at threshold/n. Deterministic in (seed); the sample budget is cut into
// fixed batches with one counter-derived stream each.
EstimateResult tilted_is_estimate(const LatticeDist& dist, std::int64_t n,
                                  double threshold, std::uint64_t samples,
                                  std::uint64_t seed);

// Plain exceedance frequency of sum >= N^alpha y over `samples` replicates.
EstimateResult naive_estimate(const SemiexpFamily& family,
                              const std::optional<TruncationParams>& trunc,
                              std::int64_t n, double alpha, double y,
                              std::uint64_t samples, std::uint64_t seed);

// Stratifies on the number of variables above a jump threshold u*, samples
// each stratum conditionally, and recombines with exact binomial weights.
// Valid in the regimes where the deviation is carried by large jumps.
EstimateResult big_jump_split_estimate(
    const SemiexpFamily& family, const std::optional<TruncationParams>& trunc,
    std::int64_t n, double alpha, double y, std::uint64_t samples,
    std::uint64_t seed, Regime regime);

// Exact oracle result in the estimator schema (std_err 0).
EstimateResult exact_lattice_estimate(const LatticeDist& dist, std::int64_t n,
                                      double threshold);

struct SlopeFit {
  double limit_estimate = 0.0;
  double decay_exponent = 0.0;  // fitted b of r_n = r_inf + a n^(-b)
  bool reliable = true;
  std::vector<std::pair<std::int64_t, double>> per_n_ratios;
};

// Ratios r_n = log_prob / n^speed_exponent and their extrapolated limit from
// the three largest rows.
SlopeFit slope_fit(std::span<const EstimateResult> results,
                   double speed_exponent);

}  // namespace semidev
