#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>

#include "semidev/errors.hpp"

namespace semidev {

// Distributional parameters of the semiexponential base variable:
// tail exponent epsilon, tail constant q, variance sigma2 of the centered
// variable, and the moment order gamma of the E|Y|^(2+gamma) condition.
struct ModelParams {
  double epsilon = 0.5;
  double q = 1.0;
  double sigma2 = 1.0;
  double gamma = 1.0;

  void validate() const {
    if (!(epsilon > 0.0 && epsilon < 1.0))
      throw std::invalid_argument("epsilon must lie in (0,1)");
    if (!(q > 0.0)) throw std::invalid_argument("q must be positive");
    if (!(sigma2 > 0.0)) throw std::invalid_argument("sigma2 must be positive");
    if (!(gamma > 0.0 && gamma <= 1.0))
      throw std::invalid_argument("gamma must lie in (0,1]");
  }
};

// Truncation of the base variable at the level n_index^beta * c.
struct TruncationParams {
  double beta = 1.0;
  double c = 1.0;
  std::int64_t n_index = 1;

  void validate() const {
    if (!(beta > 0.0)) throw std::invalid_argument("beta must be positive");
    if (!(c > 0.0)) throw std::invalid_argument("c must be positive");
    if (n_index < 1) throw std::invalid_argument("n_index must be >= 1");
  }

  double cutoff() const {
    return std::pow(static_cast<double>(n_index), beta) * c;
  }

  TruncationParams at_row(std::int64_t n) const {
    TruncationParams t = *this;
    t.n_index = n;
    return t;
  }
};

// Parameters of the rate functions; c is the truncation level constant and
// is required by the truncated-model rates.
struct RateParams {
  ModelParams model;
  std::optional<double> c;

  void validate() const {
    model.validate();
    if (c && !(*c > 0.0)) throw std::invalid_argument("c must be positive");
  }

  double require_c(const char* who) const {
    if (!c)
      throw std::invalid_argument(std::string(who) +
                                  " requires the truncation constant c");
    return *c;
  }
};

// Relative comparison used for boundary detection throughout.
inline bool nearly_equal(double a, double b, double rel_tol = 1e-12) {
  const double scale = std::max({1.0, std::fabs(a), std::fabs(b)});
  return std::fabs(a - b) <= rel_tol * scale;
}

}  // namespace semidev
