#include "semidev/rates.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>

#include "semidev/format.hpp"

namespace semidev {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// f(theta) = q theta^(1-eps) y^(1-eps) + (1-theta)^2 y^2 / (2 sigma^2),
// the objective of the transition infimum.
struct TransitionObjective {
  double q, eps, sigma2, y;
  double operator()(double theta) const {
    return q * std::pow(theta * y, 1.0 - eps) +
           (1.0 - theta) * (1.0 - theta) * y * y / (2.0 * sigma2);
  }
};

double golden_min(const std::function<double(double)>& f, double a, double b) {
  constexpr double kInvPhi = 0.6180339887498949;
  double x1 = b - kInvPhi * (b - a);
  double x2 = a + kInvPhi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  while (b - a > 1e-12) {
    if (f1 <= f2) {
      b = x2; x2 = x1; f2 = f1;
      x1 = b - kInvPhi * (b - a);
      f1 = f(x1);
    } else {
      a = x1; x1 = x2; f1 = f2;
      x2 = a + kInvPhi * (b - a);
      f2 = f(x2);
    }
  }
  return std::min(f1, f2);
}

// Coarse scan over [a,b], then golden refinement around every grid-local
// minimum. The refinement recovers narrow interior basins the scan only
// grazes; the exact grid values stay in the running minimum because the
// objectives can have a vertical tangent at an endpoint optimum.
double scan_min(const std::function<double(double)>& f, double a, double b,
                int resolution) {
  if (resolution < 2) resolution = 2;
  if (!(b > a)) return f(a);
  std::vector<double> vals(static_cast<std::size_t>(resolution) + 1);
  const double h = (b - a) / resolution;
  for (int i = 0; i <= resolution; ++i) vals[i] = f(a + h * i);
  double best = kInf;
  for (int i = 0; i <= resolution; ++i) {
    best = std::min(best, vals[i]);
    const bool left_ok = i == 0 || vals[i] <= vals[i - 1];
    const bool right_ok = i == resolution || vals[i] <= vals[i + 1];
    if (left_ok && right_ok) {
      const double lo = a + h * std::max(i - 1, 0);
      const double hi = a + h * std::min(i + 1, resolution);
      best = std::min(best, golden_min(f, lo, hi));
    }
  }
  return best;
}

std::int64_t jump_count(double y, double threshold, double c) {
  const double k = std::floor((y - threshold) / c) + 1.0;
  return k > 0.0 ? static_cast<std::int64_t>(k) : 0;
}

}  // namespace

const char* to_string(RateId id) {
  switch (id) {
    case RateId::gaussian: return "gaussian";
    case RateId::max_jump: return "max_jump";
    case RateId::transition: return "transition";
    case RateId::transition2: return "transition2";
    case RateId::trunc_max_jump: return "trunc_max_jump";
    case RateId::transition3: return "transition3";
    case RateId::t0: return "t0";
  }
  return "?";
}

std::optional<RateId> rate_id_from_string(const std::string& name) {
  for (RateId id : {RateId::gaussian, RateId::max_jump, RateId::transition,
                    RateId::transition2, RateId::trunc_max_jump,
                    RateId::transition3, RateId::t0})
    if (name == to_string(id)) return id;
  return std::nullopt;
}

const char* to_string(RateBranch branch) {
  switch (branch) {
    case RateBranch::gaussian: return "gaussian";
    case RateBranch::interior: return "interior";
    case RateBranch::max_jump: return "max_jump";
    case RateBranch::trunc_max_jump: return "trunc_max_jump";
    case RateBranch::transition2: return "transition2";
    case RateBranch::affine: return "affine";
    case RateBranch::i01: return "i01";
    case RateBranch::i02: return "i02";
  }
  return "?";
}

Thresholds thresholds(const RateParams& params) {
  params.validate();
  const double eps = params.model.epsilon;
  const double qs2 = params.model.q * params.model.sigma2;
  Thresholds th;
  th.y0 = std::pow((1.0 - eps * eps) * std::pow(1.0 + 1.0 / eps, eps) * qs2,
                   1.0 / (1.0 + eps));
  th.y1 = (1.0 + eps) *
          std::pow(qs2 / std::pow(2.0 * eps, eps), 1.0 / (1.0 + eps));
  if (params.c) {
    const double c = *params.c;
    th.y3 = qs2 * std::pow(c, -eps);
    th.c0 = std::pow(2.0 * eps * qs2, 1.0 / (1.0 + eps));
    th.y01 = 0.5 * c + qs2 * std::pow(c, -eps);
    th.y02 = c + (1.0 - eps) * qs2 * std::pow(c, -eps);
  }
  return th;
}

double theta_root(const RateParams& params, double y) {
  params.validate();
  const double eps = params.model.epsilon;
  const double rhs = (1.0 - eps) * params.model.q * params.model.sigma2 /
                     std::pow(y, 1.0 + eps);
  auto g = [eps](double theta) {
    return (1.0 - theta) * std::pow(theta, eps);
  };
  const double theta_star = eps / (1.0 + eps);
  if (!(rhs < g(theta_star))) {
    std::ostringstream msg;
    msg << "theta_root needs y > y0 = " << thresholds(params).y0 << ", got y = "
        << y;
    throw std::domain_error(msg.str());
  }
  // g is strictly decreasing on [theta_star, 1], so plain bisection is exact.
  double lo = theta_star, hi = 1.0;
  double mid = 0.5 * (lo + hi);
  for (int it = 0; it < 200; ++it) {
    mid = 0.5 * (lo + hi);
    const double gm = g(mid);
    if (std::fabs(gm - rhs) < 1e-12 && it > 40) break;
    (gm > rhs ? lo : hi) = mid;
  }
  if (std::fabs(g(mid) - rhs) >= 1e-12)
    throw NumericError("theta_root residual exceeds 1e-12");
  return mid;
}

RateEvaluation gaussian_rate(const RateParams& params, double y) {
  params.validate();
  if (!(y >= 0.0)) throw std::domain_error("y must be >= 0");
  return {y, y * y / (2.0 * params.model.sigma2), std::nullopt,
          RateBranch::gaussian, std::nullopt};
}

RateEvaluation max_jump_rate(const RateParams& params, double y) {
  params.validate();
  if (!(y >= 0.0)) throw std::domain_error("y must be >= 0");
  return {y, params.model.q * std::pow(y, 1.0 - params.model.epsilon),
          std::nullopt, RateBranch::max_jump, std::nullopt};
}

RateEvaluation transition_rate(const RateParams& params, double y) {
  params.validate();
  if (!(y >= 0.0)) throw std::domain_error("y must be >= 0");
  const Thresholds th = thresholds(params);
  if (y <= th.y1) {
    // Both branches tie at y1; the Gaussian one is assigned there.
    return {y, y * y / (2.0 * params.model.sigma2), 0.0, RateBranch::gaussian,
            std::nullopt};
  }
  const double theta = theta_root(params, y);
  const TransitionObjective f{params.model.q, params.model.epsilon,
                              params.model.sigma2, y};
  return {y, f(theta), theta, RateBranch::interior, std::nullopt};
}

RateEvaluation trunc_transition2_rate(const RateParams& params, double y) {
  params.validate();
  const double c = params.require_c("transition2");
  if (!(y >= 0.0)) throw std::domain_error("y must be >= 0");
  const auto k = static_cast<std::int64_t>(std::floor(y / c));
  const double rest = std::max(y - static_cast<double>(k) * c, 0.0);
  const double eps = params.model.epsilon;
  const double value = params.model.q * (static_cast<double>(k) * std::pow(c, 1.0 - eps) +
                                         std::pow(rest, 1.0 - eps));
  return {y, value, std::nullopt, RateBranch::transition2, k};
}

RateEvaluation trunc_max_jump_rate(const RateParams& params, double y) {
  params.validate();
  const double c = params.require_c("trunc_max_jump");
  if (!(y >= 0.0)) throw std::domain_error("y must be >= 0");
  return {y, params.model.q * y * std::pow(c, -params.model.epsilon),
          std::nullopt, RateBranch::trunc_max_jump, std::nullopt};
}

RateEvaluation transition3_rate(const RateParams& params, double y) {
  params.validate();
  const double c = params.require_c("transition3");
  if (!(y >= 0.0)) throw std::domain_error("y must be >= 0");
  const double eps = params.model.epsilon;
  const double q = params.model.q;
  const double sigma2 = params.model.sigma2;
  const double y3 = q * sigma2 * std::pow(c, -eps);
  if (y <= y3)
    return {y, y * y / (2.0 * sigma2), 1.0, RateBranch::gaussian, std::nullopt};
  const double value = q * y * std::pow(c, -eps) -
                       q * q * sigma2 * std::pow(c, -2.0 * eps) / 2.0;
  return {y, value, y3 / y, RateBranch::affine, std::nullopt};
}

namespace {

RateEvaluation t0_saturated_gaussian(const RateParams& params, double y,
                                     const Thresholds& th) {
  const double c = *params.c;
  const double eps = params.model.epsilon;
  const std::int64_t k = jump_count(y, *th.y01, c);
  const double rest = y - static_cast<double>(k) * c;
  const double value =
      params.model.q * static_cast<double>(k) * std::pow(c, 1.0 - eps) +
      rest * rest / (2.0 * params.model.sigma2);
  return {y, value, std::nullopt, RateBranch::i01, k};
}

RateEvaluation t0_saturated_transition(const RateParams& params, double y,
                                       const Thresholds& th) {
  const double c = *params.c;
  const double eps = params.model.epsilon;
  const std::int64_t k = jump_count(y, *th.y02, c);
  const double rest = std::max(y - static_cast<double>(k) * c, 0.0);
  const RateEvaluation inner = transition_rate(params, rest);
  const double value =
      params.model.q * static_cast<double>(k) * std::pow(c, 1.0 - eps) +
      inner.value;
  return {y, value, inner.theta, RateBranch::i02, k};
}

}  // namespace

RateEvaluation t0_rate(const RateParams& params, double y) {
  params.validate();
  const double c = params.require_c("t0");
  if (!(y >= 0.0)) throw std::domain_error("y must be >= 0");
  const Thresholds th = thresholds(params);
  if (nearly_equal(c, *th.c0)) {
    const RateEvaluation a = t0_saturated_gaussian(params, y, th);
    const RateEvaluation b = t0_saturated_transition(params, y, th);
    if (std::fabs(a.value - b.value) > 1e-8) {
      std::ostringstream msg;
      msg << "i01/i02 disagree at c = c0: " << a.value << " vs " << b.value
          << " at y = " << y;
      throw NumericError(msg.str());
    }
    return a;
  }
  return c < *th.c0 ? t0_saturated_gaussian(params, y, th)
                    : t0_saturated_transition(params, y, th);
}

RateEvaluation evaluate_rate(RateId id, const RateParams& params, double y) {
  switch (id) {
    case RateId::gaussian: return gaussian_rate(params, y);
    case RateId::max_jump: return max_jump_rate(params, y);
    case RateId::transition: return transition_rate(params, y);
    case RateId::transition2: return trunc_transition2_rate(params, y);
    case RateId::trunc_max_jump: return trunc_max_jump_rate(params, y);
    case RateId::transition3: return transition3_rate(params, y);
    case RateId::t0: return t0_rate(params, y);
  }
  throw std::invalid_argument("unknown rate id");
}

double rate_oracle_grid(RateId id, const RateParams& params, double y,
                        int grid_resolution) {
  params.validate();
  if (!(y >= 0.0)) throw std::domain_error("y must be >= 0");
  if (grid_resolution < 2)
    throw std::invalid_argument("grid_resolution must be >= 2");
  const double q = params.model.q;
  const double eps = params.model.epsilon;
  const double sigma2 = params.model.sigma2;

  switch (id) {
    case RateId::transition: {
      const TransitionObjective f{q, eps, sigma2, y};
      if (y == 0.0) return 0.0;
      return scan_min([&](double t) { return f(t); }, 0.0, 1.0,
                      grid_resolution);
    }
    case RateId::transition3: {
      const double c = params.require_c("transition3 oracle");
      const double jump_cost = q * y * std::pow(c, -eps);
      auto g = [&](double t) {
        return (1.0 - t) * jump_cost + t * t * y * y / (2.0 * sigma2);
      };
      return scan_min(g, 0.0, 1.0, grid_resolution);
    }
    case RateId::transition2: {
      const double c = params.require_c("transition2 oracle");
      const double unit = std::pow(c, 1.0 - eps);
      const auto k_hi = static_cast<std::int64_t>(std::ceil(y / c)) + 1;
      double best = kInf;
      for (std::int64_t k = 0; k <= k_hi; ++k) {
        const double rest = y - static_cast<double>(k) * c;
        if (rest < -1e-12 * std::max(1.0, y) || rest > c * (1.0 + 1e-12))
          continue;
        best = std::min(best, q * (static_cast<double>(k) * unit +
                                   std::pow(std::max(rest, 0.0), 1.0 - eps)));
      }
      return best;
    }
    case RateId::t0: {
      // Decompose the deviation into k saturated jumps of size c, one free
      // jump s capped at c (no variable can exceed the truncation level in
      // this regime), and a Gaussian remainder.
      const double c = params.require_c("t0 oracle");
      const double unit = q * std::pow(c, 1.0 - eps);
      const auto k_hi = static_cast<std::int64_t>(std::ceil(y / c)) + 1;
      const int inner_res = std::max(32, grid_resolution / 16);
      double best = kInf;
      for (std::int64_t k = 0; k <= k_hi; ++k) {
        const double rest = y - static_cast<double>(k) * c;
        auto cost = [&](double s) {
          return q * std::pow(s, 1.0 - eps) +
                 (rest - s) * (rest - s) / (2.0 * sigma2);
        };
        const double inner =
            rest <= 0.0 ? rest * rest / (2.0 * sigma2)
                        : scan_min(cost, 0.0, std::min(c, rest), inner_res);
        best = std::min(best, static_cast<double>(k) * unit + inner);
      }
      return best;
    }
    default:
      throw std::invalid_argument(
          "rate_oracle_grid covers the infimum-defined rates only");
  }
}

std::vector<RateEvaluation> emit_curve(RateId id, const RateParams& params,
                                       double y_min, double y_max,
                                       int n_points) {
  params.validate();
  if (!(y_min >= 0.0) || !(y_max > y_min))
    throw std::invalid_argument("curve range must satisfy 0 <= y_min < y_max");
  if (n_points < 2) throw std::invalid_argument("n_points must be >= 2");
  std::vector<RateEvaluation> rows;
  rows.reserve(static_cast<std::size_t>(n_points));
  const double h = (y_max - y_min) / (n_points - 1);
  for (int i = 0; i < n_points; ++i) {
    const double y = i + 1 == n_points ? y_max : y_min + h * i;
    rows.push_back(evaluate_rate(id, params, y));
  }
  return rows;
}

void write_curve_csv(std::ostream& os,
                     const std::vector<RateEvaluation>& rows) {
  os << "y,value,theta,branch,jumps\n";
  for (const auto& r : rows) {
    os << fmt_g(r.y) << ',' << fmt_g(r.value) << ',';
    if (r.theta) os << fmt_g(*r.theta);
    os << ',' << to_string(r.branch) << ',';
    if (r.jumps) os << *r.jumps;
    os << '\n';
  }
}

}  // namespace semidev
