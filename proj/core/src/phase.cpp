#include "semidev/phase.hpp"

#include <cmath>
#include <sstream>

#include "semidev/format.hpp"

namespace semidev {

const char* to_string(Regime regime) {
  switch (regime) {
    case Regime::gaussian: return "gaussian";
    case Regime::transition1: return "transition1";
    case Regime::max_jump: return "max_jump";
    case Regime::transition2: return "transition2";
    case Regime::trunc_max_jump: return "trunc_max_jump";
    case Regime::transition3: return "transition3";
    case Regime::t0: return "t0";
    case Regime::trivial: return "trivial";
  }
  return "?";
}

namespace {

RegimeInfo make_info(Regime regime, double alpha, double beta, double eps) {
  RegimeInfo info;
  info.regime = regime;
  switch (regime) {
    case Regime::gaussian:
      info.speed_exponent = 2.0 * alpha - 1.0;
      info.rate_id = RateId::gaussian;
      break;
    case Regime::transition1:
      info.speed_exponent = (1.0 - eps) / (1.0 + eps);
      info.rate_id = RateId::transition;
      break;
    case Regime::max_jump:
      info.speed_exponent = alpha * (1.0 - eps);
      info.rate_id = RateId::max_jump;
      break;
    case Regime::transition2:
      info.speed_exponent = alpha * (1.0 - eps);
      info.rate_id = RateId::transition2;
      break;
    case Regime::trunc_max_jump:
      info.speed_exponent = alpha - beta * eps;
      info.rate_id = RateId::trunc_max_jump;
      break;
    case Regime::transition3:
      info.speed_exponent = 1.0 - 2.0 * beta * eps;
      info.rate_id = RateId::transition3;
      break;
    case Regime::t0:
      info.speed_exponent = (1.0 - eps) / (1.0 + eps);
      info.rate_id = RateId::t0;
      break;
    case Regime::trivial:
      break;
  }
  return info;
}

}  // namespace

RegimeInfo classify(double alpha, double beta, const ModelParams& model,
                    double c, std::optional<double> y) {
  model.validate();
  if (!(beta > 0.0)) throw std::invalid_argument("beta must be positive");
  if (!(c > 0.0)) throw std::invalid_argument("c must be positive");
  const double eps = model.epsilon;
  if (!(alpha > 0.5) || nearly_equal(alpha, 0.5))
    throw std::domain_error("classification requires alpha > 1/2");

  const double inv = 1.0 / (1.0 + eps);

  if (nearly_equal(alpha, beta + 1.0)) {
    // Sums of n variables capped at n^beta c stop at n^(beta+1) c, so the
    // regime on this line depends on whether y reaches c.
    if (y) {
      return *y < c ? make_info(Regime::trunc_max_jump, alpha, beta, eps)
                    : make_info(Regime::trivial, alpha, beta, eps);
    }
    RegimeInfo info = make_info(Regime::trunc_max_jump, alpha, beta, eps);
    info.y_condition = "trunc_max_jump for y < c, trivial for y >= c";
    return info;
  }
  if (alpha > beta + 1.0) return make_info(Regime::trivial, alpha, beta, eps);

  if (nearly_equal(beta, inv)) {
    if (nearly_equal(alpha, inv)) return make_info(Regime::t0, alpha, beta, eps);
    if (alpha < inv) return make_info(Regime::gaussian, alpha, beta, eps);
    return make_info(Regime::trunc_max_jump, alpha, beta, eps);
  }

  if (beta > inv) {
    if (nearly_equal(alpha, inv))
      return make_info(Regime::transition1, alpha, beta, eps);
    if (alpha < inv) return make_info(Regime::gaussian, alpha, beta, eps);
    if (nearly_equal(alpha, beta))
      return make_info(Regime::transition2, alpha, beta, eps);
    if (alpha < beta) return make_info(Regime::max_jump, alpha, beta, eps);
    return make_info(Regime::trunc_max_jump, alpha, beta, eps);
  }

  // beta < 1/(1+eps): the Gaussian range extends up to alpha = 1 - beta*eps.
  const double extended = 1.0 - beta * eps;
  if (nearly_equal(alpha, extended))
    return make_info(Regime::transition3, alpha, beta, eps);
  if (alpha < extended) return make_info(Regime::gaussian, alpha, beta, eps);
  return make_info(Regime::trunc_max_jump, alpha, beta, eps);
}

Diagram diagram_grid(const ModelParams& model, double c,
                     std::pair<double, double> alpha_range,
                     std::pair<double, double> beta_range, int resolution) {
  model.validate();
  if (resolution < 2) throw std::invalid_argument("resolution must be >= 2");
  const auto [a_lo, a_hi] = alpha_range;
  const auto [b_lo, b_hi] = beta_range;
  if (!(a_lo > 0.5) || !(a_hi > a_lo))
    throw std::invalid_argument("alpha range must satisfy 1/2 < lo < hi");
  if (!(b_lo > 0.0) || !(b_hi > b_lo))
    throw std::invalid_argument("beta range must satisfy 0 < lo < hi");

  Diagram diagram;
  diagram.cells.reserve(static_cast<std::size_t>(resolution) * resolution);
  for (int i = 0; i < resolution; ++i) {
    const double alpha =
        i + 1 == resolution ? a_hi : a_lo + (a_hi - a_lo) * i / (resolution - 1);
    for (int j = 0; j < resolution; ++j) {
      const double beta =
          j + 1 == resolution ? b_hi : b_lo + (b_hi - b_lo) * j / (resolution - 1);
      const RegimeInfo info = classify(alpha, beta, model, c);
      diagram.cells.push_back(
          {alpha, beta, info.regime, info.y_condition.has_value()});
    }
  }

  const double eps = model.epsilon;
  const double inv = 1.0 / (1.0 + eps);
  auto clip = [](double v, double lo, double hi) {
    return std::min(std::max(v, lo), hi);
  };

  if (inv >= a_lo && inv <= a_hi && b_hi > inv)
    diagram.boundaries.push_back(
        {"transition1: alpha = 1/(1+eps)",
         {{inv, clip(inv, b_lo, b_hi)}, {inv, b_hi}}});
  {
    const double lo = std::max({b_lo, inv, a_lo});
    const double hi = std::min(b_hi, a_hi);
    if (hi > lo)
      diagram.boundaries.push_back(
          {"transition2: alpha = beta", {{lo, lo}, {hi, hi}}});
  }
  {
    // alpha = 1 - beta*eps for beta <= 1/(1+eps), clipped to both ranges.
    const double blo = std::max(b_lo, (1.0 - a_hi) / eps);
    const double bhi = std::min({b_hi, inv, (1.0 - a_lo) / eps});
    if (bhi > blo)
      diagram.boundaries.push_back({"transition3: alpha = 1 - beta*eps",
                                    {{1.0 - blo * eps, blo}, {1.0 - bhi * eps, bhi}}});
  }
  if (inv >= b_lo && inv <= b_hi && inv >= a_lo && inv <= a_hi)
    diagram.boundaries.push_back({"t0: alpha = beta = 1/(1+eps)", {{inv, inv}}});
  if (inv >= b_lo && inv <= b_hi) {
    const double lo = std::max(a_lo, inv);
    const double hi = std::min(a_hi, inv + 1.0);
    if (hi > lo)
      diagram.boundaries.push_back(
          {"trunc_max_jump column: beta = 1/(1+eps)", {{lo, inv}, {hi, inv}}});
  }
  {
    const double blo = std::max(b_lo, a_lo - 1.0);
    const double bhi = std::min(b_hi, a_hi - 1.0);
    if (bhi > blo)
      diagram.boundaries.push_back(
          {"trivial edge: alpha = beta + 1 (trunc_max_jump for y < c)",
           {{blo + 1.0, blo}, {bhi + 1.0, bhi}}});
  }
  return diagram;
}

void write_diagram_csv(std::ostream& os, const Diagram& diagram) {
  os << "alpha,beta,regime\n";
  for (const auto& cell : diagram.cells)
    os << fmt_g(cell.alpha) << ',' << fmt_g(cell.beta) << ','
       << to_string(cell.regime) << '\n';
}

std::string boundaries_json(const Diagram& diagram) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < diagram.boundaries.size(); ++i) {
    const auto& b = diagram.boundaries[i];
    if (i) os << ',';
    os << "{\"name\":\"" << b.name << "\",\"points\":[";
    for (std::size_t j = 0; j < b.points.size(); ++j) {
      if (j) os << ',';
      os << "{\"alpha\":" << fmt_g17(b.points[j].first)
         << ",\"beta\":" << fmt_g17(b.points[j].second) << '}';
    }
    os << "]}";
  }
  os << ']';
  return os.str();
}

}  // namespace semidev
