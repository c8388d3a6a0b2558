#include "semidev/family.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "semidev/format.hpp"

namespace semidev {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// exp(-s) underflows well before 745; integrands beyond this are zero.
constexpr double kTailSMax = 700.0;

double integrate(const std::function<double(double)>& f, double a, double b) {
  if (!(b > a)) return 0.0;
  double err = 0.0;
  const double value =
      boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
          f, a, b, 12, 1e-13, &err);
  if (!(err <= std::max(1e-10, 1e-11 * std::fabs(value)))) {
    std::ostringstream msg;
    msg << "moment quadrature did not converge on [" << a << ", " << b
        << "]: value " << value << ", error estimate " << err;
    throw NumericError(msg.str());
  }
  return value;
}

}  // namespace

const char* to_string(FamilyKind kind) {
  switch (kind) {
    case FamilyKind::one_sided_centered: return "one_sided_centered";
    case FamilyKind::symmetric: return "symmetric";
    case FamilyKind::lattice: return "lattice";
  }
  return "?";
}

SemiexpFamily::SemiexpFamily(FamilyKind kind, const ModelParams& params)
    : kind_(kind), params_(params) {
  params_.validate();
  inv_pow_ = 1.0 / (1.0 - params_.epsilon);
}

SemiexpFamily SemiexpFamily::one_sided(const ModelParams& params) {
  SemiexpFamily f(FamilyKind::one_sided_centered, params);
  f.mean_shift_ = f.magnitude_moment(1.0);
  return f;
}

SemiexpFamily SemiexpFamily::symmetric(const ModelParams& params) {
  return SemiexpFamily(FamilyKind::symmetric, params);
}

SemiexpFamily SemiexpFamily::lattice(const ModelParams& params,
                                     LatticeSpec spec) {
  SemiexpFamily f(FamilyKind::lattice, params);
  if (!(spec.step > 0.0)) throw std::invalid_argument("lattice step must be > 0");
  if (spec.masses.empty()) throw std::invalid_argument("lattice masses empty");
  double total = 0.0, mean = 0.0;
  for (std::size_t k = 0; k < spec.masses.size(); ++k) {
    if (spec.masses[k] < 0.0)
      throw std::invalid_argument("lattice masses must be nonnegative");
    total += spec.masses[k];
    mean += spec.masses[k] * (spec.offset + static_cast<double>(k) * spec.step);
  }
  if (std::fabs(total - 1.0) > 1e-12)
    throw std::invalid_argument("lattice masses must sum to 1 within 1e-12");
  if (std::fabs(mean) > 1e-12)
    throw std::invalid_argument("lattice mean must be 0 within 1e-12");
  f.lattice_ = std::move(spec);
  f.lattice_cum_.resize(f.lattice_->masses.size());
  std::partial_sum(f.lattice_->masses.begin(), f.lattice_->masses.end(),
                   f.lattice_cum_.begin());
  f.lattice_cum_.back() = 1.0;
  return f;
}

const LatticeSpec& SemiexpFamily::lattice_spec() const {
  if (!lattice_) throw std::logic_error("family has no lattice spec");
  return *lattice_;
}

double SemiexpFamily::magnitude_quantile(double tail_u) const {
  if (!is_continuous())
    throw std::logic_error("magnitude_quantile: lattice family");
  const double base = -std::log(tail_u) / params_.q;
  return inv_pow_ == 2.0 ? base * base : std::pow(base, inv_pow_);
}

double SemiexpFamily::magnitude_log_tail(double t) const {
  return t <= 0.0 ? 0.0 : -params_.q * std::pow(t, 1.0 - params_.epsilon);
}

double SemiexpFamily::magnitude_moment(double r) const {
  return std::tgamma(1.0 + r * inv_pow_) * std::pow(params_.q, -r * inv_pow_);
}

double SemiexpFamily::cdf(double y) const {
  switch (kind_) {
    case FamilyKind::one_sided_centered: {
      const double w = y + mean_shift_;
      return w <= 0.0 ? 0.0 : -std::expm1(magnitude_log_tail(w));
    }
    case FamilyKind::symmetric:
      return y >= 0.0 ? 1.0 - 0.5 * std::exp(magnitude_log_tail(y))
                      : 0.5 * std::exp(magnitude_log_tail(-y));
    case FamilyKind::lattice: {
      double acc = 0.0;
      for (std::size_t k = 0; k < lattice_->masses.size(); ++k) {
        const double x = lattice_->offset + static_cast<double>(k) * lattice_->step;
        if (x <= y) acc += lattice_->masses[k];
      }
      return acc;
    }
  }
  return 0.0;
}

double SemiexpFamily::tail_prob(double y) const {
  switch (kind_) {
    case FamilyKind::one_sided_centered: {
      const double w = y + mean_shift_;
      return w <= 0.0 ? 1.0 : std::exp(magnitude_log_tail(w));
    }
    case FamilyKind::symmetric:
      return y >= 0.0 ? 0.5 * std::exp(magnitude_log_tail(y))
                      : 1.0 - 0.5 * std::exp(magnitude_log_tail(-y));
    case FamilyKind::lattice: {
      double acc = 0.0;
      for (std::size_t k = 0; k < lattice_->masses.size(); ++k) {
        const double x = lattice_->offset + static_cast<double>(k) * lattice_->step;
        if (x >= y) acc += lattice_->masses[k];
      }
      return acc;
    }
  }
  return 0.0;
}

double SemiexpFamily::truncated_cdf(double y, double cutoff) const {
  const double denom = cdf(cutoff);
  if (denom <= 0.0)
    throw DegenerateTruncationError("no mass below the truncation level");
  return y >= cutoff ? 1.0 : cdf(y) / denom;
}

double SemiexpFamily::draw(SplitMix64& gen) const {
  switch (kind_) {
    case FamilyKind::one_sided_centered:
      return magnitude_quantile(gen.uniform_open()) - mean_shift_;
    case FamilyKind::symmetric: {
      const double sign = gen.uniform_open() < 0.5 ? -1.0 : 1.0;
      return sign * magnitude_quantile(gen.uniform_open());
    }
    case FamilyKind::lattice: {
      const double u = gen.uniform_open();
      const auto it =
          std::lower_bound(lattice_cum_.begin(), lattice_cum_.end(), u);
      const auto k = static_cast<std::size_t>(it - lattice_cum_.begin());
      return lattice_->offset + static_cast<double>(k) * lattice_->step;
    }
  }
  return 0.0;
}

double SemiexpFamily::draw_upper_tail(double lower, SplitMix64& gen) const {
  if (!is_continuous())
    throw std::logic_error("draw_upper_tail: lattice family");
  if (!(lower > 0.0))
    throw std::domain_error("draw_upper_tail needs a positive threshold");
  // P(W >= t | W >= w0) = exp(-q(t^(1-eps) - w0^(1-eps))), so shifting the
  // exponential variate by q*w0^(1-eps) inverts the conditional tail exactly.
  const double w0 =
      kind_ == FamilyKind::one_sided_centered ? lower + mean_shift_ : lower;
  const double base =
      std::pow(w0, 1.0 - params_.epsilon) - std::log(gen.uniform_open()) / params_.q;
  const double w = inv_pow_ == 2.0 ? base * base : std::pow(base, inv_pow_);
  return kind_ == FamilyKind::one_sided_centered ? w - mean_shift_ : w;
}

std::string SemiexpFamily::to_json() const {
  std::ostringstream os;
  os << "{\"kind\":\"" << to_string(kind_) << "\""
     << ",\"epsilon\":" << fmt_g17(params_.epsilon)
     << ",\"q\":" << fmt_g17(params_.q)
     << ",\"sigma2\":" << fmt_g17(params_.sigma2)
     << ",\"gamma\":" << fmt_g17(params_.gamma);
  if (lattice_) {
    os << ",\"step\":" << fmt_g17(lattice_->step)
       << ",\"offset\":" << fmt_g17(lattice_->offset) << ",\"masses\":[";
    for (std::size_t k = 0; k < lattice_->masses.size(); ++k) {
      if (k) os << ',';
      os << fmt_g17(lattice_->masses[k]);
    }
    os << ']';
  }
  os << '}';
  return os.str();
}

std::vector<double> sample_base(const SemiexpFamily& family, std::uint64_t seed,
                                std::size_t count) {
  if (count < 1) throw std::invalid_argument("count must be >= 1");
  SplitMix64 gen(seed);
  std::vector<double> out(count);
  for (auto& v : out) v = family.draw(gen);
  return out;
}

double draw_truncated(const SemiexpFamily& family, double cutoff,
                      SplitMix64& gen) {
  for (int tries = 0; tries < 10'000'000; ++tries) {
    const double v = family.draw(gen);
    if (v < cutoff) return v;
  }
  throw NumericError("truncated rejection sampler failed to accept");
}

std::vector<double> sample_truncated(const SemiexpFamily& family,
                                     const TruncationParams& trunc,
                                     std::uint64_t seed, std::size_t count) {
  if (count < 1) throw std::invalid_argument("count must be >= 1");
  trunc.validate();
  const double cutoff = trunc.cutoff();
  const double acceptance = family.cdf(cutoff);
  if (acceptance < 1e-6) {
    std::ostringstream msg;
    msg << "truncation at " << cutoff << " keeps acceptance probability "
        << acceptance << " (< 1e-6)";
    throw DegenerateTruncationError(msg.str());
  }
  SplitMix64 gen(seed);
  std::vector<double> out(count);
  for (auto& v : out) v = draw_truncated(family, cutoff, gen);
  return out;
}

double tail_log_prob(const SemiexpFamily& family, double y,
                     const std::optional<TruncationParams>& trunc) {
  if (!(y > 0.0)) throw std::domain_error("tail_log_prob needs y > 0");
  const double one_m_eps = 1.0 - family.params().epsilon;
  const double q = family.params().q;

  if (!trunc) {
    switch (family.kind()) {
      case FamilyKind::one_sided_centered:
        return -q * std::pow(y + family.mean_shift(), one_m_eps);
      case FamilyKind::symmetric:
        return std::log(0.5) - q * std::pow(y, one_m_eps);
      case FamilyKind::lattice: {
        const double p = family.tail_prob(y);
        return p > 0.0 ? std::log(p) : -kInf;
      }
    }
  }

  trunc->validate();
  const double cutoff = trunc->cutoff();
  if (y >= cutoff) return -kInf;

  switch (family.kind()) {
    case FamilyKind::one_sided_centered: {
      const double mu = family.mean_shift();
      const double a = q * std::pow(y + mu, one_m_eps);
      const double b = q * std::pow(cutoff + mu, one_m_eps);
      const double log_num = -a + std::log1p(-std::exp(-(b - a)));
      const double log_den = std::log1p(-std::exp(-b));
      return log_num - log_den;
    }
    case FamilyKind::symmetric: {
      const double a = q * std::pow(y, one_m_eps);
      const double b = q * std::pow(cutoff, one_m_eps);
      const double log_num = std::log(0.5) - a + std::log1p(-std::exp(-(b - a)));
      const double log_den = std::log1p(-0.5 * std::exp(-b));
      return log_num - log_den;
    }
    case FamilyKind::lattice: {
      const auto& spec = family.lattice_spec();
      double num = 0.0, den = 0.0;
      for (std::size_t k = 0; k < spec.masses.size(); ++k) {
        const double x = spec.offset + static_cast<double>(k) * spec.step;
        if (x < cutoff) {
          den += spec.masses[k];
          if (x >= y) num += spec.masses[k];
        }
      }
      if (den <= 0.0)
        throw DegenerateTruncationError("no lattice mass below the cutoff");
      return num > 0.0 ? std::log(num) - std::log(den) : -kInf;
    }
  }
  return -kInf;
}

namespace {

// Moments of the continuous kinds via the substitution s = q t^(1-eps),
// under which the magnitude density integrates as exp(-s) ds.
struct MagnitudeIntegrator {
  double q;
  double inv_pow;

  double t_of_s(double s) const { return std::pow(s / q, inv_pow); }

  // split_at: optional interior kink of g (in t units), e.g. |t - mu|^p.
  double moment(const std::function<double(double)>& g, double s_hi,
                double split_at = -1.0) const {
    const double hi = std::min(s_hi, kTailSMax);
    auto integrand = [&](double s) { return g(t_of_s(s)) * std::exp(-s); };
    if (split_at > 0.0) {
      const double s_split = q * std::pow(split_at, 1.0 / inv_pow);
      if (s_split < hi)
        return integrate(integrand, 0.0, s_split) +
               integrate(integrand, s_split, hi);
    }
    return integrate(integrand, 0.0, hi);
  }
};

MomentReport lattice_moments(const SemiexpFamily& family, double cutoff) {
  const auto& spec = family.lattice_spec();
  double total = 0.0, m1 = 0.0, m2 = 0.0, m2g = 0.0;
  const double p = 2.0 + family.params().gamma;
  for (std::size_t k = 0; k < spec.masses.size(); ++k) {
    const double x = spec.offset + static_cast<double>(k) * spec.step;
    if (x >= cutoff) continue;
    const double m = spec.masses[k];
    total += m;
    m1 += m * x;
    m2 += m * x * x;
    m2g += m * std::pow(std::fabs(x), p);
  }
  if (total <= 0.0)
    throw DegenerateTruncationError("no lattice mass below the cutoff");
  MomentReport rep;
  rep.mean = m1 / total;
  rep.variance = m2 / total - rep.mean * rep.mean;
  rep.abs_moment_2_gamma = m2g / total;
  rep.cutoff = cutoff;
  return rep;
}

}  // namespace

MomentReport moments(const SemiexpFamily& family,
                     const std::optional<TruncationParams>& trunc) {
  const double cutoff = trunc ? (trunc->validate(), trunc->cutoff()) : kInf;
  if (family.kind() == FamilyKind::lattice) return lattice_moments(family, cutoff);

  const auto& mp = family.params();
  const double p = 2.0 + mp.gamma;
  MagnitudeIntegrator mag{mp.q, 1.0 / (1.0 - mp.epsilon)};
  MomentReport rep;
  rep.cutoff = cutoff;

  if (family.kind() == FamilyKind::symmetric) {
    if (!trunc) {
      rep.mean = 0.0;
      rep.variance = family.magnitude_moment(2.0);
      rep.abs_moment_2_gamma = family.magnitude_moment(p);
      return rep;
    }
    const double s_hi = mp.q * std::pow(cutoff, 1.0 - mp.epsilon);
    const double norm = 1.0 - 0.5 * std::exp(-s_hi);
    auto both = [&](const std::function<double(double)>& g) {
      const double neg =
          mag.moment([&](double t) { return g(-t); }, kTailSMax);
      const double pos = mag.moment(g, s_hi);
      return 0.5 * (neg + pos) / norm;
    };
    const double r1 = both([](double v) { return v; });
    const double r2 = both([](double v) { return v * v; });
    rep.mean = r1;
    rep.variance = r2 - r1 * r1;
    rep.abs_moment_2_gamma =
        both([p](double v) { return std::pow(std::fabs(v), p); });
    return rep;
  }

  // one_sided_centered: Y = W - mu with W supported on [0, cutoff + mu).
  const double mu = family.mean_shift();
  if (!trunc) {
    rep.mean = 0.0;
    rep.variance = family.magnitude_moment(2.0) - mu * mu;
    rep.abs_moment_2_gamma = mag.moment(
        [&](double t) { return std::pow(std::fabs(t - mu), p); }, kTailSMax, mu);
    return rep;
  }
  const double w_hi = cutoff + mu;
  const double s_hi = mp.q * std::pow(w_hi, 1.0 - mp.epsilon);
  const double norm = -std::expm1(-s_hi);
  auto cond = [&](const std::function<double(double)>& g, double split) {
    return mag.moment([&](double t) { return g(t - mu); }, s_hi, split) / norm;
  };
  const double r1 = cond([](double v) { return v; }, -1.0);
  const double r2 = cond([](double v) { return v * v; }, -1.0);
  rep.mean = r1;
  rep.variance = r2 - r1 * r1;
  rep.abs_moment_2_gamma =
      cond([p](double v) { return std::pow(std::fabs(v), p); }, mu);
  return rep;
}

AuditReport audit_assumptions(const SemiexpFamily& family,
                              const std::optional<TruncationParams>& trunc,
                              double alpha,
                              std::span<const std::int64_t> n_grid) {
  if (n_grid.empty()) throw std::invalid_argument("audit needs a row schedule");
  for (std::size_t i = 1; i < n_grid.size(); ++i)
    if (n_grid[i] <= n_grid[i - 1])
      throw std::invalid_argument("audit row schedule must be increasing");
  if (!(alpha > 0.0)) throw std::invalid_argument("alpha must be positive");

  const auto& mp = family.params();
  const double one_m_eps = 1.0 - mp.epsilon;
  constexpr int kGridPoints = 16;

  AuditReport report;
  for (const std::int64_t n : n_grid) {
    const double nn = static_cast<double>(n);
    const std::optional<TruncationParams> row_trunc =
        trunc ? std::optional<TruncationParams>(trunc->at_row(n)) : std::nullopt;

    AuditRow row;
    row.n = n;
    row.h1_ratio_raw_min = kInf;
    row.h1_ratio_raw_max = -kInf;
    row.h1_ratio_min = kInf;
    row.h1_ratio_max = -kInf;

    const double lo = alpha * mp.epsilon * std::log(nn);
    const double hi = alpha * std::log(nn);
    for (int j = 0; j < kGridPoints; ++j) {
      const double y =
          std::exp(lo + (hi - lo) * static_cast<double>(j) / (kGridPoints - 1));
      const double lt = tail_log_prob(family, y, row_trunc);
      if (std::isinf(lt)) {
        ++row.censored_points;  // cutoff-censored, not an assumption failure
        continue;
      }
      const double ideal = -mp.q * std::pow(y, one_m_eps);
      const double raw = lt / ideal;
      double corrected = raw;
      if (family.kind() == FamilyKind::symmetric)
        corrected = (lt - std::log(0.5)) / ideal;
      else if (family.kind() == FamilyKind::one_sided_centered)
        corrected = lt / (-mp.q * std::pow(y + family.mean_shift(), one_m_eps));
      row.h1_ratio_raw_min = std::min(row.h1_ratio_raw_min, raw);
      row.h1_ratio_raw_max = std::max(row.h1_ratio_raw_max, raw);
      row.h1_ratio_min = std::min(row.h1_ratio_min, corrected);
      row.h1_ratio_max = std::max(row.h1_ratio_max, corrected);
    }

    const MomentReport mom = moments(family, row_trunc);
    row.h2_ratio = mom.variance / std::pow(nn, alpha * (1.0 + mp.epsilon) - 1.0);
    row.h2plus_ratio =
        mom.abs_moment_2_gamma / std::pow(nn, mp.gamma * (1.0 - alpha));
    report.rows.push_back(row);
  }

  const AuditRow& last = report.rows.back();
  report.h1_pass = last.h1_ratio_min >= 0.9 && last.h1_ratio_max <= 1.1 &&
                   last.censored_points < kGridPoints;
  auto vanishing = [&](auto proj) {
    if (report.rows.size() < 2) return false;
    for (std::size_t i = 1; i < report.rows.size(); ++i)
      if (proj(report.rows[i]) > proj(report.rows[i - 1]) * (1.0 + 1e-9))
        return false;
    return proj(report.rows.back()) < proj(report.rows.front());
  };
  report.h2_pass = vanishing([](const AuditRow& r) { return r.h2_ratio; });
  report.h2plus_pass = vanishing([](const AuditRow& r) { return r.h2plus_ratio; });
  return report;
}

}  // namespace semidev
