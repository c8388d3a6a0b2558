#include "semidev/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace semidev {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::size_t kMaxSupport = 10'000'000;
// Tilted masses this far below the peak cannot move the tail sum at the
// 1e-12 level; trimming them keeps the doubling quadratic-cost affordable.
constexpr double kPruneRel = 1e-30;

struct Pmf {
  std::int64_t base = 0;  // support point k sits at (base + k) * step
  std::vector<double> masses;
};

void prune(Pmf& p) {
  const double peak = *std::max_element(p.masses.begin(), p.masses.end());
  const double floor = peak * kPruneRel;
  std::size_t lo = 0, hi = p.masses.size();
  while (lo < hi && p.masses[lo] < floor) ++lo;
  while (hi > lo && p.masses[hi - 1] < floor) --hi;
  if (lo == 0 && hi == p.masses.size()) return;
  p.masses = std::vector<double>(p.masses.begin() + lo, p.masses.begin() + hi);
  p.base += static_cast<std::int64_t>(lo);
}

Pmf convolve(const Pmf& a, const Pmf& b) {
  const std::size_t out_size = a.masses.size() + b.masses.size() - 1;
  if (out_size > kMaxSupport)
    throw ResourceError("convolution support exceeds 1e7 points");
  Pmf out;
  out.base = a.base + b.base;
  std::vector<long double> acc(out_size, 0.0L);
  for (std::size_t i = 0; i < a.masses.size(); ++i) {
    const long double ai = a.masses[i];
    if (ai == 0.0L) continue;
    for (std::size_t j = 0; j < b.masses.size(); ++j)
      acc[i + j] += ai * static_cast<long double>(b.masses[j]);
  }
  out.masses.assign(acc.begin(), acc.end());
  prune(out);
  return out;
}

}  // namespace

LatticeDist make_lattice(double step, double offset,
                         std::vector<double> masses) {
  if (!(step > 0.0)) throw std::invalid_argument("lattice step must be > 0");
  if (masses.empty()) throw std::invalid_argument("lattice masses empty");
  double total = 0.0;
  for (double m : masses) {
    if (m < 0.0) throw std::invalid_argument("lattice masses must be >= 0");
    total += m;
  }
  if (std::fabs(total - 1.0) > 1e-12)
    throw std::invalid_argument("lattice masses must sum to 1 within 1e-12");
  LatticeDist d;
  d.step = step;
  d.offset = offset;
  d.masses = std::move(masses);
  long double mean = 0.0L;
  for (std::size_t k = 0; k < d.masses.size(); ++k)
    mean += static_cast<long double>(d.masses[k]) * d.point(k);
  d.mean = static_cast<double>(mean);
  return d;
}

Discretization discretize(const SemiexpFamily& family,
                          const TruncationParams& trunc, double h) {
  if (!family.is_continuous())
    throw std::invalid_argument("discretize expects a continuous family");
  if (!(h > 0.0)) throw std::invalid_argument("h must be positive");
  trunc.validate();
  const double cutoff = trunc.cutoff();
  const double denom = family.cdf(cutoff);
  if (denom < 1e-6)
    throw DegenerateTruncationError("almost no mass below the cutoff");

  // Lower clip at quantile 1e-12 of the truncated law.
  double lo = -1.0, hi = 0.0;
  while (family.cdf(lo) / denom > 1e-12) lo *= 2.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (family.cdf(mid) / denom > 1e-12 ? hi : lo) = mid;
  }

  const auto k_min = static_cast<std::int64_t>(std::floor(lo / h));
  const auto k_max = static_cast<std::int64_t>(std::ceil(cutoff / h)) - 1;
  const std::int64_t count = k_max - k_min + 1;
  if (count < 16)
    throw std::invalid_argument("h too coarse: fewer than 16 support points");
  if (count > static_cast<std::int64_t>(kMaxSupport))
    throw ResourceError("discretization support exceeds 1e7 points");

  std::vector<double> masses(static_cast<std::size_t>(count));
  double sup_bound = 0.0;
  double prev_cdf = 0.0;  // fold everything below the bottom bin's upper edge
  for (std::int64_t k = k_min; k <= k_max; ++k) {
    const double upper = std::min((static_cast<double>(k) + 1.0) * h, cutoff);
    const double cdf_upper = family.cdf(upper) / denom;
    const double m = std::max(cdf_upper - prev_cdf, 0.0);
    masses[static_cast<std::size_t>(k - k_min)] = m;
    sup_bound = std::max(sup_bound, m);
    prev_cdf = cdf_upper;
  }
  // Normalization drift from the CDF evaluations stays within 1e-15; push it
  // into the largest bin so the mass invariant holds exactly enough.
  double total = 0.0;
  for (double m : masses) total += m;
  const auto top =
      std::max_element(masses.begin(), masses.end()) - masses.begin();
  masses[static_cast<std::size_t>(top)] += 1.0 - total;

  LatticeDist d = make_lattice(h, static_cast<double>(k_min) * h, std::move(masses));
  d.offset -= d.mean;
  d = make_lattice(d.step, d.offset, std::move(d.masses));
  return {std::move(d), sup_bound};
}

namespace {

// Positive-mass support with cached logs, shared by the cgf evaluations.
struct LogPmf {
  std::vector<double> x;
  std::vector<double> logm;

  explicit LogPmf(const LatticeDist& dist) {
    x.reserve(dist.masses.size());
    logm.reserve(dist.masses.size());
    for (std::size_t k = 0; k < dist.masses.size(); ++k) {
      if (dist.masses[k] <= 0.0) continue;
      x.push_back(dist.point(k));
      logm.push_back(std::log(dist.masses[k]));
    }
    if (x.empty()) throw std::invalid_argument("lattice carries no mass");
  }

  double cgf(double lambda) const {
    double m = -kInf;
    for (std::size_t i = 0; i < x.size(); ++i)
      m = std::max(m, logm[i] + lambda * x[i]);
    long double s = 0.0L;
    for (std::size_t i = 0; i < x.size(); ++i)
      s += std::exp(logm[i] + lambda * x[i] - m);
    return m + std::log(static_cast<double>(s));
  }

  double tilted_mean(double lambda) const {
    double m = -kInf;
    for (std::size_t i = 0; i < x.size(); ++i)
      m = std::max(m, logm[i] + lambda * x[i]);
    long double s0 = 0.0L, s1 = 0.0L;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const long double w = std::exp(logm[i] + lambda * x[i] - m);
      s0 += w;
      s1 += w * x[i];
    }
    return static_cast<double>(s1 / s0);
  }
};

}  // namespace

double lattice_cgf(const LatticeDist& dist, double lambda) {
  return LogPmf(dist).cgf(lambda);
}

TiltResult cgf_and_tilt(const LatticeDist& dist, double target_mean) {
  const LogPmf pmf(dist);
  const double x_max = pmf.x.back();
  const double span = x_max - pmf.x.front();
  if (span <= 0.0) throw std::invalid_argument("degenerate lattice support");
  if (target_mean <= dist.mean) return {0.0, 0.0};
  if (target_mean >= x_max - 1e-15 * std::fabs(x_max))
    throw std::domain_error("tilt target at or beyond the top support point");

  double hi = 1.0 / span;
  while (pmf.tilted_mean(hi) < target_mean) {
    hi *= 2.0;
    if (hi > 1e12 / span)
      throw std::domain_error("tilt target too close to the top support point");
  }
  double lo = 0.0;
  for (int it = 0; it < 120; ++it) {
    const double mid = 0.5 * (lo + hi);
    (pmf.tilted_mean(mid) < target_mean ? lo : hi) = mid;
  }
  const double lambda = 0.5 * (lo + hi);
  if (std::fabs(pmf.tilted_mean(lambda) - target_mean) > 1e-10 * span)
    throw NumericError("tilt root residual exceeds 1e-10 of the support width");
  return {lambda, pmf.cgf(lambda)};
}

double exact_tail_convolution(const LatticeDist& dist, std::int64_t n,
                              double threshold) {
  if (n < 1) throw std::invalid_argument("n must be >= 1");
  if (dist.masses.size() * static_cast<std::size_t>(n) > kMaxSupport)
    throw ResourceError("n-fold support exceeds 1e7 points");

  // Trim zero-mass edges so the support extremes carry mass.
  std::size_t lo = 0, hi = dist.masses.size();
  while (lo < hi && dist.masses[lo] == 0.0) ++lo;
  while (hi > lo && dist.masses[hi - 1] == 0.0) --hi;
  if (lo == hi) throw std::invalid_argument("lattice carries no mass");
  LatticeDist trimmed = dist;
  if (lo != 0 || hi != dist.masses.size()) {
    trimmed = make_lattice(
        dist.step, dist.point(lo),
        std::vector<double>(dist.masses.begin() + lo, dist.masses.begin() + hi));
  }
  const double x_min = trimmed.min_support();
  const double x_max = trimmed.max_support();
  const double nd = static_cast<double>(n);
  const double tol = 1e-9 * trimmed.step;

  if (threshold > nd * x_max + tol) return -kInf;
  if (threshold <= nd * x_min + tol) return 0.0;
  if (threshold > nd * x_max - trimmed.step + tol) {
    // Only the all-top-point path reaches the threshold.
    return nd * std::log(trimmed.masses.back());
  }

  const double target = threshold / nd;
  TiltResult tilt{0.0, 0.0};
  if (target > trimmed.mean) tilt = cgf_and_tilt(trimmed, target);

  Pmf single;
  single.base =
      static_cast<std::int64_t>(std::llround(trimmed.offset / trimmed.step));
  // offset may not be an exact multiple of step; carry the remainder apart.
  const double frac =
      trimmed.offset - static_cast<double>(single.base) * trimmed.step;
  single.masses.resize(trimmed.masses.size());
  for (std::size_t k = 0; k < trimmed.masses.size(); ++k) {
    const double m = trimmed.masses[k];
    single.masses[k] =
        m == 0.0
            ? 0.0
            : std::exp(std::log(m) + tilt.lambda * trimmed.point(k) - tilt.cgf);
  }
  prune(single);

  // Binary doubling of the tilted single-variable law.
  Pmf result;
  bool have_result = false;
  Pmf power = single;
  std::int64_t remaining = n;
  while (remaining > 0) {
    if (remaining & 1) {
      result = have_result ? convolve(result, power) : power;
      have_result = true;
    }
    remaining >>= 1;
    if (remaining > 0) power = convolve(power, power);
  }

  // Tail of the untilted sum: P_n(x) = T_n(x) exp(-lambda x + n cgf).
  const double total_frac = nd * frac;
  long double tail = 0.0L;
  const double start =
      (threshold - total_frac) / trimmed.step - static_cast<double>(result.base);
  auto k_start = static_cast<std::int64_t>(std::ceil(start - 1e-9));
  if (k_start < 0) k_start = 0;
  for (std::size_t k = static_cast<std::size_t>(k_start); k < result.masses.size();
       ++k) {
    const double x = (static_cast<double>(result.base) + static_cast<double>(k)) *
                         trimmed.step +
                     total_frac;
    tail += static_cast<long double>(result.masses[k]) *
            std::exp(-tilt.lambda * (x - threshold));
  }
  if (tail <= 0.0L) return -kInf;
  const double log_prob = std::log(static_cast<double>(tail)) -
                          tilt.lambda * threshold + nd * tilt.cgf;
  return std::min(log_prob, 0.0);
}

}  // namespace semidev
