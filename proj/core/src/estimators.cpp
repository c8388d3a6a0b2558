#include "semidev/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "semidev/format.hpp"
#include "semidev/rates.hpp"

namespace semidev {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::uint64_t kBatch = 8192;

double log_add(double a, double b) {
  if (a == -kInf) return b;
  if (b == -kInf) return a;
  const double m = std::max(a, b);
  return m + std::log(std::exp(a - m) + std::exp(b - m));
}

double log_choose(std::int64_t n, std::int64_t k) {
  return std::lgamma(static_cast<double>(n) + 1.0) -
         std::lgamma(static_cast<double>(k) + 1.0) -
         std::lgamma(static_cast<double>(n - k) + 1.0);
}

void append_json_number(std::ostringstream& os, double v) {
  if (std::isfinite(v))
    os << fmt_g17(v);
  else
    os << "null";
}

}  // namespace

const char* to_string(Estimator estimator) {
  switch (estimator) {
    case Estimator::naive: return "naive";
    case Estimator::tilted_is: return "tilted_is";
    case Estimator::big_jump_split: return "big_jump_split";
    case Estimator::exact_lattice: return "exact_lattice";
  }
  return "?";
}

std::string to_json_line(const EstimateResult& r) {
  std::ostringstream os;
  os << "{\"n\":" << r.n << ",\"y\":" << fmt_g17(r.y) << ",\"log_prob\":";
  append_json_number(os, r.log_prob);
  os << ",\"std_err\":";
  append_json_number(os, r.std_err);
  os << ",\"samples\":" << r.samples << ",\"estimator\":\""
     << to_string(r.estimator) << "\",\"seed\":" << r.seed;
  if (!r.flags.empty()) {
    os << ",\"flags\":[";
    for (std::size_t i = 0; i < r.flags.size(); ++i) {
      if (i) os << ',';
      os << '"' << r.flags[i] << '"';
    }
    os << ']';
  }
  if (r.bias_bound) os << ",\"bias_bound\":" << fmt_g17(*r.bias_bound);
  os << '}';
  return os.str();
}

EstimateResult tilted_is_estimate(const LatticeDist& dist, std::int64_t n,
                                  double threshold, std::uint64_t samples,
                                  std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("n must be >= 1");
  if (samples < 1) throw std::invalid_argument("samples must be >= 1");

  // The tilt is a free change of measure: any lambda keeps the estimator
  // unbiased. Cap the target just below the top support point so thresholds
  // at n * max remain estimable.
  const double cap = dist.max_support() - dist.step / (2.0 * static_cast<double>(n));
  const double target = std::min(threshold / static_cast<double>(n), cap);
  TiltResult tilt{0.0, 0.0};
  if (target > dist.mean) tilt = cgf_and_tilt(dist, target);

  // Inverse-CDF table of the tilted law over the positive-mass support.
  std::vector<double> xs, cum;
  xs.reserve(dist.masses.size());
  cum.reserve(dist.masses.size());
  double acc = 0.0;
  for (std::size_t k = 0; k < dist.masses.size(); ++k) {
    if (dist.masses[k] <= 0.0) continue;
    acc += std::exp(std::log(dist.masses[k]) + tilt.lambda * dist.point(k) -
                    tilt.cgf);
    xs.push_back(dist.point(k));
    cum.push_back(acc);
  }
  cum.back() = 1.0;

  const double shift =
      static_cast<double>(n) * tilt.cgf - tilt.lambda * threshold;
  long double sum_u = 0.0L, sum_u2 = 0.0L, sum_lr = 0.0L, sum_lr2 = 0.0L;
  std::int64_t hits = 0;
  bool lr_clamped = false;

  const std::uint64_t batches = (samples + kBatch - 1) / kBatch;
  for (std::uint64_t b = 0; b < batches; ++b) {
    SplitMix64 gen(seed, b);
    const std::uint64_t count = std::min(kBatch, samples - b * kBatch);
    long double bu = 0.0L, bu2 = 0.0L, blr = 0.0L, blr2 = 0.0L;
    for (std::uint64_t r = 0; r < count; ++r) {
      double s = 0.0;
      for (std::int64_t i = 0; i < n; ++i) {
        const double u = gen.uniform_open();
        const auto it = std::lower_bound(cum.begin(), cum.end(), u);
        s += xs[static_cast<std::size_t>(it - cum.begin())];
      }
      double log_w = -tilt.lambda * (s - threshold);
      if (log_w > 700.0) {
        log_w = 700.0;
        lr_clamped = true;
      }
      const double w = std::exp(log_w);
      blr += w;
      blr2 += static_cast<long double>(w) * w;
      if (s >= threshold) {
        bu += w;  // here w <= 1
        bu2 += static_cast<long double>(w) * w;
        ++hits;
      }
    }
    sum_u += bu;
    sum_u2 += bu2;
    sum_lr += blr;
    sum_lr2 += blr2;
  }

  EstimateResult res;
  res.n = n;
  res.y = threshold;
  res.samples = samples;
  res.estimator = Estimator::tilted_is;
  res.seed = seed;
  res.hits = hits;

  const auto m = static_cast<double>(samples);
  const double mean_u = static_cast<double>(sum_u) / m;
  if (hits == 0) {
    res.log_prob = -kInf;
    res.std_err = kInf;
    res.flags.push_back("zero_hits");
  } else {
    res.log_prob = shift + std::log(mean_u);
    if (samples < 2) {
      res.std_err = kInf;
      res.flags.push_back("no_variance_estimate");
    } else {
      const double var_u =
          std::max(static_cast<double>(sum_u2 - sum_u * sum_u / m), 0.0) /
          (m - 1.0);
      res.std_err = std::sqrt(var_u / m) / mean_u;
    }
  }

  // E[exp(n K - lambda S)] = 1 under the tilted law; report the sample value.
  const double mean_lr = static_cast<double>(sum_lr) / m;
  res.lr_ratio = mean_lr * std::exp(shift);
  if (samples >= 2) {
    const double var_lr =
        std::max(static_cast<double>(sum_lr2 - sum_lr * sum_lr / m), 0.0) /
        (m - 1.0);
    res.lr_ratio_se = std::sqrt(var_lr / m) * std::exp(shift);
  }
  if (lr_clamped) res.flags.push_back("lr_weight_clamped");
  return res;
}

EstimateResult naive_estimate(const SemiexpFamily& family,
                              const std::optional<TruncationParams>& trunc,
                              std::int64_t n, double alpha, double y,
                              std::uint64_t samples, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("n must be >= 1");
  if (samples < 1) throw std::invalid_argument("samples must be >= 1");
  const double threshold = std::pow(static_cast<double>(n), alpha) * y;

  double cutoff = kInf;
  if (trunc) {
    trunc->validate();
    cutoff = trunc->cutoff();
    if (family.cdf(cutoff) < 1e-6)
      throw DegenerateTruncationError("acceptance probability below 1e-6");
  }

  std::int64_t hits = 0;
  const std::uint64_t batches = (samples + kBatch - 1) / kBatch;
  for (std::uint64_t b = 0; b < batches; ++b) {
    SplitMix64 gen(seed, b);
    const std::uint64_t count = std::min(kBatch, samples - b * kBatch);
    for (std::uint64_t r = 0; r < count; ++r) {
      double s = 0.0;
      if (trunc) {
        for (std::int64_t i = 0; i < n; ++i) s += draw_truncated(family, cutoff, gen);
      } else {
        for (std::int64_t i = 0; i < n; ++i) s += family.draw(gen);
      }
      if (s >= threshold) ++hits;
    }
  }

  EstimateResult res;
  res.n = n;
  res.y = y;
  res.samples = samples;
  res.estimator = Estimator::naive;
  res.seed = seed;
  res.hits = hits;
  const auto m = static_cast<double>(samples);
  if (hits == 0) {
    res.log_prob = -kInf;
    res.std_err = kInf;
    res.flags.push_back("zero_hits");
  } else {
    const double p = static_cast<double>(hits) / m;
    res.log_prob = std::log(p);
    res.std_err = std::sqrt((1.0 - p) / static_cast<double>(hits));
  }
  return res;
}

namespace {

// Jump threshold for the splitting estimator: the regime's typical jump
// share of the target, pulled back by a few standard deviations of the
// remaining sum so near-threshold jumps stay inside the stratified part.
double jump_threshold(const SemiexpFamily& family,
                      const std::optional<TruncationParams>& trunc,
                      double threshold, double y, double cutoff,
                      double sd_rest, Regime regime, double variance) {
  double theta_hat = 1.0;
  if (regime == Regime::transition1) {
    ModelParams mp = family.params();
    mp.sigma2 = variance;
    RateParams rp{mp, trunc ? std::optional<double>(trunc->c) : std::nullopt};
    const Thresholds th = thresholds(rp);
    if (y > th.y1) theta_hat = theta_root(rp, y);
  }
  const double base = std::min(theta_hat * threshold, 0.98 * cutoff);
  return std::max(base - 4.0 * sd_rest, 0.5 * base);
}

}  // namespace

EstimateResult big_jump_split_estimate(
    const SemiexpFamily& family, const std::optional<TruncationParams>& trunc,
    std::int64_t n, double alpha, double y, std::uint64_t samples,
    std::uint64_t seed, Regime regime) {
  switch (regime) {
    case Regime::max_jump:
    case Regime::transition1:
    case Regime::transition2:
    case Regime::trunc_max_jump:
    case Regime::t0:
      break;
    default:
      throw std::domain_error(
          "big_jump_split_estimate covers the jump-driven regimes only");
  }
  if (n < 1) throw std::invalid_argument("n must be >= 1");
  if (samples < 1) throw std::invalid_argument("samples must be >= 1");
  if (!(y > 0.0)) throw std::domain_error("big_jump_split_estimate needs y > 0");
  if (!family.is_continuous())
    throw std::invalid_argument("big_jump_split_estimate samples continuous families");

  const double threshold = std::pow(static_cast<double>(n), alpha) * y;
  double cutoff = kInf;
  if (trunc) {
    trunc->validate();
    cutoff = trunc->cutoff();
    if (family.cdf(cutoff) < 1e-6)
      throw DegenerateTruncationError("acceptance probability below 1e-6");
  }

  const MomentReport mom = moments(family, trunc);
  const double sd_rest = std::sqrt(static_cast<double>(n) * mom.variance);
  const double u_star = jump_threshold(family, trunc, threshold, y, cutoff,
                                       sd_rest, regime, mom.variance);
  const double log_pb = tail_log_prob(family, u_star, trunc);
  const double p_b = std::exp(log_pb);

  // Rejection against the cutoff inside the jump stratum must stay feasible.
  if (trunc) {
    const double keep =
        -std::expm1(family.magnitude_log_tail(
                        cutoff + (family.kind() == FamilyKind::one_sided_centered
                                      ? family.mean_shift()
                                      : 0.0)) -
                    family.magnitude_log_tail(
                        u_star + (family.kind() == FamilyKind::one_sided_centered
                                      ? family.mean_shift()
                                      : 0.0)));
    if (keep < 1e-6)
      throw DegenerateTruncationError(
          "jump stratum pinned against the truncation cutoff");
  }

  // Stratum weights; the loop always covers every feasible jump count up to
  // ceil(threshold/u*)+1 and then continues while the binomial weight stays
  // above 1e-3 of the running total.
  const std::int64_t m_plausible = std::min<std::int64_t>(
      static_cast<std::int64_t>(std::ceil(threshold / u_star)) + 1, n);
  const std::int64_t hard_cap = std::min<std::int64_t>(n, 256);
  std::vector<double> log_w;
  log_w.push_back(static_cast<double>(n) * std::log1p(-p_b));
  double running = log_w[0];
  for (std::int64_t m = 1; m <= hard_cap; ++m) {
    const double lw = log_choose(n, m) + static_cast<double>(m) * log_pb +
                      static_cast<double>(n - m) * std::log1p(-p_b);
    if (m > m_plausible && lw < std::log(1e-3) + running) break;
    log_w.push_back(lw);
    running = log_add(running, lw);
  }
  const auto m_max = static_cast<std::int64_t>(log_w.size()) - 1;

  EstimateResult res;
  res.n = n;
  res.y = y;
  res.samples = samples;
  res.estimator = Estimator::big_jump_split;
  res.seed = seed;

  const std::uint64_t s_each = std::max<std::uint64_t>(
      samples / static_cast<std::uint64_t>(m_max + 1), 64);
  bool empty_strata = false;
  double log_p = -kInf;
  std::vector<double> log_terms(static_cast<std::size_t>(m_max) + 1, -kInf);
  std::vector<double> log_ses(static_cast<std::size_t>(m_max) + 1, -kInf);
  std::vector<double> stratum_rate(static_cast<std::size_t>(m_max) + 1, 0.0);

  for (std::int64_t m = 0; m <= m_max; ++m) {
    const double lw = log_w[static_cast<std::size_t>(m)];
    if (lw == -kInf) {
      empty_strata = true;
      continue;
    }
    std::int64_t hits = 0;
    const std::uint64_t batches = (s_each + kBatch - 1) / kBatch;
    for (std::uint64_t b = 0; b < batches; ++b) {
      SplitMix64 gen(seed, static_cast<std::uint64_t>(m) * 0x100000000ULL + b);
      const std::uint64_t count = std::min(kBatch, s_each - b * kBatch);
      for (std::uint64_t r = 0; r < count; ++r) {
        double s = 0.0;
        for (std::int64_t j = 0; j < m; ++j) {
          double v;
          do {
            v = family.draw_upper_tail(u_star, gen);
          } while (v >= cutoff);
          s += v;
        }
        for (std::int64_t j = 0; j < n - m; ++j) {
          double v;
          do {
            v = trunc ? draw_truncated(family, cutoff, gen) : family.draw(gen);
          } while (v >= u_star);
          s += v;
        }
        if (s >= threshold) ++hits;
      }
    }
    res.hits += hits;
    const auto sm = static_cast<double>(s_each);
    const double p_m = static_cast<double>(hits) / sm;
    stratum_rate[static_cast<std::size_t>(m)] = p_m;
    if (hits > 0) {
      log_terms[static_cast<std::size_t>(m)] = lw + std::log(p_m);
      if (hits < static_cast<std::int64_t>(s_each)) {
        log_ses[static_cast<std::size_t>(m)] =
            lw + 0.5 * std::log(p_m * (1.0 - p_m) / sm);
      }
      log_p = log_add(log_p, log_terms[static_cast<std::size_t>(m)]);
    }
  }

  // A zero-hit stratum contributes nothing to the point estimate; its
  // Clopper-Pearson-style ceiling w_m * 3/s goes into the one-sided bias
  // bound (such a stratum can only add probability), and the result carries
  // a flag that the error bar is one-sided there.
  double missing = 0.0;
  for (std::int64_t m = 0; m <= m_max; ++m) {
    const double lw = log_w[static_cast<std::size_t>(m)];
    if (lw == -kInf || stratum_rate[static_cast<std::size_t>(m)] > 0.0) continue;
    const double ceiling = std::exp(lw) * 3.0 / static_cast<double>(s_each);
    if (log_p == -kInf || ceiling > 1e-3 * std::exp(log_p)) {
      res.flags.push_back("stratum_zero_hits_m" + std::to_string(m));
      missing += ceiling;
    }
  }

  long double covered = 0.0L;
  for (double lw : log_w)
    if (lw != -kInf) covered += std::exp(static_cast<long double>(lw));
  res.bias_bound =
      std::max(0.0, 1.0 - static_cast<double>(covered)) + missing;
  if (empty_strata) res.flags.push_back("empty_jump_strata");

  if (log_p == -kInf) {
    res.log_prob = -kInf;
    res.std_err = kInf;
    res.flags.push_back("zero_hits");
    return res;
  }
  res.log_prob = log_p;
  long double rel_var = 0.0L;
  for (double lse : log_ses)
    if (lse != -kInf)
      rel_var += std::exp(2.0L * (static_cast<long double>(lse) - log_p));
  res.std_err = std::sqrt(static_cast<double>(rel_var));
  return res;
}

EstimateResult exact_lattice_estimate(const LatticeDist& dist, std::int64_t n,
                                      double threshold) {
  EstimateResult res;
  res.n = n;
  res.y = threshold;
  res.log_prob = exact_tail_convolution(dist, n, threshold);
  res.std_err = 0.0;
  res.samples = 0;
  res.estimator = Estimator::exact_lattice;
  res.seed = 0;
  return res;
}

SlopeFit slope_fit(std::span<const EstimateResult> results,
                   double speed_exponent) {
  if (results.size() < 3)
    throw std::invalid_argument("slope_fit needs at least 3 results");
  std::vector<const EstimateResult*> rows;
  rows.reserve(results.size());
  for (const auto& r : results) rows.push_back(&r);
  std::sort(rows.begin(), rows.end(),
            [](const EstimateResult* a, const EstimateResult* b) {
              return a->n < b->n;
            });
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i]->n == rows[i - 1]->n)
      throw std::invalid_argument("slope_fit needs distinct n");
    if (rows[i]->estimator != rows[0]->estimator)
      throw std::invalid_argument("slope_fit needs one estimator family");
    if (!nearly_equal(rows[i]->y, rows[0]->y, 1e-9))
      throw std::invalid_argument("slope_fit needs a common y");
  }
  for (const auto* r : rows)
    if (!std::isfinite(r->log_prob))
      throw std::invalid_argument("slope_fit got a degenerate estimate");

  SlopeFit fit;
  for (const auto* r : rows)
    fit.per_n_ratios.emplace_back(
        r->n, r->log_prob / std::pow(static_cast<double>(r->n), speed_exponent));

  const std::size_t last = fit.per_n_ratios.size() - 1;
  const double n1 = static_cast<double>(fit.per_n_ratios[last - 2].first);
  const double n2 = static_cast<double>(fit.per_n_ratios[last - 1].first);
  const double n3 = static_cast<double>(fit.per_n_ratios[last].first);
  const double r1 = fit.per_n_ratios[last - 2].second;
  const double r2 = fit.per_n_ratios[last - 1].second;
  const double r3 = fit.per_n_ratios[last].second;
  const double d1 = r1 - r2;
  const double d2 = r2 - r3;

  const double scale = std::max({std::fabs(r1), std::fabs(r2), std::fabs(r3), 1.0});
  if (std::fabs(d1) <= 1e-14 * scale && std::fabs(d2) <= 1e-14 * scale) {
    fit.limit_estimate = r3;  // already flat
    fit.decay_exponent = 0.0;
    return fit;
  }
  if (d1 * d2 <= 0.0 || std::fabs(d2) >= std::fabs(d1)) {
    fit.limit_estimate = r3;
    fit.decay_exponent = 0.0;
    fit.reliable = false;  // not a contracting power-law trend
    return fit;
  }

  auto diff_ratio = [&](double b) {
    return (std::pow(n1, -b) - std::pow(n2, -b)) /
           (std::pow(n2, -b) - std::pow(n3, -b));
  };
  const double rho = d1 / d2;
  double lo = 1e-6, hi = 1e-6;
  if (diff_ratio(lo) >= rho) {
    fit.limit_estimate = r3;
    fit.decay_exponent = 0.0;
    fit.reliable = false;  // decays slower than any power of n
    return fit;
  }
  while (diff_ratio(hi) < rho && hi < 64.0) hi *= 2.0;
  if (diff_ratio(hi) < rho) {
    fit.limit_estimate = r3;
    fit.decay_exponent = hi;
    fit.reliable = false;
    return fit;
  }
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (diff_ratio(mid) < rho ? lo : hi) = mid;
  }
  const double b = 0.5 * (lo + hi);
  const double a = d2 / (std::pow(n2, -b) - std::pow(n3, -b));
  fit.decay_exponent = b;
  fit.limit_estimate = r3 - a * std::pow(n3, -b);
  return fit;
}

}  // namespace semidev
