#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "semidev/family.hpp"

using namespace semidev;

namespace {

ModelParams base_params(double eps = 0.5, double q = 1.0, double sigma2 = 2.0,
                        double gamma = 1.0) {
  return ModelParams{eps, q, sigma2, gamma};
}

SemiexpFamily two_point() {
  return SemiexpFamily::lattice(base_params(), LatticeSpec{2.0, -1.0, {0.5, 0.5}});
}

// Independent oracle: E[W^r] = integral of r t^(r-1) P(W >= t) dt by plain
// Simpson, in the variable u = sqrt(t) where the integrand is smooth.
double tail_integral_moment(double r, double q, double eps, double upper) {
  const int n = 1 << 21;
  const double u_hi = std::sqrt(upper);
  const double h = u_hi / n;
  auto f = [&](double u) {
    return u == 0.0 ? 0.0
                    : 2.0 * r * std::pow(u, 2.0 * r - 1.0) *
                          std::exp(-q * std::pow(u, 2.0 * (1.0 - eps)));
  };
  double acc = f(0.0) + f(u_hi);
  for (int i = 1; i < n; ++i) acc += f(h * i) * (i % 2 ? 4.0 : 2.0);
  return acc * h / 3.0;
}

double ks_statistic(std::vector<double> samples, const SemiexpFamily& family) {
  std::sort(samples.begin(), samples.end());
  const auto n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = family.cdf(samples[i]);
    d = std::max(d, std::max(f - static_cast<double>(i) / n,
                             static_cast<double>(i + 1) / n - f));
  }
  return d;
}

}  // namespace

TEST_CASE("parameter validation") {
  CHECK_THROWS_AS(SemiexpFamily::symmetric(base_params(0.0)),
                  std::invalid_argument);
  CHECK_THROWS_AS(SemiexpFamily::symmetric(base_params(1.0)),
                  std::invalid_argument);
  CHECK_THROWS_AS(SemiexpFamily::symmetric(base_params(0.5, -1.0)),
                  std::invalid_argument);
  CHECK_THROWS_AS(SemiexpFamily::symmetric(base_params(0.5, 1.0, 0.0)),
                  std::invalid_argument);
  CHECK_THROWS_AS(SemiexpFamily::symmetric(base_params(0.5, 1.0, 1.0, 1.5)),
                  std::invalid_argument);
  // lattice invariants: mass sum and zero mean
  CHECK_THROWS_AS(
      SemiexpFamily::lattice(base_params(), LatticeSpec{1.0, 0.0, {0.5, 0.4}}),
      std::invalid_argument);
  CHECK_THROWS_AS(
      SemiexpFamily::lattice(base_params(), LatticeSpec{1.0, 0.0, {0.5, 0.5}}),
      std::invalid_argument);
}

TEST_CASE("magnitude quantile matches the inverse tail") {
  const auto fam = SemiexpFamily::symmetric(base_params());
  CHECK(fam.magnitude_quantile(std::exp(-1.0)) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(fam.magnitude_quantile(std::exp(-4.0)) == doctest::Approx(16.0).epsilon(1e-12));
}

TEST_CASE("closed-form magnitude moments against the tail-integral oracle") {
  const auto fam = SemiexpFamily::one_sided(base_params());
  // q=1, eps=1/2: E[W] = Gamma(3) = 2, E[W^2] = Gamma(5) = 24, Var = 20.
  CHECK(fam.mean_shift() == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(fam.magnitude_moment(2.0) == doctest::Approx(24.0).epsilon(1e-12));
  const MomentReport rep = moments(fam);
  CHECK(rep.mean == 0.0);
  CHECK(rep.variance == doctest::Approx(20.0).epsilon(1e-10));

  CHECK(tail_integral_moment(1.0, 1.0, 0.5, 2500.0) ==
        doctest::Approx(2.0).epsilon(1e-8));
  CHECK(tail_integral_moment(2.0, 1.0, 0.5, 2500.0) ==
        doctest::Approx(24.0).epsilon(1e-8));
}

TEST_CASE("tail exactness of the closed-form families") {
  const auto sym = SemiexpFamily::symmetric(base_params());
  for (double y : {0.25, 1.0, 3.7, 19.0, 200.0}) {
    const double expected = std::log(0.5) - std::pow(y, 0.5);
    CHECK(tail_log_prob(sym, y) == doctest::Approx(expected).epsilon(1e-12));
  }
  const auto one = SemiexpFamily::one_sided(base_params());
  const double mu = one.mean_shift();
  for (double y : {0.25, 1.0, 3.7, 19.0}) {
    const double expected = -std::pow(y + mu, 0.5);
    CHECK(tail_log_prob(one, y) == doctest::Approx(expected).epsilon(1e-12));
  }
  // the prefactor vanishes at the (H1) scale
  const double big = 1e8;
  const double ratio = tail_log_prob(sym, big) / (-std::pow(big, 0.5));
  CHECK(ratio == doctest::Approx(1.0).epsilon(1e-3));
  CHECK_THROWS_AS(tail_log_prob(sym, 0.0), std::domain_error);
}

TEST_CASE("truncated tail behaviour") {
  const auto sym = SemiexpFamily::symmetric(base_params());
  const TruncationParams trunc{1.0, 4.0, 1};  // cutoff 4
  CHECK(tail_log_prob(sym, 4.0, trunc) == -std::numeric_limits<double>::infinity());
  CHECK(tail_log_prob(sym, 5.0, trunc) == -std::numeric_limits<double>::infinity());
  // below the cutoff the conditional tail exceeds the raw one
  const double raw = tail_log_prob(sym, 2.0);
  const double cond = tail_log_prob(sym, 2.0, trunc);
  CHECK(std::isfinite(cond));
  CHECK(cond < raw);  // mass between 2 and 4 only, renormalized by ~1

  const auto tp = two_point();
  CHECK(tail_log_prob(tp, 1.0) == doctest::Approx(std::log(0.5)).epsilon(1e-15));
  CHECK(tail_log_prob(tp, 0.5, TruncationParams{1.0, 0.75, 1}) ==
        -std::numeric_limits<double>::infinity());
}

TEST_CASE("sampling is deterministic and truncation is a no-op above the range") {
  const auto sym = SemiexpFamily::symmetric(base_params());
  const auto a = sample_base(sym, 42, 512);
  const auto b = sample_base(sym, 42, 512);
  CHECK(a == b);
  const auto c = sample_base(sym, 43, 512);
  CHECK(a != c);

  const double top =
      *std::max_element(a.begin(), a.end());
  const TruncationParams wide{1.0, std::ceil(top) + 1.0, 1};
  CHECK(sample_truncated(sym, wide, 42, 512) == a);

  const TruncationParams tight{1.0, 1.0, 1};
  for (double v : sample_truncated(sym, tight, 7, 2048)) CHECK(v < 1.0);
}

TEST_CASE("truncated sample mean matches the quadrature moments") {
  const auto one = SemiexpFamily::one_sided(base_params());
  const TruncationParams trunc{1.0, 16.0, 1};
  const MomentReport rep = moments(one, trunc);
  const auto draws = sample_truncated(one, trunc, 99, 1'000'000);
  double mean = 0.0;
  for (double v : draws) mean += v;
  mean /= static_cast<double>(draws.size());
  double var = 0.0;
  for (double v : draws) var += (v - mean) * (v - mean);
  var /= static_cast<double>(draws.size() - 1);
  const double se = std::sqrt(var / static_cast<double>(draws.size()));
  CHECK(std::fabs(mean - rep.mean) <= 3.0 * se);
}

TEST_CASE("moments of the lattice kinds") {
  const MomentReport rep = moments(two_point());
  CHECK(rep.mean == doctest::Approx(0.0));
  CHECK(rep.variance == doctest::Approx(1.0));
  CHECK(rep.abs_moment_2_gamma == doctest::Approx(1.0));
  CHECK(std::isinf(rep.cutoff));
}

TEST_CASE("truncated moments increase to the untruncated ones") {
  for (const auto& fam : {SemiexpFamily::symmetric(base_params()),
                          SemiexpFamily::one_sided(base_params())}) {
    const double full = moments(fam).variance;
    double prev = 0.0;
    for (double cut : {4.0, 8.0, 16.0, 32.0, 64.0, 128.0}) {
      const double v = moments(fam, TruncationParams{1.0, cut, 1}).variance;
      CHECK(v > prev);
      CHECK(v < full + 1e-9);
      prev = v;
    }
    CHECK(full - prev < 0.02 * full);
  }
}

TEST_CASE("symmetric closed-form higher moment agrees with quadrature") {
  // same numbers through the Gamma formula and the truncated-quadrature path
  const auto sym = SemiexpFamily::symmetric(base_params());
  const double closed = moments(sym).abs_moment_2_gamma;
  const double wide = moments(sym, TruncationParams{1.0, 1e6, 1}).abs_moment_2_gamma;
  CHECK(wide == doctest::Approx(closed).epsilon(1e-8));
}

TEST_CASE("empirical law: KS distance below the 1% critical value") {
  for (const auto& fam : {SemiexpFamily::symmetric(base_params()),
                          SemiexpFamily::one_sided(base_params(0.3, 1.5))}) {
    const auto draws = sample_base(fam, 2024, 100'000);
    const double crit = 1.6276 / std::sqrt(100'000.0);
    CHECK(ks_statistic(draws, fam) < crit);
  }
}

TEST_CASE("assumption audit on the exact-tail family") {
  const auto sym = SemiexpFamily::symmetric(base_params());
  const std::vector<std::int64_t> grid{100, 1000, 10000};
  const AuditReport rep = audit_assumptions(sym, std::nullopt, 0.8, grid);
  REQUIRE(rep.rows.size() == 3);
  for (const auto& row : rep.rows) {
    CHECK(row.h1_ratio_min == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(row.h1_ratio_max == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(row.h1_ratio_raw_max > 1.0);  // the sign-mass prefactor is visible
    CHECK(row.censored_points == 0);
  }
  CHECK(rep.h1_pass);
  // alpha(1+eps) = 1.2 > 1, fixed variance: (H2) ratio decays
  CHECK(rep.h2_pass);
  CHECK(rep.h2plus_pass);
  CHECK(rep.rows.back().h2_ratio < rep.rows.front().h2_ratio);
}

TEST_CASE("audit flags cutoff-censored points without failing") {
  const auto sym = SemiexpFamily::symmetric(base_params());
  const TruncationParams trunc{0.3, 1.0, 1};  // cutoff n^0.3 << n^0.8
  const std::vector<std::int64_t> grid{100, 1000};
  const AuditReport rep = audit_assumptions(sym, trunc, 0.8, grid);
  for (const auto& row : rep.rows) CHECK(row.censored_points > 0);
}

TEST_CASE("audit input validation") {
  const auto sym = SemiexpFamily::symmetric(base_params());
  const std::vector<std::int64_t> empty;
  CHECK_THROWS_AS(audit_assumptions(sym, std::nullopt, 0.8, empty),
                  std::invalid_argument);
  const std::vector<std::int64_t> unsorted{100, 100};
  CHECK_THROWS_AS(audit_assumptions(sym, std::nullopt, 0.8, unsorted),
                  std::invalid_argument);
}

TEST_CASE("family JSON spec") {
  const auto sym = SemiexpFamily::symmetric(base_params());
  const std::string js = sym.to_json();
  CHECK(js.find("\"kind\":\"symmetric\"") != std::string::npos);
  CHECK(js.find("\"epsilon\":0.5") != std::string::npos);
  const std::string lj = two_point().to_json();
  CHECK(lj.find("\"masses\":[0.5,0.5]") != std::string::npos);
  CHECK(lj.find("\"step\":2") != std::string::npos);
}
