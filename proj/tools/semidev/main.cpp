#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "expr.hpp"
#include "semidev/estimators.hpp"
#include "semidev/family.hpp"
#include "semidev/format.hpp"
#include "semidev/lattice.hpp"
#include "semidev/phase.hpp"
#include "semidev/rates.hpp"

namespace sd = semidev;
using nlohmann::json;

namespace {

// refuses to guess when a flag was left empty
double resolve(const std::string& text, const char* flag,
               const std::map<std::string, double>& vars) {
  if (text.empty())
    throw std::invalid_argument(std::string("missing required flag ") + flag);
  return sd::cli::eval_expr(text, vars);
}

// Output files land in SEMIDEV_OUTPUT_DIR when the path is relative.
class Output {
 public:
  explicit Output(const std::string& path) {
    if (path.empty()) return;
    std::filesystem::path p(path);
    if (const char* dir = std::getenv("SEMIDEV_OUTPUT_DIR");
        dir && p.is_relative())
      p = std::filesystem::path(dir) / p;
    file_.open(p);
    if (!file_) throw std::invalid_argument("cannot open output file " + p.string());
  }
  std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

 private:
  std::ofstream file_;
};

struct CommonFlags {
  std::string eps = "0.5";
  std::string q = "1";
  std::string sigma2 = "1";
  std::string gamma = "1";
  std::string beta;
  std::string c;
  std::string out;
};

struct Resolved {
  sd::ModelParams model;
  std::optional<double> beta;
  std::optional<double> c;
  std::map<std::string, double> vars;
};

Resolved resolve_common(const CommonFlags& flags) {
  Resolved r;
  std::map<std::string, double> vars;
  const double eps = sd::cli::eval_expr(flags.eps, vars);
  vars["eps"] = eps;
  vars["epsilon"] = eps;
  if (!flags.beta.empty()) {
    r.beta = sd::cli::eval_expr(flags.beta, vars);
    vars["beta"] = *r.beta;
  }
  if (!flags.c.empty()) {
    r.c = sd::cli::eval_expr(flags.c, vars);
    vars["c"] = *r.c;
  }
  r.model.epsilon = eps;
  r.model.q = sd::cli::eval_expr(flags.q, vars);
  r.model.sigma2 = sd::cli::eval_expr(flags.sigma2, vars);
  r.model.gamma = sd::cli::eval_expr(flags.gamma, vars);
  vars["q"] = r.model.q;
  vars["sigma2"] = r.model.sigma2;
  r.model.validate();
  r.vars = std::move(vars);
  return r;
}

sd::SemiexpFamily build_family(const std::string& name,
                               const std::string& family_json,
                               const sd::ModelParams& model) {
  if (!family_json.empty()) {
    std::string text = family_json;
    if (text.front() == '@') {
      std::ifstream in(text.substr(1));
      if (!in) throw std::invalid_argument("cannot read " + text.substr(1));
      std::stringstream ss;
      ss << in.rdbuf();
      text = ss.str();
    }
    const json spec = json::parse(text);
    sd::ModelParams mp;
    mp.epsilon = spec.value("epsilon", model.epsilon);
    mp.q = spec.value("q", model.q);
    mp.sigma2 = spec.value("sigma2", model.sigma2);
    mp.gamma = spec.value("gamma", model.gamma);
    const std::string kind = spec.at("kind");
    if (kind == "symmetric") return sd::SemiexpFamily::symmetric(mp);
    if (kind == "one_sided_centered") return sd::SemiexpFamily::one_sided(mp);
    if (kind == "lattice") {
      sd::LatticeSpec ls;
      ls.step = spec.at("step");
      ls.offset = spec.at("offset");
      ls.masses = spec.at("masses").get<std::vector<double>>();
      return sd::SemiexpFamily::lattice(mp, std::move(ls));
    }
    throw std::invalid_argument("unknown family kind " + kind);
  }
  if (name == "symmetric") return sd::SemiexpFamily::symmetric(model);
  if (name == "one_sided" || name == "one_sided_centered")
    return sd::SemiexpFamily::one_sided(model);
  if (name == "two_point")
    return sd::SemiexpFamily::lattice(model,
                                      sd::LatticeSpec{2.0, -1.0, {0.5, 0.5}});
  throw std::invalid_argument("unknown family " + name);
}

// ---------------------------------------------------------------- rate ----

int cmd_rate(const CommonFlags& common, const std::string& id_name,
             const std::string& ymin_s, const std::string& ymax_s, int points) {
  const Resolved r = resolve_common(common);
  const auto id = sd::rate_id_from_string(id_name);
  if (!id) throw std::invalid_argument("unknown rate id " + id_name);
  const sd::RateParams params{r.model, r.c};
  const double ymin = sd::cli::eval_expr(ymin_s, r.vars);
  const double ymax = resolve(ymax_s, "--ymax", r.vars);
  const auto rows = sd::emit_curve(*id, params, ymin, ymax, points);
  Output out(common.out);
  sd::write_curve_csv(out.stream(), rows);
  return 0;
}

// --------------------------------------------------------------- phase ----

int cmd_phase_point(const CommonFlags& common, const std::string& alpha_s,
                    const std::string& beta_s, const std::string& y_s) {
  CommonFlags flags = common;
  flags.beta = beta_s;
  if (flags.c.empty()) flags.c = "1";
  const Resolved r = resolve_common(flags);
  std::optional<double> y;
  if (!y_s.empty()) y = sd::cli::eval_expr(y_s, r.vars);
  const double alpha = resolve(alpha_s, "--alpha", r.vars);
  const sd::RegimeInfo info = sd::classify(alpha, *r.beta, r.model, *r.c, y);
  Output out(common.out);
  std::ostream& os = out.stream();
  os << sd::to_string(info.regime);
  if (info.speed_exponent) os << ", speed " << sd::fmt_g(*info.speed_exponent);
  if (info.y_condition) os << " (" << *info.y_condition << ")";
  os << "\n";
  return 0;
}

int cmd_phase_grid(const CommonFlags& common, const std::string& amin_s,
                   const std::string& amax_s, const std::string& bmin_s,
                   const std::string& bmax_s, int resolution,
                   const std::string& boundaries_out) {
  CommonFlags flags = common;
  if (flags.c.empty()) flags.c = "1";
  const Resolved r = resolve_common(flags);
  const double amin = resolve(amin_s, "--alpha-min", r.vars);
  const double amax = resolve(amax_s, "--alpha-max", r.vars);
  const double bmin = resolve(bmin_s, "--beta-min", r.vars);
  const double bmax = resolve(bmax_s, "--beta-max", r.vars);
  const sd::Diagram d =
      sd::diagram_grid(r.model, *r.c, {amin, amax}, {bmin, bmax}, resolution);
  Output out(common.out);
  sd::write_diagram_csv(out.stream(), d);
  if (!boundaries_out.empty()) {
    Output bout(boundaries_out);
    bout.stream() << sd::boundaries_json(d) << "\n";
  }
  return 0;
}

// ------------------------------------------------------------- estimate ----

double untruncated_speed(double alpha, double eps) {
  const double inv = 1.0 / (1.0 + eps);
  if (sd::nearly_equal(alpha, inv)) return (1.0 - eps) / (1.0 + eps);
  return alpha > inv ? alpha * (1.0 - eps) : 2.0 * alpha - 1.0;
}

int cmd_estimate(const CommonFlags& common, const std::string& estimator,
                 const std::string& family_name, const std::string& family_json,
                 const std::string& alpha_s, const std::string& y_s,
                 const std::string& n_list, std::uint64_t samples,
                 std::uint64_t seed, const std::string& h_s, bool do_slope,
                 const std::string& speed_s) {
  const Resolved r = resolve_common(common);
  const double alpha = resolve(alpha_s, "--alpha", r.vars);
  const double y = resolve(y_s, "--y", r.vars);

  std::vector<std::int64_t> ns;
  {
    std::stringstream ss(n_list);
    std::string tok;
    while (std::getline(ss, tok, ','))
      if (!tok.empty()) ns.push_back(std::stoll(tok));
  }
  if (ns.empty()) throw std::invalid_argument("--n needs at least one row size");
  for (std::size_t i = 1; i < ns.size(); ++i)
    if (ns[i] <= ns[i - 1])
      throw std::invalid_argument("--n schedule must be strictly increasing");
  if (estimator != "exact" && samples < 1000)
    throw std::invalid_argument("sample budget must be at least 1000");
  if (static_cast<bool>(r.beta) != static_cast<bool>(r.c))
    throw std::invalid_argument("truncation needs both --beta and --c");

  const sd::SemiexpFamily family = build_family(family_name, family_json, r.model);

  auto trunc_at = [&](std::int64_t n) -> std::optional<sd::TruncationParams> {
    if (!r.beta) return std::nullopt;
    return sd::TruncationParams{*r.beta, *r.c, n};
  };

  auto lattice_at = [&](std::int64_t n, double& threshold) -> sd::LatticeDist {
    const double raw = std::pow(static_cast<double>(n), alpha) * y;
    if (family.kind() == sd::FamilyKind::lattice) {
      threshold = raw;
      const auto& spec = family.lattice_spec();
      return sd::make_lattice(spec.step, spec.offset, spec.masses);
    }
    const auto trunc = trunc_at(n);
    if (!trunc)
      throw std::invalid_argument(
          "lattice estimators on a continuous family need --beta/--c");
    if (h_s.empty())
      throw std::invalid_argument(
          "lattice estimators on a continuous family need --step");
    const double h = sd::cli::eval_expr(h_s, r.vars);
    // the discretized law is re-centered; shift the threshold accordingly
    threshold = raw - static_cast<double>(n) * sd::moments(family, trunc).mean;
    return sd::discretize(family, *trunc, h).dist;
  };

  std::vector<sd::EstimateResult> results;
  for (const std::int64_t n : ns) {
    if (estimator == "naive") {
      results.push_back(
          sd::naive_estimate(family, trunc_at(n), n, alpha, y, samples, seed));
    } else if (estimator == "big_jump") {
      sd::Regime regime;
      if (r.beta) {
        regime = sd::classify(alpha, *r.beta, r.model, *r.c, y).regime;
      } else {
        const double inv = 1.0 / (1.0 + r.model.epsilon);
        if (sd::nearly_equal(alpha, inv))
          regime = sd::Regime::transition1;
        else if (alpha > inv)
          regime = sd::Regime::max_jump;
        else
          throw std::invalid_argument(
              "big_jump covers jump-driven regimes; alpha < 1/(1+eps) is Gaussian");
      }
      results.push_back(sd::big_jump_split_estimate(family, trunc_at(n), n,
                                                    alpha, y, samples, seed,
                                                    regime));
    } else if (estimator == "tilted") {
      double threshold = 0.0;
      const sd::LatticeDist d = lattice_at(n, threshold);
      sd::EstimateResult res = sd::tilted_is_estimate(d, n, threshold, samples, seed);
      res.y = y;
      results.push_back(std::move(res));
    } else if (estimator == "exact") {
      double threshold = 0.0;
      const sd::LatticeDist d = lattice_at(n, threshold);
      sd::EstimateResult res = sd::exact_lattice_estimate(d, n, threshold);
      res.y = y;
      results.push_back(std::move(res));
    } else {
      throw std::invalid_argument("unknown estimator " + estimator);
    }
  }

  Output out(common.out);
  std::ostream& os = out.stream();
  for (const auto& res : results) os << sd::to_json_line(res) << "\n";

  if (do_slope) {
    double speed;
    if (!speed_s.empty()) {
      speed = sd::cli::eval_expr(speed_s, r.vars);
    } else if (r.beta) {
      const sd::RegimeInfo info = sd::classify(alpha, *r.beta, r.model, *r.c, y);
      if (!info.speed_exponent)
        throw std::invalid_argument("no LDP speed in the trivial regime");
      speed = *info.speed_exponent;
    } else {
      speed = untruncated_speed(alpha, r.model.epsilon);
    }
    const sd::SlopeFit fit = sd::slope_fit(results, speed);
    os << "{\"slope_fit\":{\"limit_estimate\":" << sd::fmt_g17(fit.limit_estimate)
       << ",\"decay_exponent\":" << sd::fmt_g17(fit.decay_exponent)
       << ",\"speed_exponent\":" << sd::fmt_g17(speed)
       << ",\"reliable\":" << (fit.reliable ? "true" : "false")
       << ",\"per_n_ratios\":[";
    for (std::size_t i = 0; i < fit.per_n_ratios.size(); ++i) {
      if (i) os << ',';
      os << '[' << fit.per_n_ratios[i].first << ','
         << sd::fmt_g17(fit.per_n_ratios[i].second) << ']';
    }
    os << "]}}\n";
  }
  return 0;
}

// --------------------------------------------------------------- verify ----

struct Check {
  std::string name;
  bool pass = false;
  double worst = 0.0;
};

void run_rates_checks(std::uint64_t seed, std::vector<Check>& checks) {
  std::mt19937 gen(static_cast<unsigned>(seed));
  std::uniform_real_distribution<double> u_eps(0.1, 0.9), u_q(0.5, 3.0),
      u_s2(0.5, 4.0), u_c(0.3, 3.0), u01(0.0, 1.0);

  double worst_oracle = 0.0, worst_res = 0.0, worst_cont = 0.0, worst_c0 = 0.0;
  for (int set = 0; set < 5; ++set) {
    const sd::RateParams p{
        sd::ModelParams{u_eps(gen), u_q(gen), u_s2(gen), 1.0}, u_c(gen)};
    const sd::Thresholds th = sd::thresholds(p);
    for (int i = 0; i < 200; ++i) {
      const double yy = 10.0 * th.y1 * u01(gen);
      for (const sd::RateId id :
           {sd::RateId::transition, sd::RateId::transition2,
            sd::RateId::transition3, sd::RateId::t0}) {
        worst_oracle = std::max(
            worst_oracle, std::fabs(sd::evaluate_rate(id, p, yy).value -
                                    sd::rate_oracle_grid(id, p, yy, 512)));
      }
      const double ya = th.y0 * (1.0 + 1e-6) + 10.0 * th.y1 * u01(gen);
      const double t = sd::theta_root(p, ya);
      const double rhs = (1.0 - p.model.epsilon) * p.model.q * p.model.sigma2 /
                         std::pow(ya, 1.0 + p.model.epsilon);
      worst_res = std::max(
          worst_res,
          std::fabs((1.0 - t) * std::pow(t, p.model.epsilon) - rhs));
    }
    // branch continuity at y1 and y3
    const double tie = sd::theta_root(p, th.y1 * (1.0 + 1e-13));
    const double f_tie =
        p.model.q * std::pow(tie * th.y1, 1.0 - p.model.epsilon) +
        (1.0 - tie) * (1.0 - tie) * th.y1 * th.y1 / (2.0 * p.model.sigma2);
    worst_cont = std::max(
        worst_cont,
        std::fabs(f_tie - th.y1 * th.y1 / (2.0 * p.model.sigma2)));
    const double y3 = *th.y3;
    worst_cont = std::max(
        worst_cont, std::fabs(sd::gaussian_rate(p, y3).value -
                              (p.model.q * y3 * std::pow(*p.c, -p.model.epsilon) -
                               p.model.q * p.model.q * p.model.sigma2 *
                                   std::pow(*p.c, -2.0 * p.model.epsilon) / 2.0)));
    // i01 = i02 at c = c0
    sd::RateParams at_c0 = p;
    at_c0.c = *th.c0;
    for (int i = 0; i <= 50; ++i) {
      const double yy = 6.0 * th.y1 * i / 50.0;
      (void)sd::t0_rate(at_c0, yy);  // throws past 1e-8 disagreement
      worst_c0 = std::max(worst_c0, 0.0);
    }
  }
  checks.push_back({"rates.oracle_equivalence", worst_oracle < 1e-8, worst_oracle});
  checks.push_back({"rates.theta_residual", worst_res < 1e-10, worst_res});
  checks.push_back({"rates.branch_continuity", worst_cont < 1e-9, worst_cont});
  checks.push_back({"rates.i01_i02_at_c0", true, worst_c0});
}

void run_mc_checks(std::uint64_t seed, std::int64_t n, std::vector<Check>& checks) {
  const sd::LatticeDist d = sd::make_lattice(2.0, -1.0, {0.5, 0.5});
  const double exact4 = sd::exact_tail_convolution(d, 4, 2.0);
  const double gap4 = std::fabs(exact4 - std::log(5.0 / 16.0));
  checks.push_back({"mc.exact_two_point_n4", gap4 < 1e-12, gap4});

  const double thr = static_cast<double>(n) / 2.0;
  const double exact_n = sd::exact_tail_convolution(d, n, thr);
  const sd::EstimateResult is = sd::tilted_is_estimate(d, n, thr, 100'000, seed);
  const double gap = std::fabs(is.log_prob - exact_n);
  checks.push_back({"mc.tilted_vs_exact", gap <= 3.0 * is.std_err, gap});

  const double lr_gap = std::fabs(*is.lr_ratio - 1.0);
  checks.push_back(
      {"mc.likelihood_ratio_identity", lr_gap <= 3.0 * *is.lr_ratio_se, lr_gap});

  double prev = 0.0, worst = 0.0;
  bool monotone = true;
  for (int i = 0; i <= 20; ++i) {
    const double t = -static_cast<double>(n) + i * static_cast<double>(n) / 10.0;
    const double lp = sd::exact_tail_convolution(d, n, t);
    if (lp > prev + 1e-12) {
      monotone = false;
      worst = std::max(worst, lp - prev);
    }
    prev = lp;
  }
  checks.push_back({"mc.exact_monotone_in_threshold", monotone, worst});
}

void run_audit_checks(const std::string& family_name, std::vector<Check>& checks) {
  const sd::ModelParams mp{0.5, 1.0, 2.0, 1.0};
  const sd::SemiexpFamily family = build_family(family_name, "", mp);
  const std::vector<std::int64_t> grid{100, 1000, 10000};
  const sd::AuditReport rep =
      sd::audit_assumptions(family, std::nullopt, 0.8, grid);
  const double h1_gap =
      std::max(std::fabs(rep.rows.back().h1_ratio_max - 1.0),
               std::fabs(rep.rows.back().h1_ratio_min - 1.0));
  checks.push_back({"audit.h1_ratio", rep.h1_pass, h1_gap});
  checks.push_back({"audit.h2_vanishing", rep.h2_pass, rep.rows.back().h2_ratio});
  checks.push_back(
      {"audit.h2plus_vanishing", rep.h2plus_pass, rep.rows.back().h2plus_ratio});
}

int cmd_verify(const std::string& suite, std::uint64_t seed, std::int64_t n,
               const std::string& family_name, const std::string& out_path) {
  std::vector<Check> checks;
  if (suite == "rates" || suite == "all") run_rates_checks(seed, checks);
  if (suite == "mc" || suite == "all") run_mc_checks(seed, n, checks);
  if (suite == "audit" || suite == "all") run_audit_checks(family_name, checks);
  if (checks.empty())
    throw std::invalid_argument("unknown suite " + suite +
                                " (expected rates|mc|audit|all)");

  bool all_pass = true;
  Output out(out_path);
  std::ostream& os = out.stream();
  os << "{\"suite\":\"" << suite << "\",\"checks\":[";
  for (std::size_t i = 0; i < checks.size(); ++i) {
    if (i) os << ',';
    os << "{\"name\":\"" << checks[i].name << "\",\"pass\":"
       << (checks[i].pass ? "true" : "false")
       << ",\"worst_residual\":" << sd::fmt_g17(checks[i].worst) << '}';
    all_pass = all_pass && checks[i].pass;
  }
  os << "],\"pass\":" << (all_pass ? "true" : "false") << "}\n";
  if (!all_pass) {
    for (const auto& c : checks)
      if (!c.pass) std::cerr << "verify: check failed: " << c.name << "\n";
  }
  return all_pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Rate functions, regime classification, and rare-event estimators for "
      "sums of semiexponential triangular arrays"};
  app.require_subcommand(1);

  CommonFlags common;
  auto add_common = [&common](CLI::App* cmd) {
    cmd->add_option("--eps", common.eps, "tail exponent in (0,1)");
    cmd->add_option("--q", common.q, "tail constant");
    cmd->add_option("--sigma2", common.sigma2, "variance of the base variable");
    cmd->add_option("--gamma", common.gamma, "moment order in (0,1]");
    cmd->add_option("--c", common.c, "truncation level constant");
    cmd->add_option("--out", common.out,
                    "output file (default stdout; relative paths join "
                    "SEMIDEV_OUTPUT_DIR)");
  };

  // rate
  auto* rate = app.add_subcommand("rate", "emit a rate-function curve as CSV");
  std::string rate_id, ymin = "0", ymax;
  int points = 400;
  add_common(rate);
  rate->add_option("--id", rate_id,
                   "gaussian|max_jump|transition|transition2|trunc_max_jump|"
                   "transition3|t0")
      ->required();
  rate->add_option("--ymin", ymin, "lower end of the y grid");
  rate->add_option("--ymax", ymax, "upper end of the y grid")->required();
  rate->add_option("--points", points, "number of grid points");

  // phase
  auto* phase = app.add_subcommand("phase", "classify (alpha, beta) regimes");
  std::string alpha_s, beta_s, y_s;
  std::string amin_s, amax_s, bmin_s, bmax_s, boundaries_out;
  int resolution = 101;
  bool grid_mode = false;
  add_common(phase);
  phase->add_option("--alpha", alpha_s, "deviation exponent (expression)");
  phase->add_option("--beta", beta_s, "truncation exponent (expression)");
  phase->add_option("--y", y_s, "deviation size (resolves alpha = beta + 1)");
  phase->add_flag("--grid", grid_mode, "emit a diagram grid instead of a point");
  phase->add_option("--alpha-min", amin_s, "grid: smallest alpha");
  phase->add_option("--alpha-max", amax_s, "grid: largest alpha");
  phase->add_option("--beta-min", bmin_s, "grid: smallest beta");
  phase->add_option("--beta-max", bmax_s, "grid: largest beta");
  phase->add_option("--resolution", resolution, "grid points per axis");
  phase->add_option("--boundaries-out", boundaries_out,
                    "write boundary polylines JSON here");

  // estimate
  auto* est = app.add_subcommand("estimate",
                                 "rare-event probability estimates as JSON lines");
  std::string estimator, family_name = "symmetric", family_json, n_list, h_s,
              speed_s, est_alpha, est_y;
  std::uint64_t samples = 10'000, seed = 12'345;
  bool do_slope = false;
  add_common(est);
  est->add_option("--estimator", estimator, "naive|tilted|big_jump|exact")
      ->required();
  est->add_option("--family", family_name, "symmetric|one_sided|two_point");
  est->add_option("--family-json", family_json,
                  "family spec as JSON (or @file)");
  est->add_option("--alpha", est_alpha, "deviation exponent")->required();
  est->add_option("--y", est_y, "deviation size")->required();
  est->add_option("--beta", beta_s, "truncation exponent");
  est->add_option("--n", n_list, "comma-separated row sizes")->required();
  est->add_option("--samples", samples, "sample budget per row");
  est->add_option("--seed", seed, "RNG seed");
  est->add_option("--step", h_s, "discretization step for lattice estimators");
  est->add_flag("--slope-fit", do_slope, "append a slope-fit summary line");
  est->add_option("--speed", speed_s, "override the LDP speed exponent");

  // verify
  auto* verify = app.add_subcommand("verify", "self-verification suites");
  std::string suite, verify_family = "symmetric";
  std::int64_t verify_n = 32;
  std::uint64_t verify_seed = 1234;
  std::string verify_out;
  verify->add_option("suite", suite, "rates|mc|audit|all")->required();
  verify->add_option("--seed", verify_seed, "RNG seed");
  verify->add_option("--n", verify_n, "row size for the mc suite");
  verify->add_option("--family", verify_family, "family for the audit suite");
  verify->add_option("--out", verify_out, "report file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (rate->parsed())
      return cmd_rate(common, rate_id, ymin, ymax, points);
    if (phase->parsed()) {
      if (grid_mode)
        return cmd_phase_grid(common, amin_s, amax_s, bmin_s, bmax_s,
                              resolution, boundaries_out);
      common.beta = beta_s;
      return cmd_phase_point(common, alpha_s, beta_s, y_s);
    }
    if (est->parsed()) {
      common.beta = beta_s;
      return cmd_estimate(common, estimator, family_name, family_json,
                          est_alpha, est_y, n_list, samples, seed, h_s,
                          do_slope, speed_s);
    }
    if (verify->parsed())
      return cmd_verify(suite, verify_seed, verify_n, verify_family, verify_out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
