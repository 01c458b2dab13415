#include "rmfpoly_cli/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>

#include "rmfpoly/curves.hpp"
#include "rmfpoly/errors.hpp"
#include "rmfpoly/fluctuations.hpp"
#include "rmfpoly/moments.hpp"
#include "rmfpoly/poly.hpp"
#include "rmfpoly/rmf.hpp"
#include "rmfpoly/sieve.hpp"

namespace rmfpoly::cli {

using nlohmann::json;

namespace {

constexpr const char* kToolName = "rmfpoly";
constexpr const char* kToolVersion = "0.3.0";

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
};

struct Result {
  json data;
  Table csv;
};

// Frozen CSV layouts, one per subcommand.
const std::map<std::string, std::vector<std::string>>& csv_columns() {
  static const std::map<std::string, std::vector<std::string>> cols = {
      {"kappa", {"poly", "prime_bound", "euler", "empirical_n", "squarefree_count", "empirical", "difference"}},
      {"sieve-dump", {"n", "value", "is_squarefree", "largest_prime", "factor_string"}},
      {"moments",
       {"n", "sf_count", "second_moment", "fourth", "diagonal", "off_diagonal", "s2", "s4", "cross", "classes"}},
      {"quadruples", {"n", "fourth_moment", "diagonal", "off_diagonal", "ratio"}},
      {"clt", {"bin", "lo", "hi", "count"}},
      {"curves", {"n", "a", "b", "count"}},
      {"fluctuations",
       {"i", "x", "threshold", "set_size", "set_ratio", "beta_exact", "beta_hat", "s2_var_exact", "s2_var_hat",
        "stat_max", "stat_median"}},
      {"smooth", {"x", "y", "psi"}},
  };
  return cols;
}

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

template <class T>
  requires std::is_integral_v<T>
std::string num(T v) {
  return std::to_string(v);
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

template <class T>
std::vector<T> parse_list(const std::string& s, const char* what) {
  std::vector<T> out;
  std::stringstream ss(s);
  for (std::string tok; std::getline(ss, tok, ',');) {
    if (tok.empty()) continue;
    std::size_t used = 0;
    try {
      if constexpr (std::is_floating_point_v<T>) {
        out.push_back(static_cast<T>(std::stod(tok, &used)));
      } else if constexpr (std::is_signed_v<T>) {
        out.push_back(static_cast<T>(std::stoll(tok, &used)));
      } else {
        if (tok.find('-') != std::string::npos) throw std::invalid_argument(tok);
        out.push_back(static_cast<T>(std::stoull(tok, &used)));
      }
    } catch (const std::logic_error&) {
      used = 0;
    }
    if (used != tok.size()) throw std::invalid_argument(std::string("bad entry in ") + what + ": '" + tok + "'");
  }
  if (out.empty()) throw std::invalid_argument(std::string(what) + " must be a non-empty comma-separated list");
  return out;
}

Model parse_model(const std::string& s) {
  if (s == "rademacher") return Model::Rademacher;
  if (s == "steinhaus") return Model::Steinhaus;
  throw std::invalid_argument("model must be rademacher or steinhaus");
}

Normalization parse_normalization(const std::string& s) {
  if (s == "exact") return Normalization::ExactSecondMoment;
  if (s == "kappa") return Normalization::KappaN;
  throw std::invalid_argument("normalization must be exact or kappa");
}

ScaleMode parse_mode(const std::string& s) {
  if (s == "geometric") return ScaleMode::GeometricSurrogate;
  if (s == "paper") return ScaleMode::PaperSchedule;
  throw std::invalid_argument("mode must be geometric or paper");
}

void require_positive(std::uint64_t v, const char* what) {
  if (v == 0) throw std::invalid_argument(std::string(what) + " must be positive");
}

json poly_json(const IntPolynomial& p) {
  return {{"coeffs", p.coeffs()}, {"text", p.to_string()}, {"degree", p.degree()}};
}

std::string factor_string(std::span<const PrimePower> f) {
  std::string s;
  for (const auto& pp : f) {
    if (!s.empty()) s += '*';
    s += std::to_string(pp.prime);
    if (pp.exponent > 1) s += '^' + std::to_string(pp.exponent);
  }
  return s.empty() ? "1" : s;
}

// ---- subcommands -----------------------------------------------------------

struct Command {
  std::function<json(const ExperimentConfig&)> plan;
  std::function<Result(const ExperimentConfig&)> exec;
};

json plan_kappa(const ExperimentConfig& c) {
  const auto p = IntPolynomial::parse(c.poly);
  require_positive(c.prime_bound, "--prime-bound");
  require_positive(c.empirical_n, "--empirical-n");
  return {{"poly", poly_json(p)}, {"steps", {"euler product over primes <= prime_bound", "sieve P(n), n <= empirical_n"}}};
}

Result exec_kappa(const ExperimentConfig& c) {
  const auto p = IntPolynomial::parse(c.poly);
  const double euler = kappa_euler(p, c.prime_bound);
  const auto table = sieve_values(p, c.empirical_n, c.threads);
  const auto sf = squarefree_count(table);
  const double emp = static_cast<double>(sf) / static_cast<double>(c.empirical_n);
  Result r;
  r.data = {{"poly", poly_json(p)}, {"prime_bound", c.prime_bound}, {"euler", euler}, {"empirical_n", c.empirical_n},
            {"squarefree_count", sf}, {"empirical", emp}, {"difference", emp - euler}};
  r.csv.rows.push_back({c.poly, num(c.prime_bound), num(euler), num(c.empirical_n), num(sf), num(emp), num(emp - euler)});
  return r;
}

json plan_sieve(const ExperimentConfig& c) {
  const auto p = IntPolynomial::parse(c.poly);
  require_positive(c.n, "--n");
  return {{"poly", poly_json(p)}, {"n", c.n}, {"rows", c.limit == 0 ? c.n : std::min(c.limit, c.n)}};
}

Result exec_sieve(const ExperimentConfig& c) {
  const auto p = IntPolynomial::parse(c.poly);
  const auto table = sieve_values(p, c.n, c.threads);
  const std::uint64_t rows = c.limit == 0 ? c.n : std::min(c.limit, c.n);
  Result r;
  json list = json::array();
  for (std::uint64_t n = 1; n <= rows; ++n) {
    const auto f = table.factors(n);
    json fac = json::array();
    for (const auto& pp : f) fac.push_back({pp.prime, pp.exponent});
    const auto lp = table.largest_prime_or_one(n);
    list.push_back({{"n", n}, {"value", table.value(n)}, {"factors", fac}, {"squarefree", table.is_squarefree(n)},
                    {"largest_prime", lp}});
    r.csv.rows.push_back({num(n), num(table.value(n)), table.is_squarefree(n) ? "1" : "0", num(lp), factor_string(f)});
  }
  const auto lps = largest_prime_stats(table, c.c);
  r.data = {{"poly", poly_json(p)},
            {"n", c.n},
            {"squarefree_count", squarefree_count(table)},
            {"largest_prime",
             {{"c", lps.c},
              {"proportion_gt_n", lps.proportion_gt_n},
              {"proportion_gt_nlogn", lps.proportion_gt_nlogn},
              {"mean_log_ratio", lps.mean_log_ratio},
              {"hist_lo", lps.hist_lo},
              {"hist_hi", lps.hist_hi},
              {"hist_counts", lps.hist_counts}}},
            {"rows", list}};
  return r;
}

json plan_moments(const ExperimentConfig& c) {
  const auto p = IntPolynomial::parse(c.poly);
  require_positive(c.n, "--n");
  return {{"poly", poly_json(p)}, {"n", c.n}, {"gcd_d", c.gcd_d}, {"gcd_samples", c.gcd_samples}};
}

Result exec_moments(const ExperimentConfig& c) {
  const auto p = IntPolynomial::parse(c.poly);
  const auto table = sieve_values(p, c.n, c.threads);
  const auto m = moment_report(table, c.threads);
  const auto g = gcd_class_histogram(table, c.gcd_d, c.gcd_samples, resolve_seed(c));
  json counts = json::array();
  for (const auto& [d, k] : g.counts) counts.push_back({d, k});
  Result r;
  r.data = {{"poly", poly_json(p)},
            {"n", m.n},
            {"sf_count", m.sf_count},
            {"second_moment", m.second_moment},
            {"fourth", {{"total", m.fourth.fourth}, {"diagonal", m.fourth.diagonal}, {"off_diagonal", m.fourth.off_diagonal}}},
            {"mcleish",
             {{"s2", m.mcleish.s2},
              {"s4", m.mcleish.s4},
              {"cross", m.mcleish.cross},
              {"class_second", m.mcleish.class_second},
              {"class_fourth", m.mcleish.class_fourth},
              {"class_cross", m.mcleish.class_cross},
              {"classes", m.mcleish.classes}}},
            {"gcd",
             {{"d_threshold", g.d_threshold},
              {"pairs", g.pairs},
              {"exhaustive", g.exhaustive},
              {"above_d", g.above_d},
              {"above_n", g.above_n},
              {"mass_above_d", g.mass_above_d},
              {"mass_above_n", g.mass_above_n},
              {"counts", counts}}}};
  r.csv.rows.push_back({num(m.n), num(m.sf_count), num(m.second_moment), num(m.fourth.fourth), num(m.fourth.diagonal),
                        num(m.fourth.off_diagonal), num(m.mcleish.s2), num(m.mcleish.s4), num(m.mcleish.cross),
                        num(m.mcleish.classes)});
  return r;
}

std::vector<std::uint64_t> quadruple_ns(const ExperimentConfig& c) {
  auto ns = parse_list<std::uint64_t>(c.ns.empty() ? "500,1000,2000,4000" : c.ns, "--ns");
  for (auto v : ns) require_positive(v, "--ns entries");
  return ns;
}

json plan_quadruples(const ExperimentConfig& c) {
  return {{"poly", poly_json(IntPolynomial::parse(c.poly))}, {"ns", quadruple_ns(c)}};
}

Result exec_quadruples(const ExperimentConfig& c) {
  const auto p = IntPolynomial::parse(c.poly);
  const auto ns = quadruple_ns(c);
  const auto t = quadruple_trend(p, ns, c.threads);
  Result r;
  json rows = json::array();
  for (const auto& row : t.rows) {
    rows.push_back({{"n", row.n}, {"fourth", row.moments.fourth}, {"diagonal", row.moments.diagonal},
                    {"off_diagonal", row.moments.off_diagonal}, {"off_diagonal_over_n2", row.ratio}});
    r.csv.rows.push_back({num(row.n), num(row.moments.fourth), num(row.moments.diagonal),
                          num(row.moments.off_diagonal), num(row.ratio)});
  }
  r.data = {{"poly", poly_json(p)},
            {"rows", rows},
            {"loglog_slope", t.loglog_slope},
            {"ratio_strictly_decreasing", t.ratio_strictly_decreasing}};
  return r;
}

json plan_clt(const ExperimentConfig& c) {
  const auto p = IntPolynomial::parse(c.poly);
  require_positive(c.n, "--n");
  require_positive(c.trials, "--trials");
  parse_model(c.model);
  parse_normalization(c.normalization);
  return {{"poly", poly_json(p)}, {"n", c.n}, {"trials", c.trials}, {"seed", resolve_seed(c)}, {"model", c.model},
          {"normalization", c.normalization}, {"ks_vacuous", c.trials < kKsMinTrials}};
}

Result exec_clt(const ExperimentConfig& c) {
  const auto p = IntPolynomial::parse(c.poly);
  CltOptions o;
  o.trials = c.trials;
  o.seed = resolve_seed(c);
  o.model = parse_model(c.model);
  o.normalization = parse_normalization(c.normalization);
  o.threads = c.threads;
  const auto rep = monte_carlo_clt(p, c.n, o);
  Result r;
  r.data = {{"poly", poly_json(p)},
            {"n", rep.n},
            {"trials", rep.trials},
            {"seed", rep.seed},
            {"model", to_string(rep.model)},
            {"normalization", to_string(rep.normalization)},
            {"outside_theorem", rep.outside_theorem},
            {"variance_used", rep.variance_used},
            {"raw_abs2", rep.raw_abs2},
            {"raw_abs4", rep.raw_abs4},
            {"mean", rep.mean},
            {"m2", rep.m2},
            {"m4", rep.m4},
            {"abs2", rep.abs2},
            {"abs4", rep.abs4},
            {"ks", rep.ks},
            {"ks_reference", rep.model == Model::Rademacher ? "N(0,1)" : "N(0,1/2) for Re S"},
            {"ks_vacuous", rep.ks_vacuous},
            {"histogram",
             {{"lo", rep.hist_lo},
              {"hi", rep.hist_hi},
              {"counts", rep.hist_counts},
              {"underflow", rep.hist_underflow},
              {"overflow", rep.hist_overflow}}}};
  const auto bins = rep.hist_counts.size();
  for (std::size_t i = 0; i < bins; ++i) {
    const double w = (rep.hist_hi - rep.hist_lo) / static_cast<double>(bins);
    r.csv.rows.push_back({num(i), num(rep.hist_lo + w * static_cast<double>(i)),
                          num(rep.hist_lo + w * static_cast<double>(i + 1)), num(rep.hist_counts[i])});
  }
  return r;
}

bool curves_pair_mode(const ExperimentConfig& c) { return !c.scan; }

json plan_curves(const ExperimentConfig& c) {
  const auto p = IntPolynomial::parse(c.poly);
  if (p.degree() < 2) throw DomainError("curve counts need degree >= 2");
  if (curves_pair_mode(c)) {
    if (c.a < 1 || c.b < 1) throw std::invalid_argument("pair mode needs positive --a and --b (or use --scan)");
    require_positive(c.n, "--n");
    return {{"poly", poly_json(p)}, {"mode", "pair"}, {"a", c.a}, {"b", c.b}, {"n", c.n}};
  }
  const auto ns = parse_list<std::int64_t>(c.ns.empty() ? std::to_string(c.n) : c.ns, "--ns");
  if (c.ab_max == 1) throw std::invalid_argument("--ab-max must be at least 2 to draw a != b");
  return {{"poly", poly_json(p)}, {"mode", "scan"}, {"ns", ns}, {"ab_samples", c.ab_samples}, {"ab_max", c.ab_max},
          {"seed", resolve_seed(c)}};
}

json points_json(const std::vector<CurvePoint>& pts) {
  json a = json::array();
  for (const auto& pt : pts) a.push_back({pt.x, pt.y});
  return a;
}

Result exec_curves(const ExperimentConfig& c) {
  const auto p = IntPolynomial::parse(c.poly);
  plan_curves(c);
  Result r;
  if (curves_pair_mode(c)) {
    const auto n = static_cast<std::int64_t>(c.n);
    const auto pts = integral_points(p, c.a, c.b, n);
    r.data = {{"poly", poly_json(p)}, {"mode", "pair"}, {"a", c.a}, {"b", c.b}, {"n", n}, {"count", pts.size()},
              {"points", points_json(pts)}};
    r.csv.rows.push_back({num(n), num(c.a), num(c.b), num(pts.size())});
    return r;
  }
  const auto ns = parse_list<std::int64_t>(c.ns.empty() ? std::to_string(c.n) : c.ns, "--ns");
  const auto rep = exponent_scan(p, ns, c.ab_samples, resolve_seed(c), c.ab_max);
  json rows = json::array();
  for (const auto& row : rep.rows) {
    json samples = json::array();
    for (const auto& s : row.samples) {
      samples.push_back({{"a", s.a}, {"b", s.b}, {"count", s.count}, {"points", points_json(s.points)}});
      r.csv.rows.push_back({num(row.n), num(s.a), num(s.b), num(s.count)});
    }
    rows.push_back({{"n", row.n}, {"ab_max", row.ab_max}, {"max_count", row.max_count}, {"mean_count", row.mean_count},
                    {"diagonal_count", row.diagonal_count}, {"samples", samples}});
  }
  r.data = {{"poly", poly_json(p)},
            {"mode", "scan"},
            {"rows", rows},
            {"max_nondecreasing", rep.max_nondecreasing},
            {"max_offdiag_count", rep.max_offdiag_count}};
  return r;
}

ScaleSet fluct_scales(const ExperimentConfig& c) {
  return make_scales(c.base, static_cast<std::size_t>(c.scales), parse_mode(c.mode), c.cap);
}

json plan_fluct(const ExperimentConfig& c) {
  require_positive(c.trials, "--trials");
  const auto s = fluct_scales(c);
  parse_list<double>(c.thresholds, "--thresholds");
  return {{"scales", s.xs}, {"mode", to_string(s.mode)}, {"trials", c.trials}, {"seed", resolve_seed(c)},
          {"c", c.c}, {"floor", c.floor}};
}

Result exec_fluct(const ExperimentConfig& c) {
  const auto s = fluct_scales(c);
  LilOptions o;
  o.trials = c.trials;
  o.seed = resolve_seed(c);
  o.c = c.c;
  o.floor = c.floor;
  o.threads = c.threads;
  o.thresholds = parse_list<double>(c.thresholds, "--thresholds");
  o.beta_floor = c.beta_floor;
  const auto rep = lil_scan(s, o);
  Result r;
  json rows = json::array();
  for (std::size_t i = 0; i < rep.rows.size(); ++i) {
    const auto& row = rep.rows[i];
    rows.push_back({{"i", i + 1},
                    {"x", row.x},
                    {"threshold", row.threshold},
                    {"set_size", row.set_size},
                    {"set_ratio", row.set_ratio},
                    {"beta_exact", row.beta_exact},
                    {"beta_hat", row.beta_hat},
                    {"s2_support", row.s2_support},
                    {"s2_var_exact", row.s2_var_exact},
                    {"s2_var_hat", row.s2_var_hat},
                    {"stat_max", row.stat_max},
                    {"stat_median", row.stat_median}});
    r.csv.rows.push_back({num(i + 1), num(row.x), num(row.threshold), num(row.set_size), num(row.set_ratio),
                          num(row.beta_exact), num(row.beta_hat), num(row.s2_var_exact), num(row.s2_var_hat),
                          num(row.stat_max), num(row.stat_median)});
  }
  r.data = {{"scales", s.xs},
            {"mode", to_string(s.mode)},
            {"trials", rep.trials},
            {"seed", rep.seed},
            {"c", rep.c},
            {"floor", rep.floor},
            {"sets_ok", rep.sets_ok},
            {"partition_exact", rep.partition_exact},
            {"residual_zero", rep.residual_zero},
            {"rows", rows},
            {"thresholds", rep.thresholds},
            {"exceed_fraction", rep.exceed_fraction},
            {"max_stat", rep.max_stat},
            {"studentized_max", rep.studentized_max},
            {"studentized_level", rep.studentized_level},
            {"studentized_exceed_fraction", rep.studentized_exceed_fraction},
            {"studentized_median", rep.studentized_median},
            {"good_scale_fraction", rep.good_scale_fraction}};
  return r;
}

json plan_smooth(const ExperimentConfig& c) {
  if (c.x < 2 || c.y < 2) throw std::invalid_argument("--x and --y must be at least 2");
  return {{"x", c.x}, {"y", c.y}};
}

Result exec_smooth(const ExperimentConfig& c) {
  plan_smooth(c);
  const auto psi = smooth_count(c.x, c.y);
  Result r;
  r.data = {{"x", c.x}, {"y", c.y}, {"psi", psi}};
  r.csv.rows.push_back({num(c.x), num(c.y), num(psi)});
  return r;
}

const std::map<std::string, Command>& commands() {
  static const std::map<std::string, Command> cmds = {
      {"kappa", {plan_kappa, exec_kappa}},
      {"sieve-dump", {plan_sieve, exec_sieve}},
      {"moments", {plan_moments, exec_moments}},
      {"quadruples", {plan_quadruples, exec_quadruples}},
      {"clt", {plan_clt, exec_clt}},
      {"curves", {plan_curves, exec_curves}},
      {"fluctuations", {plan_fluct, exec_fluct}},
      {"smooth", {plan_smooth, exec_smooth}},
  };
  return cmds;
}

// ---- argument parsing ------------------------------------------------------

struct Parser {
  CLI::App app{"Random multiplicative functions at polynomial arguments: sieving, moments, curves, "
               "Monte Carlo CLT and fluctuation experiments.",
               kToolName};
  std::map<std::string, CLI::App*> subs;
  CLI::Option* seed_opt = nullptr;
  std::map<std::string, CLI::Option*> seed_opts;
  std::uint64_t seed_value = 0;

  explicit Parser(ExperimentConfig& c) {
    app.require_subcommand(1);
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    app.set_version_flag("--version", kToolVersion);
    auto common = [&](CLI::App* s, bool seeded) {
      s->option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
      s->add_flag("--dry-run", c.dry_run, "Validate the config and print the resolved plan");
      s->add_option("--threads", c.threads, "Worker cap; output does not depend on it")->check(CLI::Range(1U, 1024U));
      s->add_option("--config", c.config_path, "JSON file with the same fields as the flags; flags override");
      s->add_option("--out", c.out, "Output file (default: stdout)");
      s->add_option("--format", c.format, "Output format")->check(CLI::IsMember({"json", "csv"}));
      if (seeded) {
        seed_opts[s->get_name()] = s->add_option("--seed", seed_value, "Master seed (default: $RCL_SEED, then 0)");
      }
      const auto& cols = csv_columns().at(s->get_name());
      std::string footer = "CSV columns:";
      for (const auto& col : cols) footer += " " + col;
      s->footer(footer);
    };
    auto poly = [&](CLI::App* s) {
      s->add_option("--poly", c.poly, "Coefficients, constant term first (e.g. 1,0,1 = x^2 + 1)");
    };

    auto* k = add("kappa", "Squarefree density of P(n): Euler product against the sieve");
    poly(k);
    k->add_option("--prime-bound", c.prime_bound, "Primes in the Euler product");
    k->add_option("--empirical-n", c.empirical_n, "Sieve range for the empirical density");
    common(k, false);

    auto* sd = add("sieve-dump", "Factorizations of P(1..N) and largest-prime statistics");
    poly(sd);
    sd->add_option("--n", c.n, "Range N");
    sd->add_option("--limit", c.limit, "Rows to list (0 = all)");
    sd->add_option("--c", c.c, "Constant in the P+(P(n)) > c n log n proportion");
    common(sd, false);

    auto* m = add("moments", "Exact second/fourth moments, McLeish sums and gcd classes");
    poly(m);
    m->add_option("--n", c.n, "Range N");
    m->add_option("--gcd-d", c.gcd_d, "Threshold D for the gcd statistic");
    m->add_option("--gcd-samples", c.gcd_samples, "Sampled pairs for the gcd statistic (0 = all pairs)");
    common(m, true);

    auto* q = add("quadruples", "Off-diagonal quadruple counts across N");
    poly(q);
    q->add_option("--ns", c.ns, "Comma-separated N values");
    common(q, false);

    auto* clt = add("clt", "Monte Carlo distribution of the normalized partial sum");
    poly(clt);
    clt->add_option("--n", c.n, "Range N");
    clt->add_option("--trials", c.trials, "Independent realizations");
    clt->add_option("--model", c.model, "rademacher | steinhaus")->check(CLI::IsMember({"rademacher", "steinhaus"}));
    clt->add_option("--normalization", c.normalization, "exact (second moment) | kappa (kappa_P N)")
        ->check(CLI::IsMember({"exact", "kappa"}));
    common(clt, true);

    auto* cv = add("curves", "Integral points on a P(x) = b P(y) in [1,N]^2");
    poly(cv);
    cv->add_option("--a", c.a, "Coefficient a (pair mode, with --b)");
    cv->add_option("--b", c.b, "Coefficient b (pair mode, with --a)");
    cv->add_option("--n", c.n, "Box size N");
    cv->add_flag("--scan", c.scan, "Scan random pairs a != b instead of one (a, b)");
    cv->add_option("--ns", c.ns, "Scan mode: comma-separated N values (default: --n)");
    cv->add_option("--samples,--ab-samples", c.ab_samples, "Scan mode: random pairs a != b per N");
    cv->add_option("--ab-max", c.ab_max, "Scan mode: draw a, b from [1, ab-max] (0 = [1, N])");
    common(cv, true);

    auto* fl = add("fluctuations", "Large-fluctuation scan of sum f(n^2 + 1) over scales");
    fl->add_option("--base", c.base, "Base scale X");
    fl->add_option("--scales", c.scales, "Number of scales k");
    fl->add_option("--mode", c.mode, "geometric | paper")->check(CLI::IsMember({"geometric", "paper"}));
    fl->add_option("--cap", c.cap, "Largest admissible scale");
    fl->add_option("--c", c.c, "Threshold constant in p > c x log x");
    fl->add_option("--floor", c.floor, "Threshold floor: p > floor * x as well");
    fl->add_option("--trials", c.trials, "Independent realizations");
    fl->add_option("--thresholds", c.thresholds, "Comma-separated levels for the normalized maximum");
    fl->add_option("--beta-floor", c.beta_floor, "Scales with beta below this are left out of the studentized max");
    common(fl, true);

    auto* sm = add("smooth", "psi(x, y): count of y-smooth n <= x");
    sm->add_option("--x", c.x, "x");
    sm->add_option("--y", c.y, "y");
    common(sm, false);
  }

  CLI::App* add(const std::string& name, const std::string& desc) {
    auto* s = app.add_subcommand(name, desc);
    subs[name] = s;
    return s;
  }
};

std::string config_path_from(const std::vector<std::string>& args) {
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) return args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) return args[i].substr(9);
  }
  return {};
}

// Turns config-file fields into flags placed before the user's flags, so the
// user's flags win under the take-last policy. Unknown keys are rejected.
std::vector<std::string> config_args(const std::string& path, CLI::App* sub) {
  std::ifstream in(path);
  if (!in) throw CLI::ValidationError("--config", "cannot open " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw CLI::ValidationError("--config", std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw CLI::ValidationError("--config", "top level must be an object");
  std::vector<std::string> out;
  for (const auto& [key, val] : j.items()) {
    std::string flag = key;
    std::replace(flag.begin(), flag.end(), '_', '-');
    if (flag == "subcommand" || flag == "config") continue;
    if (sub->get_option_no_throw("--" + flag) == nullptr) {
      throw CLI::ValidationError("--config", "field '" + key + "' does not apply to " + sub->get_name());
    }
    if (val.is_boolean()) {
      if (val.get<bool>()) out.push_back("--" + flag);
      continue;
    }
    std::string text;
    if (val.is_string()) {
      text = val.get<std::string>();
    } else if (val.is_array()) {
      for (const auto& e : val) text += (text.empty() ? "" : ",") + (e.is_string() ? e.get<std::string>() : e.dump());
    } else {
      text = val.dump();
    }
    out.push_back("--" + flag);
    out.push_back(text);
  }
  return out;
}

void emit_error(std::ostream& err, int code, const std::string& kind, const std::string& msg) {
  err << json{{"error", {{"code", code}, {"kind", kind}, {"message", msg}}}}.dump() << '\n';
}

void write_csv(std::ostream& os, const json& header, const std::vector<std::string>& cols, const Table& t) {
  os << "# " << header.dump() << '\n';
  for (std::size_t i = 0; i < cols.size(); ++i) os << (i ? "," : "") << cols[i];
  os << '\n';
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << csv_escape(row[i]);
    os << '\n';
  }
}

}  // namespace

json to_json(const ExperimentConfig& c) {
  json j = {{"subcommand", c.subcommand}, {"threads", c.threads}, {"format", c.format}, {"out", c.out},
            {"dry_run", c.dry_run},       {"config", c.config_path}};
  const auto& s = c.subcommand;
  const bool polyed = s != "fluctuations" && s != "smooth";
  if (polyed) j["poly"] = c.poly;
  if (s == "kappa") {
    j["prime_bound"] = c.prime_bound;
    j["empirical_n"] = c.empirical_n;
  }
  if (s == "sieve-dump") {
    j["n"] = c.n;
    j["limit"] = c.limit;
    j["c"] = c.c;
  }
  if (s == "moments") {
    j["n"] = c.n;
    j["gcd_d"] = c.gcd_d;
    j["gcd_samples"] = c.gcd_samples;
  }
  if (s == "quadruples") j["ns"] = c.ns;
  if (s == "clt") {
    j["n"] = c.n;
    j["trials"] = c.trials;
    j["model"] = c.model;
    j["normalization"] = c.normalization;
  }
  if (s == "curves") {
    j["scan"] = c.scan;
    j["a"] = c.a;
    j["b"] = c.b;
    j["n"] = c.n;
    j["ns"] = c.ns;
    j["ab_samples"] = c.ab_samples;
    j["ab_max"] = c.ab_max;
  }
  if (s == "fluctuations") {
    j["base"] = c.base;
    j["scales"] = c.scales;
    j["mode"] = c.mode;
    j["cap"] = c.cap;
    j["c"] = c.c;
    j["floor"] = c.floor;
    j["trials"] = c.trials;
    j["thresholds"] = c.thresholds;
    j["beta_floor"] = c.beta_floor;
  }
  if (s == "smooth") {
    j["x"] = c.x;
    j["y"] = c.y;
  }
  if (s == "moments" || s == "clt" || s == "curves" || s == "fluctuations") j["seed"] = resolve_seed(c);
  return j;
}

std::uint64_t resolve_seed(const ExperimentConfig& cfg) {
  if (cfg.seed) return *cfg.seed;
  if (const char* env = std::getenv("RCL_SEED"); env != nullptr && *env != '\0') {
    char* end = nullptr;
    const auto v = std::strtoull(env, &end, 10);
    if (end != nullptr && *end == '\0') return v;
    throw std::invalid_argument("RCL_SEED is not an unsigned integer");
  }
  return 0;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  const auto t0 = std::chrono::steady_clock::now();
  ExperimentConfig cfg;
  Parser parser(cfg);
  try {
    std::vector<std::string> full = args;
    if (!args.empty() && parser.subs.count(args[0]) != 0) {
      if (const auto path = config_path_from(args); !path.empty()) {
        auto extra = config_args(path, parser.subs[args[0]]);
        full.insert(full.begin() + 1, extra.begin(), extra.end());
      }
    }
    std::reverse(full.begin(), full.end());
    parser.app.parse(full);
  } catch (const CLI::CallForHelp&) {
    const bool named = !args.empty() && parser.subs.count(args[0]) != 0;
    out << (named ? parser.subs[args[0]]->help() : parser.app.help());
    return kOk;
  } catch (const CLI::CallForVersion&) {
    out << kToolVersion << '\n';
    return kOk;
  } catch (const CLI::ParseError& e) {
    emit_error(err, kUsage, "usage", e.what());
    return kUsage;
  }

  auto* sub = parser.app.get_subcommands().front();
  cfg.subcommand = sub->get_name();
  if (auto it = parser.seed_opts.find(cfg.subcommand); it != parser.seed_opts.end() && it->second->count() > 0) {
    cfg.seed = parser.seed_value;
  }

  const auto& cmd = commands().at(cfg.subcommand);
  try {
    const json config_echo = to_json(cfg);
    if (cfg.dry_run) {
      out << json{{"dry_run", true}, {"config", config_echo}, {"plan", cmd.plan(cfg)}}.dump(2) << '\n';
      return kOk;
    }
    const Result res = cmd.exec(cfg);
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const json header = {{"tool", kToolName},
                         {"tool_version", kToolVersion},
                         {"schema_version", kSchemaVersion},
                         {"config", config_echo},
                         {"wall_time_seconds", wall}};
    std::ofstream file;
    std::ostream* os = &out;
    if (!cfg.out.empty()) {
      file.open(cfg.out);
      if (!file) throw std::invalid_argument("cannot open --out file " + cfg.out);
      os = &file;
    }
    if (cfg.format == "csv") {
      write_csv(*os, header, csv_columns().at(cfg.subcommand), res.csv);
    } else {
      *os << json{{"header", header}, {"data", res.data}}.dump(2) << '\n';
    }
    return kOk;
  } catch (const InfeasibleScale& e) {
    emit_error(err, kInfeasible, "infeasible_scale", e.what());
    return kInfeasible;
  } catch (const DomainError& e) {
    emit_error(err, kDomain, "domain_error", e.what());
    return kDomain;
  } catch (const std::invalid_argument& e) {
    emit_error(err, kUsage, "usage", e.what());
    return kUsage;
  } catch (const std::out_of_range& e) {
    emit_error(err, kUsage, "usage", e.what());
    return kUsage;
  }
}

}  // namespace rmfpoly::cli
