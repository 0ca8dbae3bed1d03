// Command-line front end: builds certified sequential tests, estimates level
// and power by seeded Monte Carlo, runs exact-oracle batteries, and
// reproduces the two bundled worked examples end to end.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

#include "powerone/divergences.hpp"
#include "powerone/errors.hpp"
#include "powerone/exact_oracle.hpp"
#include "powerone/metrics.hpp"
#include "powerone/serialize.hpp"
#include "powerone/simulate.hpp"

namespace fs = std::filesystem;
using namespace powerone;
using nlohmann::json;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitSchema = 2;
constexpr int kExitCapacity = 3;
constexpr int kExitCertification = 4;
constexpr int kExitInternal = 5;

struct CliOptions {
  std::string config_path;
  std::string out_dir = "out";
  std::string rule_path;
  std::string suite = "all";
  double alpha = -1.0;
  int trials = -1;
  int horizon = -1;
  std::int64_t seed = -1;
  int workers = -1;
};

ExperimentConfig load_config(const CliOptions& cli) {
  if (cli.config_path.empty())
    throw SchemaError("a --config file is required for this command");
  ExperimentConfig config = config_from_file(cli.config_path);
  if (cli.alpha > 0.0) config.alpha = cli.alpha;
  if (cli.trials > 0) config.trials = cli.trials;
  if (cli.horizon > 0) config.horizon = cli.horizon;
  if (cli.seed >= 0) config.seed = static_cast<std::uint64_t>(cli.seed);
  if (cli.workers > 0) config.workers = cli.workers;
  return config;
}

std::ofstream open_artifact(const CliOptions& cli, const std::string& name,
                            const ExperimentConfig& config) {
  fs::create_directories(cli.out_dir);
  std::ofstream out(fs::path(cli.out_dir) / name);
  out << "# config_digest=" << config_digest(config) << " seed=" << config.seed
      << "\n";
  return out;
}

// Summaries open with the fully resolved settings, defaults included.
std::ofstream open_summary(const CliOptions& cli,
                           const ExperimentConfig& config) {
  auto out = open_artifact(cli, "summary.txt", config);
  out << "settings: " << config_to_canonical_json(config).dump()
      << " workers=" << config.workers << "\n";
  return out;
}

void write_pass_fail(const CliOptions& cli, const ExperimentConfig& config,
                     const std::string& command, bool pass,
                     const json& details) {
  fs::create_directories(cli.out_dir);
  std::ofstream out(fs::path(cli.out_dir) / "pass_fail.json");
  out << json{{"command", command},
              {"config_digest", config_digest(config)},
              {"seed", config.seed},
              {"pass", pass},
              {"details", details}}
             .dump(2)
      << "\n";
}

SimConfig sim_config(const ExperimentConfig& config) {
  SimConfig sim;
  sim.trials = config.trials;
  sim.horizon = config.horizon;
  sim.seed = config.seed;
  sim.workers = config.workers;
  return sim;
}

void write_growth_csv(std::ofstream& out, const GrowthReport& report) {
  out << "n,mean_log_growth,se,benchmark_phi,best_included_rate\n";
  for (size_t i = 0; i < report.ns.size(); ++i) {
    out << report.ns[i] << "," << fmt_double(report.mean_log_growth[i]) << ","
        << fmt_double(report.se[i]) << "," << fmt_double(report.benchmark_phi)
        << "," << fmt_double(report.best_included_rate) << "\n";
  }
}

StoppingRuleSpec build_or_load_rule(const CliOptions& cli,
                                    const ExperimentConfig& config) {
  if (!cli.rule_path.empty()) {
    std::ifstream in(cli.rule_path);
    if (!in) throw SchemaError("cannot open rule file: " + cli.rule_path);
    json j;
    try {
      in >> j;
    } catch (const json::parse_error& e) {
      throw SchemaError(std::string("rule file is not valid JSON: ") + e.what());
    }
    return rule_from_json(j, config.space);
  }
  if (config.alternatives.empty())
    throw SchemaError("config has no alternatives to build a rule from");
  return composite_cover_test(config.alternatives, config.null_class(),
                              config.alpha, config.ball_metric);
}

// ---------------------------------------------------------------------------

int run_build_test(const CliOptions& cli) {
  const ExperimentConfig config = load_config(cli);
  if (config.alternatives.empty())
    throw SchemaError("build-test needs at least one alternative");
  const NullClass nc = config.null_class();

  const StoppingRuleSpec rule = composite_cover_test(
      config.alternatives, nc, config.alpha, config.ball_metric);

  json certificates = json::array();
  for (const auto& component : rule.components) {
    const BallRateCertificate cert = inf_phi_over_ball(component.ball, nc);
    json c = certificate_to_json(cert);
    c["recheck_rate_ok"] = cert.lower_bound >= component.rate - 1e-12;
    c["budget"] = component.budget;
    c["start_index"] = component.start_index;
    c["tail_mass"] = component.tail_mass();
    certificates.push_back(std::move(c));
  }

  auto rule_out = open_artifact(cli, "rule.json", config);
  json rule_doc = rule_to_json(rule);
  rule_doc["certificates"] = certificates;
  rule_out << rule_doc.dump(2) << "\n";

  auto summary = open_summary(cli, config);
  summary << "build-test: " << rule.components.size()
          << " components, total budget " << fmt_double(rule.total_budget)
          << " <= alpha " << fmt_double(config.alpha) << "\n";
  for (size_t j = 0; j < rule.components.size(); ++j) {
    const auto& c = rule.components[j];
    summary << "  component " << j << ": radius " << fmt_double(c.ball.radius)
            << " (" << metric_kind_name(c.ball.metric) << "), rate "
            << fmt_double(c.rate) << ", start " << c.start_index << ", budget "
            << fmt_double(c.budget) << "\n";
  }
  bool pass = rule.total_budget <= config.alpha;
  for (const auto& c : rule.components) pass = pass && c.budget_holds();
  write_pass_fail(cli, config, "build-test", pass,
                  json{{"components", rule.components.size()}});
  std::cout << (pass ? "build-test: ok\n" : "build-test: certification failed\n");
  return pass ? 0 : kExitCertification;
}

int run_level(const CliOptions& cli) {
  const ExperimentConfig config = load_config(cli);
  const NullClass nc = config.null_class();
  const StoppingRuleSpec rule = build_or_load_rule(cli, config);

  const LevelReport report =
      estimate_level(make_runner(rule), config.alpha, nc, sim_config(config));

  auto csv = open_artifact(cli, "level.csv", config);
  csv << "distribution,frequency,se,alpha,pass\n";
  for (const auto& row : report.rows)
    csv << row.label << "," << fmt_double(row.frequency) << ","
        << fmt_double(row.se) << "," << fmt_double(report.alpha) << ","
        << (row.pass ? "1" : "0") << "\n";

  auto summary = open_summary(cli, config);
  summary << "level: horizon-capped rejection frequencies (lower bounds on "
             "P(stop)); the analytic budget certificate is the level "
             "guarantee\n";
  summary << "analytic budget: " << fmt_double(rule.total_budget) << "\n";
  for (const auto& row : report.rows)
    summary << "  " << row.label << ": " << fmt_double(row.frequency) << " +- "
            << fmt_double(row.se) << (row.pass ? " (pass)" : " (FAIL)") << "\n";

  write_pass_fail(cli, config, "level", report.pass,
                  json{{"horizon", report.horizon}, {"trials", report.trials}});
  std::cout << (report.pass ? "level: ok\n" : "level: FAIL\n");
  return report.pass ? 0 : kExitCertification;
}

int run_power(const CliOptions& cli) {
  const ExperimentConfig config = load_config(cli);
  const NullClass nc = config.null_class();
  const StoppingRuleSpec rule = build_or_load_rule(cli, config);

  const PowerReport report =
      estimate_power(rule, config.alternatives, sim_config(config), &nc);

  auto csv = open_artifact(cli, "power.csv", config);
  csv << "alternative,frequency,se,horizon,pass,null_alternative\n";
  for (const auto& row : report.rows)
    csv << row.label << "," << fmt_double(row.frequency) << ","
        << fmt_double(row.se) << "," << row.horizon << ","
        << (row.pass ? "1" : "0") << "," << (row.null_alternative ? "1" : "0")
        << "\n";

  auto summary = open_summary(cli, config);
  for (const auto& row : report.rows) {
    summary << row.label << ": stop frequency " << fmt_double(row.frequency)
            << " within horizon " << row.horizon;
    if (row.null_alternative)
      summary << " [flagged: alternative lies in the null class]";
    summary << (row.pass ? " (pass)" : " (FAIL)") << "\n";
  }

  write_pass_fail(cli, config, "power", report.pass,
                  json{{"trials", report.trials}});
  std::cout << (report.pass ? "power: ok\n" : "power: FAIL\n");
  return report.pass ? 0 : kExitCertification;
}

int run_growth(const CliOptions& cli) {
  const ExperimentConfig config = load_config(cli);
  if (config.alternatives.empty())
    throw SchemaError("growth needs at least one alternative");
  const NullClass nc = config.null_class();

  const RegrowPlan plan =
      build_regrow(nc, config.alternatives, config.regrow_options());

  bool pass = true;
  json details = json::array();
  for (size_t a = 0; a < config.alternatives.size(); ++a) {
    const auto& q = config.alternatives[a];
    const PhiResult phi = phi_klinf(q, nc);
    const double phi_value =
        phi.infinite ? std::numeric_limits<double>::infinity() : phi.value;
    const auto best = plan.best_included_rate(phi_value);
    const GrowthReport report = growth_report(
        plan.factory(), q, config.growth_n_max, config.growth_trials,
        config.seed, phi_value,
        best ? *best : std::numeric_limits<double>::quiet_NaN(),
        config.record_stride);
    auto csv =
        open_artifact(cli, "growth_" + std::to_string(a) + ".csv", config);
    write_growth_csv(csv, report);
    pass = pass && !report.upper_violation;
    details.push_back(json{{"alternative", a},
                           {"phi", phi.infinite ? -1.0 : phi.value},
                           {"best_included_rate", best ? *best : -1.0},
                           {"upper_violation", report.upper_violation}});
  }

  auto summary = open_summary(cli, config);
  summary << "growth: " << config.alternatives.size()
          << " alternatives, plan with " << plan.covers.size() << " covers";
  if (plan.empty_cover) summary << " (empty cover: constant 3/4 process)";
  summary << "\n" << details.dump(2) << "\n";

  write_pass_fail(cli, config, "growth", pass, details);
  std::cout << (pass ? "growth: ok\n" : "growth: FAIL (upper bound violated)\n");
  return pass ? 0 : kExitCertification;
}

// Randomized oracle batteries; deterministic given the seed.

struct SuiteResult {
  int cases = 0;
  int failures = 0;
};

SuiteResult pinsker_suite(std::uint64_t seed, int cases) {
  SplitStream stream(seed, 0x501);
  SuiteResult result;
  for (int it = 0; it < cases; ++it) {
    const int m = 2 + static_cast<int>(stream.next_uniform() * 3) % 3;
    std::vector<double> coords;
    for (int i = 0; i < m; ++i) coords.push_back(i + stream.next_uniform() * 0.5);
    auto space = FiniteSpace::line(coords);
    Eigen::VectorXd wa(m), wb(m);
    for (int i = 0; i < m; ++i) {
      wa(i) = -std::log(1.0 - stream.next_uniform());
      wb(i) = -std::log(1.0 - stream.next_uniform());
    }
    if (stream.next_uniform() < 0.3) wb(0) = 0.0;
    wa /= wa.sum();
    wb /= wb.sum();
    const DiscreteMeasure a(space, wa), b(space, wb);
    const double kl = kl_divergence(a, b);
    ++result.cases;
    if (std::isinf(kl)) continue;
    if (tv_distance(a, b) > std::sqrt(kl / 2.0) + 1e-12) ++result.failures;
  }
  return result;
}

SuiteResult dv_suite(std::uint64_t seed, int cases) {
  SplitStream stream(seed, 0x502);
  SuiteResult result;
  for (int it = 0; it < cases; ++it) {
    const int m = 2 + static_cast<int>(stream.next_uniform() * 3) % 3;
    std::vector<double> coords;
    for (int i = 0; i < m; ++i) coords.push_back(i + stream.next_uniform() * 0.5);
    auto space = FiniteSpace::line(coords);
    Eigen::VectorXd wa(m), wb(m), fv(m);
    for (int i = 0; i < m; ++i) {
      wa(i) = -std::log(1.0 - stream.next_uniform());
      wb(i) = -std::log(1.0 - stream.next_uniform());
      fv(i) = stream.next_uniform() * 8.0 - 4.0;
    }
    wa /= wa.sum();
    wb /= wb.sum();
    const DiscreteMeasure a(space, wa), b(space, wb);
    const BLFunction f{fv};
    const double kl = kl_divergence(a, b);
    ++result.cases;
    if (dv_objective(f, a, b) > kl + 1e-12) ++result.failures;
    const BLFunction opt{(wa.array() / wb.array()).log().matrix()};
    if (std::abs(dv_objective(opt, a, b) - kl) > 1e-9) ++result.failures;
  }
  return result;
}

SuiteResult csiszar_suite(std::uint64_t seed, int cases, std::ofstream* log) {
  SplitStream stream(seed, 0x503);
  SuiteResult result;
  for (int it = 0; it < cases; ++it) {
    const int m = 2 + static_cast<int>(stream.next_uniform() * 3) % 3;
    std::vector<double> coords;
    for (int i = 0; i < m; ++i) coords.push_back(i + stream.next_uniform() * 0.5);
    auto space = FiniteSpace::line(coords);

    Eigen::VectorXd wp(m), wc(m);
    for (int i = 0; i < m; ++i) {
      wp(i) = -std::log(1.0 - stream.next_uniform());
      wc(i) = -std::log(1.0 - stream.next_uniform());
    }
    if (stream.next_uniform() < 0.25) wp(m - 1) = 0.0;
    if (stream.next_uniform() < 0.2) {
      wc.setZero();
      wc(static_cast<int>(stream.next_uniform() * m) % m) = 1.0;
    }
    wp /= wp.sum();
    wc /= wc.sum();
    const DiscreteMeasure p(space, wp);
    const DiscreteMeasure center(space, wc);
    const double radius = 0.02 + 0.55 * stream.next_uniform();
    const MetricKind kind = it % 2 == 0 ? MetricKind::kTv : MetricKind::kBl;
    const int n = 1 + static_cast<int>(stream.next_uniform() * 14) % 14;

    KlinfOptions options;
    options.max_iterations = kind == MetricKind::kBl ? 1200 : 20000;
    const Ball ball(center, radius, kind);
    const double rate = inf_kl_over_ball(ball, p, options).lower_bound;
    const CsiszarCheck check = csiszar_bound_check(p, ball, rate, n);
    ++result.cases;
    if (!check.holds) ++result.failures;
    if (log) {
      json inputs{{"p", measure_to_json(p)},
                  {"ball", ball_to_json(ball)},
                  {"n", n},
                  {"rate", rate}};
      const json line{{"case", it},
                      {"inputs_digest", hex64(fnv1a64(inputs.dump()))},
                      {"metric", metric_kind_name(kind)},
                      {"n", n},
                      {"exact", check.exact},
                      {"bound", check.bound},
                      {"margin", check.bound - check.exact},
                      {"holds", check.holds}};
      *log << line.dump() << "\n";
    }
  }
  return result;
}

SuiteResult eprocess_suite(std::uint64_t seed, int cases) {
  (void)seed;
  SuiteResult result;
  auto space = FiniteSpace::two_point();
  Eigen::VectorXd w(2);
  w << 0.5, 0.5;
  const DiscreteMeasure p5(space, w);
  NullClass nc({p5}, false);
  Eigen::VectorXd w9(2);
  w9 << 0.1, 0.9;
  const DiscreteMeasure b9(space, w9);

  StoppingRuleSpec up = simple_alt_test(b9, nc, 0.5);
  up.components[0].start_index = std::min(up.components[0].start_index, 4);
  const auto aggregated = aggregated_eprocess(aggregate_tests({up}, {0.5}));
  const RegrowPlan plan = build_regrow(nc, {b9});
  const auto regrow = plan.factory();
  const auto doubling = counterexample_eprocess(space, 0);

  const int horizon = 8;
  for (int fixed = 1; fixed <= std::min(cases, horizon); ++fixed) {
    ++result.cases;
    if (eprocess_expectation_exact(p5, aggregated, fixed_time_rule(fixed),
                                   horizon) > 1.0 + 1e-10)
      ++result.failures;
    ++result.cases;
    if (eprocess_expectation_exact(p5, regrow, fixed_time_rule(fixed),
                                   horizon) > 1.0 + 1e-10)
      ++result.failures;
    ++result.cases;
    if (std::abs(eprocess_expectation_exact(p5, doubling,
                                            fixed_time_rule(fixed), horizon) -
                 1.0) > 1e-12)
      ++result.failures;
  }
  const StoppingPredicate first_one = [](int, const std::vector<int>& prefix) {
    return prefix.back() == 1;
  };
  for (const auto& factory : {aggregated, regrow, doubling}) {
    ++result.cases;
    if (eprocess_expectation_exact(p5, factory, first_one, horizon) >
        1.0 + 1e-10)
      ++result.failures;
  }
  return result;
}

int run_oracle_check(const CliOptions& cli) {
  ExperimentConfig config;
  if (!cli.config_path.empty()) {
    config = load_config(cli);
  } else {
    config.space = FiniteSpace::two_point();
    Eigen::VectorXd w(2);
    w << 0.5, 0.5;
    config.null_generators.emplace_back(config.space, w);
    if (cli.seed >= 0) config.seed = static_cast<std::uint64_t>(cli.seed);
  }

  json details;
  bool pass = true;
  auto record = [&](const char* name, const SuiteResult& result) {
    details[name] = json{{"cases", result.cases}, {"failures", result.failures}};
    pass = pass && result.failures == 0;
    std::cout << name << ": " << result.cases << " cases, " << result.failures
              << " failures\n";
  };

  bool known = false;
  if (cli.suite == "pinsker" || cli.suite == "all") {
    record("pinsker", pinsker_suite(config.seed, 10000));
    known = true;
  }
  if (cli.suite == "dv" || cli.suite == "all") {
    record("dv", dv_suite(config.seed, 10000));
    known = true;
  }
  if (cli.suite == "csiszar" || cli.suite == "all") {
    auto log = open_artifact(cli, "csiszar_checks.jsonl", config);
    record("csiszar", csiszar_suite(config.seed, 500, &log));
    known = true;
  }
  if (cli.suite == "eprocess" || cli.suite == "all") {
    record("eprocess", eprocess_suite(config.seed, 8));
    known = true;
  }
  if (!known) throw SchemaError("unknown oracle suite: " + cli.suite);

  write_pass_fail(cli, config, "oracle-check", pass, details);
  return pass ? 0 : kExitCertification;
}

// The shrinking two-atom family worked example, end to end.
int run_repro_prop5(const CliOptions& cli) {
  ExperimentConfig config;
  if (!cli.config_path.empty()) {
    config = load_config(cli);
  } else {
    const int levels = 6;
    std::vector<double> coords{0.0};
    for (int k = 1; k <= levels; ++k) coords.push_back(1.0 / k);
    config.space = FiniteSpace::line(coords);
    for (int k = 1; k <= levels; ++k) {
      Eigen::VectorXd w = Eigen::VectorXd::Zero(levels + 1);
      w(0) = 0.5;
      w(k) = 0.5;
      config.null_generators.emplace_back(config.space, w);
    }
    config.alternatives.push_back(DiscreteMeasure::point_mass(config.space, 0));
    if (cli.alpha > 0.0) config.alpha = cli.alpha;
    if (cli.seed >= 0) config.seed = static_cast<std::uint64_t>(cli.seed);
  }
  const NullClass nc = config.null_class();
  const DiscreteMeasure q = config.alternatives.empty()
                                ? DiscreteMeasure::point_mass(config.space, 0)
                                : config.alternatives.front();
  const double log2 = std::log(2.0);

  auto summary = open_summary(cli, config);
  bool pass = true;

  const PhiResult phi_q = phi_klinf(q, nc);
  const bool phi_ok = !phi_q.infinite && std::abs(phi_q.value - log2) <= 1e-12;
  pass = pass && phi_ok;
  summary << "phi(point mass) = " << fmt_double(phi_q.value)
          << " (log 2 = " << fmt_double(log2) << ") "
          << (phi_ok ? "ok" : "FAIL") << "\n";

  // semicontinuity failure witness: the generators converge weakly to q
  // while their own divergence from the class stays at zero
  summary << "weak-convergence witness (k, bl distance to q, phi(P_k)):\n";
  for (int k = 0; k < nc.count(); ++k) {
    const auto& pk = nc.generators()[static_cast<size_t>(k)];
    const double d = bl_distance(q, pk);
    const double phi_pk = phi_klinf(pk, nc).value;
    pass = pass && phi_pk <= 1e-12;
    summary << "  " << (k + 1) << ", " << fmt_double(d) << ", "
            << fmt_double(phi_pk) << "\n";
  }

  const int m = counterexample_min_m(config.alpha);
  summary << "cylinder test: m = " << m << ", 2^-m = "
          << fmt_double(std::exp2(-m)) << " <= alpha = "
          << fmt_double(config.alpha) << "\n";
  for (int k = 0; k < nc.count(); ++k) {
    const auto& pk = nc.generators()[static_cast<size_t>(k)];
    const double exact = event_probability_exact(
        pk, m, [&](const TypeClass& t) { return t.counts(0) == m; });
    const bool ok = std::abs(exact - std::exp2(-m)) <= 1e-12 &&
                    exact <= config.alpha + 1e-12;
    pass = pass && ok;
    summary << "  exact level under P_" << (k + 1) << " = "
            << fmt_double(exact) << (ok ? " ok" : " FAIL") << "\n";
  }

  const auto doubling = counterexample_eprocess(config.space, 0);
  for (int k = 0; k < nc.count(); ++k) {
    const double residual = max_one_step_residual(
        nc.generators()[static_cast<size_t>(k)], doubling, 10);
    pass = pass && residual <= 1e-12;
    summary << "martingale residual under P_" << (k + 1) << " = "
            << fmt_double(residual) << "\n";
  }
  const GrowthReport growth =
      growth_report(doubling, q, 50, 1, config.seed, log2);
  bool growth_ok = !growth.upper_violation;
  for (double g : growth.mean_log_growth)
    growth_ok = growth_ok && std::abs(g - log2) <= 1e-12;
  pass = pass && growth_ok;
  summary << "doubling growth = log 2 at every n up to 50: "
          << (growth_ok ? "ok" : "FAIL") << "\n";
  auto csv = open_artifact(cli, "prop5_growth.csv", config);
  write_growth_csv(csv, growth);

  write_pass_fail(cli, config, "repro-prop5", pass,
                  json{{"m", m}, {"alpha", config.alpha}});
  std::cout << (pass ? "repro-prop5: ok\n" : "repro-prop5: FAIL\n");
  return pass ? 0 : kExitCertification;
}

int run_repro_regrow(const CliOptions& cli) {
  ExperimentConfig config;
  if (!cli.config_path.empty()) {
    config = load_config(cli);
  } else {
    config.space = FiniteSpace::two_point();
    Eigen::VectorXd w(2);
    w << 0.5, 0.5;
    config.null_generators.emplace_back(config.space, w);
    Eigen::VectorXd w9(2);
    w9 << 0.1, 0.9;
    config.alternatives.emplace_back(config.space, w9);
    config.growth_trials = 200;
    config.growth_n_max = 2000;
    config.record_stride = 50;
    if (cli.trials > 0) config.growth_trials = cli.trials;
    if (cli.seed >= 0) config.seed = static_cast<std::uint64_t>(cli.seed);
    if (cli.workers > 0) config.workers = cli.workers;
  }
  if (config.alternatives.empty())
    throw SchemaError("repro-regrow needs at least one alternative");
  const NullClass nc = config.null_class();

  const RegrowPlan plan =
      build_regrow(nc, config.alternatives, config.regrow_options());

  auto summary = open_summary(cli, config);
  summary << "plan: " << plan.rationals.size() << " rates, "
          << plan.covers.size() << " covers, total weight "
          << fmt_double(plan.total_weight) << " <= 0.25, normalizer "
          << fmt_double(plan.normalizer) << "\n";
  for (const auto& c : plan.covers)
    summary << "  cover k=" << c.k << " j=" << c.j << " rate "
            << fmt_double(c.rate) << " certified " << fmt_double(c.certified)
            << " radius " << fmt_double(c.ball.radius) << "\n";

  bool pass = plan.total_weight <= 0.25 + 1e-12;

  for (size_t a = 0; a < config.alternatives.size(); ++a) {
    const auto& q = config.alternatives[a];
    const PhiResult phi = phi_klinf(q, nc);
    const double phi_value =
        phi.infinite ? std::numeric_limits<double>::infinity() : phi.value;
    const auto best = plan.best_included_rate(phi_value);
    const GrowthReport report = growth_report(
        plan.factory(), q, config.growth_n_max, config.growth_trials,
        config.seed, phi_value,
        best ? *best : std::numeric_limits<double>::quiet_NaN(),
        config.record_stride);
    auto csv = open_artifact(
        cli, "regrow_growth_" + std::to_string(a) + ".csv", config);
    write_growth_csv(csv, report);
    pass = pass && !report.upper_violation;
    summary << "alternative " << a << ": phi " << fmt_double(phi_value)
            << ", best included rate "
            << (best ? fmt_double(*best) : std::string("none"))
            << ", final mean growth "
            << fmt_double(report.mean_log_growth.back()) << "\n";
    if (best) {
      const bool grew = report.mean_log_growth.back() >= *best - 0.05;
      pass = pass && grew;
      summary << "  growth reaches the included rate: "
              << (grew ? "ok" : "FAIL") << "\n";
    }
  }

  SimConfig sim = sim_config(config);
  sim.horizon = std::min(config.growth_n_max, 400);
  sim.trials = std::max(config.trials, 2000);
  for (int k = 0; k < nc.count(); ++k) {
    const auto& p = nc.generators()[static_cast<size_t>(k)];
    const McExpectation fixed =
        mc_eprocess_expectation(plan.factory(), p, {}, sim);
    const McExpectation hit = mc_eprocess_expectation(
        plan.factory(), p,
        [](const EProcess& process) { return process.value() >= 2.0; }, sim);
    const bool ok = fixed.mean <= 1.0 + 4.0 * fixed.se &&
                    hit.mean <= 1.0 + 4.0 * hit.se;
    pass = pass && ok;
    summary << "validity under null_" << k << ": fixed "
            << fmt_double(fixed.mean) << " +- " << fmt_double(fixed.se)
            << ", first-hit " << fmt_double(hit.mean) << " +- "
            << fmt_double(hit.se) << (ok ? " ok" : " FAIL") << "\n";
  }

  write_pass_fail(cli, config, "repro-regrow", pass,
                  json{{"covers", plan.covers.size()},
                       {"total_weight", plan.total_weight}});
  std::cout << (pass ? "repro-regrow: ok\n" : "repro-regrow: FAIL\n");
  return pass ? 0 : kExitCertification;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sequential power-one tests and e-processes on finite spaces"};
  app.require_subcommand(1);

  CliOptions cli;
  auto add_common = [&](CLI::App* cmd, bool needs_config) {
    auto* opt = cmd->add_option("--config", cli.config_path, "experiment JSON");
    if (needs_config) opt->required();
    cmd->add_option("--out", cli.out_dir, "output directory");
    cmd->add_option("--alpha", cli.alpha, "override alpha");
    cmd->add_option("--trials", cli.trials, "override trial count");
    cmd->add_option("--horizon", cli.horizon, "override horizon");
    cmd->add_option("--seed", cli.seed, "override base seed");
    cmd->add_option("--workers", cli.workers, "override worker count");
  };

  auto* build = app.add_subcommand("build-test", "construct a certified rule");
  add_common(build, true);
  auto* level = app.add_subcommand("level", "Monte Carlo level estimate");
  add_common(level, true);
  level->add_option("--rule", cli.rule_path, "reuse a built rule.json");
  auto* power = app.add_subcommand("power", "Monte Carlo power estimate");
  add_common(power, true);
  power->add_option("--rule", cli.rule_path, "reuse a built rule.json");
  auto* growth = app.add_subcommand("growth", "growth-rate diagnostics");
  add_common(growth, true);
  auto* oracle = app.add_subcommand("oracle-check", "exact-oracle batteries");
  add_common(oracle, false);
  oracle->add_option("--suite", cli.suite, "pinsker|dv|csiszar|eprocess|all");
  auto* prop5 = app.add_subcommand("repro-prop5",
                                   "the shrinking two-atom worked example");
  add_common(prop5, false);
  auto* regrow = app.add_subcommand("repro-regrow",
                                    "the relative-growth worked example");
  add_common(regrow, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (build->parsed()) return run_build_test(cli);
    if (level->parsed()) return run_level(cli);
    if (power->parsed()) return run_power(cli);
    if (growth->parsed()) return run_growth(cli);
    if (oracle->parsed()) return run_oracle_check(cli);
    if (prop5->parsed()) return run_repro_prop5(cli);
    if (regrow->parsed()) return run_repro_regrow(cli);
  } catch (const SchemaError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitSchema;
  } catch (const CapacityError& e) {
    std::cerr << "capacity guard: " << e.what() << "\n";
    return kExitCapacity;
  } catch (const NoSeparationError& e) {
    std::cerr << "no separation: " << e.what() << "\n";
    return kExitCertification;
  } catch (const CertificationError& e) {
    std::cerr << "certification: " << e.what() << "\n";
    return kExitCertification;
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitUsage;
}
