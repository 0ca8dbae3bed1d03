#include "powerone/serialize.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>

#include "powerone/errors.hpp"

namespace powerone {

namespace {

using nlohmann::json;

double number_field(const json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_number())
    throw SchemaError(std::string("expected numeric field '") + key + "'");
  return j.at(key).get<double>();
}

Eigen::VectorXd vector_from_json(const json& j) {
  if (!j.is_array()) throw SchemaError("expected an array of numbers");
  Eigen::VectorXd v(j.size());
  for (size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw SchemaError("expected an array of numbers");
    v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
  }
  return v;
}

json vector_to_json(const Eigen::VectorXd& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

}  // namespace

std::string fmt_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::uint64_t fnv1a64(const std::string& text) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<size_t>(i)] = digits[v & 0xF];
    v >>= 4;
  }
  return out;
}

nlohmann::json space_to_json(const FiniteSpace& space) {
  json metric = json::array();
  for (int x = 0; x < space.size(); ++x) {
    json row = json::array();
    for (int y = 0; y < space.size(); ++y) row.push_back(space.distance(x, y));
    metric.push_back(std::move(row));
  }
  return json{{"labels", space.labels()}, {"metric", std::move(metric)}};
}

SpacePtr space_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("labels") || !j.contains("metric"))
    throw SchemaError("space needs 'labels' and 'metric'");
  std::vector<std::string> labels;
  for (const auto& l : j.at("labels")) {
    if (!l.is_string()) throw SchemaError("space labels must be strings");
    labels.push_back(l.get<std::string>());
  }
  const auto& rows = j.at("metric");
  if (!rows.is_array() || rows.size() != labels.size())
    throw SchemaError("metric must be a square matrix matching the labels");
  Eigen::MatrixXd metric(labels.size(), labels.size());
  for (size_t x = 0; x < rows.size(); ++x) {
    if (!rows[x].is_array() || rows[x].size() != labels.size())
      throw SchemaError("metric must be a square matrix matching the labels");
    for (size_t y = 0; y < labels.size(); ++y) {
      if (!rows[x][y].is_number()) throw SchemaError("metric entries must be numbers");
      metric(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(y)) =
          rows[x][y].get<double>();
    }
  }
  try {
    return FiniteSpace::make(std::move(labels), std::move(metric));
  } catch (const UsageError& e) {
    throw SchemaError(std::string("invalid space: ") + e.what());
  }
}

nlohmann::json measure_to_json(const DiscreteMeasure& m,
                               const std::string& space_id) {
  json out{{"weights", vector_to_json(m.weights())}};
  if (!space_id.empty()) out["space"] = space_id;
  return out;
}

DiscreteMeasure measure_from_json(const nlohmann::json& j, SpacePtr space,
                                  const std::string& space_id) {
  if (j.is_object() && j.contains("space") && !space_id.empty() &&
      j.at("space").get<std::string>() != space_id)
    throw SchemaError("measure references a different space id");
  const json& weights =
      j.is_object() && j.contains("weights") ? j.at("weights") : j;
  try {
    return DiscreteMeasure(std::move(space), vector_from_json(weights));
  } catch (const UsageError& e) {
    throw SchemaError(std::string("invalid measure: ") + e.what());
  }
}

nlohmann::json null_class_to_json(const NullClass& nc) {
  json gens = json::array();
  for (const auto& g : nc.generators()) gens.push_back(vector_to_json(g.weights()));
  return json{{"hull", nc.hull()}, {"generators", std::move(gens)}};
}

NullClass null_class_from_json(const nlohmann::json& j, SpacePtr space) {
  if (!j.is_object() || !j.contains("generators"))
    throw SchemaError("null class needs 'generators'");
  const bool hull = j.value("hull", false);
  std::vector<DiscreteMeasure> gens;
  for (const auto& g : j.at("generators"))
    gens.push_back(measure_from_json(g, space));
  if (gens.empty()) throw SchemaError("null class needs at least one generator");
  return NullClass(std::move(gens), hull);
}

nlohmann::json ball_to_json(const Ball& ball) {
  return json{{"center", vector_to_json(ball.center.weights())},
              {"radius", ball.radius},
              {"metric", metric_kind_name(ball.metric)},
              {"closed", ball.closed}};
}

Ball ball_from_json(const nlohmann::json& j, SpacePtr space) {
  if (!j.is_object() || !j.contains("center"))
    throw SchemaError("ball needs 'center' and 'radius'");
  const std::string metric = j.value("metric", "tv");
  if (metric != "tv" && metric != "bl")
    throw SchemaError("ball metric must be 'tv' or 'bl'");
  try {
    return Ball(measure_from_json(j.at("center"), std::move(space)),
                number_field(j, "radius"),
                metric == "tv" ? MetricKind::kTv : MetricKind::kBl,
                j.value("closed", true));
  } catch (const UsageError& e) {
    throw SchemaError(std::string("invalid ball: ") + e.what());
  }
}

nlohmann::json certificate_to_json(const BallRateCertificate& cert) {
  json out{{"rate", cert.lower_bound},
           {"value", cert.value},
           {"gap", cert.gap},
           {"ball_meets_class", cert.ball_meets_class},
           {"infeasible", cert.infeasible}};
  if (cert.witness_r) out["witness_r"] = vector_to_json(cert.witness_r->weights());
  if (cert.witness_p) out["witness_p"] = vector_to_json(cert.witness_p->weights());
  return out;
}

nlohmann::json rule_to_json(const StoppingRuleSpec& rule) {
  json components = json::array();
  for (const auto& c : rule.components) {
    components.push_back(json{{"ball", ball_to_json(c.ball)},
                              {"rate", c.rate},
                              {"start_index", c.start_index},
                              {"budget", c.budget}});
  }
  return json{{"total_budget", rule.total_budget},
              {"components", std::move(components)}};
}

StoppingRuleSpec rule_from_json(const nlohmann::json& j, SpacePtr space) {
  if (!j.is_object() || !j.contains("components"))
    throw SchemaError("rule needs 'components'");
  StoppingRuleSpec rule;
  rule.total_budget = number_field(j, "total_budget");
  for (const auto& c : j.at("components")) {
    CoverComponent component{ball_from_json(c.at("ball"), space),
                             number_field(c, "rate"),
                             static_cast<int>(number_field(c, "start_index")),
                             number_field(c, "budget")};
    rule.components.push_back(std::move(component));
  }
  if (rule.components.empty()) throw SchemaError("rule needs components");
  return rule;
}

RegrowOptions ExperimentConfig::regrow_options() const {
  RegrowOptions options;
  options.rational_count = regrow_rational_count;
  options.q_max = regrow_q_max;
  options.damping_exponent = regrow_damping_exponent;
  options.metric = ball_metric;
  return options;
}

namespace {

json load_ref_or_inline(const json& j, const std::string& base_dir) {
  if (!j.is_string()) return j;
  std::filesystem::path p(j.get<std::string>());
  if (p.is_relative() && !base_dir.empty())
    p = std::filesystem::path(base_dir) / p;
  std::ifstream in(p);
  if (!in) throw SchemaError("cannot open referenced file: " + p.string());
  json out;
  try {
    in >> out;
  } catch (const json::parse_error& e) {
    throw SchemaError("referenced file is not valid JSON: " + p.string());
  }
  return out;
}

}  // namespace

namespace {

ExperimentConfig config_from_json_impl(const nlohmann::json& j,
                                       const std::string& base_dir);

}  // namespace

ExperimentConfig config_from_json(const nlohmann::json& j,
                                  const std::string& base_dir) {
  try {
    return config_from_json_impl(j, base_dir);
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("malformed config value: ") + e.what());
  }
}

namespace {

ExperimentConfig config_from_json_impl(const nlohmann::json& j,
                                       const std::string& base_dir) {
  if (!j.is_object()) throw SchemaError("config must be a JSON object");
  static const std::set<std::string> known = {
      "schema_version", "space",        "null",
      "alternatives",   "alpha",        "trials",
      "horizon",        "seed",         "workers",
      "ball_metric",    "growth_n_max", "growth_trials",
      "record_stride",  "regrow"};
  for (const auto& [key, value] : j.items()) {
    (void)value;
    if (known.find(key) == known.end())
      throw SchemaError("unknown config key: " + key);
  }
  if (j.value("schema_version", 1) != 1)
    throw SchemaError("unsupported schema_version");
  if (!j.contains("space") || !j.contains("null"))
    throw SchemaError("config needs 'space' and 'null'");

  ExperimentConfig config;
  config.space = space_from_json(load_ref_or_inline(j.at("space"), base_dir));
  const json null_doc = load_ref_or_inline(j.at("null"), base_dir);
  NullClass nc = null_class_from_json(null_doc, config.space);
  config.null_generators = nc.generators();
  config.null_hull = nc.hull();

  if (j.contains("alternatives")) {
    const json alts = load_ref_or_inline(j.at("alternatives"), base_dir);
    if (!alts.is_array()) throw SchemaError("'alternatives' must be an array");
    for (const auto& a : alts)
      config.alternatives.push_back(measure_from_json(a, config.space));
  }

  config.alpha = j.value("alpha", 0.05);
  if (!(config.alpha > 0.0 && config.alpha < 1.0))
    throw SchemaError("alpha must lie in (0, 1)");
  config.trials = j.value("trials", 1000);
  config.horizon = j.value("horizon", 200);
  if (config.trials < 1 || config.horizon < 1)
    throw SchemaError("trials and horizon must be positive");
  config.seed = j.value("seed", 1ULL);
  config.workers = j.value("workers", 1);
  if (config.workers < 1) throw SchemaError("workers must be positive");
  const std::string metric = j.value("ball_metric", "tv");
  if (metric != "tv" && metric != "bl")
    throw SchemaError("ball_metric must be 'tv' or 'bl'");
  config.ball_metric = metric == "tv" ? MetricKind::kTv : MetricKind::kBl;
  config.growth_n_max = j.value("growth_n_max", 2000);
  config.growth_trials = j.value("growth_trials", 200);
  config.record_stride = j.value("record_stride", 1);
  if (config.growth_n_max < 1 || config.growth_trials < 1 ||
      config.record_stride < 1)
    throw SchemaError("growth settings must be positive");

  if (j.contains("regrow")) {
    const json& r = j.at("regrow");
    if (!r.is_object()) throw SchemaError("'regrow' must be an object");
    config.regrow_rational_count = r.value("rational_count", 16);
    config.regrow_q_max = r.value("q_max", 8);
    config.regrow_damping_exponent = r.value("damping_exponent", 2.0);
    if (config.regrow_rational_count < 1 || config.regrow_q_max < 1)
      throw SchemaError("regrow counts must be positive");
    if (!(config.regrow_damping_exponent > 0.0))
      throw SchemaError("regrow damping exponent must be positive");
  }
  return config;
}

}  // namespace

ExperimentConfig config_from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot open config file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw SchemaError(std::string("config is not valid JSON: ") + e.what());
  }
  const std::string base = std::filesystem::path(path).parent_path().string();
  return config_from_json(j, base);
}

nlohmann::json config_to_canonical_json(const ExperimentConfig& config) {
  json alternatives = json::array();
  for (const auto& a : config.alternatives)
    alternatives.push_back(vector_to_json(a.weights()));
  json generators = json::array();
  for (const auto& g : config.null_generators)
    generators.push_back(vector_to_json(g.weights()));
  return json{
      {"schema_version", 1},
      {"space", space_to_json(*config.space)},
      {"null", json{{"hull", config.null_hull}, {"generators", generators}}},
      {"alternatives", alternatives},
      {"alpha", config.alpha},
      {"trials", config.trials},
      {"horizon", config.horizon},
      {"seed", config.seed},
      {"ball_metric", metric_kind_name(config.ball_metric)},
      {"growth_n_max", config.growth_n_max},
      {"growth_trials", config.growth_trials},
      {"record_stride", config.record_stride},
      {"regrow", json{{"rational_count", config.regrow_rational_count},
                      {"q_max", config.regrow_q_max},
                      {"damping_exponent", config.regrow_damping_exponent}}}};
}

std::string config_digest(const ExperimentConfig& config) {
  return hex64(fnv1a64(config_to_canonical_json(config).dump()));
}

}  // namespace powerone
