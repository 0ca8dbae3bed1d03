#pragma once

#include <cstdint>
#include <string>

#include <json.hpp>

#include "powerone/eprocess.hpp"
#include "powerone/klinf.hpp"
#include "powerone/null_class.hpp"
#include "powerone/stopping_rules.hpp"

namespace powerone {

/// Shortest round-trip decimal form; stable across runs and platforms with
/// IEEE doubles. "inf", "-inf", "nan" spelled out.
std::string fmt_double(double v);

std::uint64_t fnv1a64(const std::string& text);
std::string hex64(std::uint64_t v);

nlohmann::json space_to_json(const FiniteSpace& space);
SpacePtr space_from_json(const nlohmann::json& j);

/// Standalone measure document {"space": <id>, "weights": [...]}; the id is
/// emitted when nonempty and checked on load when the document carries one.
nlohmann::json measure_to_json(const DiscreteMeasure& m,
                               const std::string& space_id = "");
DiscreteMeasure measure_from_json(const nlohmann::json& j, SpacePtr space,
                                  const std::string& space_id = "");

nlohmann::json null_class_to_json(const NullClass& nc);
NullClass null_class_from_json(const nlohmann::json& j, SpacePtr space);

nlohmann::json ball_to_json(const Ball& ball);
Ball ball_from_json(const nlohmann::json& j, SpacePtr space);

nlohmann::json certificate_to_json(const BallRateCertificate& cert);

nlohmann::json rule_to_json(const StoppingRuleSpec& rule);
StoppingRuleSpec rule_from_json(const nlohmann::json& j, SpacePtr space);

/**
 * One experiment document: space, null class, alternatives, and the knobs
 * shared by the command-line drivers. Loaded from versioned JSON
 * (schema_version 1); unknown keys are rejected so typos fail loudly.
 */
struct ExperimentConfig {
  SpacePtr space;
  std::vector<DiscreteMeasure> null_generators;
  bool null_hull = false;
  std::vector<DiscreteMeasure> alternatives;
  double alpha = 0.05;
  int trials = 1000;
  int horizon = 200;
  std::uint64_t seed = 1;
  int workers = 1;
  MetricKind ball_metric = MetricKind::kTv;
  int growth_n_max = 2000;
  int growth_trials = 200;
  int record_stride = 1;
  int regrow_rational_count = 16;
  int regrow_q_max = 8;
  double regrow_damping_exponent = 2.0;  // experimental knob

  NullClass null_class() const { return NullClass(null_generators, null_hull); }
  RegrowOptions regrow_options() const;
};

ExperimentConfig config_from_json(const nlohmann::json& j,
                                  const std::string& base_dir = "");
ExperimentConfig config_from_file(const std::string& path);

/// Canonical form used for the digest: worker count and any output paths
/// are excluded, so runs at different worker counts share a digest.
nlohmann::json config_to_canonical_json(const ExperimentConfig& config);
std::string config_digest(const ExperimentConfig& config);

}  // namespace powerone
